"""Far-field data for a penetrable scatterer with a conductive boundary.

Both the scattered field outside and the total field inside are written as
single-layer potentials, u^s = SL_k phi and u = SL_{k sqrt(n)} psi.  The
transmission conditions then give the 2x2 block system

    S_{k sqrt n} psi - S_k phi                                  = u^i
    (I/2 + K'_{k sqrt n}) psi + (I/2 - K'_k - eta S_k) phi      = d_nu u^i + eta u^i

which is discretized by collocation with piecewise quadratic,
face-discontinuous elements: the parameter interval is cut into ``nf``
faces and every face carries three nodes, giving ``3 nf`` unknowns per
density.  By default the boundary itself is replaced by its isoparametric
quadratic interpolant, so geometry and density share one approximation
order.  The logarithmic singularity of the kernels on the face that
holds the collocation point is integrated by splitting the face at that
point and applying a -ln(u)-weighted Gauss rule to the log part; faces
that come close to the collocation point are subdivided adaptively.
"""

import cmath
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import special

from .geometry import piecewise_quadratic, sample_curve
from .linops import LUSolver, SingularMatrixError
from .quadrature import gauss_legendre, gauss_log

__all__ = [
    "Medium",
    "Discretization",
    "FarFieldMatrix",
    "ForwardFailure",
    "ScatteringSolver",
    "assemble_single_layer",
    "assemble_adjoint_double_layer",
    "layer_operators",
    "solve_scattering",
    "far_field_row",
    "far_field_matrix",
    "directions",
    "write_far_field",
    "read_far_field",
]

GAUSS_OFFSET = 0.5 * (1.0 - np.sqrt(0.6))
# nodes at h/6, h/2, 5h/6: equally spaced along the whole parameter circle
UNIFORM_OFFSET = 1.0 / 6.0
GEOMETRIES = ("quadratic", "exact")


class ForwardFailure(RuntimeError):
    """The discretized boundary integral system could not be solved."""

    def __init__(self, message, k=None, nf=None):
        super().__init__(message)
        self.k = k
        self.nf = nf


@dataclass(frozen=True)
class Medium:
    """Wavenumber ``k``, refractive index ``n`` and boundary conductivity ``eta``."""

    k: float
    n: complex = 1.0
    eta: complex = 0.0

    def __post_init__(self):
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "n", complex(self.n))
        object.__setattr__(self, "eta", complex(self.eta))
        if not self.k > 0:
            raise ValueError("wavenumber k must be positive")
        if self.n.imag < 0:
            raise ValueError("Im(n) must be non-negative")
        if self.eta.imag < 0:
            raise ValueError("Im(eta) must be non-negative")

    @property
    def interior_wavenumber(self):
        # principal branch: Im(sqrt(n)) >= 0 whenever Im(n) >= 0
        return self.k * cmath.sqrt(self.n)


@dataclass(frozen=True)
class Discretization:
    """Collocation layout: ``nf`` faces with three nodes each.

    ``offset`` places the outer nodes at local positions ``offset`` and
    ``1 - offset`` of every face (the middle node sits at 1/2).  The
    default spaces all ``3 nf`` nodes evenly; :data:`GAUSS_OFFSET` gives
    the 3-point Gauss-Legendre layout instead.  ``geometry`` selects
    whether integrals run over the exact curve or over its quadratic
    interpolant on the same faces.
    """

    nf: int
    offset: float = UNIFORM_OFFSET
    geometry: str = "quadratic"
    quad_order: int = 16
    log_order: int = 12
    near_factor: float = 1.5

    def __post_init__(self):
        if self.nf < 1:
            raise ValueError("need at least one face")
        if not 0.0 < self.offset < 0.5:
            raise ValueError("offset must lie in (0, 1/2)")
        if self.geometry not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}")

    @property
    def h(self):
        return 2.0 * np.pi / self.nf

    @property
    def local_nodes(self):
        return np.array([self.offset, 0.5, 1.0 - self.offset])

    @property
    def nodes(self):
        starts = self.h * np.arange(self.nf)
        return (starts[:, None] + self.h * self.local_nodes[None, :]).ravel()

    def basis(self, s):
        """Quadratic Lagrange basis on one face, shape ``(3, len(s))``."""
        s = np.asarray(s, dtype=float)
        a, b, c = self.local_nodes
        return np.stack(
            [
                (s - b) * (s - c) / ((a - b) * (a - c)),
                (s - a) * (s - c) / ((b - a) * (b - c)),
                (s - a) * (s - b) / ((c - a) * (c - b)),
            ]
        )


@dataclass(frozen=True)
class FarFieldMatrix:
    """``entries[i, j] = u_inf(x_i, y_j)`` on N equispaced directions."""

    k: float
    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("far-field matrix must be square")
        if not np.all(np.isfinite(m)):
            raise ValueError("far-field matrix has non-finite entries")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "k", float(self.k))

    @property
    def N(self):
        return self.entries.shape[0]


def directions(n):
    """Unit vectors at angles 2*pi*(i-1)/n, i = 1..n, shape ``(n, 2)``."""
    theta = 2.0 * np.pi * np.arange(n) / n
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def _kernels(diff, r, normal_x, wavenumber):
    """Single-layer and adjoint double-layer kernels plus their ln(r) parts.

    Returns (s_kernel, k_kernel, s_log, k_log) such that near r = 0
    kernel = log_part * ln(r) + smooth.
    """
    z = wavenumber * r
    h0 = special.hankel1(0, z)
    h1 = special.hankel1(1, z)
    j0 = special.jv(0, z)
    j1 = special.jv(1, z)
    proj = np.sum(diff * normal_x, axis=-1) / r
    s_kernel = 0.25j * h0
    k_kernel = -0.25j * wavenumber * h1 * proj
    s_log = -j0 / (2.0 * np.pi)
    k_log = wavenumber * j1 * proj / (2.0 * np.pi)
    return s_kernel, k_kernel, s_log, k_log


class _Layout:
    """Geometry shared by every assembly on one (curve, discretization)."""

    def __init__(self, curve, disc):
        if disc.geometry == "quadratic":
            curve = piecewise_quadratic(curve, disc.nf)
        self.curve = curve
        self.disc = disc
        self.sample = sample_curve(curve, disc.nodes)
        s, w = gauss_legendre(disc.quad_order)
        self.gs, self.gw = s, w
        starts = disc.h * np.arange(disc.nf)
        tq = starts[:, None] + disc.h * s[None, :]
        flat = tq.ravel()
        self.qpoints = curve.position(flat).reshape(disc.nf, len(s), 2)
        der = curve.derivative(flat).reshape(disc.nf, len(s), 2)
        self.qspeed = np.hypot(der[..., 0], der[..., 1])
        self.qbasis = disc.basis(s)
        # weight * h * speed for each (face, point)
        self.qweight = disc.h * w[None, :] * self.qspeed
        self.face_length = self.qweight.sum(axis=1)

    def near_pairs(self):
        x = self.sample.points
        dist = np.linalg.norm(x[:, None, None, :] - self.qpoints[None], axis=-1).min(axis=2)
        near = dist < self.disc.near_factor * self.face_length[None, :]
        own = np.arange(len(x)) // 3
        near[np.arange(len(x)), own] = False
        return np.argwhere(near)

    def face_points(self, face, s):
        t = self.disc.h * (face + np.asarray(s, dtype=float))
        pts = self.curve.position(t)
        der = self.curve.derivative(t)
        return pts, np.hypot(der[:, 0], der[:, 1])


def _adaptive_pieces(layout, x, face, ratio=1.0, max_depth=24):
    """Partition [0, 1] of a face so that each piece is short compared
    with its distance to ``x``."""
    disc = layout.disc
    probe = np.linspace(0.0, 1.0, 5)
    stack = [(0.0, 1.0, 0)]
    leaves = []
    while stack:
        a, b, depth = stack.pop()
        s = a + (b - a) * probe
        pts, speed = layout.face_points(face, s)
        dist = np.min(np.linalg.norm(pts - x, axis=-1))
        length = disc.h * (b - a) * speed.max()
        if length > ratio * dist and depth < max_depth:
            mid = 0.5 * (a + b)
            stack.append((a, mid, depth + 1))
            stack.append((mid, b, depth + 1))
        else:
            leaves.append((a, b))
    return leaves


def _piece_rule(pieces, s_rule, w_rule):
    a = np.array([p[0] for p in pieces])
    b = np.array([p[1] for p in pieces])
    s = (a[:, None] + (b - a)[:, None] * s_rule[None, :]).ravel()
    w = ((b - a)[:, None] * w_rule[None, :]).ravel()
    return s, w


def layer_operators(curve, disc, wavenumber, layout=None):
    """Collocation matrices of S and K' for one wavenumber.

    Returns ``(S, Kp)``, both of shape ``(3 nf, 3 nf)``; column
    ``3 j + m`` belongs to basis function ``m`` on face ``j``.
    """
    layout = layout or _Layout(curve, disc)
    wavenumber = complex(wavenumber)
    smp = layout.sample
    nc = len(smp)
    nf = disc.nf

    # regular quadrature for every (collocation point, face) pair
    diff = smp.points[:, None, None, :] - layout.qpoints[None]
    r = np.linalg.norm(diff, axis=-1)
    # own-face entries may hit r = 0 here; they are recomputed below
    with np.errstate(invalid="ignore", divide="ignore"):
        sk, kk, _, _ = _kernels(diff, r, smp.normal[:, None, None, :], wavenumber)
    weight = layout.qweight[None] * np.ones((nc, 1, 1))
    s_mat = np.einsum("ijg,mg,ijg->ijm", sk, layout.qbasis, weight).reshape(nc, 3 * nf)
    k_mat = np.einsum("ijg,mg,ijg->ijm", kk, layout.qbasis, weight).reshape(nc, 3 * nf)

    gs, gw = layout.gs, layout.gw

    # nearly singular pairs: adaptive subdivision of the face
    for i, face in layout.near_pairs():
        x, nu = smp.points[i], smp.normal[i]
        pieces = _adaptive_pieces(layout, x, face)
        s, w = _piece_rule(pieces, gs, gw)
        pts, speed = layout.face_points(face, s)
        d = x - pts
        rr = np.linalg.norm(d, axis=-1)
        a_s, a_k, _, _ = _kernels(d, rr, nu, wavenumber)
        ww = disc.h * w * speed * disc.basis(s)
        cols = slice(3 * face, 3 * face + 3)
        s_mat[i, cols] = ww @ a_s
        k_mat[i, cols] = ww @ a_k

    # the face holding the collocation point: split there, log part by
    # the -ln(u) weighted rule, remainder by Gauss-Legendre
    lu, lw = gauss_log(disc.log_order)
    local = disc.local_nodes
    for i in range(nc):
        face, m = divmod(i, 3)
        si = local[m]
        x, nu = smp.points[i], smp.normal[i]
        s_row = np.zeros(3, dtype=complex)
        k_row = np.zeros(3, dtype=complex)
        for length, direction in ((1.0 - si, 1.0), (si, -1.0)):
            if length <= 0.0:
                continue
            # u in (0, 1] measures distance from the collocation point
            for u_nodes, u_weights, log_rule in ((gs, gw, False), (lu, lw, True)):
                s = si + direction * length * u_nodes
                pts, speed = layout.face_points(face, s)
                if disc.geometry == "quadratic":
                    # on a quadratic arc x(a) - x(b) = (a - b) x'((a + b) / 2)
                    # exactly, which avoids cancellation as b -> a
                    mid = disc.h * (face + 0.5 * (si + s))
                    d = (disc.h * (si - s))[:, None] * layout.curve.derivative(mid)
                else:
                    d = x - pts
                rr = np.linalg.norm(d, axis=-1)
                ker_s, ker_k, log_s, log_k = _kernels(d, rr, nu, wavenumber)
                jac = disc.h * length * speed * disc.basis(s)
                if log_rule:
                    # int A(u) ln(u) du = -sum w A(u)
                    s_row -= jac @ (u_weights * log_s)
                    k_row -= jac @ (u_weights * log_k)
                else:
                    ln_u = np.log(u_nodes)
                    s_row += jac @ (u_weights * (ker_s - log_s * ln_u))
                    k_row += jac @ (u_weights * (ker_k - log_k * ln_u))
        s_mat[i, 3 * face : 3 * face + 3] = s_row
        k_mat[i, 3 * face : 3 * face + 3] = k_row
    return s_mat, k_mat


def assemble_single_layer(curve, disc, wavenumber):
    """Collocation matrix of the single-layer operator S_kappa."""
    return layer_operators(curve, disc, wavenumber)[0]


def assemble_adjoint_double_layer(curve, disc, wavenumber):
    """Collocation matrix of the normal-derivative operator K'_kappa."""
    return layer_operators(curve, disc, wavenumber)[1]


class ScatteringSolver:
    """Assembled and factored block system for one curve, medium and mesh.

    The factorization is computed once and reused for every incident
    direction.
    """

    def __init__(self, curve, medium, disc):
        self.curve = curve
        self.medium = medium
        self.disc = disc
        self.layout = _Layout(curve, disc)
        k = medium.k
        s_in, k_in = layer_operators(curve, disc, medium.interior_wavenumber, self.layout)
        s_out, k_out = layer_operators(curve, disc, k, self.layout)
        nc = 3 * disc.nf
        eye = np.eye(nc)
        self.matrix = np.block(
            [
                [s_in, -s_out],
                [0.5 * eye + k_in, 0.5 * eye - k_out - medium.eta * s_out],
            ]
        )
        try:
            self._lu = LUSolver(self.matrix)
        except SingularMatrixError as exc:
            raise ForwardFailure(
                f"boundary integral system is singular (k={k:g}, nf={disc.nf})", k, disc.nf
            ) from exc

    @property
    def sample(self):
        return self.layout.sample

    @property
    def pivot_ratio(self):
        return self._lu.pivot_ratio

    def right_hand_side(self, incident_dirs):
        """Stacked (u^i, d_nu u^i + eta u^i) at the nodes, one column per direction."""
        dirs = np.atleast_2d(np.asarray(incident_dirs, dtype=float))
        k, eta = self.medium.k, self.medium.eta
        smp = self.sample
        ui = np.exp(1j * k * smp.points @ dirs.T)
        dnu = 1j * k * (smp.normal @ dirs.T) * ui
        return np.vstack([ui, dnu + eta * ui])

    def densities(self, incident_dirs):
        """Solve for (psi, phi); arrays of shape ``(3 nf, m)``."""
        rhs = self.right_hand_side(incident_dirs)
        sol = self._lu(rhs)
        if not np.all(np.isfinite(sol)):
            raise ForwardFailure("non-finite densities", self.medium.k, self.disc.nf)
        nc = 3 * self.disc.nf
        return sol[:nc], sol[nc:]

    def residual(self, incident_dirs):
        rhs = self.right_hand_side(incident_dirs)
        sol = self._lu(rhs)
        return np.linalg.norm(self.matrix @ sol - rhs) / (
            np.linalg.norm(self.matrix, 2) * np.linalg.norm(sol)
        )

    @cached_property
    def _far_basis(self):
        lay = self.layout
        nf = self.disc.nf
        pts = lay.qpoints.reshape(-1, 2)
        wb = (lay.qweight[:, None, :] * lay.qbasis[None, :, :]).reshape(3 * nf, -1)
        return pts, wb

    def far_field_operator(self, obs_dirs):
        """Matrix mapping the exterior density to far-field values."""
        pts, wb = self._far_basis
        nf = self.disc.nf
        dirs = np.atleast_2d(np.asarray(obs_dirs, dtype=float))
        phase = np.exp(-1j * self.medium.k * dirs @ pts.T).reshape(len(dirs), nf, -1)
        return np.einsum("ojg,jmg->ojm", phase, wb.reshape(nf, 3, -1)).reshape(len(dirs), 3 * nf)


def solve_scattering(curve, medium, disc, incident_dir):
    """Densities (psi, phi) for a single incident direction."""
    solver = ScatteringSolver(curve, medium, disc)
    psi, phi = solver.densities(incident_dir)
    return psi[:, 0], phi[:, 0]


def far_field_row(phi, curve, disc, k, obs_dirs):
    """u_inf(x) = int exp(-i k x.y) phi(y) ds(y) for each observation direction."""
    layout = _Layout(curve, disc)
    nf = disc.nf
    pts = layout.qpoints.reshape(-1, 2)
    dirs = np.atleast_2d(np.asarray(obs_dirs, dtype=float))
    phase = np.exp(-1j * k * dirs @ pts.T).reshape(len(dirs), nf, -1)
    vals = np.asarray(phi).reshape(nf, 3) @ layout.qbasis  # (nf, q)
    return np.einsum("ojg,jg->o", phase, vals * layout.qweight)


def far_field_matrix(curve, medium, disc, n_dirs=64, solver=None):
    """N x N far-field matrix on equispaced incident/observation directions."""
    if n_dirs < 2:
        raise ValueError("need at least two directions")
    solver = solver or ScatteringSolver(curve, medium, disc)
    dirs = directions(n_dirs)
    _, phi = solver.densities(dirs)
    return FarFieldMatrix(medium.k, solver.far_field_operator(dirs) @ phi)


def write_far_field(path, ff):
    """Write the versioned text format (``ffmat 1``)."""
    with open(path, "w") as fh:
        fh.write("ffmat 1\n")
        fh.write(f"k {ff.k:.17g}\n")
        fh.write(f"N {ff.N}\n")
        for row in ff.entries:
            fh.write(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
            fh.write("\n")


def read_far_field(path):
    """Parse a file written by :func:`write_far_field`."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0].split() != ["ffmat", "1"]:
        raise ValueError(f"{path}: not an 'ffmat 1' file")
    try:
        key, k = lines[1].split()
        key2, n = lines[2].split()
        if key != "k" or key2 != "N":
            raise ValueError
        k = float(k)
        n = int(n)
    except (IndexError, ValueError):
        raise ValueError(f"{path}: malformed header") from None
    rows = lines[3:]
    if len(rows) != n:
        raise ValueError(f"{path}: expected {n} rows, found {len(rows)}")
    entries = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        cells = row.split()
        if len(cells) != n:
            raise ValueError(f"{path}: row {i + 1} has {len(cells)} entries, expected {n}")
        for j, cell in enumerate(cells):
            re, im = cell.split(",")
            entries[i, j] = complex(float(re), float(im))
    return FarFieldMatrix(k, entries)
