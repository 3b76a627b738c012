"""Landweber direct sampling: imaging from a (noisy) far-field matrix.

The pipeline is

1. perturb the data, ``F_ij (1 + delta E_ij)`` with ``||E||_2 = 1``;
2. form ``F# = |Re F| + |Im F|`` and its eigensystem;
3. pick the Landweber step ``beta`` and count ``r`` (discrepancy rule);
4. fit ``P(t) = sum_{k=1}^M c_k t^k`` to the filter
   ``Gamma_r(t) = (1 - (1 - beta t)^r) / sqrt(t)`` at a set of nodes;
5. evaluate ``W(z) = ||P(F#) phi_z||^p`` on a grid of sampling points.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .forward import FarFieldMatrix, directions
from .linops import (
    CutoffWarning,
    HermitianEigensystem,
    NumericalFailure,
    cutoff_least_squares,
    hermitian_eig,
    spectral_norm,
)
from .quadrature import gauss_legendre

__all__ = [
    "FSharp",
    "FilterSpec",
    "FilterPolynomial",
    "FitError",
    "ImagingGrid",
    "Reconstruction",
    "NODE_SCHEMES",
    "noise_matrix",
    "add_noise",
    "build_fsharp",
    "gamma_filter",
    "choose_r",
    "interpolation_nodes",
    "fit_polynomial",
    "fit_filter_polynomial",
    "apply_polynomial",
    "phi_z",
    "imaging_value",
    "imaging_grid",
    "reconstruct",
    "write_grid_csv",
    "write_grid_pgm",
]

PSD_TOL = 1e-10
DEFAULT_CUTOFF = 1e-8
DEFAULT_REGION = (-3.0, 3.0, -3.0, 3.0)
DEFAULT_RESOLUTION = 100

NODE_SCHEMES = ("equispaced100", "singular_values", "gauss32")
_SCHEME_ALIASES = {
    "equi": "equispaced100",
    "equispaced": "equispaced100",
    "equispaced100": "equispaced100",
    "sv": "singular_values",
    "singular_values": "singular_values",
    "gauss": "gauss32",
    "gauss32": "gauss32",
}


class FitError(ValueError):
    """Too few usable nodes for the requested polynomial degree."""


def _scheme(name):
    try:
        return _SCHEME_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(
            f"unknown node scheme {name!r}; expected one of {', '.join(NODE_SCHEMES)}"
        ) from None


def _entries(F):
    return F.entries if isinstance(F, FarFieldMatrix) else np.asarray(F, dtype=complex)


# ---------------------------------------------------------------- noise


def noise_matrix(n, seed, norm="spectral"):
    """Complex n x n matrix with Re, Im ~ U[-1, 1], scaled to unit norm.

    ``norm`` is ``"spectral"`` (largest singular value) or ``"frobenius"``.
    """
    rng = np.random.default_rng(seed)
    e = rng.uniform(-1.0, 1.0, (n, n)) + 1j * rng.uniform(-1.0, 1.0, (n, n))
    if norm == "spectral":
        size = spectral_norm(e)
    elif norm == "frobenius":
        size = np.linalg.norm(e)
    else:
        raise ValueError("norm must be 'spectral' or 'frobenius'")
    return e / size


def add_noise(F, delta, seed=0, norm="spectral"):
    """Multiplicative noise ``F_ij (1 + delta E_ij)``; see :func:`noise_matrix`."""
    if not 0.0 <= delta < 1.0:
        raise ValueError("noise level must satisfy 0 <= delta < 1")
    entries = _entries(F)
    k = F.k if isinstance(F, FarFieldMatrix) else None
    if delta == 0.0:
        noisy = entries.copy()
    else:
        noisy = entries * (1.0 + delta * noise_matrix(entries.shape[0], seed, norm))
    return FarFieldMatrix(k, noisy) if k is not None else noisy


# ---------------------------------------------------------------- F#


@dataclass(frozen=True)
class FSharp:
    """The positive semidefinite operator |Re F| + |Im F| and its spectrum.

    ``min_raw`` keeps the smallest eigenvalue before slightly negative
    values (roundoff) were clamped to zero.
    """

    matrix: np.ndarray
    eig: HermitianEigensystem
    min_raw: float

    @property
    def lambda1(self):
        return float(self.eig.eigenvalues[0])

    @property
    def N(self):
        return self.matrix.shape[0]


def _hermitian_abs(h):
    system = hermitian_eig(h)
    q = system.eigenvectors
    return (q * np.abs(system.eigenvalues)) @ q.conj().T


def build_fsharp(F):
    """Assemble F# from a square far-field matrix.

    Raises
    ------
    NumericalFailure
        If the sum has an eigenvalue below ``-1e-10 * lambda1``, which
        cannot happen for a sum of two PSD matrices unless the
        eigensolver went wrong.
    """
    f = _entries(F)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError("F# needs a square matrix")
    re_part = 0.5 * (f + f.conj().T)
    im_part = (f - f.conj().T) / 2j
    total = _hermitian_abs(re_part) + _hermitian_abs(im_part)
    total = 0.5 * (total + total.conj().T)
    system = hermitian_eig(total)
    values = system.eigenvalues
    lam1 = values[0]
    low = float(values[-1])
    if low < -PSD_TOL * max(lam1, 0.0):
        raise NumericalFailure(f"F# is not positive semidefinite (min eigenvalue {low:.3e})")
    clamped = np.where(values < 0.0, 0.0, values)
    return FSharp(total, HermitianEigensystem(clamped, system.eigenvectors), low)


# ---------------------------------------------------------------- filter


def gamma_filter(t, beta, r):
    """Landweber filter (1 - (1 - beta t)^r) / sqrt(t), zero at t = 0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("filter argument must be non-negative")
    flat = np.atleast_1d(t)
    bt = beta * flat
    inner = np.empty_like(flat)
    inside = bt < 1.0
    # expm1/log1p keeps full accuracy when beta*t is small
    inner[inside] = -np.expm1(int(r) * np.log1p(-bt[inside]))
    inner[~inside] = 1.0 - (1.0 - bt[~inside]) ** int(r)
    value = np.zeros_like(flat)
    pos = flat > 0.0
    value[pos] = inner[pos] / np.sqrt(flat[pos])
    return float(value[0]) if t.ndim == 0 else value


def choose_r(lambda1, beta, delta):
    """Iteration count from the discrepancy rule.

    ``r = max(ceil(ln(delta / (beta sqrt(lambda1))) / ln(1 - beta lambda1)), 1)``
    """
    if not lambda1 > 0:
        raise ValueError("lambda1 must be positive")
    if not 0.0 < beta < 1.0 / lambda1:
        raise ValueError("beta must lie in (0, 1/lambda1)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    ratio = math.log(delta / (beta * math.sqrt(lambda1))) / math.log1p(-beta * lambda1)
    # guard against 2.0000000000000004 style roundoff before ceil
    nearest = round(ratio)
    if abs(ratio - nearest) <= 1e-12 * max(1.0, abs(ratio)):
        ratio = nearest
    return max(math.ceil(ratio), 1)


@dataclass(frozen=True)
class FilterSpec:
    """Parameters of the surrogate filter polynomial."""

    beta: float
    r: int
    delta: float
    node_scheme: str = "gauss32"
    degree: int = 4
    cutoff: float = DEFAULT_CUTOFF

    def __post_init__(self):
        object.__setattr__(self, "node_scheme", _scheme(self.node_scheme))
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if int(self.r) < 1:
            raise ValueError("r must be at least 1")
        if int(self.degree) < 1:
            raise ValueError("degree must be at least 1")
        object.__setattr__(self, "r", int(self.r))
        object.__setattr__(self, "degree", int(self.degree))

    @classmethod
    def from_fsharp(cls, fsharp, delta, beta_frac=0.9, node_scheme="gauss32", degree=4,
                    cutoff=DEFAULT_CUTOFF):
        """Default choice ``beta = beta_frac / lambda1`` and ``r`` by :func:`choose_r`."""
        if not 0.0 < beta_frac < 1.0:
            raise ValueError("beta fraction must lie in (0, 1)")
        beta = beta_frac / fsharp.lambda1
        return cls(beta, choose_r(fsharp.lambda1, beta, delta), delta, node_scheme, degree, cutoff)

    def check(self, lambda1):
        if not self.beta < 1.0 / lambda1:
            raise ValueError(f"beta={self.beta:g} violates beta < 1/lambda1 = {1 / lambda1:g}")


def interpolation_nodes(scheme, fsharp, cutoff=DEFAULT_CUTOFF):
    """Nodes on [0, lambda1] for the polynomial fit.

    ``equispaced100``: 100 points including both ends; ``singular_values``:
    the eigenvalues of F# above ``cutoff * lambda1``; ``gauss32``: 32
    Gauss-Legendre points.
    """
    scheme = _scheme(scheme)
    lam1 = fsharp.lambda1 if isinstance(fsharp, FSharp) else float(fsharp)
    if not lam1 > 0:
        raise ValueError("lambda1 must be positive")
    if scheme == "equispaced100":
        return np.linspace(0.0, lam1, 100)
    if scheme == "gauss32":
        x, _ = gauss_legendre(32)
        return lam1 * np.asarray(x)
    if not isinstance(fsharp, FSharp):
        raise TypeError("the singular-value scheme needs the full F# spectrum")
    values = fsharp.eig.eigenvalues
    return values[values > cutoff * lam1].copy()


@dataclass(frozen=True)
class FilterPolynomial:
    """P(t) = sum_k coefficients[k-1] t^k together with how it was built."""

    coefficients: np.ndarray
    nodes: np.ndarray
    node_residual: float
    spec: FilterSpec = None
    lambda1: float = None

    @property
    def degree(self):
        return len(self.coefficients)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        # Horner without constant term
        acc = np.zeros_like(t)
        for c in self.coefficients[::-1]:
            acc = (acc + c) * t
        return float(acc) if acc.ndim == 0 else acc

    def sup_residual(self, upper=None, points=1001):
        """max |P - Gamma_r| on an equispaced grid of [0, upper]."""
        if self.spec is None:
            raise ValueError("polynomial has no filter spec attached")
        upper = self.lambda1 if upper is None else upper
        t = np.linspace(0.0, upper, points)
        return float(np.max(np.abs(self(t) - gamma_filter(t, self.spec.beta, self.spec.r))))


def fit_polynomial(nodes, beta, r, degree, cutoff=DEFAULT_CUTOFF, scale=None):
    """Least-squares fit of sum_{k=1}^M c_k t^k to Gamma_r at ``nodes``.

    Nodes at t <= 0 are dropped.  The Vandermonde matrix is built in the
    scaled variable ``t / scale`` (default: the largest node) so that the
    relative cut-off acts on a well-scaled basis.  Returns
    ``(coefficients, kept_nodes, max_node_residual)``.
    """
    nodes = np.asarray(nodes, dtype=float)
    nodes = nodes[nodes > 0.0]
    if np.unique(nodes).size < degree:
        raise FitError(
            f"{np.unique(nodes).size} distinct nonzero nodes cannot fix {degree} coefficients"
        )
    scale = float(nodes.max()) if scale is None else float(scale)
    powers = np.arange(1, degree + 1)
    vander = (nodes[:, None] / scale) ** powers[None, :]
    target = gamma_filter(nodes, beta, r)
    with warnings.catch_warnings():
        warnings.simplefilter("error", CutoffWarning)
        try:
            scaled = cutoff_least_squares(vander, target, cutoff)
        except CutoffWarning as exc:
            raise FitError(str(exc)) from None
    coefficients = scaled / scale**powers
    residual = float(np.max(np.abs(vander @ scaled - target)))
    return coefficients, nodes, residual


def fit_filter_polynomial(spec, fsharp):
    """Fit P for ``spec`` on the node set drawn from ``fsharp``."""
    lam1 = fsharp.lambda1
    spec.check(lam1)
    nodes = interpolation_nodes(spec.node_scheme, fsharp, spec.cutoff)
    coef, kept, residual = fit_polynomial(
        nodes, spec.beta, spec.r, spec.degree, spec.cutoff, scale=lam1
    )
    return FilterPolynomial(coef, kept, residual, spec, lam1)


def apply_polynomial(fsharp, poly, v):
    """P(F#) v through the stored eigensystem."""
    v = np.asarray(v, dtype=complex)
    if v.shape[0] != fsharp.N:
        raise ValueError(f"vector length {v.shape[0]} does not match F# size {fsharp.N}")
    return fsharp.eig.apply(poly, v)


# ---------------------------------------------------------------- imaging


def phi_z(k, dirs, z):
    """Test vector exp(-i k x_i . z); ``z`` of shape (2,) or (m, 2).

    Returns shape ``(N,)`` for one point and ``(N, m)`` for several.
    """
    dirs = np.asarray(dirs, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.exp(-1j * k * (dirs @ z.T))


def imaging_value(fsharp, poly, k, dirs, z, exponent=4):
    """W(z) = ||P(F#) phi_z||^exponent for a single sampling point."""
    _check_exponent(exponent)
    return float(np.linalg.norm(apply_polynomial(fsharp, poly, phi_z(k, dirs, z))) ** exponent)


def _check_exponent(exponent):
    if exponent not in (2, 4):
        raise ValueError("exponent must be 2 or 4")


@dataclass(frozen=True)
class ImagingGrid:
    """``values[j, i]`` is the indicator at ``(x[i], y[j])``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    @property
    def points(self):
        xx, yy = np.meshgrid(self.x, self.y)
        return np.stack([xx.ravel(), yy.ravel()], axis=-1)

    def normalized(self):
        top = self.values.max()
        return self.values / top if top > 0 else np.zeros_like(self.values)

    def argmax_point(self):
        j, i = np.unravel_index(np.argmax(self.values), self.values.shape)
        return np.array([self.x[i], self.y[j]])


def _grid_axes(region, resolution):
    x0, x1, y0, y1 = (float(v) for v in region)
    if not (x1 > x0 and y1 > y0):
        raise ValueError("grid region must have x0 < x1 and y0 < y1")
    if int(resolution) < 2:
        raise ValueError("grid resolution must be at least 2")
    return np.linspace(x0, x1, int(resolution)), np.linspace(y0, y1, int(resolution))


def imaging_grid(fsharp, poly, k, dirs=None, region=DEFAULT_REGION,
                 resolution=DEFAULT_RESOLUTION, exponent=4, chunk=2048):
    """Indicator on a ``resolution x resolution`` grid over ``region``.

    Because the eigenvectors are orthonormal, ``||P(F#) phi||`` equals
    ``||P(lambda) * (Q^* phi)||`` and the back-transformation is skipped.
    """
    _check_exponent(exponent)
    dirs = directions(fsharp.N) if dirs is None else np.asarray(dirs, dtype=float)
    if len(dirs) != fsharp.N:
        raise ValueError("number of directions does not match F#")
    x, y = _grid_axes(region, resolution)
    xx, yy = np.meshgrid(x, y)
    pts = np.stack([xx.ravel(), yy.ravel()], axis=-1)
    q = fsharp.eig.eigenvectors
    weights = poly(fsharp.eig.eigenvalues)
    out = np.empty(len(pts))
    for lo in range(0, len(pts), chunk):
        coef = q.conj().T @ phi_z(k, dirs, pts[lo : lo + chunk])
        out[lo : lo + chunk] = np.linalg.norm(weights[:, None] * coef, axis=0) ** exponent
    return ImagingGrid(x, y, out.reshape(len(y), len(x)))


@dataclass(frozen=True)
class Reconstruction:
    fsharp: FSharp
    polynomial: FilterPolynomial
    grid: ImagingGrid

    @property
    def beta(self):
        return self.polynomial.spec.beta

    @property
    def r(self):
        return self.polynomial.spec.r


def reconstruct(ff, delta, seed=0, node_scheme="gauss32", degree=4, beta_frac=0.9,
                region=DEFAULT_REGION, resolution=DEFAULT_RESOLUTION, exponent=4,
                noise_norm="spectral", cutoff=DEFAULT_CUTOFF):
    """Noise, F#, parameter choice, fit and grid evaluation in one call.

    For ``delta = 0`` no noise is added and ``r`` is chosen as if
    ``delta`` were ``cutoff``, the smallest level the fit resolves.
    """
    noisy = add_noise(ff, delta, seed, noise_norm)
    fsharp = build_fsharp(noisy)
    if not fsharp.lambda1 > 0:
        raise NumericalFailure("F# vanishes; the data carry no scattering information")
    spec = FilterSpec.from_fsharp(
        fsharp, delta if delta > 0 else cutoff, beta_frac, node_scheme, degree, cutoff
    )
    poly = fit_filter_polynomial(spec, fsharp)
    grid = imaging_grid(fsharp, poly, ff.k, None, region, resolution, exponent)
    return Reconstruction(fsharp, poly, grid)


# ---------------------------------------------------------------- output


def write_grid_csv(path, grid):
    """CSV with header ``x,y,w``; x varies fastest."""
    with open(path, "w") as fh:
        fh.write("x,y,w\n")
        for j, yv in enumerate(grid.y):
            for i, xv in enumerate(grid.x):
                fh.write(f"{xv:.17g},{yv:.17g},{grid.values[j, i]:.17g}\n")


def write_grid_pgm(path, grid):
    """Plain (P2) greymap scaled to 0..255 by the global maximum, y upward."""
    levels = np.rint(255.0 * grid.normalized()).astype(int)[::-1]
    height, width = levels.shape
    with open(path, "w") as fh:
        fh.write(f"P2\n{width} {height}\n255\n")
        for row in levels:
            fh.write(" ".join(str(v) for v in row))
            fh.write("\n")
