"""Separation-of-variables far field for a disk with conductive boundary.

With u^s = sum i^p a_p H_p(kr) e^{ip(theta-phi)} outside and
u = sum i^p b_p J_p(k sqrt(n) r) e^{ip(theta-phi)} inside, the two
boundary conditions at r = R give a 2x2 system per mode; Cramer's rule
yields a_p, and the far field is (4/i) sum a_p e^{ip(theta-phi)}.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .forward import FarFieldMatrix, Medium
from .linops import spectral_norm

__all__ = [
    "DiskScatterer",
    "ResonanceError",
    "TruncationError",
    "mie_coefficient",
    "select_pmax",
    "far_field_series",
    "disk_far_field_matrix",
    "table1_error",
    "PMAX_CAP",
]

PMAX_CAP = 60
TAIL_TOL = 1e-15


class ResonanceError(ArithmeticError):
    """The mode determinant vanishes (k is a resonance of the disk problem)."""

    def __init__(self, p, k):
        super().__init__(f"vanishing mode determinant at p={p}, k={k:g}")
        self.p = p
        self.k = k


class TruncationError(ArithmeticError):
    """The mode series did not settle below the order cap."""


@dataclass(frozen=True)
class DiskScatterer:
    radius: float
    medium: Medium

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")


def mie_coefficient(p, disk):
    """Exterior mode coefficient a_p."""
    med = disk.medium
    k, eta, R = med.k, med.eta, disk.radius
    kn = med.interior_wavenumber
    p = abs(int(p))  # a_{-p} = a_p
    jp = specfun.bessel_j(p, k * R)
    jp_d = specfun.bessel_j_prime(p, k * R)
    hp = specfun.hankel1(p, k * R)
    hp_d = specfun.hankel1_prime(p, k * R)
    jn = specfun.bessel_j(p, complex(kn * R))
    jn_d = specfun.bessel_j_prime(p, complex(kn * R))
    num = kn * jp * jn_d - jn * (k * jp_d + eta * jp)
    term_a = kn * hp * jn_d
    term_b = jn * (k * hp_d + eta * hp)
    den = term_a - term_b
    if abs(den) <= 1e-13 * (abs(term_a) + abs(term_b)) or den == 0:
        raise ResonanceError(p, k)
    return -num / den


def select_pmax(disk):
    """Smallest order (from ceil(kR)+20 in steps of 10, cap 60) at which
    the last three coefficients are below 1e-15."""
    pmax = math.ceil(disk.medium.k * disk.radius) + 20
    while True:
        pmax = min(pmax, PMAX_CAP)
        tail = [abs(mie_coefficient(p, disk)) for p in (pmax - 2, pmax - 1, pmax)]
        if max(tail) < TAIL_TOL:
            return pmax
        if pmax >= PMAX_CAP:
            raise TruncationError(
                f"mode coefficients still {max(tail):.2e} at the order cap {PMAX_CAP}"
            )
        pmax += 10


def _coefficients(disk, pmax):
    return np.array([mie_coefficient(p, disk) for p in range(pmax + 1)])


def far_field_series(disk, obs_angle, inc_angle, pmax=None):
    """u_inf for observation angle theta and incidence angle phi.

    Angles may be arrays (broadcast together).
    """
    pmax = select_pmax(disk) if pmax is None else int(pmax)
    if pmax > PMAX_CAP:
        raise TruncationError(f"pmax {pmax} above cap {PMAX_CAP}")
    a = _coefficients(disk, pmax)
    return _series(a, np.subtract(obs_angle, inc_angle))


def _series(a, diff):
    diff = np.asarray(diff, dtype=float)
    p = np.arange(1, len(a))
    # a_{-p} = a_p folds the sum into a cosine series
    total = a[0] + 2.0 * np.tensordot(np.cos(np.multiply.outer(diff, p)), a[1:], axes=([-1], [0]))
    value = -4j * total
    return complex(value) if value.ndim == 0 else value


def disk_far_field_matrix(disk, n_dirs=64, pmax=None):
    """Analytic far-field matrix on the equispaced direction grid."""
    pmax = select_pmax(disk) if pmax is None else int(pmax)
    a = _coefficients(disk, pmax)
    theta = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    return FarFieldMatrix(disk.medium.k, _series(a, np.subtract.outer(theta, theta)))


def table1_error(ff, disk, analytic=None):
    """Spectral-norm distance between a computed and the analytic matrix."""
    if not math.isclose(ff.k, disk.medium.k, rel_tol=1e-12):
        raise ValueError(f"wavenumber mismatch: {ff.k} vs {disk.medium.k}")
    if analytic is None:
        analytic = disk_far_field_matrix(disk, ff.N)
    if analytic.N != ff.N:
        raise ValueError(f"direction count mismatch: {ff.N} vs {analytic.N}")
    return spectral_norm(ff.entries - analytic.entries)
