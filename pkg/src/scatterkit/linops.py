"""Dense complex linear algebra for the small systems in this package.

Hermitian eigendecomposition uses cyclic Jacobi rotations applied in
round-robin order, so each round updates n/2 disjoint index pairs with a
single vectorized step.  Least squares with spectral cut-off goes through
a one-sided (Hestenes) Jacobi SVD.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "NumericalFailure",
    "SingularMatrixError",
    "CutoffWarning",
    "HermitianEigensystem",
    "hermitian_eig",
    "symmetric_tridiagonal_eig",
    "LUSolver",
    "solve",
    "jacobi_svd",
    "cutoff_least_squares",
    "spectral_norm",
]


class NumericalFailure(RuntimeError):
    """An iterative routine did not converge."""


class SingularMatrixError(NumericalFailure):
    """Elimination met a numerically zero pivot."""


class CutoffWarning(UserWarning):
    """Every singular value fell below the cut-off."""


@dataclass(frozen=True)
class HermitianEigensystem:
    """Eigenvalues in descending order and matching unitary eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.conj().T

    def apply(self, func, v):
        """Return f(A) v computed through the spectral decomposition."""
        q = self.eigenvectors
        coef = q.conj().T @ v
        weights = func(self.eigenvalues)
        if coef.ndim == 1:
            return q @ (weights * coef)
        return q @ (weights[:, None] * coef)


def _round_robin(n):
    """Rounds of disjoint pairs covering every (p, q), p < q, exactly once."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            p, q = players[i], players[m - 1 - i]
            if p < n and q < n:
                pairs.append((min(p, q), max(p, q)))
        if pairs:
            arr = np.array(pairs)
            rounds.append((arr[:, 0], arr[:, 1]))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(a):
    off = a - np.diag(np.diag(a))
    return np.linalg.norm(off)


def hermitian_eig(a, tol=1e-13, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    The input is symmetrized as (A + A^*)/2 first.  Sweeps continue until
    the off-diagonal Frobenius norm is below ``tol * ||A||_F``.

    Raises
    ------
    NumericalFailure
        If ``max_sweeps`` sweeps do not reach the tolerance.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("hermitian_eig needs a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    n = a.shape[0]
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return _sorted_system(np.real(np.diag(a)).copy(), v)
    rounds = _round_robin(n)
    for _ in range(max_sweeps):
        if _off_norm(a) <= tol * scale:
            break
        for p, q in rounds:
            apq = a[p, q]
            mag = np.abs(apq)
            active = mag > 0.0
            safe = np.where(active, mag, 1.0)
            phase = np.where(active, apq / safe, 1.0)
            tau = (a[q, q].real - a[p, p].real) / (2.0 * safe)
            sgn = np.where(tau >= 0.0, 1.0, -1.0)
            t = np.where(active, sgn / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            ph = phase.conj()

            col_p, col_q = a[:, p], a[:, q]
            a[:, p] = c * col_p - s * ph * col_q
            a[:, q] = s * col_p + c * ph * col_q
            row_p, row_q = a[p, :], a[q, :]
            a[p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
            a[q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p], v[:, q]
            v[:, p] = c * vp - s * ph * vq
            v[:, q] = s * vp + c * ph * vq
        idx = np.arange(n)
        a[idx, idx] = a[idx, idx].real
    else:
        if _off_norm(a) > tol * scale:
            raise NumericalFailure(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")
    return _sorted_system(np.real(np.diag(a)).copy(), v)


def _sorted_system(values, vectors):
    order = np.argsort(values, kind="stable")[::-1]
    return HermitianEigensystem(values[order], vectors[:, order])


def symmetric_tridiagonal_eig(diag, off):
    """Eigenpairs of the real symmetric tridiagonal matrix (descending)."""
    n = len(diag)
    t = np.diag(np.asarray(diag, dtype=float))
    if n > 1:
        t += np.diag(off, 1) + np.diag(off, -1)
    system = hermitian_eig(t)
    vecs = system.eigenvectors
    # a real symmetric problem admits real eigenvectors; remove the phases
    pivot = vecs[np.argmax(np.abs(vecs), axis=0), np.arange(n)]
    vecs = (vecs * (np.abs(pivot) / pivot)).real
    return system.eigenvalues, vecs


class LUSolver:
    """Partial-pivoting LU factorization reused across right-hand sides.

    Raises :class:`SingularMatrixError` when the smallest pivot is below
    ``singular_tol`` times the largest; warns when the pivot ratio suggests
    a condition number above 1e14.
    """

    def __init__(self, a, singular_tol=1e-15):
        a = np.asarray(a)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("solve needs a square matrix")
        with warnings.catch_warnings():
            # exact zero pivots are reported below as SingularMatrixError
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu, self.piv = scipy.linalg.lu_factor(a, check_finite=True)
        pivots = np.abs(np.diag(self.lu))
        biggest = pivots.max(initial=0.0)
        if biggest == 0.0 or pivots.min() <= singular_tol * biggest:
            raise SingularMatrixError("matrix is numerically singular")
        self.pivot_ratio = pivots.min() / biggest
        if self.pivot_ratio < 1e-14:
            warnings.warn(f"ill-conditioned system (pivot ratio {self.pivot_ratio:.2e})")

    def __call__(self, b):
        return scipy.linalg.lu_solve((self.lu, self.piv), b)


def solve(a, b):
    """Solve A X = B by partial-pivoted elimination."""
    return LUSolver(a)(b)


def _rotate_pair(gram_pq, gram_pp, gram_qq):
    mag = abs(gram_pq)
    phase = gram_pq / mag
    tau = (gram_qq - gram_pp) / (2.0 * mag)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    return c, t * c, phase


def jacobi_svd(a, tol=1e-15, max_sweeps=80):
    """Thin SVD ``a = U diag(s) Vh`` by one-sided Jacobi rotations.

    Works on the columns of ``a`` (transposing when it is wide).  Singular
    values are returned in descending order.
    """
    a = np.array(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError("jacobi_svd needs a matrix")
    if a.shape[0] < a.shape[1]:
        u, s, vh = jacobi_svd(a.conj().T, tol, max_sweeps)
        return vh.conj().T, s, u.conj().T
    n = a.shape[1]
    w = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = np.vdot(a[:, p], a[:, p]).real
                beta = np.vdot(a[:, q], a[:, q]).real
                gamma = np.vdot(a[:, p], a[:, q])
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or abs(gamma) == 0.0:
                    continue
                rotated = True
                c, s, phase = _rotate_pair(gamma, alpha, beta)
                ph = np.conj(phase)
                ap, aq = a[:, p].copy(), a[:, q]
                a[:, p] = c * ap - s * ph * aq
                a[:, q] = s * ap + c * ph * aq
                wp, wq = w[:, p].copy(), w[:, q]
                w[:, p] = c * wp - s * ph * wq
                w[:, q] = s * wp + c * ph * wq
        if not rotated:
            break
    else:
        raise NumericalFailure("one-sided Jacobi SVD did not converge")
    s = np.linalg.norm(a, axis=0)
    order = np.argsort(s, kind="stable")[::-1]
    s = s[order]
    a = a[:, order]
    w = w[:, order]
    u = np.zeros_like(a)
    nz = s > 0
    u[:, nz] = a[:, nz] / s[nz]
    return u, s, w.conj().T


def cutoff_least_squares(v, y, cutoff=1e-8):
    """Minimum-norm least-squares solution with relative spectral cut-off.

    Singular values below ``cutoff`` times the largest one are discarded.
    If nothing survives the zero vector is returned with a
    :class:`CutoffWarning`.
    """
    v = np.asarray(v)
    y = np.asarray(y)
    if v.ndim != 2 or v.shape[0] < v.shape[1]:
        raise ValueError("cutoff_least_squares needs a tall matrix (rows >= cols)")
    u, s, vh = jacobi_svd(v)
    smax = s[0] if s.size else 0.0
    keep = s > cutoff * smax if smax > 0 else np.zeros_like(s, dtype=bool)
    if not np.any(keep):
        warnings.warn("all singular values below cut-off; returning zero", CutoffWarning)
        return np.zeros(v.shape[1], dtype=np.result_type(v, y, float))
    coef = (u[:, keep].conj().T @ y) / s[keep]
    x = vh[keep].conj().T @ coef
    if not (np.iscomplexobj(v) or np.iscomplexobj(y)):
        x = x.real
    return x


def spectral_norm(a, rtol=1e-12, max_iter=10000):
    """Largest singular value by power iteration on A^* A."""
    a = np.asarray(a, dtype=complex)
    if not np.any(a):
        return 0.0
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(max_iter):
        y = a.conj().T @ (a @ x)
        new = np.sqrt(np.vdot(x, y).real)
        norm_y = np.linalg.norm(y)
        if norm_y == 0.0:
            return 0.0
        x = y / norm_y
        if abs(new - estimate) <= rtol * new:
            # one more Rayleigh step on the refined vector
            return float(np.linalg.norm(a @ x))
        estimate = new
    return float(np.linalg.norm(a @ x))
