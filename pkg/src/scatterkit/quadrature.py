"""Gauss rules on [0, 1]: plain Legendre and logarithmically weighted."""

from functools import lru_cache
from math import comb

import numpy as np

__all__ = ["gauss_legendre", "gauss_log", "gauss_nodes_interval"]


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Nodes and weights of the n-point Gauss-Legendre rule on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_nodes_interval(n, a, b):
    """Gauss-Legendre nodes mapped affinely onto [a, b]."""
    x, _ = gauss_legendre(n)
    return a + (b - a) * x


def _log_moments(count):
    # int_0^1 -ln(u) P*_j(u) du for shifted Legendre P*_j, rescaled to the
    # monic family; the unscaled values are 1 and (-1)^j / (j (j+1))
    j = np.arange(count)
    raw = np.empty(count)
    raw[0] = 1.0
    raw[1:] = (-1.0) ** j[1:] / (j[1:] * (j[1:] + 1.0))
    lead = np.array([float(comb(2 * m, m)) for m in j])
    return raw / lead


@lru_cache(maxsize=None)
def gauss_log(n):
    """n-point Gauss rule for the weight -ln(u) on (0, 1].

    Returns nodes ``u`` and weights ``w`` with
    ``sum(w * f(u)) ~= -int_0^1 f(u) ln(u) du``, exact for polynomials of
    degree < 2n.  Built with the modified Chebyshev algorithm against the
    monic shifted Legendre family, whose recurrence is well conditioned.
    """
    from .linops import symmetric_tridiagonal_eig

    m = _log_moments(2 * n)
    k = np.arange(2 * n)
    a = np.full(2 * n, 0.5)
    b = np.where(k > 0, k**2 / (4.0 * (4.0 * k**2 - 1.0)), 0.0)

    alpha = np.zeros(n)
    beta = np.zeros(n)
    sig_prev = np.zeros(2 * n + 1)
    sig = np.zeros(2 * n + 1)
    sig[: 2 * n] = m
    alpha[0] = a[0] + m[1] / m[0]
    beta[0] = m[0]
    for kk in range(1, n):
        new = np.zeros(2 * n + 1)
        for ell in range(kk, 2 * n - kk):
            new[ell] = (
                sig[ell + 1]
                - (alpha[kk - 1] - a[ell]) * sig[ell]
                - beta[kk - 1] * sig_prev[ell]
                + b[ell] * sig[ell - 1]
            )
        alpha[kk] = a[kk] + new[kk + 1] / new[kk] - sig[kk] / sig[kk - 1]
        beta[kk] = new[kk] / sig[kk - 1]
        sig_prev, sig = sig, new
    nodes, vecs = symmetric_tridiagonal_eig(alpha, np.sqrt(beta[1:]))
    weights = beta[0] * vecs[0] ** 2
    order = np.argsort(nodes)
    u, w = nodes[order], weights[order]
    u.setflags(write=False)
    w.setflags(write=False)
    return u, w
