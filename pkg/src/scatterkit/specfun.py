"""Cylindrical Bessel and Hankel functions of integer order.

J_p is evaluated by Miller's backward recurrence (normalized with the
Neumann identity ``J_0 + 2 * sum_k J_2k = 1``) and accepts complex
arguments.  Y_0 and Y_1 come from Neumann series in the same table of J
values, and higher orders of Y follow by forward recurrence, which is the
stable direction for Y.  All routines broadcast over numpy arrays.
"""

import numpy as np

__all__ = [
    "MAX_ORDER",
    "MAX_ARGUMENT",
    "UnsupportedOrderError",
    "bessel_j",
    "bessel_y",
    "hankel1",
    "bessel_j_prime",
    "bessel_y_prime",
    "hankel1_prime",
    "spherical_j0",
]

MAX_ORDER = 60
MAX_ARGUMENT = 1.0e4

EULER_GAMMA = 0.57721566490153286061

# below this modulus the ascending series is used instead of Miller
_SERIES_RADIUS = 0.5
_RESCALE = 1.0e150


class UnsupportedOrderError(ValueError):
    """Requested order is outside ``[-MAX_ORDER, MAX_ORDER]``."""


def _check_order(p):
    p = int(p)
    if abs(p) > MAX_ORDER:
        raise UnsupportedOrderError(f"|order| {abs(p)} exceeds supported maximum {MAX_ORDER}")
    return p


def _check_argument(x):
    if np.any(np.abs(x) > MAX_ARGUMENT):
        raise ValueError(f"argument modulus exceeds {MAX_ARGUMENT:g}")


def _series_table(z, nmax):
    """J_0..J_nmax by the ascending series; accurate for |z| <= 1."""
    z = np.asarray(z, dtype=complex)
    table = np.empty((nmax + 1,) + z.shape, dtype=complex)
    q = -0.25 * z * z
    lead = np.ones_like(z)
    for p in range(nmax + 1):
        if p > 0:
            lead = lead * (0.5 * z) / p
        term = lead.copy()
        total = term.copy()
        for m in range(1, 30):
            term = term * q / (m * (m + p))
            total = total + term
        table[p] = total
    return table


def _miller_start(zmax, nmax):
    base = max(float(nmax), zmax)
    start = int(base + 16.0 + 2.0 * np.sqrt(40.0 * max(base, 1.0)))
    return start + (start % 2)


def _miller_table(z, nmax):
    """J_0..J_nmax by normalized backward recurrence; |z| > 0 required."""
    z = np.asarray(z, dtype=complex)
    start = _miller_start(float(np.max(np.abs(z), initial=0.0)), nmax)
    table = np.zeros((nmax + 1,) + z.shape, dtype=complex)
    upper = np.zeros_like(z)
    current = np.full_like(z, 1.0e-30)
    norm = np.zeros_like(z)
    two_over_z = 2.0 / z
    for m in range(start, 0, -1):
        lower = m * two_over_z * current - upper
        upper, current = current, lower
        # current now holds the unnormalized J_{m-1}
        if m - 1 <= nmax:
            table[m - 1] = current
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm = norm + 2.0 * current
        big = np.abs(current) > _RESCALE
        if np.any(big):
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            current = current * scale
            upper = upper * scale
            norm = norm * scale
            if m - 1 <= nmax:
                table[m - 1 :] *= scale
    norm = norm + current
    return table / norm


def _j_table(z, nmax):
    """Array of shape (nmax+1, *z.shape) holding J_0(z)..J_nmax(z)."""
    z = np.asarray(z, dtype=complex)
    table = np.empty((nmax + 1,) + z.shape, dtype=complex)
    small = np.abs(z) <= _SERIES_RADIUS
    if np.any(small):
        table[:, small] = _series_table(z[small], nmax)
    if np.any(~small):
        table[:, ~small] = _miller_table(z[~small], nmax)
    return table


def _as_output(value):
    if np.ndim(value) == 0:
        return complex(value) if np.iscomplexobj(value) else float(value)
    return value


def bessel_j(p, x):
    """Bessel function of the first kind J_p(x) for integer p.

    ``x`` may be real or complex, scalar or array.  Real input gives a
    real result.
    """
    return _bessel_j(_check_order(p), x)


def _bessel_j(p, x):
    x_arr = np.asarray(x)
    _check_argument(x_arr)
    table = _j_table(x_arr, abs(p))
    value = table[abs(p)]
    if p < 0 and p % 2:
        value = -value
    if not np.iscomplexobj(x_arr):
        value = value.real
    return _as_output(value)


def _y01(x):
    """Y_0 and Y_1 for positive real x via Neumann series in J."""
    x = np.asarray(x, dtype=float)
    nmax = _miller_start(float(np.max(x, initial=0.0)), 2) + 2
    jt = _j_table(x, nmax).real
    log_term = np.log(0.5 * x) + EULER_GAMMA
    k = np.arange(1, nmax // 2 + 1)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    even = jt[2 * k]
    shape = (-1,) + (1,) * x.ndim
    y0 = (2.0 / np.pi) * log_term * jt[0] + (4.0 / np.pi) * np.sum(
        (sign / k).reshape(shape) * even, axis=0
    )
    k = np.arange(1, (nmax - 1) // 2 + 1)
    sign = np.where(k % 2 == 1, 1.0, -1.0)
    odd = jt[2 * k + 1]
    coef = sign * (2 * k + 1) / (k * (k + 1.0))
    y1 = (
        -2.0 / (np.pi * x) * jt[0]
        + (2.0 / np.pi) * (log_term - 1.0) * jt[1]
        + (2.0 / np.pi) * np.sum(coef.reshape(shape) * odd, axis=0)
    )
    return y0, y1


def bessel_y(p, x):
    """Bessel function of the second kind Y_p(x), integer p, real x > 0."""
    return _bessel_y(_check_order(p), x)


def _bessel_y(p, x):
    x_arr = np.asarray(x, dtype=float)
    if np.iscomplexobj(x):
        raise TypeError("bessel_y takes real arguments only")
    if np.any(x_arr <= 0.0):
        raise ValueError("bessel_y requires x > 0")
    _check_argument(x_arr)
    y_prev, y_cur = _y01(x_arr)
    order = abs(p)
    if order == 0:
        value = y_prev
    else:
        for m in range(1, order):
            y_prev, y_cur = y_cur, (2.0 * m / x_arr) * y_cur - y_prev
        value = y_cur
    if p < 0 and p % 2:
        value = -value
    return _as_output(value)


def hankel1(p, x):
    """Hankel function of the first kind H_p^(1)(x) = J_p(x) + i Y_p(x), x > 0."""
    return _hankel1(_check_order(p), x)


def _hankel1(p, x):
    return _as_output(np.asarray(_bessel_j(p, x)) + 1j * np.asarray(_bessel_y(p, x)))


def bessel_j_prime(p, x):
    """Derivative J_p'(x) = (J_{p-1}(x) - J_{p+1}(x)) / 2."""
    p = _check_order(p)
    value = 0.5 * (np.asarray(_bessel_j(p - 1, x)) - np.asarray(_bessel_j(p + 1, x)))
    return _as_output(value)


def bessel_y_prime(p, x):
    p = _check_order(p)
    value = 0.5 * (np.asarray(_bessel_y(p - 1, x)) - np.asarray(_bessel_y(p + 1, x)))
    return _as_output(value)


def hankel1_prime(p, x):
    """Derivative of H_p^(1) for real x > 0."""
    p = _check_order(p)
    value = 0.5 * (np.asarray(_hankel1(p - 1, x)) - np.asarray(_hankel1(p + 1, x)))
    return _as_output(value)


def spherical_j0(x):
    """sin(x)/x with the removable singularity filled in (j0(0) = 1)."""
    x_arr = np.asarray(x, dtype=float)
    value = np.sinc(x_arr / np.pi)
    return _as_output(value)
