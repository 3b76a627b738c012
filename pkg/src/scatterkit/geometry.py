"""Smooth closed boundary curves given by 2*pi-periodic parametrizations."""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "BoundaryCurve",
    "CurveSample",
    "DegenerateCurveError",
    "preset_curve",
    "fourier_curve",
    "read_fourier_curve",
    "sample_curve",
    "point_in_region",
    "signed_area",
    "is_simple",
    "distance_to_region",
    "piecewise_quadratic",
    "PRESETS",
]

CHECK_POINTS = 512

PRESETS = ("circle", "kite", "peanut")


class DegenerateCurveError(ValueError):
    """Curve has a vanishing tangent or intersects itself."""


ParamMap = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class BoundaryCurve:
    """A closed C^2 curve t -> (x(t), y(t)), t in [0, 2*pi).

    Each map takes an array of parameters of shape ``(m,)`` and returns an
    array of shape ``(m, 2)``.
    """

    position: ParamMap
    derivative: ParamMap
    second_derivative: ParamMap
    name: str = "curve"
    orientation: float = field(default=0.0)

    def __post_init__(self):
        if self.orientation == 0.0:
            area = signed_area(self)
            if area == 0.0:
                raise DegenerateCurveError(f"{self.name}: zero enclosed area")
            object.__setattr__(self, "orientation", float(np.sign(area)))

    def polygon(self, n=CHECK_POINTS):
        t = 2.0 * np.pi * np.arange(n) / n
        return self.position(t)


@dataclass(frozen=True)
class CurveSample:
    """Boundary data at a list of parameter values.

    ``normal`` is the unit outward normal, ``speed`` is |x'(t)| and
    ``curvature`` the signed curvature (positive for convex arcs of a
    positively oriented curve).
    """

    t: np.ndarray
    points: np.ndarray
    tangent: np.ndarray
    normal: np.ndarray
    speed: np.ndarray
    curvature: np.ndarray

    def __len__(self):
        return len(self.t)


def _circle(radius):
    if radius <= 0:
        raise ValueError("circle radius must be positive")

    def pos(t):
        t = np.asarray(t, dtype=float)
        return np.stack([radius * np.cos(t), radius * np.sin(t)], axis=-1)

    def der(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-radius * np.sin(t), radius * np.cos(t)], axis=-1)

    def der2(t):
        return -pos(t)

    return BoundaryCurve(pos, der, der2, name=f"circle({radius:g})")


def _kite():
    def pos(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-1.5 * np.sin(t), np.cos(t) + 0.65 * np.cos(2 * t) - 0.65], axis=-1)

    def der(t):
        t = np.asarray(t, dtype=float)
        return np.stack([-1.5 * np.cos(t), -np.sin(t) - 1.3 * np.sin(2 * t)], axis=-1)

    def der2(t):
        t = np.asarray(t, dtype=float)
        return np.stack([1.5 * np.sin(t), -np.cos(t) - 2.6 * np.cos(2 * t)], axis=-1)

    return BoundaryCurve(pos, der, der2, name="kite")


def _peanut():
    # rho(t) = 2 sqrt(sin^2/2 + cos^2/10) = sqrt(g), g = 1.2 - 0.8 cos 2t
    def radial(t):
        t = np.asarray(t, dtype=float)
        g = 1.2 - 0.8 * np.cos(2 * t)
        g1 = 1.6 * np.sin(2 * t)
        g2 = 3.2 * np.cos(2 * t)
        rho = np.sqrt(g)
        rho1 = g1 / (2 * rho)
        rho2 = g2 / (2 * rho) - g1**2 / (4 * g * rho)
        return t, rho, rho1, rho2

    def pos(t):
        t, rho, _, _ = radial(t)
        return np.stack([rho * np.cos(t), rho * np.sin(t)], axis=-1)

    def der(t):
        t, rho, rho1, _ = radial(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack([rho1 * c - rho * s, rho1 * s + rho * c], axis=-1)

    def der2(t):
        t, rho, rho1, rho2 = radial(t)
        c, s = np.cos(t), np.sin(t)
        return np.stack(
            [rho2 * c - 2 * rho1 * s - rho * c, rho2 * s + 2 * rho1 * c - rho * s], axis=-1
        )

    return BoundaryCurve(pos, der, der2, name="peanut")


def preset_curve(name, radius=1.0):
    """Return one of the preset shapes: ``circle``, ``kite`` or ``peanut``.

    >>> preset_curve("kite").position(np.array([np.pi / 2])).round(12)
    array([[-1.5, -1.3]])
    """
    key = name.strip().lower()
    if key == "circle":
        return _circle(float(radius))
    if key == "kite":
        return _kite()
    if key == "peanut":
        return _peanut()
    raise ValueError(f"unknown shape {name!r}; expected one of {', '.join(PRESETS)}")


def fourier_curve(x_coeffs, y_coeffs, name="fourier"):
    """Curve from truncated trigonometric series.

    Coefficient lists are ``[a0, a1, b1, a2, b2, ...]`` so that
    x(t) = a0 + sum_m a_m cos(mt) + b_m sin(mt).
    """

    def unpack(coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.size == 0 or coeffs.size % 2 == 0:
            raise ValueError("coefficient list must have odd length: a0 a1 b1 a2 b2 ...")
        return coeffs[0], coeffs[1::2], coeffs[2::2]

    xa0, xa, xb = unpack(x_coeffs)
    ya0, ya, yb = unpack(y_coeffs)

    def series(a0, a, b, t, order):
        t = np.asarray(t, dtype=float)
        m = np.arange(1, len(a) + 1)
        mt = np.outer(t, m)
        cos, sin = np.cos(mt), np.sin(mt)
        if order == 0:
            return a0 + cos @ a + sin @ b
        if order == 1:
            return (-sin * m) @ a + (cos * m) @ b
        return (-cos * m**2) @ a + (-sin * m**2) @ b

    def make(order):
        return lambda t: np.stack(
            [series(xa0, xa, xb, t, order), series(ya0, ya, yb, t, order)], axis=-1
        )

    curve = BoundaryCurve(make(0), make(1), make(2), name=name)
    if not is_simple(curve):
        raise DegenerateCurveError(f"{name}: curve intersects itself")
    return curve


def read_fourier_curve(path):
    """Parse a curve file with lines ``x: a0 a1 b1 ...`` and ``y: ...``."""
    coeffs = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, rest = line.partition(":")
            key = key.strip().lower()
            if key not in ("x", "y"):
                raise ValueError(f"bad curve line {line!r}")
            coeffs[key] = [float(v) for v in rest.split()]
    if set(coeffs) != {"x", "y"}:
        raise ValueError("curve file needs both an 'x:' and a 'y:' line")
    return fourier_curve(coeffs["x"], coeffs["y"], name=str(path))


def signed_area(curve, n=CHECK_POINTS):
    """Shoelace area of the sampled polygon (positive if counter-clockwise)."""
    pts = curve.polygon(n)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def is_simple(curve, n=CHECK_POINTS):
    """Segment-intersection test on an n-gon approximation."""
    p = curve.polygon(n)
    q = np.roll(p, -1, axis=0)
    d = q - p

    def cross(u, v):
        return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]

    # pairwise orientation tests between segment i and segment j
    pi, di = p[:, None, :], d[:, None, :]
    pj, dj = p[None, :, :], d[None, :, :]
    o1 = cross(di, pj - pi)
    o2 = cross(di, pj + dj - pi)
    o3 = cross(dj, pi - pj)
    o4 = cross(dj, pi + di - pj)
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    idx = np.arange(n)
    adjacent = (np.abs(idx[:, None] - idx[None, :]) <= 1) | (
        np.abs(idx[:, None] - idx[None, :]) == n - 1
    )
    return not np.any(hit & ~adjacent)


def sample_curve(curve, t):
    """Evaluate positions, tangents, outward normals and speeds at ``t``."""
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("nodes must be a non-empty 1-d array")
    if np.any(np.diff(t) <= 0) or t[0] < 0 or t[-1] >= 2 * np.pi:
        raise ValueError("nodes must be strictly increasing in [0, 2*pi)")
    pts = curve.position(t)
    der = curve.derivative(t)
    der2 = curve.second_derivative(t)
    speed = np.hypot(der[:, 0], der[:, 1])
    if np.any(speed < 1e-12):
        raise DegenerateCurveError(f"{curve.name}: speed vanishes at t={t[np.argmin(speed)]:.6g}")
    tangent = der / speed[:, None]
    normal = curve.orientation * np.stack([tangent[:, 1], -tangent[:, 0]], axis=-1)
    curvature = curve.orientation * (der[:, 0] * der2[:, 1] - der[:, 1] * der2[:, 0]) / speed**3
    return CurveSample(t, pts, tangent, normal, speed, curvature)


def point_in_region(curve, z, n=CHECK_POINTS):
    """Winding-number test of point(s) ``z`` against an n-gon of the curve.

    ``z`` is a single point ``(x, y)`` or an array of shape ``(m, 2)``;
    returns a bool or a boolean array accordingly.
    """
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    z = np.atleast_2d(z)
    p = curve.polygon(n)
    q = np.roll(p, -1, axis=0)
    ax = p[None, :, 0] - z[:, None, 0]
    ay = p[None, :, 1] - z[:, None, 1]
    bx = q[None, :, 0] - z[:, None, 0]
    by = q[None, :, 1] - z[:, None, 1]
    side = ax * by - bx * ay
    up = (ay <= 0) & (by > 0) & (side > 0)
    down = (ay > 0) & (by <= 0) & (side < 0)
    inside = (up.sum(axis=1) - down.sum(axis=1)) != 0
    return bool(inside[0]) if single else inside


def distance_to_region(curve, z, n=1024, chunk=512):
    """Distance from point(s) to the closed region (0 inside)."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    p = curve.polygon(n)
    d = np.roll(p, -1, axis=0) - p
    dd = np.sum(d * d, axis=-1)
    dist = np.empty(len(z))
    for lo in range(0, len(z), chunk):
        zc = z[lo : lo + chunk]
        rel = zc[:, None, :] - p[None, :, :]
        s = np.clip(np.sum(rel * d, axis=-1) / dd, 0.0, 1.0)
        gap = rel - s[..., None] * d[None]
        dist[lo : lo + chunk] = np.sqrt(np.min(np.sum(gap * gap, axis=-1), axis=1))
    return np.where(point_in_region(curve, z), 0.0, dist)


def piecewise_quadratic(curve, nf):
    """Isoparametric approximation of ``curve`` by ``nf`` quadratic arcs.

    Face j covers t in [j h, (j+1) h], h = 2 pi / nf, and interpolates the
    curve at the two face ends and the face midpoint.  The result is a
    continuous curve whose derivatives jump between faces.
    """
    h = 2.0 * np.pi / nf
    starts = h * np.arange(nf)
    knots = np.stack(
        [curve.position(starts), curve.position(starts + 0.5 * h), curve.position(starts + h)],
        axis=1,
    )

    def locate(t):
        t = np.asarray(t, dtype=float)
        face = np.clip((t // h).astype(int), 0, nf - 1)
        return face, t / h - face

    def evaluate(weights, face):
        return np.einsum("nk,nkd->nd", weights, knots[face])

    def pos(t):
        face, s = locate(t)
        w = np.stack([2 * (s - 0.5) * (s - 1), -4 * s * (s - 1), 2 * s * (s - 0.5)], axis=-1)
        return evaluate(w, face)

    def der(t):
        face, s = locate(t)
        w = np.stack([4 * s - 3, 4 - 8 * s, 4 * s - 1], axis=-1) / h
        return evaluate(w, face)

    def der2(t):
        face, s = locate(t)
        w = np.broadcast_to(np.array([4.0, -8.0, 4.0]) / h**2, (len(s), 3))
        return evaluate(w, face)

    return BoundaryCurve(pos, der, der2, name=f"{curve.name}~quad{nf}")
