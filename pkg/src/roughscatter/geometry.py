"""Planar ray geometry: curve primitives, intersection, specular reflection.

Curves are immutable value objects that pack themselves into float64 rows
for the kernels; all intersections are analytic (a linear solve for
segments, quadratics for the conics).  Points and vectors are plain numpy
arrays of shape (2,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels

__all__ = [
    "GeometryError",
    "NearTangentError",
    "Segment",
    "CircularArc",
    "EllipticArc",
    "ParabolicArc",
    "Ray",
    "HitRecord",
    "unit",
    "reflect",
    "pack",
    "intersect",
    "first_hit",
]


class GeometryError(Exception):
    pass


class NearTangentError(GeometryError):
    """The best hit is tangential; the trajectory should be discarded."""


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = math.hypot(v[0], v[1])
    if n == 0.0:
        raise GeometryError("zero vector has no direction")
    return v / n


def _check_unit(v, tol=1e-12):
    if abs(v[0] * v[0] + v[1] * v[1] - 1.0) > 2.0 * tol:
        raise GeometryError(f"vector {v!r} is not unit length")


def reflect(v, n) -> np.ndarray:
    """Specular reflection of direction v off a wall with unit normal n."""
    v = np.asarray(v, dtype=float)
    n = np.asarray(n, dtype=float)
    return v - 2.0 * float(v @ n) * n


@dataclass(frozen=True, eq=False)
class Segment:
    p0: np.ndarray
    p1: np.ndarray

    def __init__(self, p0, p1):
        object.__setattr__(self, "p0", np.asarray(p0, dtype=float))
        object.__setattr__(self, "p1", np.asarray(p1, dtype=float))

    def row(self) -> np.ndarray:
        r = np.zeros(kernels.ROW_LEN)
        r[0] = kernels.TAG_SEGMENT
        r[1:3] = self.p0
        r[3:5] = self.p1
        return r

    def point(self, u: float) -> np.ndarray:
        return self.p0 + u * (self.p1 - self.p0)


@dataclass(frozen=True, eq=False)
class CircularArc:
    center: np.ndarray
    radius: float
    angle0: float
    span: float

    def __init__(self, center, radius, angle0=0.0, span=2.0 * math.pi):
        if radius <= 0.0:
            raise GeometryError("radius must be positive")
        if not 0.0 < span <= 2.0 * math.pi + 1e-12:
            raise GeometryError("span must lie in (0, 2*pi]")
        object.__setattr__(self, "center", np.asarray(center, dtype=float))
        object.__setattr__(self, "radius", float(radius))
        object.__setattr__(self, "angle0", float(angle0))
        object.__setattr__(self, "span", float(span))

    def row(self) -> np.ndarray:
        r = np.zeros(kernels.ROW_LEN)
        r[0] = kernels.TAG_CIRCLE
        r[1:3] = self.center
        r[3] = self.radius
        r[4] = self.angle0
        r[5] = self.span
        return r

    def point(self, u: float) -> np.ndarray:
        th = self.angle0 + u * self.span
        return self.center + self.radius * np.array([math.cos(th), math.sin(th)])


@dataclass(frozen=True, eq=False)
class EllipticArc:
    """Arc of an ellipse given by its two foci and the squared-minor-axis
    parameter lam: semi-axes sqrt(1+lam) and sqrt(lam), so the focal
    half-distance is exactly 1 and the foci must be 2 apart.

    The extent [angle0, angle0 + span] is in the polar angle of the curve
    point around focus1.
    """

    focus1: np.ndarray
    focus2: np.ndarray
    lam: float
    angle0: float
    span: float

    def __init__(self, focus1, focus2, lam, angle0=0.0, span=2.0 * math.pi):
        f1 = np.asarray(focus1, dtype=float)
        f2 = np.asarray(focus2, dtype=float)
        if lam <= 0.0:
            raise GeometryError("lam must be positive")
        d = math.hypot(*(f2 - f1))
        if abs(d - 2.0) > 1e-9:
            raise GeometryError(f"foci must be 2 apart, got {d}")
        object.__setattr__(self, "focus1", f1)
        object.__setattr__(self, "focus2", f2)
        object.__setattr__(self, "lam", float(lam))
        object.__setattr__(self, "angle0", float(angle0))
        object.__setattr__(self, "span", float(span))

    @property
    def semi_major(self) -> float:
        return math.sqrt(1.0 + self.lam)

    @property
    def semi_minor(self) -> float:
        return math.sqrt(self.lam)

    def row(self) -> np.ndarray:
        r = np.zeros(kernels.ROW_LEN)
        r[0] = kernels.TAG_ELLIPSE
        r[1:3] = self.focus1
        r[3:5] = self.focus2
        r[5] = self.lam
        r[6] = self.angle0
        r[7] = self.span
        return r

    def radius_at(self, theta: float) -> float:
        """Focal-polar radius around focus1 at absolute polar angle theta."""
        a = self.semi_major
        e = 1.0 / a
        axis = math.atan2(
            self.focus2[1] - self.focus1[1], self.focus2[0] - self.focus1[0]
        )
        ell = self.lam / a
        return ell / (1.0 - e * math.cos(theta - axis))

    def point(self, u: float) -> np.ndarray:
        th = self.angle0 + u * self.span
        r = self.radius_at(th)
        return self.focus1 + r * np.array([math.cos(th), math.sin(th)])


@dataclass(frozen=True, eq=False)
class ParabolicArc:
    """Arc of a parabola with the given focus, unit opening direction and
    focus-vertex distance delta (vertex at focus - delta*axis).

    The extent is in the polar angle of the curve point around the focus.
    """

    focus: np.ndarray
    axis: np.ndarray
    delta: float
    angle0: float
    span: float

    def __init__(self, focus, axis, delta, angle0=0.0, span=2.0 * math.pi):
        if delta <= 0.0:
            raise GeometryError("delta must be positive")
        ax = np.asarray(axis, dtype=float)
        _check_unit(ax)
        object.__setattr__(self, "focus", np.asarray(focus, dtype=float))
        object.__setattr__(self, "axis", ax)
        object.__setattr__(self, "delta", float(delta))
        object.__setattr__(self, "angle0", float(angle0))
        object.__setattr__(self, "span", float(span))

    def row(self) -> np.ndarray:
        r = np.zeros(kernels.ROW_LEN)
        r[0] = kernels.TAG_PARABOLA
        r[1:3] = self.focus
        r[3:5] = self.axis
        r[5] = self.delta
        r[6] = self.angle0
        r[7] = self.span
        return r

    def radius_at(self, theta: float) -> float:
        ax_ang = math.atan2(self.axis[1], self.axis[0])
        c = math.cos(theta - ax_ang)
        if c >= 1.0 - 1e-15:
            raise GeometryError("parabola is unbounded along its axis")
        return 2.0 * self.delta / (1.0 - c)

    def point(self, u: float) -> np.ndarray:
        th = self.angle0 + u * self.span
        r = self.radius_at(th)
        return self.focus + r * np.array([math.cos(th), math.sin(th)])


Curve = Segment | CircularArc | EllipticArc | ParabolicArc


@dataclass(frozen=True, eq=False)
class Ray:
    origin: np.ndarray
    dir: np.ndarray

    def __init__(self, origin, dir):
        d = np.asarray(dir, dtype=float)
        _check_unit(d)
        object.__setattr__(self, "origin", np.asarray(origin, dtype=float))
        object.__setattr__(self, "dir", d)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.dir


@dataclass(frozen=True, eq=False)
class HitRecord:
    t: float
    point: np.ndarray
    normal: np.ndarray
    curve_index: int


def _endpoints(curve) -> tuple[np.ndarray, np.ndarray] | None:
    """Endpoints of an open curve; None for closed ones (full span)."""
    if isinstance(curve, Segment):
        return curve.p0, curve.p1
    if curve.span >= 2.0 * math.pi - 1e-12:
        return None
    return curve.point(0.0), curve.point(1.0)


def pack(curves) -> np.ndarray:
    """Pack a sequence of curves into the kernels' row table."""
    if len(curves) == 0:
        return np.zeros((0, kernels.ROW_LEN))
    table = np.stack([c.row() for c in curves])
    for i, c in enumerate(curves):
        ends = _endpoints(c)
        if ends is None:
            table[i, 10:14] = np.nan
        else:
            table[i, 10:12] = ends[0]
            table[i, 12:14] = ends[1]
    return np.ascontiguousarray(table)


def intersect(ray: Ray, curve, t_min: float = kernels.T_MIN) -> list[HitRecord]:
    """All forward hits of a ray with one curve, sorted by t."""
    row = curve.row()
    ox, oy = ray.origin
    dx, dy = ray.dir
    n, t0, t1 = kernels._curve_roots(row, ox, oy, dx, dy, t_min)
    hits = []
    for t in ([t0, t1][:n] if n else []):
        nx, ny = kernels._hit_normal(row, ox, oy, dx, dy, t)
        hits.append(HitRecord(t, ray.at(t), np.array([nx, ny]), 0))
    hits.sort(key=lambda h: h.t)
    return hits


def first_hit(ray: Ray, curves, t_min: float = kernels.T_MIN) -> HitRecord | None:
    """Minimal-t hit across all curves, or None.

    Raises NearTangentError when the best hit is tangential within the
    kernel tolerance (the caller should discard the trajectory).
    """
    table = pack(curves)
    ox, oy = ray.origin
    dx, dy = ray.dir
    idx, t = kernels.first_hit(table, ox, oy, dx, dy, t_min)
    if idx < 0:
        return None
    nx, ny = kernels._hit_normal(table[idx], ox, oy, dx, dy, t)
    rec = HitRecord(float(t), ray.at(t), np.array([nx, ny]), int(idx))
    if abs(nx * dx + ny * dy) < kernels.TANGENCY_TOL:
        raise NearTangentError(rec)
    return rec
