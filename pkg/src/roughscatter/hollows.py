"""Hollows and the billiard map through their openings.

A hollow is a set of walls over an opening interval on the x-axis, in a
local frame where the outward normal is (0, -1): the cavity lies in y > 0
and the opening is (-a, a) x {0}.  A particle with angle coordinate phi
enters moving with velocity (sin phi, cos phi); the exit angle is defined
by exit velocity = -(sin phi_out, cos phi_out).  With these conventions
the map (xi, phi) -> (xi_out, phi_out) is an involution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geometry, kernels

__all__ = [
    "Hollow",
    "TraceResult",
    "TraceError",
    "TrappedError",
    "NearTangentError",
    "EscapedError",
    "DegenerateExitError",
    "make_triangular",
    "make_rectangular",
    "make_flat_mirror",
    "trace",
    "trace_batch",
    "sample_inflow",
]

DEFAULT_MAX_BOUNCES = 10_000


class TraceError(RuntimeError):
    status = -1


class TrappedError(TraceError):
    """Bounce budget exhausted (possible trap / infinite reflection)."""

    status = kernels.MAX_BOUNCES


class NearTangentError(TraceError):
    status = kernels.NEAR_TANGENT


class EscapedError(TraceError):
    """No wall was hit; the hollow does not enclose the trajectory."""

    status = kernels.ESCAPED


class DegenerateExitError(TraceError):
    """Exit crossing at an opening endpoint (zero-measure event)."""

    status = kernels.DEGENERATE_EXIT


_ERROR_BY_STATUS = {
    kernels.MAX_BOUNCES: TrappedError,
    kernels.NEAR_TANGENT: NearTangentError,
    kernels.ESCAPED: EscapedError,
    kernels.DEGENERATE_EXIT: DegenerateExitError,
}

STATUS_NAMES = {
    kernels.OK: "ok",
    kernels.MAX_BOUNCES: "max_bounces",
    kernels.NEAR_TANGENT: "near_tangent",
    kernels.ESCAPED: "escaped_geometry",
    kernels.DEGENERATE_EXIT: "degenerate_exit",
}


@dataclass(frozen=True, eq=False)
class Hollow:
    walls: tuple
    opening_halfwidth: float
    kind: str = "custom"
    meta: dict = field(default_factory=dict)

    @cached_property
    def packed(self) -> np.ndarray:
        return geometry.pack(self.walls)

    @property
    def area(self) -> float:
        """Enclosed area, known analytically for the canonical kinds."""
        if self.kind == "flat":
            return 0.0
        if self.kind == "triangular":
            return 1.0
        if self.kind == "rectangular":
            return 2.0 * (2.0 / self.meta["h"])
        if "area" in self.meta:
            return self.meta["area"]
        raise ValueError(f"area unknown for hollow kind {self.kind!r}")

    @property
    def lateral_extent(self) -> float:
        """Diameter of the projection of the walls onto the opening line."""
        if self.kind == "flat":
            return 2.0 * self.opening_halfwidth
        xs = []
        for w in self.walls:
            pts = [w.point(u) for u in np.linspace(0.0, 1.0, 65)]
            xs.extend(p[0] for p in pts)
        return max(xs) - min(xs)


@dataclass(frozen=True, eq=False)
class TraceResult:
    xi: float
    phi: float
    bounces: int
    path_length: float
    path: np.ndarray | None = None


def make_triangular() -> Hollow:
    """Isosceles right triangle: hypotenuse is the opening [-1, 1], the
    right-angle apex sits at (0, 1) and the legs have length sqrt(2)."""
    apex = (0.0, 1.0)
    walls = (
        geometry.Segment((-1.0, 0.0), apex),
        geometry.Segment(apex, (1.0, 0.0)),
    )
    return Hollow(walls, 1.0, kind="triangular")


def make_rectangular(h: float) -> Hollow:
    """Rectangle of width 2 and depth 2/h (h = width/depth ratio)."""
    if h <= 0.0:
        raise ValueError(f"width/depth ratio must be positive, got {h}")
    depth = 2.0 / h
    walls = (
        geometry.Segment((-1.0, 0.0), (-1.0, depth)),
        geometry.Segment((-1.0, depth), (1.0, depth)),
        geometry.Segment((1.0, depth), (1.0, 0.0)),
    )
    return Hollow(walls, 1.0, kind="rectangular", meta={"h": h})


def make_flat_mirror() -> Hollow:
    """Depth-zero hollow: the opening itself acts as a mirror."""
    return Hollow((), 1.0, kind="flat")


def _validate_state(hollow, xi, phi):
    a = hollow.opening_halfwidth
    if not -a < xi < a:
        raise ValueError(f"xi={xi} outside the opening (-{a}, {a})")
    if not -math.pi / 2 < phi < math.pi / 2:
        raise ValueError(f"phi={phi} outside (-pi/2, pi/2)")


def trace(
    hollow: Hollow,
    xi: float,
    phi: float,
    max_bounces: int = DEFAULT_MAX_BOUNCES,
    want_path: bool = False,
) -> TraceResult:
    """Billiard map (xi, phi) -> (xi_out, phi_out) through one hollow.

    Raises a TraceError subclass on discarded trajectories.
    """
    _validate_state(hollow, xi, phi)
    if want_path:
        buf = np.empty((max_bounces + 2, 2))
        st, xo, po, nb, plen, npts = kernels.trace_hollow_path(
            hollow.packed, hollow.opening_halfwidth, xi, phi, max_bounces, buf
        )
        path = buf[:npts].copy()
    else:
        st, xo, po, nb, plen = kernels.trace_hollow(
            hollow.packed, hollow.opening_halfwidth, xi, phi, max_bounces
        )
        path = None
    if st != kernels.OK:
        raise _ERROR_BY_STATUS[int(st)](
            f"trace discarded: {STATUS_NAMES[int(st)]} after {nb} bounces"
        )
    return TraceResult(float(xo), float(po), int(nb), float(plen), path)


def trace_batch(
    hollow: Hollow,
    xi: np.ndarray,
    phi: np.ndarray,
    max_bounces: int = DEFAULT_MAX_BOUNCES,
) -> dict:
    """Vector trace; returns arrays instead of raising on discards.

    Keys: status, xi_out, phi_out, bounces, path_length.  Non-ok entries
    hold NaN in the out coordinates.
    """
    xi = np.ascontiguousarray(xi, dtype=float)
    phi = np.ascontiguousarray(phi, dtype=float)
    n = xi.shape[0]
    status = np.empty(n, dtype=np.int64)
    xi_out = np.empty(n)
    phi_out = np.empty(n)
    nb = np.empty(n, dtype=np.int64)
    plen = np.empty(n)
    kernels.trace_hollow_batch(
        hollow.packed,
        hollow.opening_halfwidth,
        xi,
        phi,
        max_bounces,
        status,
        xi_out,
        phi_out,
        nb,
        plen,
    )
    return {
        "status": status,
        "xi_out": xi_out,
        "phi_out": phi_out,
        "bounces": nb,
        "path_length": plen,
    }


def sample_inflow(a: float, rng: np.random.Generator, n: int | None = None):
    """Draw (xi, phi) from the inflow measure: xi uniform on (-a, a) and
    phi = arcsin(2u - 1), the inverse CDF of the cos(phi)/2 density."""
    if n is None:
        return float(rng.uniform(-a, a)), float(math.asin(2.0 * rng.random() - 1.0))
    xi = rng.uniform(-a, a, size=n)
    phi = np.arcsin(2.0 * rng.random(n) - 1.0)
    return xi, phi
