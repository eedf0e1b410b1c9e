"""Intersections of thin tubes through the origin with star-shaped hypersurfaces.

A polar surface is ``{r(u) u : u in K}`` for a set ``K`` of unit directions and
a positive radius function ``r``.  A tube ``T_delta(e)`` is the
``delta``-neighbourhood of the half-line through the origin in direction ``e``.

When ``r`` has a bounded derivative, a tube only meets the surface over a cap of
angular radius about ``delta / R0`` (``R0 = min r``), and the meeting set has
length ``O(delta)`` along ``e``.  Near a tangency the length is of order
``delta ** 0.5`` instead.  These routines measure both by dense sampling of the
direction cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .errors import DimensionMismatch, EmptyDomain, OriginInside

CAP_CONSTANT = 4.0
# Interval length along the tube axis covered by one ball of radius 2*delta:
# a point at axial offset t and radial offset <= delta lies in the ball iff
# t^2 + delta^2 <= 4 delta^2.
BALL_SPAN = 2.0 * math.sqrt(3.0)


def _probe_directions(dim: int, n: int = 20000) -> np.ndarray:
    if dim == 2:
        theta = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
        return np.column_stack([np.cos(theta), np.sin(theta)])
    u = np.random.default_rng(0).standard_normal((n, dim))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


@dataclass
class PolarSurface:
    """Star-shaped surface given by a radius function on unit directions.

    ``radius_fn`` maps an ``(n, dim)`` array of unit vectors to radii of shape
    ``(n,)``, or ``(n, k)`` for a union of ``k`` polar graphs.  NaN marks a
    direction outside the domain ``K``.  ``domain`` optionally restricts ``K``
    further with a boolean mask function.
    """

    dim: int
    radius_fn: Callable[[np.ndarray], np.ndarray]
    domain: Optional[Callable[[np.ndarray], np.ndarray]] = None
    r_min: Optional[float] = None
    r_max: Optional[float] = None
    label: str = ""

    def __post_init__(self):
        if self.r_min is None or self.r_max is None:
            r = self.radii(_probe_directions(self.dim))
            r = r[np.isfinite(r)]
            if r.size == 0:
                raise EmptyDomain(f"surface {self.label!r} has no sampled directions")
            self.r_min = float(r.min()) if self.r_min is None else self.r_min
            self.r_max = float(r.max()) if self.r_max is None else self.r_max
        if not self.r_min > 0:
            raise ValueError("radius function must be bounded away from zero")

    def radii(self, directions: np.ndarray) -> np.ndarray:
        r = np.asarray(self.radius_fn(directions), dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        r = np.where(r > 0, r, np.nan)
        if self.domain is not None:
            r = np.where(np.asarray(self.domain(directions), bool)[:, None], r, np.nan)
        return r


@dataclass(frozen=True)
class Tube:
    direction: tuple
    radius: float

    def __post_init__(self):
        e = np.asarray(self.direction, dtype=float)
        if abs(float(np.linalg.norm(e)) - 1.0) > 1e-12:
            raise ValueError("tube direction must be a unit vector")
        if not self.radius > 0:
            raise ValueError("tube radius must be positive")

    @classmethod
    def towards(cls, vector: Sequence[float], radius: float) -> "Tube":
        v = np.asarray(vector, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)), radius)


def ellipsoid_surface(
    center: Sequence[float],
    semi_axes: Sequence[float],
    side: str = "near",
    tangent_margin: float = 0.0,
) -> PolarSurface:
    """Axis-aligned ellipsoid seen from the origin.

    With the origin inside there is one polar graph and ``side`` is ignored.
    With the origin outside, ``side`` picks the visible (``"near"``) or hidden
    (``"far"``) half, or ``"both"``.  ``tangent_margin`` in ``[0, 1)`` removes
    directions whose ray is close to tangent: the discriminant ratio
    ``sqrt(B^2 - A C) / B`` must be at least the margin.
    """
    c = np.asarray(center, dtype=float)
    s = np.asarray(semi_axes, dtype=float)
    if c.shape != s.shape:
        raise DimensionMismatch("center and semi_axes differ in length")
    const = float(np.sum((c / s) ** 2) - 1.0)
    if abs(const) < 1e-12:
        raise ValueError("origin lies on the surface")
    inside = const < 0
    if side not in ("near", "far", "both"):
        raise ValueError(f"unknown side {side!r}")

    def radius_fn(u):
        A = np.sum((u / s) ** 2, axis=1)
        B = u @ (c / s**2)
        disc = B * B - A * const
        root = np.sqrt(np.where(disc >= 0, disc, np.nan))
        if inside:
            return (B + root) / A
        ok = (B > 0) & (root >= tangent_margin * B)
        near = np.where(ok, (B - root) / A, np.nan)
        far = np.where(ok, (B + root) / A, np.nan)
        if side == "near":
            return near
        if side == "far":
            return far
        return np.column_stack([near, far])

    kind = "inside" if inside else side
    return PolarSurface(len(c), radius_fn, label=f"ellipsoid c={tuple(c.tolist())} axes={tuple(s.tolist())} {kind}")


def sphere_surface(
    center: Sequence[float], radius: float, side: str = "near", tangent_margin: float = 0.0
) -> PolarSurface:
    c = np.asarray(center, dtype=float)
    surf = ellipsoid_surface(c, np.full(c.shape, float(radius)), side, tangent_margin)
    dist = float(np.linalg.norm(c))
    if dist < radius:
        surf.r_min, surf.r_max = radius - dist, radius + dist
    surf.label = f"sphere c={tuple(c.tolist())} r={radius} " + surf.label.rsplit(" ", 1)[-1]
    return surf


def cap_directions(e: np.ndarray, angle: float, resolution: int) -> np.ndarray:
    """Grid of unit vectors within ``angle`` of ``e`` (at least ``resolution`` before trimming)."""
    e = np.asarray(e, dtype=float)
    m = e.size - 1
    basis = null_space(e[None, :])
    side = max(2, int(math.ceil(resolution ** (1.0 / m))))
    half = math.tan(min(angle, 1.5))
    axis = np.linspace(-half, half, side)
    if m == 1:
        w = axis[:, None]
    else:
        w = np.stack(np.meshgrid(*([axis] * m), indexing="ij"), axis=-1).reshape(-1, m)
        w = w[np.einsum("ij,ij->i", w, w) <= half * half]
    u = e[None, :] + w @ basis.T
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def tube_hits(surface: PolarSurface, tube: Tube, resolution: int = 4096) -> np.ndarray:
    """Projections onto the tube axis of sampled surface points inside the tube."""
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000 directions")
    e = np.asarray(tube.direction, dtype=float)
    if e.size != surface.dim:
        raise DimensionMismatch("tube and surface dimensions differ")
    delta = tube.radius
    u = cap_directions(e, CAP_CONSTANT * delta / surface.r_min, resolution)
    r = surface.radii(u)
    if not np.isfinite(r).any():
        raise EmptyDomain("no sampled direction near e lies in the surface domain")
    pts = r[:, :, None] * u[:, None, :]
    pts = pts[np.isfinite(r)]
    axial = pts @ e
    radial = np.linalg.norm(pts - axial[:, None] * e[None, :], axis=1)
    return np.sort(axial[(radial < delta) & (axial > 0)])


def intersection_extent(surface: PolarSurface, tube: Tube, resolution: int = 4096) -> float:
    """``max - min`` of ``x . e`` over sampled surface points inside the tube (0 if none)."""
    hits = tube_hits(surface, tube, resolution)
    if hits.size == 0:
        return 0.0
    return float(hits[-1] - hits[0])


def greedy_cover(axial: Iterable[float], delta: float) -> int:
    """Number of radius-``2 delta`` balls in a greedy left-to-right cover of tube points."""
    count = 0
    reach = -math.inf
    for t in sorted(axial):
        if t > reach:
            count += 1
            reach = t + BALL_SPAN * delta
    return count


def cover_count(surface: PolarSurface, tube: Tube, resolution: int = 4096) -> int:
    return greedy_cover(tube_hits(surface, tube, resolution), tube.radius)


def tangent_direction(center: Sequence[float], radius: float) -> np.ndarray:
    """Unit direction of a line through the origin tangent to the sphere.

    The tangent lies in the plane spanned by the center and the first
    coordinate axis not parallel to it.
    """
    c = np.asarray(center, dtype=float)
    dist = float(np.linalg.norm(c))
    if dist <= radius:
        raise OriginInside("origin is not outside the sphere")
    c_hat, w = _section_frame(c)
    length = math.sqrt(dist * dist - radius * radius)
    return (length / dist) * c_hat + (radius / dist) * w


def _section_frame(c: np.ndarray):
    c_hat = c / np.linalg.norm(c)
    for k in range(c.size):
        w = -c_hat[k] * c_hat
        w[k] += 1.0
        if np.linalg.norm(w) > 1e-6:
            return c_hat, w / np.linalg.norm(w)
    raise DimensionMismatch("need dimension >= 2")


def tangent_cap_extent(center: Sequence[float], sphere_radius: float, delta: float) -> float:
    """Axial length of the sphere's intersection with a tangent tube from the origin.

    Works in the 2-plane through the origin, the center and the tangent point.
    The circle there is ``center + R (cos t c_hat + sin t w)``; the two angles
    at which its distance to the tangent line reaches ``delta`` are found with
    Brent's method on either side of the tangency angle.
    """
    c = np.asarray(center, dtype=float)
    dist = float(np.linalg.norm(c))
    R = float(sphere_radius)
    if dist <= R:
        raise OriginInside("origin must lie strictly outside the sphere")
    if not 0 < delta < R / 10:
        raise ValueError("delta must lie in (0, radius/10)")
    e = tangent_direction(c, R)
    c_hat, w = _section_frame(c)

    def point(t):
        return c + R * (math.cos(t) * c_hat + math.sin(t) * w)

    def gap(t):
        p = point(t)
        return float(np.linalg.norm(p - (p @ e) * e)) - delta

    # the tangent point is the foot of the perpendicular from c to the line
    foot = (c @ e) * e - c
    t0 = math.atan2(float(foot @ w), float(foot @ c_hat))
    lo = brentq(gap, t0 - math.pi / 2, t0, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    hi = brentq(gap, t0, t0 + math.pi / 2, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return float(abs(point(hi) @ e - point(lo) @ e))


def max_extent_ratio(
    surface: PolarSurface,
    directions: np.ndarray,
    delta: float,
    resolution: int = 4096,
) -> float:
    """``sup_e intersection_extent / delta`` over the given directions (EmptyDomain ones skipped)."""
    best = 0.0
    for e in directions:
        try:
            ext = intersection_extent(surface, Tube(tuple(e), delta), resolution)
        except EmptyDomain:
            continue
        best = max(best, ext / delta)
    return best
