"""Translated paraboloids, the transformation map and its degenerate loci.

A translated paraboloid ``a + P_d`` is the set of lifts ``(x + a_bar, |x|^2 + a_d)``
for ``x`` in ``R^{d-1}``.  Completing the square in the dot product of two lifts
gives

    lift(x) . lift(y) = (|x|^2 + a_d) * |T_a(x) - y|^2 + h(a, x),

with ``T_a(x) = -(x + a_bar) / (2(|x|^2 + a_d))``.  This module evaluates every
piece of that identity, the Jacobian of ``T_a`` in closed form and by finite
differences, and the geometry of the singular sphere and degenerate hyperplane.

Every scalar routine is written with plain arithmetic so that it runs unchanged
on ``float`` or on ``fractions.Fraction``.  Pass ``exact=True`` (or Fraction
inputs) to get exact rational results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateAbsent, DimensionMismatch, NonFiniteResult, SingularInput

SINGULAR_EPS = 1e-12

Point = tuple


def _to_exact(values):
    return tuple(Fraction(v) for v in values)


def _is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise DimensionMismatch(f"dot of {len(u)}- and {len(v)}-vectors")
    return sum((ui * vi for ui, vi in zip(u, v)), 0)


def norm_sq(u: Sequence):
    return dot(u, u)


@dataclass(frozen=True)
class TranslationVector:
    """The translation ``a = (a_bar, a_d)`` of the standard paraboloid."""

    a_bar: tuple
    a_d: object

    def __post_init__(self):
        object.__setattr__(self, "a_bar", tuple(self.a_bar))
        if len(self.a_bar) < 1:
            raise DimensionMismatch("a_bar needs at least one coordinate (d >= 2)")

    @classmethod
    def from_flat(cls, coords: Sequence) -> "TranslationVector":
        """Build from ``(a_1, ..., a_{d-1}, a_d)``."""
        coords = tuple(coords)
        return cls(coords[:-1], coords[-1])

    @property
    def d(self) -> int:
        return len(self.a_bar) + 1

    def exact(self) -> "TranslationVector":
        return TranslationVector(_to_exact(self.a_bar), Fraction(self.a_d))

    def as_tuple(self) -> tuple:
        return self.a_bar + (self.a_d,)


def _prepare(x_bar, a: TranslationVector, exact: bool):
    x_bar = tuple(x_bar)
    if len(x_bar) != len(a.a_bar):
        raise DimensionMismatch(
            f"x_bar has {len(x_bar)} coordinates, translation expects {len(a.a_bar)}"
        )
    if exact:
        return _to_exact(x_bar), a.exact()
    return x_bar, a


def _pole_value(x_bar, a: TranslationVector, eps: float):
    """Return ``|x|^2 + a_d``, raising SingularInput on (or numerically near) the pole set."""
    q = norm_sq(x_bar) + a.a_d
    if _is_exact(q):
        if q == 0:
            raise SingularInput(f"|x|^2 + a_d = 0 at x={x_bar}")
    elif not abs(q) >= eps:
        raise SingularInput(f"|x|^2 + a_d = {q!r} is within {eps} of zero at x={x_bar}")
    return q


def lift(x_bar: Sequence, a: TranslationVector, *, exact: bool = False) -> Point:
    """Lift ``x_bar`` onto ``a + P_d``: ``(x_bar + a_bar, |x_bar|^2 + a_d)``."""
    x_bar, a = _prepare(x_bar, a, exact)
    return tuple(xi + ai for xi, ai in zip(x_bar, a.a_bar)) + (norm_sq(x_bar) + a.a_d,)


def transform_map(
    x_bar: Sequence, a: TranslationVector, *, exact: bool = False, eps: float = SINGULAR_EPS
) -> Point:
    x_bar, a = _prepare(x_bar, a, exact)
    q = _pole_value(x_bar, a, eps)
    return tuple(-(xi + ai) / (2 * q) for xi, ai in zip(x_bar, a.a_bar))


def h_offset(
    x_bar: Sequence, a: TranslationVector, *, exact: bool = False, eps: float = SINGULAR_EPS
):
    """Constant term left over after completing the square in ``y``."""
    x_bar, a = _prepare(x_bar, a, exact)
    q = _pole_value(x_bar, a, eps)
    shifted = tuple(xi + ai for xi, ai in zip(x_bar, a.a_bar))
    linear = dot(a.a_bar, x_bar) + norm_sq(a.a_bar) + a.a_d * norm_sq(x_bar) + a.a_d * a.a_d
    return linear - norm_sq(shifted) / (4 * q)


def identity_residual(
    x_bar: Sequence,
    y_bar: Sequence,
    a: TranslationVector,
    *,
    exact: bool = False,
    eps: float = SINGULAR_EPS,
):
    """``lift(x).lift(y)`` minus its completed-square form; exactly 0 in exact mode."""
    x_bar, a = _prepare(x_bar, a, exact)
    y_bar = _to_exact(y_bar) if exact else tuple(y_bar)
    if len(y_bar) != len(x_bar):
        raise DimensionMismatch("x_bar and y_bar differ in length")
    lhs = dot(lift(x_bar, a), lift(y_bar, a))
    q = _pole_value(x_bar, a, eps)
    centre = transform_map(x_bar, a, eps=eps)
    rhs = q * norm_sq(tuple(c - y for c, y in zip(centre, y_bar))) + h_offset(x_bar, a, eps=eps)
    return lhs - rhs


def jacobian_closed(
    x_bar: Sequence, a: TranslationVector, *, exact: bool = False, eps: float = SINGULAR_EPS
):
    """Jacobian determinant of ``T_a`` from the closed form ``2 z^d [ |x + a_bar|^2 - |a_bar|^2 - a_d ]``."""
    x_bar, a = _prepare(x_bar, a, exact)
    q = _pole_value(x_bar, a, eps)
    z = -1 / (2 * q)
    bracket = (
        sum((xi + ai) ** 2 for xi, ai in zip(x_bar, a.a_bar)) - norm_sq(a.a_bar) - a.a_d
    )
    return 2 * z ** a.d * bracket


def jacobian_numeric(x_bar: Sequence, a: TranslationVector, step: float = 1e-5) -> float:
    """Determinant of the central-difference Jacobian matrix of ``T_a``."""
    x = np.asarray(x_bar, dtype=float)
    a_bar = np.asarray(a.a_bar, dtype=float)
    a_d = float(a.a_d)
    if x.shape != a_bar.shape:
        raise DimensionMismatch("x_bar and a_bar differ in length")
    q = float(x @ x) + a_d
    if abs(q) < 10 * step:
        raise SingularInput(f"|x|^2 + a_d = {q!r} is closer than 10*step to the pole")

    def T(p):
        return -(p + a_bar) / (2.0 * (p @ p + a_d))

    n = x.size
    jac = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = step
        jac[:, j] = (T(x + e) - T(x - e)) / (2.0 * step)
    det = float(np.linalg.det(jac))
    if not math.isfinite(det):
        raise NonFiniteResult(f"finite-difference Jacobian is not finite at x={x_bar}")
    return det


@dataclass(frozen=True)
class SingularSphere:
    center: tuple
    radius: float
    # Radius of the tangent locus seen from the origin; only set when the origin is outside.
    tangent_radius: Optional[float] = None


@dataclass(frozen=True)
class DegenerateHyperplane:
    cylinder_radius_sq: object
    hyperplane_normal: tuple
    hyperplane_offset: object
    canonical_distance: float

    def residual(self, y: Sequence):
        """``normal . y - offset``; zero exactly on the hyperplane."""
        return dot(self.hyperplane_normal, y) - self.hyperplane_offset


@dataclass(frozen=True)
class RegionReport:
    singularity: Optional[SingularSphere]
    origin_position: str
    degenerate: Optional[DegenerateHyperplane]
    note: str = ""


def _compare(lhs, rhs) -> int:
    if _is_exact(lhs, rhs):
        return (lhs > rhs) - (lhs < rhs)
    if math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12):
        return 0
    return 1 if lhs > rhs else -1


def region_report(a: TranslationVector, d: Optional[int] = None) -> RegionReport:
    """Classify the singular sphere and the degenerate hyperplane of ``a + P_d``.

    The singular set projects to the sphere ``|y - a_bar| = sqrt(-a_d)`` when
    ``a_d < 0``.  ``a_d = 0`` gives a single point and is reported as
    ``"no-singularity"``: one point carries no dimension and is discarded.

    The degenerate region (zero Jacobian) is the paraboloid cut by the cylinder
    ``|y|^2 = |a_bar|^2 + a_d`` and lies in the hyperplane
    ``y_d + 2 a_bar . y_bar = 2(|a_bar|^2 + a_d)``.
    """
    if d is None:
        d = a.d
    if d != a.d:
        raise DimensionMismatch(f"translation has d={a.d}, caller asked for d={d}")
    if d < 3:
        raise DimensionMismatch("region_report needs d >= 3")

    abar_sq = norm_sq(a.a_bar)
    cyl = abar_sq + a.a_d

    singularity = None
    position = "no-singularity"
    note = ""
    if _compare(a.a_d, 0) < 0:
        cmp = _compare(abar_sq, -a.a_d)
        position = {1: "outside", 0: "on", -1: "inside"}[cmp]
        tangent = math.sqrt(float(cyl)) if position == "outside" else None
        singularity = SingularSphere(tuple(a.a_bar), math.sqrt(-float(a.a_d)), tangent)
    elif _compare(a.a_d, 0) == 0:
        note = "a_d = 0: singular set is the single point -a_bar, discarded"

    degenerate = None
    if _compare(cyl, 0) > 0:
        normal = tuple(2 * ai for ai in a.a_bar) + (1,)
        offset = 2 * cyl
        dist = 2 * float(cyl) / math.sqrt(4 * float(abar_sq) + 1)
        degenerate = DegenerateHyperplane(cyl, normal, offset, dist)

    return RegionReport(singularity, position, degenerate, note)


def degenerate_region_points(a: TranslationVector, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample ``n`` points of the degenerate region on ``a + P_d`` (rows of a float array)."""
    cyl = float(norm_sq(a.a_bar) + a.a_d)
    if cyl <= 0:
        raise DegenerateAbsent("|a_bar|^2 + a_d <= 0: degenerate region is empty or a point")
    a_bar = np.asarray(a.a_bar, dtype=float)
    u = rng.standard_normal((n, a_bar.size))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    y_bar = math.sqrt(cyl) * u
    x_bar = y_bar - a_bar
    y_d = np.einsum("ij,ij->i", x_bar, x_bar) + float(a.a_d)
    return np.column_stack([y_bar, y_d])


def rotation_to_canonical(a: TranslationVector, d: Optional[int] = None) -> np.ndarray:
    """Orthogonal matrix taking the degenerate hyperplane to ``{z_d = canonical_distance}``.

    The matrix is the Householder reflection sending the unit normal of the
    hyperplane to ``e_d`` (identity when the normal is already ``e_d``), so its
    determinant is ``-1`` in general.  Only dot-product preservation matters.
    """
    if d is not None and d != a.d:
        raise DimensionMismatch(f"translation has d={a.d}, caller asked for d={d}")
    cyl = float(norm_sq(a.a_bar) + a.a_d)
    if cyl <= 0:
        raise DegenerateAbsent("|a_bar|^2 + a_d <= 0: no degenerate hyperplane")
    normal = np.append(2.0 * np.asarray(a.a_bar, dtype=float), 1.0)
    unit = normal / np.linalg.norm(normal)
    head = unit[:-1]
    head_sq = float(head @ head)
    if head_sq == 0.0:
        return np.eye(a.d)
    # unit[-1] > 0 always, so compute unit[-1] - 1 without cancellation
    v = np.append(head, -head_sq / (1.0 + unit[-1]))
    return np.eye(a.d) - 2.0 * np.outer(v, v) / float(v @ v)
