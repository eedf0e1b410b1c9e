"""Finite atomic measures, their push-forward under ``x -> x . y``, and Fourier transforms.

Weights are summed in exact rational arithmetic (every float is a dyadic
rational), so total mass survives merging exactly and the transform at the
origin does not depend on how atoms were grouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence

from .errors import DimensionMismatch

MASS_TOL = 1e-12
MERGE_TOL = 1e-12


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction)) and not isinstance(v, bool)


@dataclass(frozen=True)
class AtomicMeasure:
    """Probability measure ``sum_i w_i delta_{x_i}`` with finitely many atoms."""

    points: tuple
    weights: tuple

    def __init__(self, points: Sequence[Sequence[Real]], weights: Sequence[Real]):
        pts = tuple(tuple(p) for p in points)
        w = tuple(weights)
        if len(pts) != len(w) or not pts:
            raise ValueError("need one weight per atom and at least one atom")
        dims = {len(p) for p in pts}
        if len(dims) != 1:
            raise DimensionMismatch("atoms have different dimensions")
        if any(v < 0 for v in w):
            raise ValueError("weights must be nonnegative")
        if abs(float(self._mass(w)) - 1.0) > MASS_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @staticmethod
    def _mass(weights) -> Fraction:
        return sum((Fraction(v) for v in weights), Fraction(0))

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def mass(self) -> Fraction:
        return self._mass(self.weights)

    @property
    def exact(self) -> bool:
        return all(_is_exact(v) for p in self.points for v in p)

    @classmethod
    def uniform(cls, points) -> "AtomicMeasure":
        n = len(points)
        return cls(points, [Fraction(1, n)] * n)


def _check_dim(mu: AtomicMeasure, v) -> None:
    if len(v) != mu.dim:
        raise DimensionMismatch(f"expected dimension {mu.dim}, got {len(v)}")


def pushforward_dot(mu: AtomicMeasure, y: Sequence[Real]) -> AtomicMeasure:
    """Image of ``mu`` under ``x -> x . y`` on the line, with coincident atoms merged.

    Projections are compared exactly for rational input and within
    ``MERGE_TOL`` otherwise; a merged atom sits at the smallest value of its group.
    """
    _check_dim(mu, y)
    exact = mu.exact and all(_is_exact(v) for v in y)
    proj = [sum(a * b for a, b in zip(x, y)) for x in mu.points]
    if not exact:
        proj = [float(v) for v in proj]
    order = sorted(range(len(proj)), key=lambda i: proj[i])
    values, weights = [], []
    for i in order:
        v = proj[i]
        if values and (v == values[-1] if exact else v - values[-1] <= MERGE_TOL):
            weights[-1] += Fraction(mu.weights[i])
        else:
            values.append(v)
            weights.append(Fraction(mu.weights[i]))
    return AtomicMeasure([(v,) for v in values], weights)


def _phase_cos_sin(theta) -> tuple:
    if _is_exact(theta):
        # reduce mod 1 exactly before going to floating point
        theta = theta - math.floor(theta)
    angle = 2.0 * math.pi * float(theta)
    return math.cos(angle), math.sin(angle)


def fourier_at(mu: AtomicMeasure, xi: Sequence[Real]) -> complex:
    """``sum_i w_i exp(-2 pi i x_i . xi)``."""
    _check_dim(mu, xi)
    re = Fraction(0)
    im = Fraction(0)
    for x, w in zip(mu.points, mu.weights):
        c, s = _phase_cos_sin(sum(a * b for a, b in zip(x, xi)))
        w = Fraction(w)
        re += w * Fraction(c)
        im -= w * Fraction(s)
    return complex(float(re), float(im))


def pushforward_identity_residual(mu: AtomicMeasure, y: Sequence[Real], t: Real) -> float:
    """``|FT(pushforward)(t) - FT(mu)(t y)|``."""
    _check_dim(mu, y)
    lhs = fourier_at(pushforward_dot(mu, y), (t,))
    rhs = fourier_at(mu, tuple(t * v for v in y))
    return abs(lhs - rhs)
