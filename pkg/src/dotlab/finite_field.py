"""Dot-product sets of subsets of the paraboloid over a prime field.

Everything here is exhaustive enumeration with numpy blocks.  Sizes are capped
by budgets that can be raised through the environment variables
``DOTLAB_FF_POINT_BUDGET`` and ``DOTLAB_FF_PAIR_BUDGET`` or per call.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from sympy import isprime

from .errors import DimensionMismatch, SizeOverflow

DEFAULT_POINT_BUDGET = 2**24
DEFAULT_PAIR_BUDGET = 2**40
POINT_BUDGET_ENV = "DOTLAB_FF_POINT_BUDGET"
PAIR_BUDGET_ENV = "DOTLAB_FF_PAIR_BUDGET"


def point_budget() -> int:
    return int(os.environ.get(POINT_BUDGET_ENV, DEFAULT_POINT_BUDGET))


def pair_budget() -> int:
    return int(os.environ.get(PAIR_BUDGET_ENV, DEFAULT_PAIR_BUDGET))


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not isprime(int(self.p)):
            raise ValueError(f"{self.p} is not prime")

    @property
    def admissible(self) -> bool:
        """True when ``p = 3 mod 4``, so that ``-1`` is not a square."""
        return self.p % 4 == 3


@dataclass(frozen=True)
class FpPointSet:
    field: PrimeField
    dim: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1, self.dim)
        if pts.size and (pts.min() < 0 or pts.max() >= self.field.p):
            raise ValueError("coordinates must lie in [0, p)")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise ValueError("duplicate points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def as_set(self) -> set:
        return {tuple(int(v) for v in row) for row in self.points}

    def subset(self, rows: Iterable[int]) -> "FpPointSet":
        return FpPointSet(self.field, self.dim, self.points[np.asarray(list(rows), dtype=np.int64)])


def _check_points(n: int, budget: Optional[int]) -> None:
    limit = point_budget() if budget is None else budget
    if n > limit:
        raise SizeOverflow(f"{n} points exceed the budget of {limit} (set {POINT_BUDGET_ENV} to raise it)")


def _digits(index: np.ndarray, p: int, width: int) -> np.ndarray:
    out = np.empty((index.size, width), dtype=np.int64)
    rest = index.astype(np.int64)
    for j in range(width - 1, -1, -1):
        out[:, j] = rest % p
        rest //= p
    return out


def paraboloid_rows(field: PrimeField, d: int, index: np.ndarray) -> np.ndarray:
    """Points of the paraboloid with the given indices in ``[0, p^(d-1))`` (lexicographic in x)."""
    x = _digits(np.asarray(index), field.p, d - 1)
    return np.column_stack([x, np.sum(x * x, axis=1) % field.p])


def paraboloid_points(field: PrimeField, d: int, budget: Optional[int] = None) -> FpPointSet:
    """All ``p^(d-1)`` points ``(x, x_1^2 + ... + x_{d-1}^2)``."""
    if d < 2:
        raise DimensionMismatch("need d >= 2")
    n = field.p ** (d - 1)
    _check_points(n, budget)
    return FpPointSet(field, d, paraboloid_rows(field, d, np.arange(n)))


def dot_product_set(E: FpPointSet, block: int = 512, pair_limit: Optional[int] = None) -> set:
    """``{x . y mod p : x, y in E}``, stopping as soon as every residue appears."""
    n = len(E)
    if n == 0:
        raise ValueError("E must be nonempty")
    limit = pair_budget() if pair_limit is None else pair_limit
    if n * n > limit:
        raise SizeOverflow(f"{n * n} pairs exceed the budget of {limit} (set {PAIR_BUDGET_ENV} to raise it)")
    p = E.field.p
    pts = E.points
    seen = np.zeros(p, dtype=bool)
    for start in range(0, n, block):
        rows = pts[start : start + block]
        # unordered pairs: each row block against itself and everything after it
        seen[np.unique((rows @ pts[start:].T) % p)] = True
        if seen.all():
            break
    return set(np.flatnonzero(seen).tolist())


@dataclass(frozen=True)
class ScanRow:
    size: int
    normalized_size: float
    min_ratio: float
    mean_ratio: float
    max_ratio: float


@dataclass(frozen=True)
class ScanResult:
    """Exploratory scan of ``|Pi(E)| / p`` over random subsets; observations only."""

    p: int
    d: int
    seed: int
    rows: tuple
    trials: tuple  # (size, trial, pi_size) records


def threshold_exponent(d: int) -> float:
    return d / 2 - 1 / (2 * d)


def threshold_scan(
    field: PrimeField,
    d: int,
    sizes: Sequence[int],
    trials: int,
    rng_seed: int,
    budget: Optional[int] = None,
) -> ScanResult:
    """Sample ``trials`` uniform subsets of each size (without replacement) and record ``|Pi(E)|``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if d < 2:
        raise DimensionMismatch("need d >= 2")
    p = field.p
    total = p ** (d - 1)
    _check_points(max(sizes, default=0), budget)
    rng = np.random.default_rng(rng_seed)
    rows, records = [], []
    scale = p ** threshold_exponent(d)
    for size in sizes:
        if not 1 <= size <= total:
            raise ValueError(f"size {size} outside [1, {total}]")
        ratios = []
        for t in range(trials):
            idx = np.sort(rng.choice(total, size=size, replace=False))
            E = FpPointSet(field, d, paraboloid_rows(field, d, idx))
            k = len(dot_product_set(E))
            records.append((int(size), t, k))
            ratios.append(k / p)
        rows.append(ScanRow(int(size), size / scale, min(ratios), float(np.mean(ratios)), max(ratios)))
    return ScanResult(p, d, int(rng_seed), tuple(rows), tuple(records))


def isotropic_vectors(field: PrimeField, d: int, budget: Optional[int] = None) -> FpPointSet:
    """All nonzero ``v`` in ``F_p^d`` with ``v . v = 0``."""
    if d < 1:
        raise DimensionMismatch("need d >= 1")
    p = field.p
    n = p**d
    _check_points(n, budget)
    found = []
    step = 1 << 18
    for start in range(1, n, step):
        v = _digits(np.arange(start, min(n, start + step)), p, d)
        found.append(v[np.sum(v * v, axis=1) % p == 0])
    pts = np.concatenate(found) if found else np.empty((0, d), dtype=np.int64)
    return FpPointSet(field, d, pts)
