"""Finite unions of closed intervals centred on a rational lattice.

An :class:`IntervalCover` is the union of ``[v/L - w, v/L + w]`` over integer
lattice values ``v`` with common denominator ``L`` and half-width ``w``.
Overlapping intervals are merged before the canonical ``count`` and
``total_length`` are reported.  The unmerged statistics ``raw_count`` and
``raw_length`` (sum of all interval lengths) are kept as well, since covering
arguments bound that sum directly.

All merging is done on the integer values, so it stays exact even when ``w``
is far below the floating-point spacing of ``v/L``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

Values = Union[np.ndarray, range]


def merge_intervals(intervals: Sequence[Sequence[float]]) -> list[tuple[float, float]]:
    """Merge overlapping or touching closed intervals."""
    merged: list[list[float]] = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(a, b) for a, b in merged]


@dataclass(frozen=True)
class IntervalCover:
    values: Values
    denominator: int
    half_width: float

    def __post_init__(self):
        if isinstance(self.values, range):
            if self.values.step != 1:
                raise ValueError("range values must have step 1")
        else:
            v = np.unique(np.asarray(self.values, dtype=np.int64))
            object.__setattr__(self, "values", v)
        if self.half_width < 0:
            raise ValueError("half_width must be nonnegative")

    @property
    def _gap_limit(self) -> float:
        # neighbouring intervals overlap when their centres are <= 2w apart
        return 2.0 * self.half_width * self.denominator

    def _breaks(self) -> np.ndarray:
        v = self.values
        if isinstance(v, range):
            raise TypeError("range-backed covers are summarised analytically")
        return np.flatnonzero(np.diff(v) > self._gap_limit)

    @property
    def raw_count(self) -> int:
        return len(self.values)

    @property
    def raw_length(self) -> float:
        return self.raw_count * 2.0 * self.half_width

    @property
    def count(self) -> int:
        if self.raw_count == 0:
            return 0
        if isinstance(self.values, range):
            return 1 if self._gap_limit >= 1 else self.raw_count
        return int(self._breaks().size + 1)

    @property
    def total_length(self) -> float:
        n = self.raw_count
        if n == 0:
            return 0.0
        v = self.values
        if isinstance(v, range):
            if self._gap_limit >= 1:
                return (v[-1] - v[0]) / self.denominator + 2.0 * self.half_width
            return self.raw_length
        b = self._breaks()
        starts = np.r_[0, b + 1]
        ends = np.r_[b, n - 1]
        spans = (v[ends] - v[starts]).astype(float) / self.denominator
        return float(spans.sum() + starts.size * 2.0 * self.half_width)

    @property
    def intervals(self) -> np.ndarray:
        """Merged intervals as an ``(count, 2)`` array of ``[lo, hi]`` rows."""
        v = np.asarray(self.values, dtype=np.int64)
        if v.size == 0:
            return np.empty((0, 2))
        b = self._breaks() if not isinstance(self.values, range) else (
            np.empty(0, int) if self._gap_limit >= 1 else np.arange(v.size - 1)
        )
        starts = np.r_[0, b + 1]
        ends = np.r_[b, v.size - 1]
        lo = v[starts] / self.denominator - self.half_width
        hi = v[ends] / self.denominator + self.half_width
        return np.column_stack([lo, hi])

    def contains(self, x) -> np.ndarray:
        """Vectorised membership test for the union of intervals."""
        x = np.asarray(x, dtype=float)
        L = self.denominator
        # slack for the rounding of x * L
        slack = 1e-12 * np.abs(x) * L + 1e-9
        lo = np.ceil((x - self.half_width) * L - slack)
        hi = np.floor((x + self.half_width) * L + slack)
        v = self.values
        if isinstance(v, range):
            first, last = v[0], v[-1]
            return (np.maximum(lo, first) <= np.minimum(hi, last)) if len(v) else np.zeros(x.shape, bool)
        # some lattice value lies in [lo, hi]
        i = np.searchsorted(v, lo, side="left")
        ok = i < v.size
        out = np.zeros(x.shape, dtype=bool)
        out[ok] = v[i[ok]] <= hi[ok]
        return out
