"""Lattice-approximation sets, covers of their dot-product sets, and box counting.

For ``0 < s < 1`` and an integer ``q``, the level set ``E_{s,q}`` is the set of
points of ``[0, 1]^dim`` within ``q^(-1/s)`` (sup norm) of the lattice
``(1/q) Z^dim``.  Nesting levels along a fast-growing sequence ``q_1 < q_2 < ...``
gives a compact set of Hausdorff dimension ``s * dim``.

Dot products of cell centres ``n/q`` are ``(n . m) / q^2``, and on the paraboloid
the lifted centres ``(n/q, |n|^2/q^2)`` have dot products
``(q^2 n.m + |n|^2 |m|^2) / q^4``.  For points inside the cells the dot product
moves by at most a fixed multiple of ``h = q^(-1/s)``.  With ``x = c + u``,
``y = c' + v``, ``|u_i|, |v_i| <= h`` and every point in ``[0, 1]^dim``:

* ``|x.y - c.c'| <= |c.v| + |u.c'| + |u.v| <= dim * h * (2 + h)``;
* ``| |x|^2 - |c|^2 | <= dim * h * (2 + h)`` and ``|x|^2, |c|^2 <= dim``, so the
  extra term ``|x|^2 |y|^2 - |c|^2 |c'|^2`` is at most ``2 dim^2 h (2 + h)``.

Hence the cover half-widths ``euclidean_half_width`` and
``paraboloid_half_width`` below.  The Euclidean bound is never larger than
``2 (dim + 1) h``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InsufficientScales, ScaleOverflow
from .intervals import IntervalCover

# positions n/q and half-widths must both be resolved in double precision
MIN_HALF_WIDTH = 2.0**-45
MAX_CELLS = 2**24


@dataclass(frozen=True)
class LatticeApproxParams:
    """Parameters of the nested lattice construction.

    ``qs`` overrides the generated sequence.  Otherwise ``q_1 = q`` and
    ``q_{k+1} = max(q_k^k + 1, q_k^ceil(growth/s))``: the first term is the
    growth condition of the construction, the second makes each parent cell
    (half-width ``q_k^(-1/s)``) hold about ``q_k^((growth-1)/s)`` child lattice
    points per axis, which finite depth needs to show the limiting dimension.
    """

    s: float
    q: int
    dim: int
    depth: int = 1
    growth: float = 4.0
    qs: Optional[tuple] = None

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError("s must lie in (0, 1)")
        if self.q < 2 or self.dim < 1 or self.depth < 1:
            raise ValueError("need q >= 2, dim >= 1, depth >= 1")
        seq = self.q_sequence()
        for k, (a, b) in enumerate(zip(seq, seq[1:]), start=1):
            if not b > a**k:
                raise ValueError(f"q sequence violates q_{k + 1} > q_{k}^{k}: {seq}")

    def q_sequence(self) -> tuple:
        if self.qs is not None:
            if len(self.qs) < self.depth:
                raise ValueError("explicit qs shorter than depth")
            return tuple(int(v) for v in self.qs[: self.depth])
        seq = [int(self.q)]
        for k in range(1, self.depth):
            prev = seq[-1]
            seq.append(max(prev**k + 1, prev ** math.ceil(self.growth / self.s)))
        return tuple(seq)

    def half_width(self, k: int) -> float:
        """``q_k^(-1/s)`` for level ``k`` (1-based)."""
        return _half_width(self.q_sequence()[k - 1], self.s)


def _half_width(q: int, s: float) -> float:
    log2_h = -math.log2(q) / s
    if log2_h < math.log2(MIN_HALF_WIDTH):
        raise ScaleOverflow(f"q^(1/s) = 2^{-log2_h:.1f} is beyond double-precision resolution")
    return 2.0**log2_h


@dataclass(frozen=True)
class CellSet:
    """Axis-aligned cells centred at ``indices / q`` with half-width ``half_width``."""

    level: int
    q: int
    s: float
    dim: int
    indices: np.ndarray
    half_width: float
    full_grid: bool = False

    @property
    def centers(self) -> np.ndarray:
        return self.indices / self.q

    @property
    def boxes(self) -> np.ndarray:
        """``(n, dim, 2)`` array of ``[lo, hi]`` per axis, clipped to the unit cube."""
        c = self.centers
        lo = np.clip(c - self.half_width, 0.0, 1.0)
        hi = np.clip(c + self.half_width, 0.0, 1.0)
        return np.stack([lo, hi], axis=-1)

    def __len__(self) -> int:
        return len(self.indices)

    def sample_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` uniform points, each inside a uniformly chosen cell (clipped to the cube)."""
        b = self.boxes[rng.integers(len(self), size=n)]
        return b[..., 0] + rng.random((n, self.dim)) * (b[..., 1] - b[..., 0])


def build_level(params: LatticeApproxParams, k: int = 1) -> CellSet:
    """All cells of ``E_{s,q_k}``: centres ``n/q_k`` with ``0 <= n_i <= q_k``."""
    if not 1 <= k <= params.depth:
        raise ValueError(f"level {k} outside 1..{params.depth}")
    q = params.q_sequence()[k - 1]
    h = _half_width(q, params.s)
    n_cells = (q + 1) ** params.dim
    if n_cells > MAX_CELLS:
        raise ScaleOverflow(f"{n_cells} cells exceed the enumeration budget of {MAX_CELLS}")
    axis = np.arange(q + 1)
    grid = np.stack(np.meshgrid(*([axis] * params.dim), indexing="ij"), axis=-1)
    return CellSet(k, q, params.s, params.dim, grid.reshape(-1, params.dim), h, full_grid=True)


def euclidean_half_width(dim: int, h: float) -> float:
    return dim * h * (2.0 + h)


def paraboloid_half_width(dim: int, h: float) -> float:
    return dim * h * (2.0 + h) * (1.0 + 2.0 * dim)


@lru_cache(maxsize=32)
def _euclidean_grid_values(q: int, dim: int) -> np.ndarray:
    # n.m over the full grid is a dim-fold sumset of {a*b : 0 <= a, b <= q}
    axis = np.arange(q + 1, dtype=np.int64)
    products = np.unique(np.outer(axis, axis))
    total = products
    for _ in range(dim - 1):
        total = np.unique((total[:, None] + products[None, :]).ravel())
    total.setflags(write=False)
    return total


def _pairwise_unique(indices: np.ndarray, value_block, block: int = 256) -> np.ndarray:
    parts = []
    for start in range(0, len(indices), block):
        rows = indices[start : start + block]
        # pairs (i, j) with j >= start cover every unordered pair once
        parts.append(np.unique(value_block(rows, indices[start:])))
    return np.unique(np.concatenate(parts)) if parts else np.empty(0, np.int64)


def euclidean_lattice_values(cells: CellSet) -> np.ndarray:
    """Sorted integers ``n . m`` over all centre pairs (dot products times ``q^2``)."""
    if cells.full_grid:
        return _euclidean_grid_values(cells.q, cells.dim)
    idx = cells.indices.astype(np.int64)
    return _pairwise_unique(idx, lambda a, b: a @ b.T)


@lru_cache(maxsize=32)
def _paraboloid_grid_values(q: int, dim: int) -> np.ndarray:
    axis = np.arange(q + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    out = _paraboloid_pair_values(grid, q)
    out.setflags(write=False)
    return out


def _paraboloid_pair_values(idx: np.ndarray, q: int) -> np.ndarray:
    q2 = np.int64(q) * q

    def block(a, b):
        na = np.einsum("ij,ij->i", a, a)
        nb = np.einsum("ij,ij->i", b, b)
        return q2 * (a @ b.T) + na[:, None] * nb[None, :]

    return _pairwise_unique(idx, block)


def paraboloid_lattice_values(cells: CellSet) -> np.ndarray:
    """Sorted integers ``q^2 n.m + |n|^2 |m|^2`` (lifted dot products times ``q^4``)."""
    if cells.full_grid:
        return _paraboloid_grid_values(cells.q, cells.dim)
    return _paraboloid_pair_values(cells.indices.astype(np.int64), cells.q)


def _admissible(cells: CellSet, top: int) -> range:
    return range(0, top + 1)


def dot_cover_euclidean(cells: CellSet, lattice: str = "achieved") -> IntervalCover:
    """Cover of the dot-product set of the cells by intervals around ``n / q^2``.

    ``lattice="achieved"`` centres intervals on the values attained by pairs of
    cell centres.  ``lattice="admissible"`` uses every ``n`` in
    ``[0, dim q^2]``, the full range allowed for points of the unit cube.
    """
    hw = euclidean_half_width(cells.dim, cells.half_width)
    denom = cells.q**2
    if lattice == "achieved":
        values = euclidean_lattice_values(cells)
    elif lattice == "admissible":
        values = _admissible(cells, cells.dim * denom)
    else:
        raise ValueError(f"unknown lattice {lattice!r}")
    return IntervalCover(values, denom, hw)


def dot_cover_paraboloid(cells: CellSet, lattice: str = "achieved") -> IntervalCover:
    """Cover of the dot-product set of the lifted cells by intervals around ``n / q^4``.

    The admissible range is ``[0, (dim + dim^2) q^4]`` because ``x.y <= dim`` and
    ``|x|^2 |y|^2 <= dim^2`` on the unit cube.
    """
    hw = paraboloid_half_width(cells.dim, cells.half_width)
    denom = cells.q**4
    if lattice == "achieved":
        values = paraboloid_lattice_values(cells)
    elif lattice == "admissible":
        values = _admissible(cells, (cells.dim + cells.dim**2) * denom)
    else:
        raise ValueError(f"unknown lattice {lattice!r}")
    return IntervalCover(values, denom, hw)


def lift_paraboloid(points: np.ndarray) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    return np.column_stack([points, np.einsum("ij,ij->i", points, points)])


def sample_dot_products(cells: CellSet, n: int, rng: np.random.Generator, surface: str = "euclidean"):
    """Dot products of ``n`` random pairs of points drawn inside the cells."""
    x = cells.sample_points(n, rng)
    y = cells.sample_points(n, rng)
    if surface == "paraboloid":
        x, y = lift_paraboloid(x), lift_paraboloid(y)
    elif surface != "euclidean":
        raise ValueError(f"unknown surface {surface!r}")
    return np.einsum("ij,ij->i", x, y)


def dot_cover(cells: CellSet, surface: str = "euclidean", lattice: str = "achieved") -> IntervalCover:
    if surface == "euclidean":
        return dot_cover_euclidean(cells, lattice)
    if surface == "paraboloid":
        return dot_cover_paraboloid(cells, lattice)
    raise ValueError(f"unknown surface {surface!r}")


SWEEP_FIELDS = ("surface", "lattice", "s", "dim", "q", "count", "total_length", "raw_count", "raw_length")


def scaling_sweep(s: float, dim: int, qs: Sequence[int], surface: str = "euclidean", lattice: str = "achieved"):
    """One row per ``q`` with merged and unmerged cover statistics (see ``SWEEP_FIELDS``)."""
    rows = []
    for q in qs:
        cover = dot_cover(build_level(LatticeApproxParams(s, int(q), dim)), surface, lattice)
        rows.append(
            dict(
                surface=surface,
                lattice=lattice,
                s=s,
                dim=dim,
                q=int(q),
                count=cover.count,
                total_length=cover.total_length,
                raw_count=cover.raw_count,
                raw_length=cover.raw_length,
            )
        )
    return rows


def expected_slope(s: float, surface: str = "euclidean") -> float:
    """Predicted exponent of ``q`` in the summed cover length."""
    return (2.0 if surface == "euclidean" else 4.0) - 1.0 / s


def parabola_identity_check(x, y):
    """``(x, x^2) . (y, y^2) - ((x y + 1/2)^2 - 1/4)``; exactly 0 for rational input."""
    half = 0.5 if isinstance(x, float) or isinstance(y, float) else Fraction(1, 2)
    return (x * y + x * x * y * y) - ((x * y + half) ** 2 - half * half)


# --- box counting -----------------------------------------------------------


def nested_intervals_1d(params: LatticeApproxParams, depth: Optional[int] = None):
    """One-dimensional factor of the depth-``depth`` set as ``(lo, hi)`` arrays.

    Every level is a product over coordinates, so the full set is the
    ``dim``-fold product of this union of intervals.
    """
    depth = params.depth if depth is None else depth
    lo = np.array([0.0])
    hi = np.array([1.0])
    for q in params.q_sequence()[:depth]:
        h = _half_width(q, params.s)
        new_lo, new_hi = [], []
        for a, b in zip(lo, hi):
            n = np.arange(math.ceil((a - h) * q), math.floor((b + h) * q) + 1)
            c = n / q
            nl = np.maximum(c - h, a)
            nh = np.minimum(c + h, b)
            keep = nl <= nh
            new_lo.append(nl[keep])
            new_hi.append(nh[keep])
        lo = np.concatenate(new_lo)
        hi = np.concatenate(new_hi)
        if lo.size > MAX_CELLS:
            raise ScaleOverflow(f"{lo.size} intervals exceed the enumeration budget")
    return lo, hi


def _cell_range(lo, hi, eps):
    # a box ending exactly on a grid line does not spill into the next cell
    a = np.floor(lo / eps).astype(np.int64)
    b = np.maximum(a, np.ceil(hi / eps).astype(np.int64) - 1)
    return a, b


def _grid_count_1d(lo: np.ndarray, hi: np.ndarray, eps: float) -> int:
    """Number of grid cells ``[j eps, (j+1) eps]`` meeting a union of intervals in their interior."""
    if lo.size == 0:
        return 0
    a, b = _cell_range(lo, hi, eps)
    order = np.argsort(a, kind="stable")
    a, b = a[order], b[order]
    reach = np.maximum.accumulate(b)
    starts = np.r_[True, a[1:] > reach[:-1]]
    first = np.flatnonzero(starts)
    last = np.r_[first[1:] - 1, a.size - 1]
    return int(np.sum(reach[last] - a[first] + 1))


def box_count_boxes(boxes: np.ndarray, eps: float) -> int:
    """Number of ``eps``-grid cells meeting a union of axis-aligned boxes ``(n, dim, 2)``."""
    boxes = np.asarray(boxes, dtype=float)
    a, b = _cell_range(boxes[..., 0], boxes[..., 1], eps)
    seen = set()
    for lo, hi in zip(a, b):
        seen.update(itertools.product(*(range(l, h + 1) for l, h in zip(lo, hi))))
        if len(seen) > MAX_CELLS:
            raise ScaleOverflow("box count exceeds the enumeration budget")
    return len(seen)


def covering_number(params: LatticeApproxParams, eps: float, depth: Optional[int] = None) -> int:
    lo, hi = nested_intervals_1d(params, depth)
    return _grid_count_1d(lo, hi, eps) ** params.dim


def natural_scales(params: LatticeApproxParams, depth: Optional[int] = None) -> list:
    """Dyadic scales where the construction is resolved.

    The unit scales 1 and 1/2, plus for every level the smallest dyadic scale
    at least the cell diameter ``2 q_k^(-1/s)`` and the next coarser one.
    At those scales each cell is seen as a single box, which is where the
    covering numbers reflect the count of cells rather than their interiors.
    """
    depth = params.depth if depth is None else depth
    scales = {1.0, 0.5}
    for k in range(1, depth + 1):
        j = math.floor(math.log2(1.0 / (2.0 * params.half_width(k))))
        scales.update({2.0**-j, 2.0 ** -(j - 1)})
    return sorted(scales, reverse=True)


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def box_dimension_estimate(
    source: Union[LatticeApproxParams, CellSet, np.ndarray],
    scales: Optional[Sequence[float]] = None,
    depth: Optional[int] = None,
) -> float:
    """Least-squares slope of ``log N(eps)`` against ``log(1/eps)``.

    ``source`` is a nested lattice construction (counted through its product
    structure), a :class:`CellSet`, or an ``(n, dim, 2)`` array of boxes.
    Default scales are :func:`natural_scales` for a construction.
    """
    if isinstance(source, LatticeApproxParams):
        depth = source.depth if depth is None else depth
        if scales is None:
            scales = natural_scales(source, depth)
        finest = source.half_width(depth)
        scales = [e for e in scales if e >= finest]
        count = lambda e: covering_number(source, e, depth)  # noqa: E731
    else:
        boxes = source.boxes if isinstance(source, CellSet) else np.asarray(source, float)
        if scales is None:
            raise InsufficientScales("explicit scales are required for a box set")
        count = lambda e: box_count_boxes(boxes, e)  # noqa: E731
    scales = sorted(set(float(e) for e in scales), reverse=True)
    if len(scales) < 4:
        raise InsufficientScales(f"need at least 4 resolved scales, got {len(scales)}")
    counts = [count(e) for e in scales]
    return loglog_slope([1.0 / e for e in scales], counts)
