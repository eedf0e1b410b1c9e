"""Seeded verification runs behind the command-line subcommands.

Each runner returns a :class:`Report`: a table of rows, a flat summary and an
overall pass flag.  Runners draw all randomness from ``numpy.random.default_rng(seed)``
so that a report is a pure function of its arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import finite_field as ff
from .fourier import AtomicMeasure, pushforward_identity_residual
from .fractal import (
    LatticeApproxParams,
    box_dimension_estimate,
    box_count_boxes,
    build_level,
    covering_number,
    dot_cover,
    expected_slope,
    loglog_slope,
    natural_scales,
    parabola_identity_check,
    sample_dot_products,
    scaling_sweep,
)
from .geometry import (
    TranslationVector,
    degenerate_region_points,
    identity_residual,
    jacobian_closed,
    jacobian_numeric,
    norm_sq,
    region_report,
    rotation_to_canonical,
)
from .tubes import (
    ellipsoid_surface,
    max_extent_ratio,
    sphere_surface,
    tangent_cap_extent,
)


@dataclass
class Report:
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True


def _random_translation(rng, d, lo=-3.0, hi=3.0) -> TranslationVector:
    return TranslationVector(tuple(rng.uniform(lo, hi, d - 1)), float(rng.uniform(lo, hi)))


def _random_fraction(rng, bound=5, max_den=12) -> Fraction:
    den = int(rng.integers(1, max_den + 1))
    return Fraction(int(rng.integers(-bound * den, bound * den + 1)), den)


def identity_check(
    ds: Sequence[int],
    samples: int,
    seed: int,
    a: Optional[Sequence[float]] = None,
    exact_cases: int = 100,
    min_pole: float = 1e-3,
    tol: float = 1e-9,
) -> Report:
    """Completed-square identity on random float inputs and exact rational inputs."""
    rng = np.random.default_rng(seed)
    rep = Report()
    for d in ds:
        fixed = TranslationVector.from_flat(a) if a is not None else None
        if fixed is not None and fixed.d != d:
            raise ValueError(f"--a has {fixed.d} coordinates but d={d}")
        worst = 0.0
        done = 0
        while done < samples:
            tv = fixed or _random_translation(rng, d)
            x, y = rng.uniform(-3, 3, size=(2, d - 1))
            if abs(float(x @ x) + tv.a_d) < min_pole:
                continue
            worst = max(worst, abs(identity_residual(tuple(x), tuple(y), tv)))
            done += 1
        nonzero = 0
        done = 0
        while done < exact_cases:
            coords = [_random_fraction(rng) for _ in range(3 * (d - 1) + 1)]
            x, y = coords[: d - 1], coords[d - 1 : 2 * d - 2]
            tv = fixed.exact() if fixed else TranslationVector(coords[2 * d - 2 : 3 * d - 3], coords[-1])
            if norm_sq(x) + tv.a_d == 0:
                continue
            nonzero += identity_residual(x, y, tv, exact=True) != 0
            done += 1
        ok = worst < tol and nonzero == 0
        rep.rows.append(
            dict(d=d, samples=samples, max_residual=worst, exact_cases=exact_cases, exact_nonzero=nonzero, passed=ok)
        )
        rep.passed &= ok
    rep.summary = dict(tol=tol, min_pole=min_pole, max_residual=max(r["max_residual"] for r in rep.rows))
    return rep


def degenerate_sphere_point(a_bar: Sequence[Fraction], radius: Fraction, params: Sequence[Fraction]) -> tuple:
    """Rational point ``x`` with ``|x + a_bar| = radius`` (inverse stereographic projection)."""
    tt = sum(t * t for t in params)
    unit = [2 * t / (tt + 1) for t in params] + [(tt - 1) / (tt + 1)]
    return tuple(-ai + radius * u for ai, u in zip(a_bar, unit))


def jacobian_check(
    ds: Sequence[int],
    samples: int,
    seed: int,
    sphere_points: int = 100,
    step: float = 1e-5,
    rel: float = 1e-5,
    abs_tol: float = 1e-9,
    min_pole: float = 0.2,
) -> Report:
    """Closed-form Jacobian against finite differences, and its zero set on rational sphere points."""
    rng = np.random.default_rng(seed)
    rep = Report()
    for d in ds:
        worst = 0.0
        failures = 0
        done = 0
        while done < samples:
            tv = _random_translation(rng, d, -2.0, 2.0)
            x = rng.uniform(-2, 2, d - 1)
            if abs(float(x @ x) + tv.a_d) < min_pole:
                continue
            closed = jacobian_closed(tuple(x), tv)
            numeric = jacobian_numeric(x, tv, step)
            err = abs(closed - numeric)
            allowed = max(rel * abs(closed), abs_tol)
            worst = max(worst, err / allowed)
            failures += err > allowed
            done += 1
        nonzero = 0
        done = 0
        while done < sphere_points:
            a_bar = [_random_fraction(rng, 2) for _ in range(d - 1)]
            r = abs(_random_fraction(rng, 3)) + Fraction(1, 7)
            tv = TranslationVector(a_bar, r * r - norm_sq(a_bar))
            x = degenerate_sphere_point(a_bar, r, [_random_fraction(rng, 4) for _ in range(d - 2)])
            if norm_sq(x) + tv.a_d == 0:
                continue
            nonzero += jacobian_closed(x, tv, exact=True) != 0
            done += 1
        ok = failures == 0 and nonzero == 0
        rep.rows.append(
            dict(d=d, samples=samples, failures=failures, worst_error_ratio=worst, sphere_points=sphere_points, sphere_nonzero=nonzero, passed=ok)
        )
        rep.passed &= ok
    rep.summary = dict(step=step, rel=rel, abs=abs_tol, min_pole=min_pole)
    return rep


def region_report_run(a: Sequence, d: Optional[int] = None) -> Report:
    rep = region_report(TranslationVector.from_flat(a), d)
    sing = rep.singularity
    deg = rep.degenerate
    row = dict(
        a=" ".join(str(v) for v in a),
        origin_position=rep.origin_position,
        singular_center=" ".join(str(v) for v in sing.center) if sing else "",
        singular_radius=sing.radius if sing else "",
        tangent_radius=sing.tangent_radius if sing and sing.tangent_radius is not None else "",
        cylinder_radius_sq=str(deg.cylinder_radius_sq) if deg else "",
        hyperplane_normal=" ".join(str(v) for v in deg.hyperplane_normal) if deg else "",
        hyperplane_offset=str(deg.hyperplane_offset) if deg else "",
        canonical_distance=deg.canonical_distance if deg else "",
        note=rep.note,
    )
    return Report([row], {}, True)


def rotation_check(
    ds: Sequence[int], cases: int, seed: int, points: int = 50, plane_tol: float = 1e-12, rot_tol: float = 1e-10
) -> Report:
    """Degenerate-region points lie on the hyperplane, which the rotation sends to a level set."""
    rng = np.random.default_rng(seed)
    rep = Report()
    for d in ds:
        worst_plane = 0.0
        worst_rot = 0.0
        for _ in range(cases):
            a_bar = rng.uniform(-2, 2, d - 1)
            tv = TranslationVector(tuple(a_bar), float(rng.uniform(-(a_bar @ a_bar) + 0.05, 3)))
            deg = region_report(tv).degenerate
            pts = degenerate_region_points(tv, points, rng)
            normal = np.asarray(deg.hyperplane_normal, float)
            scale = 1.0 + np.abs(pts).max()
            worst_plane = max(worst_plane, float(np.abs(pts @ normal - float(deg.hyperplane_offset)).max()) / scale)
            z = pts @ rotation_to_canonical(tv).T
            worst_rot = max(worst_rot, float(np.abs(z[:, -1] - deg.canonical_distance).max()))
        ok = worst_plane < plane_tol and worst_rot < rot_tol
        rep.rows.append(dict(d=d, cases=cases, max_plane_residual=worst_plane, max_level_error=worst_rot, passed=ok))
        rep.passed &= ok
    rep.summary = dict(plane_tol=plane_tol, rot_tol=rot_tol)
    return rep


def _surface(kind: str, center, axes, side: str, margin: float):
    if kind == "sphere":
        return sphere_surface(center, axes[0], side, margin)
    return ellipsoid_surface(center, axes, side, margin)


def tube_check(
    kind: str,
    center: Sequence[float],
    axes: Sequence[float],
    seed: int,
    kmin: int = 4,
    kmax: int = 14,
    directions: int = 24,
    side: str = "near",
    margin: float = 0.0,
    resolution: int = 4096,
    ratio_tol: float = 4.0,
) -> Report:
    """``sup_e extent / delta`` across dyadic ``delta``; bounded when no tube is tangent."""
    surf = _surface(kind, center, axes, side, margin)
    u = np.random.default_rng(seed).standard_normal((directions, surf.dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    rep = Report()
    for k in range(kmin, kmax + 1):
        delta = 2.0**-k
        rep.rows.append(dict(k=k, delta=delta, max_extent_over_delta=max_extent_ratio(surf, u, delta, resolution)))
    prof = [r["max_extent_over_delta"] for r in rep.rows]
    spread = max(prof) / min(prof) if min(prof) > 0 else math.inf
    rep.passed = spread < ratio_tol
    rep.summary = dict(surface=surf.label, spread=spread, ratio_tol=ratio_tol)
    return rep


def tangent_check(
    center: Sequence[float], radius: float, kmin: int = 6, kmax: int = 11, slope: float = 0.5, slope_tol: float = 0.05
) -> Report:
    """Tangent tube meets the sphere along a length of order ``delta ** 0.5``."""
    rep = Report()
    for k in range(kmin, kmax + 1):
        delta = 2.0**-k
        rep.rows.append(dict(k=k, delta=delta, extent=tangent_cap_extent(center, radius, delta)))
    fit = loglog_slope([r["delta"] for r in rep.rows], [r["extent"] for r in rep.rows])
    rep.passed = abs(fit - slope) <= slope_tol
    rep.summary = dict(slope=fit, expected=slope, slope_tol=slope_tol)
    return rep


def fractal_cover(
    mode: str,
    s: float,
    qs: Sequence[int],
    dim: int,
    seed: int,
    lattice: str = "achieved",
    soundness_samples: int = 10_000,
    check_slope: bool = False,
    slope_tol: float = 0.1,
) -> Report:
    """Sweep of dot-product covers over ``q`` with a fitted slope and a soundness sample."""
    rng = np.random.default_rng(seed)
    rows = scaling_sweep(s, dim, qs, mode, lattice)
    escaped = 0
    for q in qs:
        cells = build_level(LatticeApproxParams(s, int(q), dim))
        cover = dot_cover(cells, mode, lattice)
        escaped += int(np.count_nonzero(~cover.contains(sample_dot_products(cells, soundness_samples, rng, mode))))
    rep = Report(rows=rows)
    expected = expected_slope(s, mode)
    rep.summary = dict(expected_slope=expected, soundness_samples=soundness_samples, escaped=escaped)
    rep.passed = escaped == 0
    if len(qs) >= 2:
        fit = loglog_slope(qs, [r["raw_length"] for r in rows])
        rep.summary["slope_raw_length"] = fit
        rep.summary["slope_total_length"] = loglog_slope(qs, [r["total_length"] for r in rows])
        if check_slope:
            rep.passed &= abs(fit - expected) <= slope_tol
    return rep


def boxdim(
    s: float,
    q: int,
    dim: int,
    depth: int,
    growth: float = 4.0,
    scales: Optional[Sequence[float]] = None,
    full_cube: bool = False,
    tol: float = 0.1,
) -> Report:
    """Box-counting estimate for the nested lattice set, or for the full cube as a control."""
    if full_cube:
        boxes = np.array([[[0.0, 1.0]] * dim])
        scales = list(scales) if scales else [2.0**-k for k in range(1, 9)]
        count = lambda e: box_count_boxes(boxes, e)  # noqa: E731
        est = box_dimension_estimate(boxes, scales)
        target = float(dim)
    else:
        params = LatticeApproxParams(s, q, dim, depth, growth)
        scales = list(scales) if scales else natural_scales(params)
        count = lambda e: covering_number(params, e)  # noqa: E731
        est = box_dimension_estimate(params, scales)
        target = s * dim
    rep = Report()
    for e in sorted(scales, reverse=True):
        rep.rows.append(dict(scale=e, count=count(e)))
    rep.summary = dict(estimate=est, target=target, tol=tol)
    if not full_cube:
        rep.summary["q_sequence"] = " ".join(str(v) for v in params.q_sequence())
    rep.passed = abs(est - target) <= tol
    return rep


def parabola_check(samples: int, seed: int, exact_cases: int = 100, tol: float = 1e-12) -> Report:
    rng = np.random.default_rng(seed)
    xy = rng.uniform(-1, 1, size=(samples, 2))
    worst = max((abs(parabola_identity_check(float(x), float(y))) for x, y in xy), default=0.0)
    nonzero = sum(
        parabola_identity_check(_random_fraction(rng), _random_fraction(rng)) != 0 for _ in range(exact_cases)
    )
    ok = worst < tol and nonzero == 0
    return Report(
        [dict(samples=samples, max_residual=worst, exact_cases=exact_cases, exact_nonzero=nonzero)],
        dict(tol=tol),
        ok,
    )


def ff_scan(primes: Sequence[int], d: int, sizes: Sequence[int], trials: int, seed: int, budget=None) -> Report:
    """Exploratory: sizes of dot-product sets of random subsets of the paraboloid."""
    rep = Report()
    for p in primes:
        scan = ff.threshold_scan(ff.PrimeField(p), d, sizes, trials, seed, budget)
        for size, trial, k in scan.trials:
            rep.rows.append(dict(p=p, d=d, size=size, trial=trial, pi_size=k))
    rep.summary = dict(kind="exploratory", threshold_exponent=ff.threshold_exponent(d))
    return rep


def ff_isotropic(primes: Sequence[int], d: int, budget=None) -> Report:
    rep = Report()
    for p in primes:
        field_ = ff.PrimeField(p)
        n = len(ff.isotropic_vectors(field_, d, budget))
        rep.rows.append(dict(p=p, d=d, p_mod_4=p % 4, isotropic_count=n))
        if d == 2 and field_.admissible:
            rep.passed &= n == 0
    return rep


def pushforward_check(
    measures: int, atoms: int, dim: int, t_values: int, seed: int, t_max: float = 5.0, tol: float = 1e-10
) -> Report:
    rng = np.random.default_rng(seed)
    rep = Report()
    ts = np.linspace(-t_max, t_max, t_values)
    for m in range(measures):
        w = rng.random(atoms)
        mu = AtomicMeasure(rng.standard_normal((atoms, dim)).tolist(), (w / w.sum()).tolist())
        y = rng.standard_normal(dim).tolist()
        worst = max(pushforward_identity_residual(mu, y, float(t)) for t in ts)
        at_zero = pushforward_identity_residual(mu, y, 0.0)
        ok = worst < tol and at_zero == 0.0
        rep.rows.append(dict(measure=m, atoms=atoms, max_residual=worst, residual_at_zero=at_zero, passed=ok))
        rep.passed &= ok
    rep.summary = dict(tol=tol, t_values=t_values, t_max=t_max)
    return rep
