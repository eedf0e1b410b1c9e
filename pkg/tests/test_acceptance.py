"""Acceptance criteria 1-9, one test each, with a pass/fail line per criterion.

The lines are printed in the terminal summary (see ``conftest.py``) and also
written immediately when pytest runs with ``-s``.
"""

from fractions import Fraction
import time

import numpy as np

from dotlab.cli import run, split_report
from dotlab.finite_field import PrimeField, dot_product_set, isotropic_vectors, paraboloid_points
from dotlab.fourier import AtomicMeasure, pushforward_identity_residual
from dotlab.fractal import (
    LatticeApproxParams,
    box_dimension_estimate,
    build_level,
    dot_cover_euclidean,
    dot_cover_paraboloid,
    expected_slope,
    sample_dot_products,
)
from dotlab.geometry import (
    TranslationVector,
    degenerate_region_points,
    h_offset,
    identity_residual,
    jacobian_closed,
    jacobian_numeric,
    region_report,
    rotation_to_canonical,
    transform_map,
)
from dotlab.tubes import (
    ellipsoid_surface,
    max_extent_ratio,
    sphere_surface,
    tangent_cap_extent,
)

from _oracles import direct_dot, loglog_slope, point_plane_distance, rational_sphere_point

RESULTS = {}
QS = [3, 10, 31, 100]


def record(n, ok, detail):
    line = f"acceptance criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})"
    RESULTS[n] = line
    print(line)
    assert ok, line


def rand_frac(rng, bound=5, den=12):
    q = int(rng.integers(1, den + 1))
    return Fraction(int(rng.integers(-bound * q, bound * q + 1)), q)


def test_criterion_1_identity(rng):
    t0 = time.perf_counter()
    worst = 0.0
    count = 0
    while count < 10_000:
        d = int(rng.integers(3, 6))
        a_bar = rng.uniform(-3, 3, d - 1)
        a_d = float(rng.uniform(-3, 3))
        x, y = rng.uniform(-3, 3, (2, d - 1))
        if abs(x @ x + a_d) < 1e-3:
            continue
        a = TranslationVector(tuple(a_bar), a_d)
        # independent left side: lifts built here, dotted directly
        lx = list(x + a_bar) + [x @ x + a_d]
        ly = list(y + a_bar) + [y @ y + a_d]
        centre = np.array(transform_map(tuple(x), a))
        rhs = (x @ x + a_d) * np.sum((centre - y) ** 2) + h_offset(tuple(x), a)
        worst = max(worst, abs(direct_dot(lx, ly) - rhs), abs(identity_residual(tuple(x), tuple(y), a)))
        count += 1
    exact_bad = 0
    count = 0
    while count < 100:
        d = int(rng.integers(3, 6))
        x = [rand_frac(rng) for _ in range(d - 1)]
        y = [rand_frac(rng) for _ in range(d - 1)]
        a = TranslationVector([rand_frac(rng) for _ in range(d - 1)], rand_frac(rng))
        if sum(v * v for v in x) + a.a_d == 0:
            continue
        exact_bad += identity_residual(x, y, a, exact=True) != 0
        count += 1
    elapsed = time.perf_counter() - t0
    record(1, worst < 1e-9 and exact_bad == 0 and elapsed < 10,
           f"max float residual {worst:.2e}, exact nonzero {exact_bad}/100, {elapsed:.1f}s")


def test_criterion_2_jacobian(rng):
    t0 = time.perf_counter()
    bad = 0
    count = 0
    while count < 1000:
        d = int(rng.integers(3, 6))
        a = TranslationVector(tuple(rng.uniform(-2, 2, d - 1)), float(rng.uniform(-2, 2)))
        x = rng.uniform(-2, 2, d - 1)
        if abs(x @ x + a.a_d) < 0.2:
            continue
        closed = jacobian_closed(tuple(x), a)
        bad += abs(closed - jacobian_numeric(x, a)) > max(1e-5 * abs(closed), 1e-9)
        count += 1
    sphere_bad = 0
    count = 0
    while count < 100:
        d = int(rng.integers(3, 6))
        a_bar = [rand_frac(rng, 2) for _ in range(d - 1)]
        r = abs(rand_frac(rng, 3)) + Fraction(1, 5)
        a = TranslationVector(a_bar, r * r - sum(v * v for v in a_bar))
        x = rational_sphere_point([-v for v in a_bar], r, [rand_frac(rng, 4) for _ in range(d - 2)])
        if sum(v * v for v in x) + a.a_d == 0:
            continue
        sphere_bad += jacobian_closed(x, a, exact=True) != 0
        count += 1
    elapsed = time.perf_counter() - t0
    record(2, bad == 0 and sphere_bad == 0 and elapsed < 30,
           f"finite-difference mismatches {bad}/1000, sphere nonzero {sphere_bad}/100, {elapsed:.1f}s")


def test_criterion_3_region_rotation(rng):
    worst_plane = 0.0
    worst_level = 0.0
    for _ in range(100):
        d = int(rng.integers(3, 6))
        a_bar = rng.uniform(-2, 2, d - 1)
        a = TranslationVector(tuple(a_bar), float(rng.uniform(-(a_bar @ a_bar) + 0.05, 3)))
        cyl = a_bar @ a_bar + a.a_d
        pts = degenerate_region_points(a, 50, rng)
        normal = np.append(2 * a_bar, 1.0)
        worst_plane = max(worst_plane, float(np.abs(pts @ normal - 2 * cyl).max()) / (1 + np.abs(pts).max()))
        z = pts @ rotation_to_canonical(a).T
        target = 2 * cyl / np.sqrt(4 * a_bar @ a_bar + 1)
        worst_level = max(worst_level, float(np.abs(z[:, -1] - target).max()))
    deg = region_report(TranslationVector((1, 0), 0), 3).degenerate
    oracle = point_plane_distance((0, 0, 0), (2, 0, 1), 2)
    canon_err = max(abs(deg.canonical_distance - 2 / np.sqrt(5)), abs(oracle - 2 / np.sqrt(5)))
    record(3, worst_plane < 1e-12 and worst_level < 1e-10 and canon_err < 1e-12,
           f"plane {worst_plane:.1e}, level {worst_level:.1e}, canonical {canon_err:.1e}")


def test_criterion_4_tubes():
    t0 = time.perf_counter()
    surfaces = [
        sphere_surface((0.4, -0.3), 1.5),
        ellipsoid_surface((0.2, 0.1), (2.0, 1.2)),
        sphere_surface((3.0, 0.0), 1.0, side="near", tangent_margin=0.3),
        sphere_surface((0.3, 0.2, -0.1), 1.4),
        ellipsoid_surface((0.3, 0.2, 0.1), (2.0, 1.5, 1.0)),
    ]
    deltas = [2.0**-k for k in range(4, 15)]
    spreads = []
    for surf in surfaces:
        u = np.random.default_rng(3).standard_normal((24, surf.dim))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        prof = [max_extent_ratio(surf, u, d) for d in deltas]
        spreads.append(max(prof) / min(prof) if min(prof) > 0 else np.inf)
    tdeltas = [2.0**-k for k in range(6, 12)]
    slope = loglog_slope(tdeltas, [tangent_cap_extent((3.0, 0.0), 1.0, d) for d in tdeltas])
    elapsed = time.perf_counter() - t0
    record(4, max(spreads) < 4 and abs(slope - 0.5) <= 0.05 and elapsed < 60,
           f"worst extent/delta spread {max(spreads):.3f}, tangent slope {slope:.4f}, {elapsed:.1f}s")


def test_criterion_5_fractal_scaling(rng):
    t0 = time.perf_counter()
    notes = []
    ok = True
    escaped = 0
    for s in (0.4, 0.45, 0.55):
        covers = []
        for q in QS:
            cells = build_level(LatticeApproxParams(s, q, 2))
            cover = dot_cover_euclidean(cells)
            escaped += int(np.count_nonzero(~cover.contains(sample_dot_products(cells, 10_000, rng))))
            covers.append(cover)
        slope = loglog_slope(QS, [c.raw_length for c in covers])
        ok &= abs(slope - expected_slope(s)) <= 0.1
        notes.append(f"E s={s}: {slope:.3f} vs {expected_slope(s):.3f}")
    for s in (0.2, 0.22, 0.3):
        admissible, achieved = [], []
        for q in QS:
            cells = build_level(LatticeApproxParams(s, q, 2))
            cover = dot_cover_paraboloid(cells)
            escaped += int(np.count_nonzero(~cover.contains(sample_dot_products(cells, 10_000, rng, "paraboloid"))))
            achieved.append(cover.raw_length)
            admissible.append(dot_cover_paraboloid(cells, "admissible").raw_length)
        slope = loglog_slope(QS, admissible)
        ok &= abs(slope - expected_slope(s, "paraboloid")) <= 0.1
        notes.append(
            f"P s={s}: {slope:.3f} vs {expected_slope(s, 'paraboloid'):.3f}"
            f" (achieved-only {loglog_slope(QS, achieved):.3f})"
        )
    elapsed = time.perf_counter() - t0
    ok &= escaped == 0 and elapsed < 120
    record(5, ok, "; ".join(notes) + f"; escaped pairs {escaped}; {elapsed:.1f}s")


def test_criterion_6_box_dimension():
    est = box_dimension_estimate(LatticeApproxParams(1 / 3, 2, 2, depth=2))
    square = box_dimension_estimate(np.array([[[0.0, 1.0], [0.0, 1.0]]]), [2.0**-k for k in range(1, 9)])
    record(6, abs(est - 2 / 3) <= 0.1 and abs(square - 2) <= 0.05,
           f"lattice set {est:.4f} vs 0.6667, square {square:.4f}")


def test_criterion_7_finite_field():
    t0 = time.perf_counter()
    small = dot_product_set(paraboloid_points(PrimeField(3), 3)) == {0, 1, 2}
    full = True
    for p in (3, 7, 11, 19):
        pts = paraboloid_points(PrimeField(p), 3).points.tolist()
        brute = {sum(a * b for a, b in zip(x, y)) % p for x in pts for y in pts}
        full &= len(dot_product_set(paraboloid_points(PrimeField(p), 3))) == p == len(brute)
    primes = [p for p in range(3, 24) if all(p % k for k in range(2, p)) and p % 4 == 3]
    iso = all(len(isotropic_vectors(PrimeField(p), 2)) == 0 for p in primes)
    elapsed = time.perf_counter() - t0
    record(7, small and full and iso and elapsed < 60,
           f"P_3 over F_3 {small}, full paraboloids {full}, isotropic-free primes {primes}: {iso}, {elapsed:.1f}s")


def test_criterion_8_pushforward(rng):
    worst = 0.0
    zero = 0.0
    for _ in range(3):
        w = rng.random(50)
        mu = AtomicMeasure(rng.standard_normal((50, 3)).tolist(), (w / w.sum()).tolist())
        y = rng.standard_normal(3).tolist()
        worst = max([worst] + [pushforward_identity_residual(mu, y, float(t)) for t in np.linspace(-5, 5, 100)])
        zero = max(zero, pushforward_identity_residual(mu, y, 0.0))
    record(8, worst < 1e-10 and zero == 0.0, f"max residual {worst:.2e}, residual at t=0 {zero}")


DETERMINISM_RUNS = [
    ["identity-check", "--samples", "300", "--seed", "7"],
    ["jacobian-check", "--samples", "30", "--sphere-points", "10", "--seed", "3"],
    ["region-report", "--a", "0.5,-1,2"],
    ["rotation-check", "--cases", "5", "--seed", "2"],
    ["tube-check", "--kmin", "4", "--kmax", "7", "--directions", "4", "--seed", "1"],
    ["tangent-check"],
    ["fractal-cover", "--s", "0.4", "--q", "3,10", "--soundness-samples", "500", "--seed", "4"],
    ["boxdim"],
    ["parabola-check", "--samples", "200", "--seed", "9"],
    ["ff-scan", "--p", "7", "--sizes", "3,10", "--trials", "4", "--seed", "11"],
    ["ff-isotropic", "--p", "3,5"],
    ["pushforward-check", "--atoms", "8", "--t-values", "10", "--seed", "5"],
]


def test_criterion_9_determinism(capsys):
    differing = []
    for argv in DETERMINISM_RUNS:
        bodies = []
        for _ in range(2):
            run(argv)
            bodies.append(split_report(capsys.readouterr().out)[1].encode("utf-8"))
        if bodies[0] != bodies[1]:
            differing.append(argv[0])
    record(9, not differing, f"{len(DETERMINISM_RUNS)} subcommands, differing bodies: {differing or 'none'}")
