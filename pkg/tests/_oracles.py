"""Independent reference computations shared by the test modules."""

from fractions import Fraction
import itertools
import math

import numpy as np


def direct_dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def rational_sphere_point(center, radius, params):
    """Rational point on the sphere |x - center| = radius via inverse stereographic projection.

    ``params`` is a tuple of len(center) - 1 rationals.
    """
    t = [Fraction(p) for p in params]
    tt = sum(ti * ti for ti in t)
    unit = [2 * ti / (tt + 1) for ti in t] + [(tt - 1) / (tt + 1)]
    return tuple(Fraction(c) + Fraction(radius) * u for c, u in zip(center, unit))


def point_plane_distance(point, normal, offset):
    return abs(direct_dot(normal, point) - offset) / math.sqrt(direct_dot(normal, normal))


def loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def brute_force_interval_cover(values, half_width):
    """Merged [v - hw, v + hw] intervals built by repeated pairwise fusion (quadratic, independent)."""
    ivs = [[v - half_width, v + half_width] for v in values]
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(ivs)), 2):
            a, b = ivs[i], ivs[j]
            if a[0] <= b[1] and b[0] <= a[1]:
                ivs[i] = [min(a[0], b[0]), max(a[1], b[1])]
                del ivs[j]
                changed = True
                break
    return sorted(ivs)
