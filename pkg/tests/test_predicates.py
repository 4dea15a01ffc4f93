import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyvis.predicates import (CCW, COLLINEAR, CW, in_circle, orientation,
                                ray_forward, ray_side, scale_to_ints)

from conftest import exact_orient_fraction, exact_incircle_fraction

finite = st.floats(allow_nan=False, allow_infinity=False,
                   min_value=-1e12, max_value=1e12)


def test_orientation_basic():
    assert orientation(0, 0, 1, 0, 0, 1) == CCW
    assert orientation(0, 0, 0, 1, 1, 0) == CW
    assert orientation(0, 0, 1, 1, 2, 2) == COLLINEAR


def test_orientation_midpoint_failure_case():
    # the float midpoint of (0.1, 0.1) - (0.3, 0.3) is not on the exact
    # line through the endpoints, and the exact sign must say so
    ax, ay = 0.1, 0.1
    bx, by = 0.3, 0.3
    cx = (ax + bx) / 2
    cy = (ay + by) / 2
    want = exact_orient_fraction(ax, ay, bx, by, cx, cy)
    assert orientation(ax, ay, bx, by, cx, cy) == want


@settings(max_examples=300, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_orientation_matches_rational(ax, ay, bx, by, cx, cy):
    assert orientation(ax, ay, bx, by, cx, cy) == exact_orient_fraction(
        ax, ay, bx, by, cx, cy)


@settings(max_examples=200, deadline=None)
@given(finite, finite, finite, finite, finite, finite)
def test_orientation_antisymmetric(ax, ay, bx, by, cx, cy):
    s = orientation(ax, ay, bx, by, cx, cy)
    assert orientation(bx, by, ax, ay, cx, cy) == -s
    assert orientation(ax, ay, cx, cy, bx, by) == -s
    assert orientation(cx, cy, bx, by, ax, ay) == -s


def _near_degenerate_triples(n, seed):
    rng = random.Random(seed)
    for _ in range(n):
        ax = rng.uniform(-1e3, 1e3)
        ay = rng.uniform(-1e3, 1e3)
        bx = rng.uniform(-1e3, 1e3)
        by = rng.uniform(-1e3, 1e3)
        t = rng.uniform(-1.5, 1.5)
        cx = ax + (bx - ax) * t
        cy = ay + (by - ay) * t
        for coord in range(rng.randrange(3)):
            k = rng.choice((-2, -1, 1, 2))
            cx = math.nextafter(cx, cx + k * 1e9)
        yield ax, ay, bx, by, cx, cy


@pytest.mark.parametrize("count", [100_000])
def test_orientation_near_degenerate_bulk(count):
    for ax, ay, bx, by, cx, cy in _near_degenerate_triples(count, 1234):
        got = orientation(ax, ay, bx, by, cx, cy)
        want = exact_orient_fraction(ax, ay, bx, by, cx, cy)
        assert got == want, (ax, ay, bx, by, cx, cy)


@pytest.mark.slow
def test_orientation_near_degenerate_million():
    # the full-scale audit: a million near-collinear triples perturbed by
    # a few ulps each
    bad = 0
    for ax, ay, bx, by, cx, cy in _near_degenerate_triples(1_000_000, 77):
        if orientation(ax, ay, bx, by, cx, cy) != exact_orient_fraction(
                ax, ay, bx, by, cx, cy):
            bad += 1
    assert bad == 0


def test_in_circle_examples():
    assert in_circle(0, 0, 1, 0, 1, 1, 0, 1) == 0       # cocircular
    assert in_circle(0, 0, 1, 0, 1, 1, 1e-30, 1) == 1   # barely inside
    assert in_circle(0, 0, 1, 0, 1, 1, -1e-30, 1) == -1  # barely outside


def test_in_circle_matches_rational():
    rng = random.Random(5)
    for _ in range(3000):
        pts = [rng.uniform(-50, 50) for _ in range(8)]
        # mix in near-cocircular cases on a grid
        if rng.random() < 0.5:
            pts = [float(rng.randrange(-10, 11)) for _ in range(8)]
        if orientation(*pts[:6]) <= 0:
            continue
        assert in_circle(*pts) == exact_incircle_fraction(*pts)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False,
                          min_value=-1e300, max_value=1e300),
                min_size=1, max_size=8))
def test_scale_to_ints_roundtrip(values):
    ints, k = scale_to_ints(values)
    for i, v in zip(ints, values):
        assert Fraction(i, 2 ** k) == Fraction(v)


def test_ray_side_and_forward_exact():
    rng = random.Random(9)
    for _ in range(5000):
        ox = rng.uniform(-100, 100)
        oy = rng.uniform(-100, 100)
        ux = rng.uniform(-3, 3)
        uy = rng.uniform(-3, 3)
        if ux == 0 and uy == 0:
            continue
        if rng.random() < 0.5:
            t = rng.uniform(-2, 2)
            px = ox + ux * t
            py = oy + uy * t
        else:
            px = rng.uniform(-100, 100)
            py = rng.uniform(-100, 100)
        cross = (Fraction(ux) * (Fraction(py) - Fraction(oy))
                 - Fraction(uy) * (Fraction(px) - Fraction(ox)))
        dot = (Fraction(ux) * (Fraction(px) - Fraction(ox))
               + Fraction(uy) * (Fraction(py) - Fraction(oy)))
        assert ray_side(ox, oy, ux, uy, px, py) == (cross > 0) - (cross < 0)
        assert ray_forward(ox, oy, ux, uy, px, py) == (dot > 0) - (dot < 0)
