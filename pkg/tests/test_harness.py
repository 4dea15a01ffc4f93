from collections import Counter

import pytest

from polyvis.geometry import GeometryError, Point
from polyvis.harness import (BEHAVIORS, ClassifyContext, classify,
                             collapse_spikes, detect_weakly_simple,
                             generate_query_sets, run_bench, xor_area,
                             xor_area_same)
from conftest import cached_map

SQ = [Point(0, 0), Point(1, 0), Point(1, 1), Point(0, 1)]
SQ_OFF = [Point(0.5, 0), Point(1.5, 0), Point(1.5, 1), Point(0.5, 1)]


@pytest.fixture(scope="module")
def sets_and_map():
    env, mesh, grid, oracle = cached_map(1)
    sets = generate_query_sets(env, mesh, count=120, seed=9)
    return env, mesh, sets, oracle


def test_six_sets_of_count(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    assert set(sets) == {"In", "BB", "Ver", "NearV", "Mid", "NearM"}
    assert all(len(qs.points) == 120 for qs in sets.values())


def test_generation_deterministic(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    again = generate_query_sets(env, mesh, count=120, seed=9)
    for kind in sets:
        assert sets[kind].points == again[kind].points
        assert sets[kind].provenance == again[kind].provenance
    other = generate_query_sets(env, mesh, count=120, seed=10)
    assert other["In"].points != sets["In"].points


def test_in_points_strictly_inside(sets_and_map):
    env, mesh, sets, oracle = sets_and_map
    assert all(oracle.contains(p) > 0 for p in sets["In"].points)


def test_bb_points_in_box(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    minx, miny, maxx, maxy = env.bounding_box
    assert all(minx <= p.x <= maxx and miny <= p.y <= maxy
               for p in sets["BB"].points)


def test_ver_points_bit_exact(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    verts = env.vertices
    for p, src in zip(sets["Ver"].points, sets["Ver"].provenance):
        assert p == verts[src]


def test_mid_points_are_float_midpoints(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    for p, eid in zip(sets["Mid"].points, sets["Mid"].provenance):
        a, b = mesh.edges[eid].vertices
        pa = mesh.point(a)
        pb = mesh.point(b)
        assert p.x == (pa.x + pb.x) / 2.0
        assert p.y == (pa.y + pb.y) / 2.0


def test_near_sets_record_sigma(sets_and_map):
    env, mesh, sets, _ = sets_and_map
    sigmas = {10.0 ** -k for k in range(1, 16)}
    for kind in ("NearV", "NearM"):
        for prov in sets[kind].provenance:
            assert prov[1] in sigmas


def test_xor_examples():
    assert xor_area_same(SQ, list(SQ), 100.0)
    # offset unit squares: symmetric difference area 1 on a map of area 100
    assert not xor_area_same(SQ, SQ_OFF, 100.0)
    assert xor_area(SQ, SQ_OFF) == pytest.approx(1.0)
    # a sliver below threshold passes
    sliver = [Point(0, 0), Point(1, 0), Point(1, 1 + 1e-8), Point(0, 1)]
    assert xor_area_same(SQ, sliver, 100.0)
    assert not xor_area_same(SQ, sliver, 1e-3)


def test_xor_symmetric():
    assert xor_area(SQ, SQ_OFF) == xor_area(SQ_OFF, SQ)


def test_xor_collapses_antennas():
    spiked = [Point(0, 0), Point(1, 0), Point(2, 0.5), Point(1, 0),
              Point(1, 1), Point(0, 1)]
    assert xor_area_same(spiked, SQ, 100.0)


def test_xor_rejects_true_self_intersection():
    bow = [Point(0, 0), Point(3, 3), Point(3, 0), Point(0, 2)]
    with pytest.raises(GeometryError):
        xor_area(bow, SQ)


def test_collapse_spikes():
    spiked = [Point(0, 0), Point(1, 0), Point(2, 0.5), Point(1, 0),
              Point(1, 1), Point(0, 1)]
    assert collapse_spikes(spiked) == SQ
    assert collapse_spikes(SQ) == SQ


def test_classify_table():
    ctx = ClassifyContext(map_area=100.0)
    assert classify(None, None, ctx) == "Null"
    assert classify(None, SQ, ctx) == "A0R1"
    assert classify(SQ, None, ctx) == "A1R0"
    assert classify(SQ, list(SQ), ctx) == "Same"
    assert classify(SQ, SQ_OFF, ctx) == "Diff"
    assert classify(SQ, SQ_OFF,
                    ClassifyContext(100.0, snapped=True)) == "Snap"
    assert classify(SQ, SQ_OFF,
                    ClassifyContext(100.0, weakly_simple_query=True)) == \
        "Weak"
    assert classify(SQ, SQ_OFF,
                    ClassifyContext(100.0, snapped=True,
                                    weakly_simple_query=True)) == "Weak"
    assert classify(SQ, SQ_OFF,
                    ClassifyContext(100.0, ref_available=False)) == "NoRef"
    assert classify(None, None,
                    ClassifyContext(100.0, ref_available=False)) == "NoRef"
    # Same wins over the special cases when outputs agree
    assert classify(SQ, list(SQ),
                    ClassifyContext(100.0, snapped=True)) == "Same"


def test_detect_weakly_simple(weak_env, hole_env):
    assert detect_weakly_simple(weak_env, Point(8, 8))
    assert not detect_weakly_simple(weak_env, Point(0, 0))
    assert all(not detect_weakly_simple(hole_env, v)
               for v in hole_env.vertices)


def test_run_bench_reliability_small():
    env, mesh, _, _ = cached_map(3)
    sets = generate_query_sets(env, mesh, count=25, seed=2)
    records, summary = run_bench(env, sets, watchdog_seconds=30.0)
    counts = Counter(r.behavior for r in records)
    assert sum(counts.values()) == 6 * 25
    assert counts["Crash"] == 0
    assert counts["Inf"] == 0
    assert counts["Diff"] == 0
    assert counts["A0R1"] == 0
    assert counts["Same"] + counts["Null"] > 0
    assert summary.query_us_mean > 0
    assert 0 <= summary.pl_percent <= 100


def test_run_bench_watchdog_inf():
    env, mesh, _, _ = cached_map(3)
    sets = generate_query_sets(env, mesh, count=4, seed=2)
    records, summary = run_bench(env, {"In": sets["In"]},
                                 watchdog_seconds=1.0, stall_on=("In", 1))
    counts = Counter(r.behavior for r in records)
    assert counts["Inf"] == 1
    assert counts["Same"] == 3  # the run continued past the stall
    assert summary.counts["Inf"] == 1


def test_run_bench_crash_recovery():
    env, mesh, _, _ = cached_map(3)
    sets = generate_query_sets(env, mesh, count=4, seed=2)
    records, _ = run_bench(env, {"In": sets["In"]}, watchdog_seconds=30.0,
                           crash_on=("In", 2))
    counts = Counter(r.behavior for r in records)
    assert counts["Crash"] == 1
    assert counts["Same"] == 3


def test_run_bench_noref():
    env, mesh, _, _ = cached_map(3)
    sets = generate_query_sets(env, mesh, count=3, seed=2)
    records, _ = run_bench(env, {"In": sets["In"]}, watchdog_seconds=30.0,
                           reference="none")
    assert all(r.behavior == "NoRef" for r in records)


def test_behavior_names_are_exhaustive():
    assert set(BEHAVIORS) == {"Crash", "Inf", "NoRef", "Null", "A0R1",
                              "A1R0", "Same", "Weak", "Snap", "Diff"}
