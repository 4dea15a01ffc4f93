"""
Differential benchmark against the exact reference
==================================================

Generate the six standard query point families on a random map, run every
query in a supervised worker, classify each outcome against the exact
rational-arithmetic reference, and print the behavior table.
"""

from collections import Counter

from polyvis.harness import generate_query_sets, run_bench, write_report, \
    write_summary
from polyvis.mapgen import random_map
from polyvis.mesh import triangulate

env = random_map(23)
mesh = triangulate(env)
print(f"map: {len(env.vertices)} vertices, {len(env.holes)} holes")

sets = generate_query_sets(env, mesh, count=150, seed=1)
records, summary = run_bench(env, sets, watchdog_seconds=20.0,
                             map_name="demo")

counts = Counter(r.behavior for r in records)
print(f"{'set':>6} " + " ".join(f"{b:>6}" for b in
                                ("Same", "Null", "A1R0", "Snap", "Weak")))
for kind in ("In", "BB", "Ver", "NearV", "Mid", "NearM"):
    row = Counter(r.behavior for r in records if r.set_kind == kind)
    print(f"{kind:>6} " + " ".join(
        f"{row.get(b, 0):>6}" for b in
        ("Same", "Null", "A1R0", "Snap", "Weak")))
print(f"total behaviors: {dict(counts)}")
print(f"mean query {summary.query_us_mean:.1f} us "
      f"(point location {summary.pl_percent:.1f}% of it)")

write_report(records, "behavior_report.csv", "demo")
write_summary(summary, "timing_summary.csv")
print("wrote behavior_report.csv and timing_summary.csv")
