"""Engine scaling on the all-pairs mesh benchmark.

Runs the mesh scenario for growing basic-component counts (keep the list
small here; the CLI's bench-scale covers the full 4..512-node range), then
checks the analytic event count and fits wall time against processed
events.  Event volume grows as N^2 per round, so the fit is the honest
scalability summary: time per event stays flat while counts explode.
"""

from wsnsim.harness import bench_scale, linear_fit

reports = bench_scale([1, 2, 4, 8], seed=1)

print("bc   nodes     events   closed-form   wall [ms]   us/event")
for r in reports:
    n = r.nodes
    expected = 2 * 100 * n * (n - 1)
    per_event = r.wall_ms * 1000 / r.events
    print(f"{n // 4:>2}   {n:>5}   {r.events:>8}   {expected:>11}   "
          f"{r.wall_ms:>9.1f}   {per_event:8.2f}")
    assert r.events == expected

slope, intercept, r2 = linear_fit([r.events for r in reports],
                                  [r.wall_ms for r in reports])
print(f"\nwall_ms ~= {slope * 1e6:.2f} us/event * events + {intercept:.1f} ms   (R^2 = {r2:.4f})")
