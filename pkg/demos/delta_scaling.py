"""The flat region grows like 1/delta.

Between the iteration where x1 first exceeds 1/(1+delta) and the iteration
where y1 recovers past 1/(2(1+delta)), the y-player's per-step progress is
capped at eta*L*delta, so halving delta roughly doubles the wait.  This demo
measures that scaling on three instances.

Run:  python demos/delta_scaling.py
"""

from decimal import Decimal as D

from optdyn import (
    AlgorithmSpec,
    ConstantStep,
    NegativeEntropy,
    flat_region_scaling,
    make_context,
)

DELTAS = [D("0.1"), D("0.05"), D("0.02")]
T = 4000

ctx = make_context(64)
spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1")))

print(f"measuring flat regions over {T} iterations per delta ...\n")
entries = flat_region_scaling(DELTAS, spec, T, ctx, thin=10)

print(f"{'delta':>8} {'T1':>6} {'T2':>6} {'flat_len':>9}")
for e in entries:
    r = e.report
    print(f"{str(e.delta):>8} {r.t1:>6} {r.t2:>6} {e.flat_len:>9}")

print()
for a, b in zip(entries, entries[1:]):
    ratio = b.flat_len / a.flat_len
    inv = a.delta / b.delta
    print(f"flat_len({b.delta}) / flat_len({a.delta}) = {ratio:.2f}   "
          f"(1/delta ratio: {inv})")
