"""Optimistic gradient descent-ascent against optimistic MWU, same game.

OGDA (optimistic OMD with the squared Euclidean prox) forgets: its anchor
moves a bounded step per iteration regardless of history, and the iterates
spiral into the equilibrium.  The non-forgetful FTRL variant keeps cycling.

Run:  python demos/ogda_contrast.py
"""

from decimal import Decimal as D

from optdyn import (
    AlgorithmSpec,
    ConstantStep,
    NegativeEntropy,
    SquaredEuclidean,
    fit_inverse_sqrt_rate,
    hard_instance,
    make_context,
    run_oftrl,
    run_oomd,
)
from optdyn.plotting import write_trajectory_svg

T = 10000
ctx = make_context(64)
game = hard_instance(D("0.01"))

print(f"running both dynamics for {T} iterations ...")
ogda = run_oomd(
    game, AlgorithmSpec("oomd", SquaredEuclidean(), ConstantStep(D("0.1"))), T, ctx
)
omwu = run_oftrl(
    game, AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1"))), T, ctx
)

print(f"\n{'t':>7} {'OGDA gap':>12} {'OMWU gap':>12}")
marks = {1, 10, 100, 1000, 5000, 10000}
for ro, rm in zip(ogda.records, omwu.records):
    if ro.t in marks:
        print(f"{ro.t:>7} {float(ro.gap):>12.3e} {float(rm.gap):>12.3e}")

with ctx.activate():
    C = fit_inverse_sqrt_rate(ogda, 100, T)
print(f"\nOGDA: smallest C with gap <= C/sqrt(t) on [100, {T}]: {float(C):.4f}")
print(f"OGDA final gap {float(ogda.records[-1].gap):.2e} "
      f"vs OMWU final gap {float(omwu.records[-1].gap):.2e}")

write_trajectory_svg(ogda.records, "ogda.svg", title="OGDA", log_gap=True)
write_trajectory_svg(omwu.records, "omwu.svg", title="optimistic MWU", log_gap=True)
print("wrote ogda.svg and omwu.svg")
