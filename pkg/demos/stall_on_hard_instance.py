"""Optimistic multiplicative weights stalling on the hard 2x2 instance.

Runs OFTRL with the entropy regularizer (= optimistic MWU) on the game
[[1/2 + delta, 1/2], [0, 1]] and prints the three-stage structure of the
trajectory: x races to the boundary, y crawls back up at a rate capped by
delta, and the pair then overshoots the equilibrium into a large-gap seesaw.

Run:  python demos/stall_on_hard_instance.py
"""

from decimal import Decimal as D

from optdyn import (
    AlgorithmSpec,
    ConstantStep,
    ExtremaTracker,
    NegativeEntropy,
    PeakTracker,
    constants,
    detect_stages,
    hard_instance,
    make_context,
    run_oftrl,
    write_trajectory_csv,
)
from optdyn.plotting import write_trajectory_svg

DELTA = D("0.01")
ETA = D("0.1")
T = 6000
DIGITS = 128  # plenty for this horizon; the boundary approach is ~e^-68

ctx = make_context(DIGITS)
game = hard_instance(DELTA)
spec = AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(ETA))

peaks, extrema = PeakTracker(), ExtremaTracker()
print(f"simulating {T} iterations at {DIGITS} digits ...")
traj = run_oftrl(game, spec, T, ctx, thin=5, observers=(peaks, extrema))

with ctx.activate():
    report = detect_stages(traj, DELTA, constants(NegativeEntropy()))
    print()
    print(report.to_text())
    print()
    print(f"deepest boundary approach: 1 - max x1 = {float(1 - extrema.max_x1):.3e} "
          f"(at t={extrema.max_x1_t})")
    print("gap peaks after the flat region:")
    for t, g in peaks.peaks(floor=D("0.05"), after=report.t2):
        print(f"  t={t:5d}  gap={float(g):.4f}")

write_trajectory_csv(traj, "stall.csv")
write_trajectory_svg(traj.records, "stall.svg", title="optimistic MWU on the hard instance",
                     log_gap=True)
print("\nwrote stall.csv and stall.svg")
