"""Adaptive stepsizes slow the cycle but do not stop it.

With eta_t = 1/sqrt(eps + sum of squared loss norms), optimistic MWU on the
hard instance still cycles around the equilibrium; the shrinking stepsize
stretches each cycle out and damps its amplitude relative to a constant
stepsize.

Run:  python demos/adaptive_stepsize.py
"""

from decimal import Decimal as D

from optdyn import (
    AdaGradStep,
    AlgorithmSpec,
    ConstantStep,
    NegativeEntropy,
    PeakTracker,
    hard_instance,
    make_context,
    run_oftrl,
)

T = 12000
ctx = make_context(64)
game = hard_instance(D("0.01"))

ada_peaks = PeakTracker()
const_peaks = PeakTracker()
print(f"running constant and adaptive stepsize for {T} iterations ...")
ada = run_oftrl(
    game,
    AlgorithmSpec("oftrl", NegativeEntropy(), AdaGradStep(D("0.1"))),
    T, ctx, thin=20, observers=(ada_peaks,),
)
const = run_oftrl(
    game,
    AlgorithmSpec("oftrl", NegativeEntropy(), ConstantStep(D("0.1"))),
    T, ctx, thin=20, observers=(const_peaks,),
)

with ctx.activate():
    floor = D("0.01")
    pa = ada_peaks.peaks(floor=floor)
    pc = const_peaks.peaks(floor=floor)

print(f"\ngap peaks >= {floor}:")
print("  constant eta=0.1:", [(t, round(float(g), 3)) for t, g in pc])
print("  adagrad eps=0.1:  ", [(t, round(float(g), 4)) for t, g in pa])


def seps(peaks):
    return [b[0] - a[0] for a, b in zip(peaks, peaks[1:])]


print("\npeak separations (iterations):")
print("  constant:", seps(pc))
print("  adagrad: ", seps(pa))
print("\nfinal stepsizes: adagrad eta_T =", float(ada.records[-1].eta),
      " (constant stays 0.1)")
