"""The four regularizer families side by side.

Shows the two-action response curve at a few loss differences, the certified
constants, and the assumption verifier's verdict at delta = delta_prime / 2
for each family.

Run:  python demos/regularizer_gallery.py
"""

from decimal import Decimal as D

from optdyn import (
    LogBarrier,
    NegativeEntropy,
    SquaredEuclidean,
    TsallisEntropy,
    constants,
    f_one,
    make_context,
    verify_assumptions,
)

ctx = make_context(64)
kinds = [
    NegativeEntropy(),
    SquaredEuclidean(),
    LogBarrier(),
    TsallisEntropy(D("0.5")),
]

with ctx.activate():
    points = [D(-20), D(-2), D(0), D(2), D(20)]
    header = " ".join(f"{f'E={p}':>12}" for p in points)
    print(f"{'response curve':>14} {header}")
    for k in kinds:
        row = " ".join(f"{float(f_one(k, p)):>12.6f}" for p in points)
        print(f"{k.name:>14} {row}")

    print("\ncertified constants:")
    print(f"{'kind':>14} {'L':>6} {'c1':>12} {'c2':>12} {'delta_prime':>12}")
    for k in kinds:
        c = constants(k)
        print(
            f"{k.name:>14} {float(c.L):>6.2f} {float(c.c1):>12.3e} "
            f"{float(c.c2):>12.3e} {float(c.delta_prime):>12.3e}"
        )

print("\nassumption verifier at delta = delta_prime/2:")
for k in kinds:
    with ctx.activate():
        dp = constants(k).delta_prime
    report = verify_assumptions(k, dp / 2, ctx)
    flag = " (two delta_prime candidates; safe one reported)" if report.delta_prime_discrepancy else ""
    print(f"  {k.name:>10}: passed={report.passed}{flag}")
