"""Duplicating actions does not change the dynamics.

Each 2x2 game embeds into a 2n x 2n game by duplicating every action n times
and rescaling entries by n**-alpha, with alpha picked per regularizer
(Euclidean 1, entropy 0, Tsallis beta-1, log barrier -1).  OFTRL then plays
identical dynamics: coordinates within a duplicated half agree exactly and
half-sums reproduce the 2-action run.

Run:  python demos/lift_equivalence.py
"""

from decimal import Decimal as D

from optdyn import (
    LogBarrier,
    NegativeEntropy,
    SquaredEuclidean,
    TsallisEntropy,
    lift_equivalence,
    make_context,
)

ctx = make_context(64)
kinds = [
    NegativeEntropy(),
    SquaredEuclidean(),
    LogBarrier(),
    TsallisEntropy(D("0.5")),
]

print(f"{'kind':>10} {'alpha':>6} {'n':>3} {'half spread':>12} {'half-sum err':>13} {'ok':>4}")
for kind in kinds:
    for n in (2, 3):
        rep = lift_equivalence(D("0.05"), n, kind, D("0.1"), 100, ctx)
        print(
            f"{kind.name:>10} {float(rep.alpha):>6.1f} {n:>3} "
            f"{float(rep.max_within_half_spread):>12.1e} "
            f"{float(rep.max_half_sum_error):>13.1e} {str(rep.passed):>4}"
        )
