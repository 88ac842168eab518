"""Trajectory diagnostics and numerical certification.

This module turns recorded runs into the quantities the stall phenomenon is
stated in: the three first-passage stage times on the hard instance family,
the length of the flat region between them, gap peaks of the post-stage
seesaw, best/average iterates, empirical inverse-square-root rate constants,
and a numerical verifier for the regularizer conditions that the stall
guarantee rests on.

Everything here is pure post-processing over immutable data, except the
small observer classes, which stream over the unthinned iterate sequence
during a run (thinned storage never affects them).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Optional, Sequence

from .dynamics import (
    AlgorithmSpec,
    ConstantStep,
    Record,
    Trajectory,
    run_oftrl,
    run_oomd,
)
from .games import SimplexPoint, duality_gap, duplicate_lift, hard_instance
from .numerics import NumericContext, canonical, default_tolerance
from .regularizers import Regularizer, RegularizerConstants, f_inverse, f_one

_ONE = Decimal(1)
_HALF = Decimal("0.5")

DEFAULT_PEAK_FLOOR = Decimal("0.05")
DEFAULT_PEAK_SEPARATION = 10


# ---------------------------------------------------------------------------
# stage structure


@dataclass(frozen=True)
class StageReport:
    """Observed and predicted stage times for a hard-instance run.

    Observed fields are first-passage times on the recorded iterates and are
    None when the trajectory never crosses the threshold; they are never
    extrapolated.  ``t3_window`` is the predicted interval (relative to the
    observed t2) in which the gap provably returns to a constant.
    """

    t_s: Optional[int]
    t1: Optional[int]
    t2: Optional[int]
    t3_window: Optional[tuple[int, int]]
    flat_len: Optional[int]
    predicted_ts_lb: Decimal
    predicted_threshold: Decimal
    predicted_th: int
    peak_gap_after_threshold: Optional[Decimal]
    peak_iteration: Optional[int]

    def to_text(self) -> str:
        def show(v):
            if v is None:
                return "absent"
            if isinstance(v, Decimal):
                return canonical(v)
            if isinstance(v, tuple):
                return f"{v[0]}..{v[1]}"
            return str(v)

        lines = [
            f"T_s={show(self.t_s)}",
            f"T1={show(self.t1)}",
            f"T2={show(self.t2)}",
            f"T3_window={show(self.t3_window)}",
            f"flat_len={show(self.flat_len)}",
            f"predicted_Ts_lb={show(self.predicted_ts_lb)}",
            f"predicted_threshold={show(self.predicted_threshold)}",
            f"predicted_Th={show(self.predicted_th)}",
            f"peak_gap_after_threshold={show(self.peak_gap_after_threshold)}",
            f"peak_iteration={show(self.peak_iteration)}",
        ]
        return "\n".join(lines)


def _records_of(traj) -> Sequence[Record]:
    if isinstance(traj, Trajectory):
        return traj.records
    return traj


def detect_stages(
    traj: Trajectory | Sequence[Record],
    delta: Decimal,
    constants: RegularizerConstants,
    eta: Decimal | None = None,
) -> StageReport:
    """First-passage stage times of a two-action hard-instance run.

    Stage thresholds: x1 crossing 3/4 (after t=1), x1 crossing 1/(1+delta),
    then y1 crossing 1/(2(1+delta)) from that iteration on (y starts above
    it, so earlier crossings do not count).  Predictions use the supplied
    constants and the constant stepsize ``eta``; when a Trajectory is given,
    ``eta`` defaults to its schedule and the game is checked to be a member
    of the hard-instance family.  For records loaded from a CSV the caller's
    ``delta`` is authoritative.
    """
    if isinstance(traj, Trajectory):
        if traj.game.hard_delta is None:
            raise ValueError("trajectory was not produced on a hard-instance game")
        if traj.game.rows != 2 or traj.game.cols != 2:
            raise ValueError("stage detection applies to two-action runs")
        if eta is None:
            sched = traj.spec.schedule
            if not isinstance(sched, ConstantStep):
                raise ValueError("stage detection requires a constant stepsize run")
            eta = sched.eta
    if eta is None:
        raise ValueError("eta is required when passing bare records")

    one_plus = _ONE + delta
    th_s = Decimal(3) / 4
    th_1 = _ONE / one_plus
    th_2 = _ONE / (2 * one_plus)

    t_s = t1 = t2 = None
    for r in _records_of(traj):
        x1, y1 = r.x[0], r.y[0]
        if t_s is None and r.t > 1 and x1 >= th_s:
            t_s = r.t
        if t1 is None and x1 >= th_1:
            t1 = r.t
        if t2 is None and t1 is not None and y1 >= th_2:
            t2 = r.t

    L, c1 = constants.L, constants.c1
    predicted_ts_lb = _ONE / (2 * eta * L)
    predicted_threshold = c1 / (3 * eta * L * delta)
    th = int((c1 / (2 * L * eta * delta)).to_integral_value(rounding="ROUND_FLOOR"))

    t3_window = None
    flat_len = None
    if t2 is not None:
        c1th = c1 * th
        start = t2 + int((c1th / 20).to_integral_value(rounding="ROUND_CEILING"))
        end = t2 + int((c1th / 10).to_integral_value(rounding="ROUND_FLOOR")) - 2
        t3_window = (start, end)
    if t1 is not None and t2 is not None:
        flat_len = t2 - t1

    peak_gap = None
    peak_t = None
    for r in _records_of(traj):
        if Decimal(r.t) >= predicted_threshold:
            if peak_gap is None or r.gap > peak_gap:
                peak_gap, peak_t = r.gap, r.t

    return StageReport(
        t_s=t_s,
        t1=t1,
        t2=t2,
        t3_window=t3_window,
        flat_len=flat_len,
        predicted_ts_lb=predicted_ts_lb,
        predicted_threshold=predicted_threshold,
        predicted_th=th,
        peak_gap_after_threshold=peak_gap,
        peak_iteration=peak_t,
    )


# ---------------------------------------------------------------------------
# gap peaks


class _LocalMaxScanner:
    """Streaming plateau-aware local maxima of a (t, value) sequence.

    A peak is emitted when the series falls after having risen; a plateau at
    the top belongs to the peak and the plateau's first index is reported.
    """

    def __init__(self):
        self._prev_t = None
        self._prev_g = None
        self._rising = False
        self._plateau_t = None

    def push(self, t: int, g: Decimal):
        emitted = None
        if self._prev_g is not None:
            if g > self._prev_g:
                self._rising = True
                self._plateau_t = None
            elif g == self._prev_g:
                if self._plateau_t is None:
                    self._plateau_t = self._prev_t
            else:
                if self._rising:
                    peak_t = self._plateau_t if self._plateau_t is not None else self._prev_t
                    emitted = (peak_t, self._prev_g)
                self._rising = False
                self._plateau_t = None
        self._prev_t, self._prev_g = t, g
        return emitted


def _merge_peaks(
    raw: list[tuple[int, Decimal]], floor: Decimal, min_separation: int
) -> list[tuple[int, Decimal]]:
    merged: list[tuple[int, Decimal]] = []
    for t, g in raw:
        if g < floor:
            continue
        if merged and t - merged[-1][0] < min_separation:
            if g > merged[-1][1]:
                merged[-1] = (t, g)
        else:
            merged.append((t, g))
    return merged


def find_gap_peaks(
    pairs: Iterable[tuple[int, Decimal]],
    floor: Decimal = DEFAULT_PEAK_FLOOR,
    min_separation: int = DEFAULT_PEAK_SEPARATION,
) -> list[tuple[int, Decimal]]:
    """Local maxima of a gap series at least ``floor`` high, deduplicated so
    that peaks closer than ``min_separation`` iterations keep only the larger
    (earlier on ties)."""
    scanner = _LocalMaxScanner()
    raw = []
    for t, g in pairs:
        hit = scanner.push(t, g)
        if hit:
            raw.append(hit)
    return _merge_peaks(raw, floor, min_separation)


def gap_peaks_of(
    traj: Trajectory | Sequence[Record],
    floor: Decimal = DEFAULT_PEAK_FLOOR,
    min_separation: int = DEFAULT_PEAK_SEPARATION,
    after: int = 0,
) -> list[tuple[int, Decimal]]:
    """Gap peaks of the recorded series, optionally restricted to t > after."""
    return find_gap_peaks(
        ((r.t, r.gap) for r in _records_of(traj) if r.t > after),
        floor=floor,
        min_separation=min_separation,
    )


# ---------------------------------------------------------------------------
# streaming observers (attachable to runs; see the unthinned iterate stream)


class PeakTracker:
    """Observer collecting raw gap local maxima during a run."""

    def __init__(self):
        self._scanner = _LocalMaxScanner()
        self._raw: list[tuple[int, Decimal]] = []

    def __call__(self, record: Record):
        hit = self._scanner.push(record.t, record.gap)
        if hit:
            self._raw.append(hit)
        return False

    def peaks(
        self,
        floor: Decimal = DEFAULT_PEAK_FLOOR,
        min_separation: int = DEFAULT_PEAK_SEPARATION,
        after: int = 0,
    ) -> list[tuple[int, Decimal]]:
        return _merge_peaks(
            [p for p in self._raw if p[0] > after], floor, min_separation
        )


class ExtremaTracker:
    """Observer tracking running extremes of x1, y1 and the gap."""

    def __init__(self):
        self.max_x1 = None
        self.max_x1_t = None
        self.min_y1 = None
        self.max_gap = None
        self.max_gap_t = None

    def __call__(self, record: Record):
        x1, y1, g = record.x[0], record.y[0], record.gap
        if self.max_x1 is None or x1 > self.max_x1:
            self.max_x1, self.max_x1_t = x1, record.t
        if self.min_y1 is None or y1 < self.min_y1:
            self.min_y1 = y1
        if self.max_gap is None or g > self.max_gap:
            self.max_gap, self.max_gap_t = g, record.t
        return False


class GapWitnessTracker:
    """Observer for 'there is an iterate t >= t_min with gap >= target'."""

    def __init__(self, t_min: Decimal, target: Decimal | None = None):
        self.t_min = t_min
        self.target = target
        self.max_gap = None
        self.max_gap_t = None
        self.first_hit_t = None
        self.first_hit_gap = None

    def __call__(self, record: Record):
        if Decimal(record.t) < self.t_min:
            return False
        if self.max_gap is None or record.gap > self.max_gap:
            self.max_gap, self.max_gap_t = record.gap, record.t
        if (
            self.target is not None
            and self.first_hit_t is None
            and record.gap >= self.target
        ):
            self.first_hit_t, self.first_hit_gap = record.t, record.gap
        return False

    @property
    def witnessed(self) -> bool:
        return self.first_hit_t is not None


# ---------------------------------------------------------------------------
# sweeps and aggregates


@dataclass(frozen=True)
class ScalingEntry:
    delta: Decimal
    flat_len: Optional[int]
    complete: bool
    peak_gap: Optional[Decimal]
    peak_iteration: Optional[int]
    report: StageReport


def flat_region_scaling(
    deltas: Sequence[Decimal],
    spec: AlgorithmSpec,
    T: int,
    ctx: NumericContext,
    *,
    thin: int = 1,
) -> list[ScalingEntry]:
    """Measure the flat-region length on fresh hard-instance runs, one per delta.

    Entries whose run never reaches the second stage within T iterations are
    flagged incomplete.  Peak columns report the largest gap peak after the
    observed t2 (absent when no peak has happened yet).
    """
    if not isinstance(spec.schedule, ConstantStep):
        raise ValueError("flat-region scaling requires a constant stepsize")
    with ctx.activate():
        cons = spec.kind.constants()
    runner = run_oftrl if spec.family == "oftrl" else run_oomd
    out = []
    for delta in deltas:
        game = hard_instance(delta)
        tracker = PeakTracker()
        traj = runner(game, spec, T, ctx, thin=thin, observers=(tracker,))
        with ctx.activate():
            report = detect_stages(traj, delta, cons)
            peaks = (
                tracker.peaks(after=report.t2) if report.t2 is not None else []
            )
        peak_gap = peak_t = None
        if peaks:
            peak_t, peak_gap = max(peaks, key=lambda p: p[1])
        out.append(
            ScalingEntry(
                delta=delta,
                flat_len=report.flat_len,
                complete=report.t2 is not None,
                peak_gap=peak_gap,
                peak_iteration=peak_t,
                report=report,
            )
        )
    return out


def best_and_average(traj: Trajectory | Sequence[Record], T: int, game=None):
    """Best recorded gap up to T and the gap of the averaged iterates.

    Averages are over the recorded iterates with t <= T, so they are exact
    for unthinned trajectories.  Returns (best_gap, best_t, avg_iterate_gap).
    """
    records = [r for r in _records_of(traj) if r.t <= T]
    if not records:
        raise ValueError(f"no recorded iterates at or before T={T}")
    if game is None:
        if not isinstance(traj, Trajectory):
            raise ValueError("pass the game when using bare records")
        game = traj.game
    best = min(records, key=lambda r: (r.gap, r.t))
    n = Decimal(len(records))
    dx, dy = records[0].x.dim, records[0].y.dim
    mean_x = [sum(r.x[i] for r in records) / n for i in range(dx)]
    mean_y = [sum(r.y[i] for r in records) / n for i in range(dy)]
    avg_gap = duality_gap(game, SimplexPoint(tuple(mean_x)), SimplexPoint(tuple(mean_y)))
    return best.gap, best.t, avg_gap


def fit_inverse_sqrt_rate(
    traj: Trajectory | Sequence[Record], t_min: int, t_max: int
) -> Decimal:
    """Smallest C with gap_t <= C / sqrt(t) on the recorded window [t_min, t_max]."""
    if not (t_min < t_max):
        raise ValueError(f"empty window [{t_min}, {t_max}]")
    C = None
    for r in _records_of(traj):
        if t_min <= r.t <= t_max:
            c = r.gap * Decimal(r.t).sqrt()
            if C is None or c > C:
                C = c
    if C is None:
        raise ValueError(f"no recorded iterates in window [{t_min}, {t_max}]")
    return C


# ---------------------------------------------------------------------------
# assumption verification


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of numerically checking the regularizer conditions at one delta.

    The two quantified conditions are checked at their extremal loss
    differences, obtained through the inverse response curve: monotonicity
    makes the inequality at the extreme imply it everywhere.  A delta above
    the certified admissible range yields an out-of-range report, not a
    failure.
    """

    kind_name: str
    delta: Decimal
    constants: RegularizerConstants
    out_of_range: bool
    unbiased_ok: bool
    rational_ok: bool
    lipschitz_ok: bool
    item1_ok: Optional[bool]
    item2_ok: Optional[bool]
    witnesses: dict[str, Decimal] = field(default_factory=dict)

    @property
    def delta_prime_discrepancy(self) -> bool:
        return self.constants.has_delta_prime_discrepancy

    @property
    def passed(self) -> bool:
        if self.out_of_range:
            return False
        return bool(
            self.unbiased_ok
            and self.rational_ok
            and self.lipschitz_ok
            and self.item1_ok
            and self.item2_ok
        )

    def to_text(self) -> str:
        c = self.constants

        def b(v):
            return "absent" if v is None else str(bool(v)).lower()

        lines = [
            f"kind={self.kind_name}",
            f"delta={canonical(self.delta)}",
            f"L={canonical(c.L)}",
            f"c1={canonical(c.c1)}",
            f"c2={canonical(c.c2)}",
            f"c3={canonical(c.c3)}",
            f"delta_prime={canonical(c.delta_prime)}",
            f"delta_prime_discrepancy={b(self.delta_prime_discrepancy)}",
        ]
        if c.delta_prime_loose is not None:
            lines.append(f"delta_prime_loose={canonical(c.delta_prime_loose)}")
        lines += [
            f"out_of_range={b(self.out_of_range)}",
            f"unbiased_ok={b(self.unbiased_ok)}",
            f"rational_ok={b(self.rational_ok)}",
            f"lipschitz_ok={b(self.lipschitz_ok)}",
            f"item1_ok={b(self.item1_ok)}",
            f"item2_ok={b(self.item2_ok)}",
        ]
        for k in sorted(self.witnesses):
            lines.append(f"{k}={canonical(self.witnesses[k])}")
        lines.append(f"passed={b(self.passed)}")
        return "\n".join(lines)


def lipschitz_scan(
    kind: Regularizer, span: int = 100, n_coarse: int = 201, n_fine: int = 101
) -> Decimal:
    """Max difference quotient of the response curve on a fixed grid.

    Coarse grid over [-span, span] plus a fine grid over [-2, 2] where the
    slope of every supported regularizer attains its maximum.
    """
    worst = Decimal(0)
    for lo, hi, n in ((-span, span, n_coarse), (-2, 2, n_fine)):
        step = (Decimal(hi) - Decimal(lo)) / (n - 1)
        prev_e = Decimal(lo)
        prev_f = f_one(kind, prev_e)
        for i in range(1, n):
            e = Decimal(lo) + step * i
            f = f_one(kind, e)
            q = abs(f - prev_f) / (e - prev_e)
            if q > worst:
                worst = q
            prev_e, prev_f = e, f
    return worst


def verify_assumptions(
    kind: Regularizer, delta: Decimal, ctx: NumericContext
) -> AssumptionReport:
    """Check the standing and stall-specific regularizer conditions at ``delta``."""
    with ctx.activate():
        cons = kind.constants()
        tol = default_tolerance(ctx)
        L, c1, c2, c3 = cons.L, cons.c1, cons.c2, cons.c3

        witnesses: dict[str, Decimal] = {}
        f0 = f_one(kind, Decimal(0))
        unbiased_ok = abs(f0 - _HALF) <= tol.abs
        witnesses["f_at_zero"] = f0

        probe = Decimal(10) ** 6
        f_neg = f_one(kind, -probe)
        f_pos = f_one(kind, probe)
        milli = Decimal("0.001")
        rational_ok = f_neg >= _ONE - milli and f_pos <= milli
        witnesses["f_at_minus_1e6"] = f_neg
        witnesses["f_at_plus_1e6"] = f_pos

        worst_q = lipschitz_scan(kind)
        lipschitz_ok = worst_q <= L + tol.abs
        witnesses["max_difference_quotient"] = worst_q

        out_of_range = delta > cons.delta_prime
        item1_ok = item2_ok = None
        if not out_of_range:
            e0 = f_inverse(kind, _ONE / (_ONE + delta))
            lhs1 = f_one(kind, -(c1 * c1) / (30 * L * delta) + e0)
            rhs1 = (_ONE + c3) / (_ONE + c3 + delta)
            item1_ok = lhs1 >= rhs1
            witnesses["item1_lhs"] = lhs1
            witnesses["item1_rhs"] = rhs1

            e1 = f_inverse(kind, _ONE / (2 * (_ONE + delta)))
            lhs2 = f_one(kind, -(c3 * c1 * c1) / (120 * L) + delta / (4 * L) + e1)
            rhs2 = _HALF + c2
            item2_ok = lhs2 >= rhs2
            witnesses["item2_lhs"] = lhs2
            witnesses["item2_rhs"] = rhs2

        return AssumptionReport(
            kind_name=kind.name,
            delta=delta,
            constants=cons,
            out_of_range=out_of_range,
            unbiased_ok=unbiased_ok,
            rational_ok=rational_ok,
            lipschitz_ok=lipschitz_ok,
            item1_ok=item1_ok,
            item2_ok=item2_ok,
            witnesses=witnesses,
        )


# ---------------------------------------------------------------------------
# duplication-lift equivalence


@dataclass(frozen=True)
class LiftReport:
    """Side-by-side comparison of a 2-action run and its 2n-action lift."""

    kind_name: str
    delta: Decimal
    n: int
    alpha: Decimal
    iterations: int
    digits: int
    max_within_half_spread: Decimal
    max_half_sum_error: Decimal
    tolerance: Decimal

    @property
    def passed(self) -> bool:
        return (
            self.max_within_half_spread <= self.tolerance
            and self.max_half_sum_error <= self.tolerance
        )

    def to_text(self) -> str:
        return "\n".join(
            [
                f"kind={self.kind_name}",
                f"delta={canonical(self.delta)}",
                f"n={self.n}",
                f"alpha={canonical(self.alpha)}",
                f"iterations={self.iterations}",
                f"precision={self.digits}",
                f"max_within_half_spread={canonical(self.max_within_half_spread)}",
                f"max_half_sum_error={canonical(self.max_half_sum_error)}",
                f"tolerance={canonical(self.tolerance)}",
                f"passed={str(self.passed).lower()}",
            ]
        )


def lift_equivalence(
    delta: Decimal,
    n: int,
    kind: Regularizer,
    eta: Decimal,
    T: int,
    ctx: NumericContext,
) -> LiftReport:
    """Run OFTRL on the 2x2 hard instance and on its 2n x 2n duplication lift
    (loss rescaling exponent chosen per regularizer) and compare: coordinates
    within each duplicated half must agree, and half-sums must reproduce the
    two-action trajectory."""
    spec = AlgorithmSpec("oftrl", kind, ConstantStep(eta))
    base_game = hard_instance(delta)
    with ctx.activate():
        alpha = kind.lift_alpha
        lifted_game = duplicate_lift(base_game, n, alpha)
    base = run_oftrl(base_game, spec, T, ctx, thin=1)
    lifted = run_oftrl(lifted_game, spec, T, ctx, thin=1)

    with ctx.activate():
        spread = Decimal(0)
        half_err = Decimal(0)
        for rb, rl in zip(base.records, lifted.records):
            for small, big in ((rb.x, rl.x), (rb.y, rl.y)):
                first = big.coords[:n]
                second = big.coords[n:]
                for half, target in ((first, small[0]), (second, small[1])):
                    spread = max(spread, max(half) - min(half))
                    half_err = max(half_err, abs(sum(half) - target))
        tolerance = Decimal(10) ** -(ctx.digits - 20)

    return LiftReport(
        kind_name=kind.name,
        delta=delta,
        n=n,
        alpha=alpha,
        iterations=T,
        digits=ctx.digits,
        max_within_half_spread=spread,
        max_half_sum_error=half_err,
        tolerance=tolerance,
    )
