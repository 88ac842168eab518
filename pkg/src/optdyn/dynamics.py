"""Self-play simulation loops for optimistic FTRL and optimistic OMD.

Both players minimize.  Updates are simultaneous: iterate t is computed for
both players from the losses generated at iterate t-1.  The first iterate is
always the uniform distribution (empty loss history, unbiased regularizers).

A run is strictly sequential and deterministic: identical configuration and
precision reproduce bit-identical trajectories.  Distinct runs share no
mutable state.  Completed trajectories are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, getcontext
from pathlib import Path
from typing import Callable, Iterable, Optional

from .games import MatrixGame, SimplexPoint, duality_gap, loss_vectors
from .numerics import GUARD_DIGITS, NumericContext, canonical, parse_real
from .regularizers import Regularizer, bregman_prox, f_eta, ftrl_argmin

_ONE = Decimal(1)

CSV_HEADER = "t,x1,y1,gap,Ex,Ey,eta_t,clamps"


@dataclass(frozen=True)
class ConstantStep:
    eta: Decimal

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError(f"eta must be positive, got {self.eta}")


@dataclass(frozen=True)
class AdaGradStep:
    """eta_t = 1 / sqrt(epsilon + sum of squared loss norms seen so far)."""

    epsilon: Decimal

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")


Schedule = ConstantStep | AdaGradStep

OFTRL = "oftrl"
OOMD = "oomd"


@dataclass(frozen=True)
class AlgorithmSpec:
    """Algorithm selector: family (oftrl | oomd), regularizer, stepsize schedule.

    OOMD with the squared Euclidean regularizer is optimistic gradient
    descent-ascent; with the entropy regularizer OFTRL and OOMD coincide
    (optimistic multiplicative weights).
    """

    family: str
    kind: Regularizer
    schedule: Schedule

    def __post_init__(self):
        if self.family not in (OFTRL, OOMD):
            raise ValueError(f"family must be '{OFTRL}' or '{OOMD}', got {self.family!r}")


def _sq_norm(vec) -> Decimal:
    return sum(v * v for v in vec)


def next_stepsize(schedule: Schedule, loss_history: Iterable) -> Decimal:
    """Stepsize for the next iterate given one player's past loss vectors."""
    if isinstance(schedule, ConstantStep):
        return schedule.eta
    acc = schedule.epsilon
    for vec in loss_history:
        acc += _sq_norm(vec)
    return _ONE / acc.sqrt()


def _stepsize_from_accum(schedule: Schedule, acc: Decimal) -> Decimal:
    if isinstance(schedule, ConstantStep):
        return schedule.eta
    return _ONE / acc.sqrt()


@dataclass(frozen=True)
class Record:
    """One recorded iterate.

    ``ex/ey/cum_ex/cum_ey`` are the per-action loss differences and their
    running sums; they are tracked for two-action games only.  ``xhat/yhat``
    hold the secondary (anchor) sequence on OOMD runs.  ``eta`` is the
    x-player's stepsize for this iterate; with a constant schedule both
    players share it, under AdaGrad the y-player's may differ.
    """

    t: int
    x: SimplexPoint
    y: SimplexPoint
    loss_x: Optional[tuple[Decimal, ...]]
    loss_y: Optional[tuple[Decimal, ...]]
    gap: Decimal
    eta: Decimal
    clamps: int = 0
    ex: Optional[Decimal] = None
    ey: Optional[Decimal] = None
    cum_ex: Optional[Decimal] = None
    cum_ey: Optional[Decimal] = None
    xhat: Optional[SimplexPoint] = None
    yhat: Optional[SimplexPoint] = None


@dataclass(frozen=True)
class Trajectory:
    game: MatrixGame
    spec: AlgorithmSpec
    digits: int
    iterations: int
    thin: int
    records: tuple[Record, ...]
    total_clamps: int

    def __len__(self) -> int:
        return len(self.records)


Observer = Callable[[Record], object]


class _CrossingMonitor:
    """Forces retention of the stage-crossing iterates on hard-instance runs.

    Watches first passage of x1 over 3/4 and 1/(1+delta), then of y1 over
    1/(2(1+delta)); the y threshold only counts once x1 has crossed
    1/(1+delta), since y starts above it.
    """

    def __init__(self, delta: Decimal):
        one_plus = _ONE + delta
        self.th_s = Decimal(3) / 4
        self.th_1 = _ONE / one_plus
        self.th_2 = _ONE / (2 * one_plus)
        self.seen_s = self.seen_1 = self.seen_2 = False

    def force(self, t: int, x1: Decimal, y1: Decimal) -> bool:
        hit = False
        if not self.seen_s and t > 1 and x1 >= self.th_s:
            self.seen_s = hit = True
        if not self.seen_1 and x1 >= self.th_1:
            self.seen_1 = hit = True
        if self.seen_1 and not self.seen_2 and y1 >= self.th_2:
            self.seen_2 = hit = True
        return hit


def _interior_clamp(coords: list[Decimal], kind: Regularizer) -> tuple[list[Decimal], int]:
    """Clamp exact-zero coordinates of Legendre-kind iterates off the boundary.

    Needed only when rounding underflows a coordinate to 0 (the true iterate
    is always interior for these regularizers); the clamp magnitude is one
    unit at the working precision and every event is counted so the
    intervention stays auditable.
    """
    if not kind.legendre:
        return coords, 0
    clamps = sum(1 for c in coords if c == 0)
    if clamps == 0:
        return coords, 0
    floor = Decimal(10) ** -getcontext().prec
    top = max(range(len(coords)), key=lambda i: coords[i])
    out = [floor if c == 0 else c for c in coords]
    out[top] -= clamps * floor
    return out, clamps


def _snap(coords: list[Decimal], kind: Regularizer) -> tuple[SimplexPoint, int]:
    coords, clamps = _interior_clamp(coords, kind)
    s = sum(coords)
    drift = abs(s - _ONE)
    if drift > Decimal(10) ** -(getcontext().prec - GUARD_DIGITS):
        coords = [c / s for c in coords]
    return SimplexPoint(tuple(coords)), clamps


def _pair(v: Decimal, kind: Regularizer) -> tuple[SimplexPoint, int]:
    return _snap([v, _ONE - v], kind)


def run_oftrl(
    game: MatrixGame,
    spec: AlgorithmSpec,
    T: int,
    ctx: NumericContext,
    *,
    thin: int = 1,
    observers: tuple[Observer, ...] = (),
) -> Trajectory:
    """Run T iterations of optimistic FTRL self-play.

    Iterate t is the regularized argmin of the cumulative losses through
    t-1 plus the previous loss once more as the optimistic prediction (zero
    at t=1).  Two-action games run on the scalar loss-difference reduction;
    larger games carry full cumulative loss vectors.
    """
    if spec.family != OFTRL:
        raise ValueError(f"run_oftrl needs an oftrl spec, got {spec.family!r}")
    return _run(game, spec, T, ctx, thin, observers)


def run_oomd(
    game: MatrixGame,
    spec: AlgorithmSpec,
    T: int,
    ctx: NumericContext,
    *,
    thin: int = 1,
    observers: tuple[Observer, ...] = (),
) -> Trajectory:
    """Run T iterations of optimistic OMD self-play.

    Maintains the anchor sequence: at t >= 2 the anchor takes a Bregman step
    from the previous anchor along the last loss, and the played iterate
    takes a Bregman step from the new anchor along the same loss.
    """
    if spec.family != OOMD:
        raise ValueError(f"run_oomd needs an oomd spec, got {spec.family!r}")
    return _run(game, spec, T, ctx, thin, observers)


def _run(game, spec, T, ctx, thin, observers) -> Trajectory:
    if T < 1:
        raise ValueError(f"need at least one iteration, got T={T}")
    if thin < 1:
        raise ValueError(f"thin must be >= 1, got {thin}")
    kind = spec.kind
    d1, d2 = game.rows, game.cols
    two_d = d1 == 2 and d2 == 2
    oftrl = spec.family == OFTRL

    with ctx.activate():
        crossing = None
        if two_d and game.hard_delta is not None:
            crossing = _CrossingMonitor(game.hard_delta)

        acc_x = acc_y = (
            spec.schedule.epsilon if isinstance(spec.schedule, AdaGradStep) else _ONE
        )
        # OFTRL state: cumulative losses (vectors) or loss differences (2-d)
        cum_ex = cum_ey = Decimal(0)
        ex_prev = ey_prev = Decimal(0)
        Lx = [Decimal(0)] * d1
        Ly = [Decimal(0)] * d2
        prev_lx: tuple[Decimal, ...] = tuple(Lx)
        prev_ly: tuple[Decimal, ...] = tuple(Ly)
        xhat = yhat = None

        records: list[Record] = []
        total_clamps = 0

        for t in range(1, T + 1):
            eta_x = _stepsize_from_accum(spec.schedule, acc_x)
            eta_y = _stepsize_from_accum(spec.schedule, acc_y)
            clamps = 0
            if t == 1:
                x = SimplexPoint.uniform(d1)
                y = SimplexPoint.uniform(d2)
                if not oftrl:
                    xhat, yhat = x, y
            elif oftrl:
                if two_d:
                    x, cx = _pair(f_eta(kind, eta_x, cum_ex + ex_prev), kind)
                    y, cy = _pair(f_eta(kind, eta_y, cum_ey + ey_prev), kind)
                else:
                    gx = [a + b for a, b in zip(Lx, prev_lx)]
                    gy = [a + b for a, b in zip(Ly, prev_ly)]
                    x, cx = _snap(list(ftrl_argmin(kind, eta_x, gx)), kind)
                    y, cy = _snap(list(ftrl_argmin(kind, eta_y, gy)), kind)
                clamps = cx + cy
            else:
                xhat, c1 = _snap(list(bregman_prox(kind, eta_x, prev_lx, xhat)), kind)
                x, c2 = _snap(list(bregman_prox(kind, eta_x, prev_lx, xhat)), kind)
                yhat, c3 = _snap(list(bregman_prox(kind, eta_y, prev_ly, yhat)), kind)
                y, c4 = _snap(list(bregman_prox(kind, eta_y, prev_ly, yhat)), kind)
                clamps = c1 + c2 + c3 + c4

            lx, ly = loss_vectors(game, x, y)
            gap = duality_gap(game, x, y)
            ex = ey = None
            if two_d:
                ex = lx[0] - lx[1]
                ey = ly[0] - ly[1]
                cum_ex += ex
                cum_ey += ey
            if oftrl and not two_d:
                Lx = [a + b for a, b in zip(Lx, lx)]
                Ly = [a + b for a, b in zip(Ly, ly)]
            if isinstance(spec.schedule, AdaGradStep):
                acc_x += _sq_norm(lx)
                acc_y += _sq_norm(ly)

            record = Record(
                t=t,
                x=x,
                y=y,
                loss_x=lx,
                loss_y=ly,
                gap=gap,
                eta=eta_x,
                clamps=clamps,
                ex=ex,
                ey=ey,
                cum_ex=cum_ex if two_d else None,
                cum_ey=cum_ey if two_d else None,
                xhat=xhat,
                yhat=yhat,
            )
            total_clamps += clamps

            forced = bool(crossing and crossing.force(t, x[0], y[0]))
            for obs in observers:
                if obs(record):
                    forced = True
            if forced or t == 1 or t == T or t % thin == 0:
                records.append(record)

            prev_lx, prev_ly = lx, ly
            ex_prev, ey_prev = (ex, ey) if two_d else (ex_prev, ey_prev)

    return Trajectory(
        game=game,
        spec=spec,
        digits=ctx.digits,
        iterations=T,
        thin=thin,
        records=tuple(records),
        total_clamps=total_clamps,
    )


# ---------------------------------------------------------------------------
# trajectory CSV format


def _config_echo(traj: Trajectory) -> str:
    sched = traj.spec.schedule
    if isinstance(sched, ConstantStep):
        step = f"eta={canonical(sched.eta)}"
    else:
        step = f"adagrad_eps={canonical(sched.epsilon)}"
    parts = [
        f"algo={traj.spec.family}",
        f"reg={traj.spec.kind.name}",
        step,
        f"iters={traj.iterations}",
        f"precision={traj.digits}",
        f"thin={traj.thin}",
    ]
    if traj.game.hard_delta is not None:
        parts.append(f"delta={canonical(traj.game.hard_delta)}")
    return " ".join(parts)


def write_trajectory_csv(
    traj: Trajectory,
    path: str | Path,
    *,
    out_digits: int = 30,
    full_precision: bool = False,
    extra_echo: str = "",
) -> None:
    """Write recorded iterates as CSV (LF line endings).

    Values are canonical decimal strings, rounded to ``out_digits``
    significant digits unless ``full_precision`` is set; the internal
    precision of the trajectory is unaffected either way.  A run-config echo
    goes into a leading '#' comment so files are reproducible byte-for-byte
    from their flags alone.
    """
    import decimal as _decimal

    if full_precision:
        fmt = canonical
    else:
        out_ctx = _decimal.Context(prec=out_digits)

        def fmt(v: Decimal) -> str:
            return canonical(out_ctx.plus(v))

    lines = [f"# config: {_config_echo(traj)}" + (f" {extra_echo}" if extra_echo else "")]
    lines.append(CSV_HEADER)
    for r in traj.records:
        ex = fmt(r.cum_ex) if r.cum_ex is not None else ""
        ey = fmt(r.cum_ey) if r.cum_ey is not None else ""
        lines.append(
            f"{r.t},{fmt(r.x[0])},{fmt(r.y[0])},{fmt(r.gap)},{ex},{ey},{fmt(r.eta)},{r.clamps}"
        )
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_trajectory_csv(path: str | Path) -> list[Record]:
    """Parse a trajectory CSV back into records.

    Only the columns present in the file are populated; loss vectors are not
    stored in the CSV and come back as None.  Strategies are reconstructed as
    two-action points from the recorded first coordinates.
    """
    records: list[Record] = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line == CSV_HEADER:
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise ValueError(f"malformed trajectory row: {line!r}")
        t = int(parts[0])
        x1 = parse_real(parts[1])
        y1 = parse_real(parts[2])
        gap = parse_real(parts[3])
        cum_ex = parse_real(parts[4]) if parts[4] else None
        cum_ey = parse_real(parts[5]) if parts[5] else None
        eta = parse_real(parts[6])
        records.append(
            Record(
                t=t,
                x=SimplexPoint((x1, _ONE - x1)),
                y=SimplexPoint((y1, _ONE - y1)),
                loss_x=None,
                loss_y=None,
                gap=gap,
                eta=eta,
                clamps=int(parts[7]),
                cum_ex=cum_ex,
                cum_ey=cum_ey,
            )
        )
    if not records:
        raise ValueError(f"no trajectory rows found in {path}")
    return records
