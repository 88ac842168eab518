"""Matrix games on probability simplexes.

Provides the game and strategy types shared by every simulation, exact
duality-gap evaluation by enumerating pure best responses, the hard 2x2
instance family parameterized by ``delta``, and the action-duplication lift
that embeds a 2x2 game into 2n x 2n dimensions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from pathlib import Path

from .numerics import GUARD_DIGITS, canonical, parse_real

_ONE = Decimal(1)
_HALF = Decimal("0.5")


def _drift_tolerance() -> Decimal:
    return Decimal(10) ** -(getcontext().prec - GUARD_DIGITS)


@dataclass(frozen=True)
class SimplexPoint:
    """A probability vector: nonnegative coordinates summing to one.

    The sum is checked against the active context's drift tolerance, so
    points produced by long chains of rounded arithmetic stay constructible
    while genuinely invalid vectors are rejected.
    """

    coords: tuple[Decimal, ...]

    def __post_init__(self):
        if len(self.coords) < 1:
            raise ValueError("empty simplex point")
        object.__setattr__(self, "coords", tuple(self.coords))
        for c in self.coords:
            if c < 0:
                raise ValueError(f"negative coordinate {c}")
        drift = abs(sum(self.coords) - _ONE)
        if drift > _drift_tolerance():
            raise ValueError(f"coordinates sum {drift} away from 1")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> Decimal:
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    @classmethod
    def uniform(cls, d: int) -> "SimplexPoint":
        w = _ONE / Decimal(d)
        coords = [w] * (d - 1)
        coords.append(_ONE - w * (d - 1))
        return cls(tuple(coords))


@dataclass(frozen=True)
class MatrixGame:
    """A d1 x d2 loss matrix with entries in [0, entry_bound].

    ``hard_delta`` is set on members of the hard instance family (and kept
    by the duplication lift) so downstream stage diagnostics can recover the
    game parameter without re-deriving it from entries.
    """

    entries: tuple[tuple[Decimal, ...], ...]
    entry_bound: Decimal
    hard_delta: Decimal | None = field(default=None)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", rows)
        if not rows or not rows[0]:
            raise ValueError("empty game matrix")
        width = len(rows[0])
        for r in rows:
            if len(r) != width:
                raise ValueError("ragged game matrix")
            for a in r:
                if a < 0 or a > self.entry_bound:
                    raise ValueError(f"entry {a} outside [0, {self.entry_bound}]")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])


def _check_dims(game: MatrixGame, x: SimplexPoint, y: SimplexPoint) -> None:
    if x.dim != game.rows or y.dim != game.cols:
        raise ValueError(
            f"dimension mismatch: game is {game.rows}x{game.cols}, "
            f"strategies are {x.dim} and {y.dim}"
        )


def duality_gap(game: MatrixGame, x: SimplexPoint, y: SimplexPoint) -> Decimal:
    """max_j (x^T A)[j] - min_i (A y)[i].

    Best responses in a matrix game are pure actions, so enumerating rows and
    columns evaluates the gap exactly at the working precision.  The result
    is nonnegative and zero exactly at Nash equilibria.
    """
    _check_dims(game, x, y)
    A = game.entries
    col_payoffs = (
        sum(A[i][j] * x[i] for i in range(game.rows)) for j in range(game.cols)
    )
    row_payoffs = (
        sum(A[i][j] * y[j] for j in range(game.cols)) for i in range(game.rows)
    )
    return max(col_payoffs) - min(row_payoffs)


def _check_delta(delta: Decimal) -> Decimal:
    if not (0 < delta < _HALF):
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    return delta


def hard_instance(delta: Decimal) -> MatrixGame:
    """The 2x2 hard instance [[1/2+delta, 1/2], [0, 1]] for delta in (0, 1/2).

    Its unique equilibrium puts the row player O(delta) from a simplex
    vertex, which is what stalls non-forgetful dynamics.
    """
    _check_delta(delta)
    return MatrixGame(
        entries=((_HALF + delta, _HALF), (Decimal(0), _ONE)),
        entry_bound=_ONE,
        hard_delta=delta,
    )


def hard_instance_nash(delta: Decimal) -> tuple[SimplexPoint, SimplexPoint]:
    """Closed-form unique Nash equilibrium of the hard instance.

    x* = [1/(1+delta), delta/(1+delta)], y* = [1/(2(1+delta)), (1+2delta)/(2(1+delta))].
    """
    _check_delta(delta)
    one_plus = _ONE + delta
    x1 = _ONE / one_plus
    y1 = _ONE / (2 * one_plus)
    x = SimplexPoint((x1, _ONE - x1))
    y = SimplexPoint((y1, _ONE - y1))
    return x, y


def loss_vectors(
    game: MatrixGame, x: SimplexPoint, y: SimplexPoint
) -> tuple[tuple[Decimal, ...], tuple[Decimal, ...]]:
    """Loss vectors for simultaneous play: (A y, -A^T x).

    Both players minimize; the column player's losses carry the minus sign so
    that no other sign convention appears anywhere else.
    """
    _check_dims(game, x, y)
    A = game.entries
    loss_x = tuple(
        sum(A[i][j] * y[j] for j in range(game.cols)) for i in range(game.rows)
    )
    loss_y = tuple(
        -sum(A[i][j] * x[i] for i in range(game.rows)) for j in range(game.cols)
    )
    return loss_x, loss_y


def duplicate_lift(game2: MatrixGame, n: int, alpha: Decimal) -> MatrixGame:
    """Duplicate each action n times and rescale entries by n**-alpha.

    The row index i maps to the original row 1 if i < n else row 2 (same for
    columns), so the lifted matrix consists of four constant blocks of the
    rescaled original entries.  Entries land in [0, n**-alpha].
    """
    if game2.rows != 2 or game2.cols != 2:
        raise ValueError("duplication lift takes a 2x2 base game")
    if game2.entry_bound > _ONE:
        raise ValueError("base game entries must lie in [0, 1]")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    scale = Decimal(n) ** (-alpha)
    block = [[a * scale for a in row] for row in game2.entries]
    entries = tuple(
        tuple(block[0 if i < n else 1][0 if j < n else 1] for j in range(2 * n))
        for i in range(2 * n)
    )
    return MatrixGame(entries=entries, entry_bound=scale, hard_delta=game2.hard_delta)


def duplicate_strategy(x2: SimplexPoint, n: int) -> SimplexPoint:
    """Spread a 2-action strategy uniformly over n copies of each action."""
    if x2.dim != 2:
        raise ValueError("duplicate_strategy takes a 2-action strategy")
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    nd = Decimal(n)
    a = x2[0] / nd
    b = x2[1] / nd
    return SimplexPoint(tuple([a] * n + [b] * n))


def save_game(game: MatrixGame, path: str | Path) -> None:
    """Write the plain-text game format: 'd1 d2 entry_bound' then d1 rows."""
    lines = [f"{game.rows} {game.cols} {canonical(game.entry_bound)}"]
    for row in game.entries:
        lines.append(" ".join(canonical(a) for a in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_game(path: str | Path) -> MatrixGame:
    """Parse the plain-text game format written by :func:`save_game`."""
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"empty game file: {path}")
    head = lines[0].split()
    if len(head) != 3:
        raise ValueError(f"bad game header {lines[0]!r}; want 'd1 d2 entry_bound'")
    d1, d2 = int(head[0]), int(head[1])
    bound = parse_real(head[2])
    if len(lines) != 1 + d1:
        raise ValueError(f"expected {d1} matrix rows, found {len(lines) - 1}")
    entries = []
    for ln in lines[1:]:
        row = tuple(parse_real(tok) for tok in ln.split())
        if len(row) != d2:
            raise ValueError(f"expected {d2} entries per row, got {len(row)}")
        entries.append(row)
    return MatrixGame(entries=tuple(entries), entry_bound=bound)
