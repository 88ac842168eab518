"""Simplex regularizers and their one-dimensional response curves.

For a two-action decision problem, the regularized argmin over the simplex
collapses to a scalar map ``E -> argmin_{v in [0,1]} { v*E + R([v, 1-v])/eta }``
from a loss difference to the first coordinate of the iterate.  This module
implements that map (``f_one`` at unit stepsize, ``f_eta`` in general), its
inverse, the certified constants attached to each regularizer, and the two
general-dimension solvers the dynamics need: the regularized argmin used by
optimistic FTRL and the Bregman proximal step used by optimistic OMD.

Four regularizer families are supported: negative entropy, squared Euclidean
norm, log barrier, and negative Tsallis entropy with parameter beta in (0,1).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, getcontext

from .games import SimplexPoint

_ZERO = Decimal(0)
_ONE = Decimal(1)
_TWO = Decimal(2)
_HALF = Decimal("0.5")
_QUARTER = Decimal("0.25")

# Extra bisection resolution beyond the working precision; cheap insurance
# for the prox/argmin agreement checks.
_BISECT_SLACK = 5


@dataclass(frozen=True)
class RegularizerConstants:
    """Certified constants for one regularizer.

    ``L`` is the Lipschitz constant of the unit-stepsize response curve, and
    ``c1 = 1/2 - f_one(1/(20 L))``.  ``c2``, ``c3`` and ``delta_prime`` come
    from the per-regularizer admissibility derivations: the stall guarantee
    applies for game parameters ``delta <= delta_prime`` and promises a gap of
    at least ``c2``.  For the entropy regularizer the derivation yields two
    candidate admissible ranges; ``delta_prime`` holds the smaller (safe)
    value and ``delta_prime_loose`` the larger one so reports can flag the
    discrepancy.
    """

    L: Decimal
    c1: Decimal
    c2: Decimal
    c3: Decimal
    delta_prime: Decimal
    delta_prime_loose: Decimal | None = None

    @property
    def has_delta_prime_discrepancy(self) -> bool:
        return self.delta_prime_loose is not None and self.delta_prime_loose != self.delta_prime


class Regularizer:
    """Base class; subclasses provide the closed forms."""

    name: str = ""
    legendre: bool = True  # gradient blows up at the boundary

    @property
    def lipschitz(self) -> Decimal:
        """Lipschitz constant L of f_one."""
        raise NotImplementedError

    @property
    def lift_alpha(self) -> Decimal:
        """Loss rescaling exponent making the n-fold duplication lift exact."""
        raise NotImplementedError

    def f_one(self, E: Decimal) -> Decimal:
        raise NotImplementedError

    def f_inverse(self, x: Decimal) -> Decimal:
        raise NotImplementedError

    def grad(self, v: Decimal) -> Decimal:
        """Per-coordinate regularizer derivative r'(v)."""
        raise NotImplementedError

    def grad_inv(self, w: Decimal) -> Decimal:
        """Inverse of :meth:`grad` on (0, infinity), where defined."""
        raise NotImplementedError

    def constants(self) -> RegularizerConstants:
        raise NotImplementedError

    def _c1(self, L: Decimal) -> Decimal:
        return _HALF - self.f_one(_ONE / (20 * L))

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def _check_unit_interval_interior(x: Decimal) -> None:
    if not (0 < x < 1):
        raise ValueError(f"argument must lie strictly inside (0, 1), got {x}")


class NegativeEntropy(Regularizer):
    """R(x) = sum_i x_i log x_i.  Response curve f_one(E) = 1/(1+exp(E))."""

    name = "entropy"
    legendre = True

    @property
    def lipschitz(self) -> Decimal:
        return _HALF

    @property
    def lift_alpha(self) -> Decimal:
        return _ZERO

    def f_one(self, E: Decimal) -> Decimal:
        return _ONE / (_ONE + E.exp())

    def f_inverse(self, x: Decimal) -> Decimal:
        _check_unit_interval_interior(x)
        return ((_ONE - x) / x).ln()

    def grad(self, v: Decimal) -> Decimal:
        return v.ln() + _ONE

    def grad_inv(self, w: Decimal) -> Decimal:
        return (w - _ONE).exp()

    def constants(self) -> RegularizerConstants:
        L = self.lipschitz
        c1 = self._c1(L)
        c3 = _HALF
        c2 = self.f_one(-(c3 * c1 * c1) / (240 * L)) - _HALF
        # the two admissible-range candidates differ by a factor of two;
        # report the smaller, safe one and keep the loose one for flagging
        tight = (c1 * c1) / (960 * L)
        loose = (c1 * c1) / (480 * L)
        return RegularizerConstants(
            L=L, c1=c1, c2=c2, c3=c3, delta_prime=tight, delta_prime_loose=loose
        )


class SquaredEuclidean(Regularizer):
    """R(x) = (1/2) sum_i x_i^2.  Response curve is clipped linear."""

    name = "euclid"
    legendre = False

    @property
    def lipschitz(self) -> Decimal:
        return _HALF

    @property
    def lift_alpha(self) -> Decimal:
        return _ONE

    def f_one(self, E: Decimal) -> Decimal:
        if E <= -1:
            return _ONE
        if E >= 1:
            return _ZERO
        return (_ONE - E) / 2

    def f_inverse(self, x: Decimal) -> Decimal:
        _check_unit_interval_interior(x)
        return _ONE - 2 * x

    def grad(self, v: Decimal) -> Decimal:
        return v

    def grad_inv(self, w: Decimal) -> Decimal:
        return w

    def constants(self) -> RegularizerConstants:
        L = self.lipschitz
        c1 = self._c1(L)  # equals 1/20 exactly
        c3 = _HALF
        # the response curve is linear here, so f_one(-c3*c1^2/(240L)) - 1/2
        # collapses to this closed form
        c2 = (c1 * c1) / (960 * L)
        dp = (c1 * c1) / (480 * L)
        return RegularizerConstants(L=L, c1=c1, c2=c2, c3=c3, delta_prime=dp)


class LogBarrier(Regularizer):
    """R(x) = -sum_i log x_i.

    The stationarity condition gives a quadratic in the first coordinate;
    the root in (0,1) rationalizes to 2/(E + 2 + sqrt(E^2 + 4)), which is
    cancellation-free for every sign and size of E.
    """

    name = "logbar"
    legendre = True

    @property
    def lipschitz(self) -> Decimal:
        return _HALF

    @property
    def lift_alpha(self) -> Decimal:
        return -_ONE

    def f_one(self, E: Decimal) -> Decimal:
        return _TWO / (E + 2 + (E * E + 4).sqrt())

    def f_inverse(self, x: Decimal) -> Decimal:
        _check_unit_interval_interior(x)
        return (2 * x - _ONE) / (x * x - x)

    def grad(self, v: Decimal) -> Decimal:
        return -_ONE / v

    def grad_inv(self, w: Decimal) -> Decimal:
        return -_ONE / w

    def constants(self) -> RegularizerConstants:
        L = self.lipschitz
        c1 = self._c1(L)  # equals sqrt(1/4 + 400 L^2) - 20 L
        c3 = (c1 * c1) / (60 * L)
        c2 = self.f_one(-(c3 * c1 * c1) / (240 * L)) - _HALF
        dp = (c3 * c1 * c1) / (2160 * L)
        return RegularizerConstants(L=L, c1=c1, c2=c2, c3=c3, delta_prime=dp)


class TsallisEntropy(Regularizer):
    """R(x) = (1 - sum_i x_i^beta) / (1 - beta) for beta in (0, 1).

    The response curve has a closed-form inverse
    ``(beta/(1-beta)) * (x^(beta-1) - (1-x)^(beta-1))`` but no closed forward
    form; ``f_one`` bisects the inverse, which is strictly decreasing, down
    to the working precision.
    """

    name = "tsallis"
    legendre = True

    def __init__(self, beta: Decimal):
        if not (0 < beta < 1):
            raise ValueError(f"tsallis beta must lie in (0, 1), got {beta}")
        self.beta = beta

    def __repr__(self) -> str:
        return f"TsallisEntropy(beta={self.beta})"

    @property
    def lipschitz(self) -> Decimal:
        return _ONE / (2 * self.beta)

    @property
    def lift_alpha(self) -> Decimal:
        return self.beta - _ONE

    def _pow_bm1(self, x: Decimal) -> Decimal:
        # x**(beta-1); beta = 1/2 reduces to an inverse square root
        if self.beta == _HALF:
            return _ONE / x.sqrt()
        return x ** (self.beta - _ONE)

    def f_inverse(self, x: Decimal) -> Decimal:
        _check_unit_interval_interior(x)
        b = self.beta
        return b / (_ONE - b) * (self._pow_bm1(x) - self._pow_bm1(_ONE - x))

    def f_one(self, E: Decimal) -> Decimal:
        prec = getcontext().prec
        lo = Decimal(10) ** -(prec - 4)
        hi = _ONE - lo
        g_lo = self.f_inverse(lo)
        if E >= g_lo:
            return lo
        g_hi = self.f_inverse(hi)
        if E <= g_hi:
            return hi
        width_target = Decimal(10) ** -prec
        while hi - lo > width_target:
            mid = (lo + hi) / 2
            if mid == lo or mid == hi:  # no representable value strictly between
                break
            g = self.f_inverse(mid)
            if g == E:
                return mid
            if g > E:  # inverse is decreasing: root lies right of mid
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2

    def grad(self, v: Decimal) -> Decimal:
        b = self.beta
        return -b / (_ONE - b) * self._pow_bm1(v)

    def grad_inv(self, w: Decimal) -> Decimal:
        b = self.beta
        base = (-w) * (_ONE - b) / b
        expo = _ONE / (b - _ONE)
        if expo == expo.to_integral_value():
            return base ** int(expo)
        return base ** expo

    def constants(self) -> RegularizerConstants:
        b = self.beta
        L = self.lipschitz
        c1 = self._c1(L)
        c3 = _HALF
        c2 = self.f_one(-(c3 * c1 * c1) / (240 * L)) - _HALF
        cand1 = ((c1 * c1 * (_ONE - b)) / (120 * L * b * c3 ** (_ONE - b))) ** (_ONE / b)
        cand2 = (c3 * c1 * c1) / 120
        cand3 = (_ONE - b) / (8 * b) * (c3 * c1 * c1) / (480 * L)
        return RegularizerConstants(
            L=L, c1=c1, c2=c2, c3=c3, delta_prime=min(cand1, cand2, cand3)
        )


# ---------------------------------------------------------------------------
# functional API

def f_one(kind: Regularizer, E: Decimal) -> Decimal:
    """Unit-stepsize response: first coordinate of the 2-action argmin."""
    return kind.f_one(E)


def f_eta(kind: Regularizer, eta: Decimal, E: Decimal) -> Decimal:
    """Response at stepsize eta; satisfies f_eta(eta, E) = f_one(eta * E)."""
    if eta <= 0:
        raise ValueError(f"stepsize must be positive, got {eta}")
    return kind.f_one(eta * E)


def f_inverse(kind: Regularizer, x: Decimal) -> Decimal:
    """Loss difference E with f_one(E) = x, for x strictly inside (0, 1)."""
    return kind.f_inverse(x)


def constants(kind: Regularizer) -> RegularizerConstants:
    """Certified constants of the regularizer at the active precision."""
    return kind.constants()


def euclidean_simplex_projection(v: list[Decimal] | tuple[Decimal, ...]) -> tuple[Decimal, ...]:
    """Exact sort-and-threshold Euclidean projection onto the simplex.

    Coordinates tied at the threshold are all retained, which makes the
    procedure deterministic.
    """
    u = sorted(v, reverse=True)
    cumsum = _ZERO
    rho, rho_cumsum = 0, _ZERO
    for j, uj in enumerate(u, start=1):
        cumsum += uj
        if uj + (_ONE - cumsum) / j > 0:
            rho, rho_cumsum = j, cumsum
    tau = (rho_cumsum - _ONE) / rho
    return tuple(max(vi - tau, _ZERO) for vi in v)


def _softmax(weights_log: list[Decimal]) -> list[Decimal]:
    m = max(weights_log)
    ws = [(w - m).exp() for w in weights_log]
    s = sum(ws)
    return [w / s for w in ws]


def _dual_simplex_solve(kind: Regularizer, base: list[Decimal]) -> list[Decimal]:
    """Solve sum_i min(grad_inv(base_i - mu), 1) = 1 by bisection on mu.

    Every coordinate map is increasing in its argument, so the sum is
    non-increasing in mu and the root is unique.  Used for the barrier-type
    regularizers whose argmin has no closed form in general dimension.
    """

    def phi_capped(w: Decimal) -> Decimal:
        if w >= 0:
            return _ONE
        return min(kind.grad_inv(w), _ONE)

    def total(mu: Decimal) -> Decimal:
        return sum(phi_capped(b - mu) for b in base)

    lo = max(base)
    step = _ONE
    hi = lo + step
    while total(hi) >= 1:
        step *= 2
        hi = lo + step
    width_target = Decimal(10) ** -(getcontext().prec + _BISECT_SLACK)
    while hi - lo > width_target:
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:  # no representable value strictly between
            break
        s = total(mid)
        if s == 1:
            lo = hi = mid
            break
        if s > 1:
            lo = mid
        else:
            hi = mid
    mu = (lo + hi) / 2
    coords = [phi_capped(b - mu) for b in base]
    s = sum(coords)
    return [c / s for c in coords]


def _validate_vector(v, d_expected=None):
    v = tuple(v)
    if d_expected is not None and len(v) != d_expected:
        raise ValueError(f"expected a vector of length {d_expected}, got {len(v)}")
    for a in v:
        if not a.is_finite():
            raise ValueError(f"non-finite vector entry {a}")
    return v


def ftrl_argmin(kind: Regularizer, eta: Decimal, G: list[Decimal] | tuple[Decimal, ...]) -> SimplexPoint:
    """argmin over the simplex of <x, G> + R(x)/eta.

    In two dimensions this routes through the scalar response curve; in
    general dimension the entropy and Euclidean cases use their closed forms
    (softmax, projection) and the barrier-type cases solve the scalar dual
    equation by bisection.
    """
    if eta <= 0:
        raise ValueError(f"stepsize must be positive, got {eta}")
    G = _validate_vector(G)
    d = len(G)
    if d < 2:
        raise ValueError("need at least two actions")
    if all(g == G[0] for g in G):
        return SimplexPoint.uniform(d)
    if d == 2:
        v = f_eta(kind, eta, G[0] - G[1])
        return SimplexPoint((v, _ONE - v))
    if isinstance(kind, NegativeEntropy):
        return SimplexPoint(tuple(_softmax([-eta * g for g in G])))
    if isinstance(kind, SquaredEuclidean):
        return SimplexPoint(euclidean_simplex_projection([-eta * g for g in G]))
    return SimplexPoint(tuple(_dual_simplex_solve(kind, [-eta * g for g in G])))


def bregman_prox(
    kind: Regularizer,
    eta: Decimal,
    ell: list[Decimal] | tuple[Decimal, ...],
    anchor: SimplexPoint,
) -> SimplexPoint:
    """argmin over the simplex of eta * <x, ell> + D_R(x, anchor).

    Barrier-type (Legendre) regularizers need an interior anchor; the
    Euclidean case accepts any anchor and reduces to a projection.
    """
    if eta <= 0:
        raise ValueError(f"stepsize must be positive, got {eta}")
    ell = _validate_vector(ell, anchor.dim)
    if kind.legendre and any(a == 0 for a in anchor):
        raise ValueError("Bregman step undefined: anchor lies on the simplex boundary")
    if all(l == 0 for l in ell):
        return anchor
    if isinstance(kind, NegativeEntropy):
        m = min(ell)
        ws = [a * (-eta * (l - m)).exp() for a, l in zip(anchor, ell)]
        s = sum(ws)
        return SimplexPoint(tuple(w / s for w in ws))
    if isinstance(kind, SquaredEuclidean):
        return SimplexPoint(
            euclidean_simplex_projection([a - eta * l for a, l in zip(anchor, ell)])
        )
    base = [kind.grad(a) - eta * l for a, l in zip(anchor, ell)]
    return SimplexPoint(tuple(_dual_simplex_solve(kind, base)))


_FIXED_KINDS = {
    "entropy": NegativeEntropy,
    "euclid": SquaredEuclidean,
    "logbar": LogBarrier,
}


def parse_regularizer(name: str) -> Regularizer:
    """Parse a regularizer name: entropy | euclid | logbar | tsallis:<beta>."""
    if name in _FIXED_KINDS:
        return _FIXED_KINDS[name]()
    if name.startswith("tsallis:"):
        raw = name.split(":", 1)[1]
        try:
            beta = Decimal(raw)
        except Exception as exc:
            raise ValueError(f"bad tsallis parameter {raw!r}") from exc
        return TsallisEntropy(beta)
    raise ValueError(
        f"unknown regularizer {name!r}; expected entropy | euclid | logbar | tsallis:<beta>"
    )
