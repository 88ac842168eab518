import random
from decimal import Decimal

import pytest

from optdyn import canonical, default_tolerance, is_close, make_context, parse_real


def test_make_context_boundaries():
    assert make_context(1000).digits == 1000
    assert make_context(16).digits == 16
    with pytest.raises(ValueError):
        make_context(8)
    with pytest.raises(ValueError):
        make_context(15)


def test_default_tolerance_formula():
    assert default_tolerance(make_context(1000)).abs == Decimal("1e-990")
    assert default_tolerance(make_context(64)).abs == Decimal("1e-54")
    assert default_tolerance(make_context(16)).abs == Decimal("1e-6")
    tol = default_tolerance(make_context(64))
    assert tol.rel == tol.abs


def test_real_constructor_rejects_floats():
    ctx = make_context(32)
    with pytest.raises(TypeError):
        ctx.real(0.1)
    assert ctx.real("0.1") == Decimal("0.1")
    assert ctx.real(3) == 3


def test_context_immutable():
    ctx = make_context(32)
    with pytest.raises(AttributeError):
        ctx.digits = 99


def test_canonical_round_trip_exact():
    rng = random.Random(7)
    ctx = make_context(50)
    with ctx.activate():
        for _ in range(200):
            mant = rng.randrange(-(10**30), 10**30)
            exp = rng.randrange(-40, 40)
            v = Decimal(mant).scaleb(exp) / 7
            s = canonical(v)
            assert parse_real(s) == v
            assert "E" not in s


def test_addition_cancellation_within_tolerance():
    # order-one operands: a single rounded add then exact cancellation stays
    # inside the guard band
    ctx = make_context(40)
    tol = default_tolerance(ctx)
    rng = random.Random(11)
    with ctx.activate():
        for _ in range(300):
            a = Decimal(rng.randrange(1, 10**20)).scaleb(-19) / 7
            b = Decimal(rng.randrange(1, 10**20)).scaleb(-19) / 3
            assert abs((a + b) - b - a) <= tol.abs


def test_exp_ln_round_trip():
    ctx = make_context(60)
    tol = default_tolerance(ctx)
    with ctx.activate():
        for s in ("1e-50", "1e-7", "0.5", "1", "17.25", "1e10", "1e50"):
            a = Decimal(s)
            assert is_close(a.ln().exp(), a, tol)


def test_parse_real_rejects_junk():
    with pytest.raises(ValueError):
        parse_real("not-a-number")
    with pytest.raises(ValueError):
        parse_real("inf")
