from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eislp.padic import (
    DomainError,
    PadicNumber,
    PrecisionExhausted,
    agreement_valuation,
    embed,
    iwasawa_log,
    one_unit_part,
    padic_exp,
    teichmuller,
    unit_power,
)

PRIMES = (3, 5, 7)


def test_embed_rational_valuation_and_unit():
    x = embed(3, Fraction(1, 24), 6)
    # 24 = 3 * 8, so val = -1 and the unit is 8^-1 = 1367 mod 3^7
    assert x.val == -1
    assert x.unit == 1367
    assert x * 24 == 1


def test_embed_integer_zero_and_high_valuation():
    assert embed(3, 0, 5).is_zero()
    assert embed(3, 27, 2).is_zero()  # 27 = O(3^2) at this precision
    y = embed(5, 250, 6)
    assert y.val == 3 and y.unit == 2


def test_arithmetic_matches_exact_rationals():
    p, n = 5, 9
    a = Fraction(7, 3)
    b = Fraction(-2, 11)
    fa, fb = embed(p, a, n), embed(p, b, n)
    assert fa + fb == embed(p, a + b, n)
    assert fa - fb == embed(p, a - b, n)
    assert fa * fb == embed(p, a * b, n)
    assert fa / fb == embed(p, a / b, n)
    assert fa**3 == embed(p, a**3, n)


def test_sum_precision_is_min_absolute():
    a = PadicNumber(3, 10, 0, 1)
    b = PadicNumber(3, 6, 0, 1)
    assert (a + b).prec == 6
    # cancellation raises valuation but cannot invent digits
    c = a - PadicNumber(3, 6, 0, 1)
    assert c.is_zero() and c.prec == 6


def test_product_adds_valuations_keeps_min_relative():
    a = embed(3, 9, 8)  # val 2, rel 6
    b = embed(3, Fraction(1, 3), 3)  # val -1, rel 4
    c = a * b
    assert c.val == 1
    assert c.prec - c.val == 4


def test_division_by_apparent_zero_raises():
    z = PadicNumber(3, 8, 8, 0)
    with pytest.raises(PrecisionExhausted):
        embed(3, 1, 8) / z


def test_equality_is_congruence_at_comparable_precision():
    one = embed(3, 1, 5)
    close = embed(3, 1 + 3**5, 8)
    far = embed(3, 1 + 3**4, 8)
    assert one == close
    assert one != far
    assert agreement_valuation(one, far) == 4


def test_teichmuller_frozen_values():
    # fixed point of x -> x^p: 2 -> 182 mod 5^4, 3 -> 1354 mod 7^5
    assert teichmuller(embed(5, 2, 4)).unit == 182
    assert teichmuller(embed(7, 3, 5)).unit == 1354
    assert teichmuller(embed(3, 4, 6)) == 1  # 4 = 1 mod 3


def test_teichmuller_rejects_nonunit():
    with pytest.raises(DomainError):
        teichmuller(embed(3, 6, 5))


def test_iwasawa_log_frozen_value():
    # log(1+3) = 3 - 3^2/2 + 3^3/3 - ... = 8553 mod 3^10
    x = iwasawa_log(embed(3, 4, 10))
    assert x == embed(3, 8553, 10)
    assert x.val == 1


def test_iwasawa_log_kills_teichmuller_part():
    # log(u) depends only on <u>; roots of unity map to 0
    w = teichmuller(embed(5, 2, 8))
    assert iwasawa_log(w).is_zero()
    u = embed(5, 7, 8)
    assert iwasawa_log(u) == iwasawa_log(one_unit_part(u))


def test_exp_frozen_value_and_domain():
    assert padic_exp(embed(3, 3, 8)) == embed(3, 958, 8)
    with pytest.raises(DomainError):
        padic_exp(embed(3, 1, 8))


def test_exp_log_round_trip_explicit():
    # exp(log(4)) = <4> = 4 at p = 3 since teich(4) = 1
    l = iwasawa_log(embed(3, 4, 8))
    assert padic_exp(l) == embed(3, 4, 8)


def test_unit_power_integer_exponent():
    u = embed(5, 3, 8)
    assert unit_power(u, 3) == one_unit_part(u) ** 3
    assert unit_power(u, 0) == 1


def test_unit_power_p_adic_exponent():
    # <u>^(1/2) squares to <u>
    p, n = 5, 8
    u = embed(p, 6, n)
    s = embed(p, Fraction(1, 2), n)
    r = unit_power(u, s)
    assert r * r == one_unit_part(u)


def test_json_round_trip():
    for x in (embed(3, Fraction(5, 24), 7), PadicNumber(5, 6, 6, 0)):
        y = PadicNumber.from_json(x.to_json())
        assert y.p == x.p and y.prec == x.prec
        assert y == x


@st.composite
def units(draw, primes=PRIMES):
    p = draw(st.sampled_from(primes))
    prec = draw(st.integers(min_value=4, max_value=12))
    u = draw(st.integers(min_value=1, max_value=p**prec - 1).filter(lambda n: n % p))
    return embed(p, u, prec)


@given(units())
@settings(max_examples=60, deadline=None)
def test_teichmuller_times_one_unit_part(x):
    w = teichmuller(x)
    assert w ** (x.p - 1) == 1
    assert (w - x).val >= 1  # w = x mod p
    assert w * one_unit_part(x) == x


@given(units(), st.integers(-30, 30), st.integers(-30, 30))
@settings(max_examples=40, deadline=None)
def test_unit_power_additive(x, s, t):
    lhs = unit_power(x, s + t)
    rhs = unit_power(x, s) * unit_power(x, t)
    assert agreement_valuation(lhs, rhs) >= x.prec - 1


@given(units())
@settings(max_examples=40, deadline=None)
def test_log_exp_identity(x):
    p, n = x.p, x.prec
    y = embed(p, p, n) * x  # an arbitrary element of pZ_p
    back = iwasawa_log(padic_exp(y))
    assert agreement_valuation(back, y) >= n - 1


@given(
    st.sampled_from(PRIMES),
    st.lists(st.tuples(st.sampled_from("+-*/"), st.fractions()), min_size=1, max_size=6),
)
@settings(max_examples=50, deadline=None)
def test_shadow_precision(p, ops):
    # every digit claimed at low precision must match the same computation
    # carried at higher precision
    lo, hi = 6, 14

    def run(prec):
        acc = embed(p, Fraction(1, 2), prec)
        for op, q in ops:
            if op == "/" and (q == 0 or embed(p, q, prec).is_zero()):
                op = "+"
            other = embed(p, q, prec)
            if op == "+":
                acc = acc + other
            elif op == "-":
                acc = acc - other
            elif op == "*":
                acc = acc * other
            else:
                acc = acc / other
        return acc

    a, b = run(lo), run(hi)
    assert agreement_valuation(a, b) >= a.prec
