from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eislp.characters import (
    DirichletCharacter,
    is_fundamental_discriminant,
    make_quadratic,
)
from eislp.padic import DomainError

P, N = 5, 10


def chi(D, p=P, prec=N):
    return make_quadratic(p, D, prec)


def test_quadratic_frozen_values():
    c3 = chi(-3)
    assert c3(2) == -1
    assert c3.is_odd()
    c4 = chi(-4)
    assert c4(3) == -1
    assert c4.is_odd()
    assert c3(1) == 1 and c4(1) == 1


def test_eval_gcd_rule_and_shifts():
    c3 = chi(-3)
    assert c3(3).is_zero()
    assert c3(5) == -1  # 5 = 2 mod 3
    assert c3(7) == 1
    triv = DirichletCharacter.trivial(P, N)
    assert triv(0) == 1 and triv(123456) == 1


def test_non_fundamental_rejected():
    for bad in (8, -8 * 4, 12 * 3, 0, -2):
        if not is_fundamental_discriminant(bad):
            with pytest.raises(DomainError):
                make_quadratic(P, bad, N)
    # and coprimality to p
    with pytest.raises(DomainError):
        make_quadratic(5, 5, N)


def test_product_inverse_trivial():
    c3, c4 = chi(-3), chi(-4)
    prod = c3 * c4
    assert prod.modulus == 12
    assert prod.parity() == 1
    assert prod(5) == c3(5) * c4(5)
    assert (c3 * c3.inverse()).is_trivial()


def test_conductor_and_primitive_part():
    c3 = chi(-3)
    lifted = c3.extend(12)
    assert lifted.modulus == 12
    assert lifted.conductor() == 3
    prim = lifted.primitive_part()
    assert prim.modulus == 3
    assert prim == c3
    # trivial mod 12 drops to modulus 1
    t12 = DirichletCharacter.trivial(P, N, 12)
    assert t12.conductor() == 1
    assert t12.primitive_part().modulus == 1


def test_principal_character_of_prime_modulus():
    # non-primitive principal character: conductor 1 but eval vanishes on ell
    tau = DirichletCharacter.trivial(3, 8, 11)
    assert tau.conductor() == 1
    assert tau(11).is_zero()
    assert tau(12) == 1


def test_int_value_fast_path():
    c4 = chi(-4)
    assert [c4.int_value(n) for n in range(1, 5)] == [1, 0, -1, 0]


def test_json_round_trip():
    for D in (-3, -4, 5, -7, 12):
        c = chi(D, p=11 if D == 5 else P, prec=N)
        back = DirichletCharacter.from_json(c.p, N, c.to_json())
        assert back == c
    t = DirichletCharacter.trivial(P, N, 9)
    assert DirichletCharacter.from_json(P, N, t.to_json()) == t


DISCS = [-3, -4, 5, -7, 8, -8, 12, 13, -11]


@given(st.sampled_from(DISCS), st.integers(-40, 40), st.integers(-40, 40))
@settings(max_examples=80, deadline=None)
def test_multiplicative_including_zero(D, a, b):
    p = 5 if gcd(D, 5) == 1 else 3
    c = chi(D, p=p)
    assert c(a * b) == c(a) * c(b)


@given(st.sampled_from(DISCS), st.sampled_from(DISCS))
@settings(max_examples=40, deadline=None)
def test_parity_multiplicative(D1, D2):
    p = next(q for q in (7, 11, 13) if (D1 * D2) % q != 0)
    c1, c2 = chi(D1, p=p), chi(D2, p=p)
    assert (c1 * c2).parity() == c1.parity() * c2.parity()


@given(st.sampled_from(DISCS), st.sampled_from([1, 2, 3, 4, 6]))
@settings(max_examples=40, deadline=None)
def test_conductor_stable_under_extension(D, k):
    p = 7 if gcd(D * k, 7) == 1 else 11
    if gcd(D, k * p) != 1:
        return
    c = chi(D, p=p)
    lifted = c.extend(abs(D) * k)
    assert lifted.conductor() == c.conductor()
    assert lifted.primitive_part().conductor() == c.conductor()
