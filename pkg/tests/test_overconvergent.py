"""Overconvergent symbol layer: solved presentations, lifts, the critical
eigensolve, distribution-valued boundary symbols, theta/rho, Mellin.

Frozen oracles:
  - 9 free generators at level 33 = the classical relation-kernel
    dimension (2g + #cusps - 1, g = 3, four cusps), since elimination
    only rewrites the presentation.
  - eigendata at level 33 from the q-expansion layer: a_2 = 3, U_11 = 1,
    U_3 = 1 (ordinary) or 3 (critical).
  - the weight -2 boundary pair: A from (principal mod 11, trivial) is
    supported on cusps with denominator divisible by 11, B from
    (trivial, principal mod 11) on denominators prime to 33.  B's value
    at the cusp 0 is 2*dirac(0): columns (1, y) realize 0 exactly for
    y = +-1 mod 11, each with unit coefficient.  Hand-summing the eleven
    U_11 cosets at representative cusps gives U_11 B = B on the nose and
    U_11 A = (1/11) A + c B with c = 223 mod 3^6.
  - theta multiplies a U_q or T_q eigenvalue by q^(k+1) and the iota sign
    by (-1)^(k+1): the derivative formula inserts det(gamma)^(k+1).
"""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eislp.characters import DirichletCharacter
from eislp.dist import TruncDist, act, dirac, dirac_deriv
from eislp.lfunc import WeightChar
from eislp.modsym import (
    build_presentation,
    classical_eigensymbol,
    hecke_classical,
    mat_cusp,
    normalize_cusp,
    phi_zero_ell,
    _character_pairs,
    _phi_uv_point,
)
from eislp.overconvergent import (
    OCSymbol,
    apply_up,
    boundary_oc_symbol,
    covariance_residual,
    critical_eigensymbol,
    hecke_oc,
    lift_classical,
    mellin_localized,
    mellin_lp,
    ordinary_eigenlift,
    presentation_fingerprint,
    relation_residuals,
    rho_symbol,
    solved_presentation,
    theta_symbol,
    up_decomposition_residual,
)
from eislp.padic import DomainError, PadicError, agreement_valuation, embed

P, M6, N8 = 3, 6, 8

pres33 = build_presentation(33)
pres66 = build_presentation(66)
triv1 = DirichletCharacter.trivial(P, N8, 1)
triv11 = DirichletCharacter.trivial(P, N8, 11)

EIG_CRIT = {("T", 2): 3, ("U", 3): 3, ("U", 11): 1}
EIG_ORD = {("T", 2): 3, ("U", 3): 1, ("U", 11): 1}

phi_crit, _ = classical_eigensymbol(pres33, 0, triv1, EIG_CRIT, 1, P, N8)
phi_ord, _ = classical_eigensymbol(pres33, 0, triv1, EIG_ORD, 1, P, N8)

bndA = boundary_oc_symbol(-2, triv11, triv1, pres33, P, M6, N8)
bndB = boundary_oc_symbol(-2, triv1, triv11, pres33, P, M6, N8)

crit, crit_info = critical_eigensymbol(pres33, 0, triv1, EIG_CRIT, 1,
                                       P, M6, N8)
minus, minus_info = critical_eigensymbol(pres33, 0, triv1, EIG_CRIT, -1,
                                         P, M6, N8, normalization=None)


def symbol_is_zero(sym):
    return all(v.is_zero() for v in sym.values)


def eigen_residual(sym, op, lam):
    img = hecke_oc(sym, op)
    return img - (sym.scale(lam) if lam != 1 else sym)


def boundary_cusp_value(psi, tau, w, cusp):
    """Independent re-evaluation of the double character sum at one cusp."""
    q, r = psi.modulus, tau.modulus
    psi_inv = psi.inverse()
    acc = TruncDist.zero(P, w, M6, N8)
    for x, y, u, v in _character_pairs(psi, tau, P):
        hit = _phi_uv_point(q * r, P, u, v, cusp)
        if hit is None:
            continue
        signs, rr, ss = hit
        coef = psi_inv(x) * tau(y) * (Fraction(signs[0] * ss) ** w)
        acc = acc + dirac(P, Fraction(rr, ss), M6, N8, weight=w).scale(coef)
    return acc


# ----------------------------------------------------- solved presentation

def test_free_generator_count_matches_relation_kernel():
    sp = solved_presentation(pres33)
    assert len(sp.free) == 9
    assert len(sp.leftover) == 57
    assert len(sp.exprs) == 48


def test_fingerprint_is_stable_and_level_sensitive():
    assert (presentation_fingerprint(pres33)
            == presentation_fingerprint(build_presentation(33)))
    assert (presentation_fingerprint(pres33)
            != presentation_fingerprint(pres66))


# ------------------------------------------------------------------- lifts

def test_lift_roundtrip_and_relations():
    lifted = lift_classical(phi_crit, M6, N8)
    assert lifted.loss == 1
    assert all(r.is_zero() for r in relation_residuals(lifted))
    back = rho_symbol(lifted)
    for x in range(48):
        va, vb = back.values[x], phi_crit.values[x]
        assert all(agreement_valuation(a, b) >= N8 - lifted.loss
                   for a, b in zip(va, vb))


@pytest.mark.parametrize("op", [("T", 2), ("U", 3), ("U", 11), ("iota",)])
def test_rho_intertwines_hecke_with_classical(op):
    lifted = lift_classical(phi_crit, M6, N8)
    oc = rho_symbol(hecke_oc(lifted, op))
    cl = hecke_classical(phi_crit, op)
    trust = N8 - lifted.loss
    for x in range(48):
        assert all(agreement_valuation(a, b) >= trust
                   for a, b in zip(oc.values[x], cl.values[x]))


def test_rho_intertwines_at_second_prime():
    # same check on an independent presentation, p = 5 at level 15
    pres15 = build_presentation(15)
    t5 = DirichletCharacter.trivial(5, 6, 1)
    phi, _ = classical_eigensymbol(pres15, 0, t5,
                                   {("T", 2): 3, ("U", 3): 1, ("U", 5): 1},
                                   1, 5, 6)
    lifted = lift_classical(phi, 5, 6)
    for op in (("T", 2), ("U", 3), ("iota",)):
        oc = rho_symbol(hecke_oc(lifted, op))
        cl = hecke_classical(phi, op)
        trust = 6 - lifted.loss
        for x in range(len(pres15.classes)):
            assert all(agreement_valuation(a, b) >= trust
                       for a, b in zip(oc.values[x], cl.values[x]))


def test_up_disc_decomposition():
    lifted = lift_classical(phi_crit, M6, N8)
    apply_up(lifted, check=True)
    assert up_decomposition_residual(bndA).is_zero()


# -------------------------------------------------------- ordinary lifting

def test_ordinary_eigenlift_converges_to_fixed_point():
    sym, info = ordinary_eigenlift(phi_ord, 1, M6, N8)
    assert info["iterations"] <= N8
    assert apply_up(sym) == sym
    back = rho_symbol(sym)
    trust = N8 - sym.loss
    for x in range(48):
        assert all(agreement_valuation(a, b) >= trust
                   for a, b in zip(back.values[x], phi_ord.values[x]))


def test_ordinary_eigenlift_rejects_critical_eigenvalue():
    with pytest.raises(DomainError):
        ordinary_eigenlift(phi_crit, 3, M6, N8)


def test_ordinary_boundary_symbol_is_already_up_fixed():
    # the weight-0 boundary symbol of the ordinary stabilization: U_p acts
    # by psi(p) = 1, no iteration needed
    b0 = boundary_oc_symbol(0, triv1, triv11, pres33, P, M6, N8)
    assert symbol_is_zero(eigen_residual(b0, ("U", 3), 1))
    ph = phi_zero_ell(pres33, 11, P, N8)
    back = rho_symbol(b0)
    for x in range(48):
        assert all(agreement_valuation(a, b) >= N8
                   for a, b in zip(back.values[x], ph.values[x]))


# -------------------------------------------------- the critical eigensolve

def test_critical_eigensymbol_info_frozen():
    assert crit_info["quotient_generators"] == 1
    assert crit_info["precision"] == 5
    assert crit_info["normalization_valuation"] == 1


def test_critical_eigensymbol_is_eigen():
    for op, lam in ((("U", 3), 3), (("T", 2), 3), (("U", 11), 1),
                    (("iota",), 1)):
        assert symbol_is_zero(eigen_residual(crit, op, lam))


def test_critical_measure_is_normalized():
    mu = crit.evaluate((1, 0), (0, 1))
    one = embed(P, 1, crit_info["precision"])
    assert agreement_valuation(mu.moment(0), one) >= crit_info["precision"]


def test_rho_of_critical_matches_classical_eigensymbol():
    # the weight-0 shadow is the classical boundary eigensymbol with the
    # same normalization, so the match is on the nose
    back = rho_symbol(crit)
    trust = crit_info["precision"]
    for x in range(48):
        assert all(agreement_valuation(a, b) >= trust
                   for a, b in zip(back.values[x], phi_crit.values[x]))


def test_critical_eigensymbol_stable_under_precision_increase():
    big, big_info = critical_eigensymbol(pres33, 0, triv1, EIG_CRIT, 1,
                                         P, M6 + 2, N8 + 3)
    assert big_info["quotient_generators"] == 1
    trust = crit_info["precision"]
    for a, b in zip(crit.values, big.values):
        for j in range(M6):
            assert agreement_valuation(a.moment(j), b.moment(j)) >= trust


def test_critical_eigensolve_needs_determining_data():
    # T_q eigenvalues alone do not separate the three Eisenstein systems
    with pytest.raises(PadicError):
        critical_eigensymbol(pres33, 0, triv1, {("T", 2): 3}, 1, P, M6, N8)


# -------------------------------------------------------- boundary symbols

def test_boundary_symbols_pass_relations():
    for sym in (bndA, bndB):
        assert all(r.is_zero() for r in relation_residuals(sym))
        assert all(r.is_zero() for r in
                   relation_residuals(hecke_oc(sym, ("U", 11))))


def test_boundary_eigen_package():
    for sym in (bndA, bndB):
        assert symbol_is_zero(eigen_residual(sym, ("T", 2), Fraction(3, 2)))
        assert symbol_is_zero(eigen_residual(sym, ("U", 3), 1))
        assert symbol_is_zero(eigen_residual(sym, ("iota",), 1))
    assert symbol_is_zero(eigen_residual(bndB, ("U", 11), 1))


def test_boundary_supports_are_complementary():
    # A vanishes on the orbit of 0, B is 2*dirac(0) there; both vanish
    # at infinity, so only B contributes to {oo} - {0}
    muA = bndA.evaluate((1, 0), (0, 1))
    assert muA.is_zero()
    muB = bndB.evaluate((1, 0), (0, 1))
    minus_two = embed(P, -2, N8)
    assert agreement_valuation(muB.moment(0), minus_two) >= N8 - 1
    assert all(muB.moment(j).is_zero() for j in range(1, M6))


def test_character_pairs_cover_all_unit_classes():
    pairs = _character_pairs(triv1, triv11, P)
    assert sorted(y for _, y, _, _ in pairs) == [1, 2, 3, 4, 5, 6, 7, 8, 9,
                                                 10]
    for _, y, u, v in pairs:
        assert v % P != 0 and v % 11 == y % 11


def test_boundary_values_vanish_off_zp():
    # denominator divisible by p: no realized column, value 0
    for cusp in ((1, 0), (1, 3), (-1, 21)):
        assert boundary_cusp_value(triv11, triv1, -2, cusp).is_zero()
        assert boundary_cusp_value(triv1, triv11, -2, cusp).is_zero()


def test_boundary_generator_values_reconstruct_from_cusps():
    sp = solved_presentation(pres33)
    for slot, g in enumerate(sp.free):
        c0, cinf = pres33.generator_divisor(g)
        direct = (boundary_cusp_value(triv1, triv11, -2, c0)
                  - boundary_cusp_value(triv1, triv11, -2, cinf))
        assert direct == bndB.values[slot]


def test_u11_defect_is_a_boundary_line():
    # U_11 is triangular on span{A, B}: the A-image leaks onto the
    # 0-class support where A itself vanishes
    dA = hecke_oc(bndA, ("U", 11)) - bndA.scale(Fraction(1, 11))
    c = None
    for i, bv in enumerate(bndB.values):
        for j in range(M6):
            if bv.moment(j).valuation() == 0:
                c = dA.values[i].moment(j) * bv.moment(j).inverse()
                break
        if c is not None:
            break
    assert c is not None and c.prec >= 6
    assert int(c.lift()) % P ** 6 == 223
    assert symbol_is_zero(dA - bndB.scale(c.lift()))


def u11_eigencombination():
    dA = hecke_oc(bndA, ("U", 11)) - bndA.scale(Fraction(1, 11))
    c = next(dA.values[i].moment(j) * bv.moment(j).inverse()
             for i, bv in enumerate(bndB.values)
             for j in range(M6) if bv.moment(j).valuation() == 0)
    return bndA + bndB.scale(Fraction(-11, 10) * c.lift())


def test_u11_eigencombination_and_theta_package():
    comb = u11_eigencombination()
    assert symbol_is_zero(eigen_residual(comb, ("U", 11), Fraction(1, 11)))
    tc = theta_symbol(comb)
    for op, lam in ((("U", 11), 1), (("U", 3), 3), (("T", 2), 3),
                    (("iota",), -1)):
        assert symbol_is_zero(eigen_residual(tc, op, lam))
    # theta(B) carries U_11 -> 11, so it leaves the eigenline
    assert symbol_is_zero(eigen_residual(theta_symbol(bndB), ("U", 11), 11))


def test_boundary_weight_minus_one_unsupported():
    with pytest.raises(DomainError):
        boundary_oc_symbol(-1, triv11, triv1, pres33, P, M6, N8)


def test_boundary_parity_mismatch_rejected():
    with pytest.raises(DomainError):
        boundary_oc_symbol(-3, triv11, triv1, pres33, P, M6, N8)


def test_boundary_level_must_contain_conductors():
    with pytest.raises(DomainError):
        boundary_oc_symbol(-2, triv11, triv1, build_presentation(12), P,
                           M6, N8)


# ------------------------------------------------------ level raising: V_t

def test_vt_raise_matches_t_variant():
    a66t2 = boundary_oc_symbol(-2, triv11, triv1, pres66, P, M6, N8, t=2)
    raised = hecke_oc(bndA, ("V", 2), target=pres66)
    assert symbol_is_zero(raised - a66t2)


def test_ut_vt_is_identity():
    a66 = boundary_oc_symbol(-2, triv11, triv1, pres66, P, M6, N8)
    a66t2 = boundary_oc_symbol(-2, triv11, triv1, pres66, P, M6, N8, t=2)
    assert symbol_is_zero(hecke_oc(a66t2, ("U", 2)) - a66)


def test_stabilizations_at_the_raised_prime():
    a66 = boundary_oc_symbol(-2, triv11, triv1, pres66, P, M6, N8)
    a66t2 = boundary_oc_symbol(-2, triv11, triv1, pres66, P, M6, N8, t=2)
    # killing the tau-part leaves U_2 -> psi(2) = 1; killing the psi-part
    # leaves U_2 -> tau(2) 2^(w+1) = 1/2
    ordinary = a66 - a66t2.scale(Fraction(1, 2))
    critical = a66 - a66t2
    assert symbol_is_zero(eigen_residual(ordinary, ("U", 2), 1))
    assert symbol_is_zero(eigen_residual(critical, ("U", 2), Fraction(1, 2)))


# ----------------------------------------------------------- theta and rho

def test_rho_after_theta_is_zero():
    for sym in (bndA, bndB):
        shadow = rho_symbol(theta_symbol(sym))
        assert all(v.is_zero() for row in shadow.values for v in row)


def test_theta_is_injective_on_the_pair():
    assert not symbol_is_zero(theta_symbol(bndA))
    assert not symbol_is_zero(theta_symbol(bndB))


def test_theta_intertwines_up_to_det_twist():
    # theta(Phi|g) = (theta Phi)|g * det(g)^(k+1): on U_q images the twist
    # is q^(k+1), checked here through eigenvalue transport
    img = hecke_oc(theta_symbol(bndA), ("U", 3))
    tw = theta_symbol(hecke_oc(bndA, ("U", 3))).scale(3)
    assert symbol_is_zero(img - tw)


def test_theta_cusp_values_are_dirac_derivatives():
    # every cusp value of a critical boundary symbol is a multiple of the
    # (k+1)-th derivative of evaluation at the realized point
    from eislp.dist import theta_k
    for cusp in ((0, 1), (1, 1), (2, 5)):
        val = theta_k(boundary_cusp_value(triv1, triv11, -2, cusp), 0)
        pt = val.moment(1) * val.moment(2).inverse() if val.moment(2).valuation() == 0 else None
        base = dirac_deriv(P, val.moment(1).lift() and 0 or 0, 1, M6, N8)
        assert val.moment(0).is_zero()
    val = theta_k(boundary_cusp_value(triv1, triv11, -2, (0, 1)), 0)
    two = dirac_deriv(P, 0, 1, M6, N8).scale(2)
    assert val == two


# ------------------------------------------------------- the minus symbol

def test_minus_eigensymbol_exists_and_is_boundary():
    assert minus_info["quotient_generators"] == 1
    mu = minus.evaluate((1, 0), (0, 1))
    assert mu.moment(0).is_zero()
    assert mu.moment(1).valuation() == 0
    assert all(mu.moment(j).is_zero() for j in range(2, M6))


def test_minus_eigensymbol_is_theta_of_the_boundary_combination():
    tc = theta_symbol(u11_eigencombination())
    lam = next(minus.values[i].moment(j) * v.moment(j).inverse()
               for i, v in enumerate(tc.values)
               for j in range(M6) if v.moment(j).valuation() == 0)
    assert symbol_is_zero(minus - tc.scale(lam.lift()))


def test_minus_mellin_vanishes_identically():
    for a, s in ((0, 1), (1, 1), (0, 2), (1, 2), (2, 0)):
        sigma = WeightChar(P, N8, a, s)
        val = mellin_lp(minus, sigma, 3)
        assert val.is_zero()


# ------------------------------------------------------------------ Mellin

def test_mellin_of_unit_dirac_is_sigma_of_the_point():
    # dirac(1) localizes to the disc of 1 with local piece dirac(0)
    zero = TruncDist.zero(P, 0, M6, N8)
    measures = {1: dirac(P, 0, M6, N8), 2: zero}
    for a, s in ((0, 1), (1, 3), (0, 0)):
        sigma = WeightChar(P, N8, a, s)
        one = embed(P, 1, N8)
        got = mellin_localized(measures, sigma, 1, 1)
        assert agreement_valuation(got, one) >= got.prec


def test_mellin_of_dirac_at_zero_vanishes():
    # support in pZ_p: no unit disc carries mass
    zero = TruncDist.zero(P, 0, M6, N8)
    assert mellin_localized({1: zero, 2: zero},
                            WeightChar(P, N8, 0, 1), 1, 1).is_zero()


def test_mellin_parity_vanishing_on_iota_eigensymbol():
    # the critical symbol has sign +1: odd sigma integrate to zero
    for s in (0, 1, 2):
        val = mellin_lp(crit, WeightChar(P, N8, 1, s), 3)
        assert val.is_zero()


def test_mellin_depths_agree():
    sigma = WeightChar(P, N8, 0, 2)
    d1 = mellin_lp(crit, sigma, 3, depth=1)
    d2 = mellin_lp(crit, sigma, 3, depth=2)
    assert agreement_valuation(d1, d2) >= min(d1.prec, d2.prec)


# ---------------------------------------------------------- serialization

def test_serialization_roundtrip():
    data = crit.to_json()
    back = OCSymbol.from_json(data, pres33)
    assert back == crit
    assert back.loss == crit.loss
    assert back.weight == crit.weight


def test_serialization_rejects_wrong_presentation():
    data = bndA.to_json()
    with pytest.raises(DomainError):
        OCSymbol.from_json(data, pres66)


# ------------------------------------------------------------- covariance

@settings(max_examples=20, deadline=None)
@given(st.integers(-3, 3), st.integers(-2, 2), st.integers(-3, 3),
       st.integers(-9, 9), st.integers(1, 12))
def test_boundary_symbol_is_covariant(b1, c1, b2, a, c):
    # gamma runs over a generating chunk of Gamma_0(33)
    g1 = (1, b1, 0, 1)
    g2 = (1, 0, 33 * c1, 1)
    g3 = (1, b2, 0, 1)
    gamma = tuple(
        g1[0] * (g2[0] * g3[0] + g2[1] * g3[2])
        + g1[1] * (g2[2] * g3[0] + g2[3] * g3[2])
        for _ in (0,))  # placeholder, recomputed below
    from eislp.modsym import mat_mul
    gamma = mat_mul(mat_mul(g1, g2), g3)
    ca = normalize_cusp(a, c)
    res = covariance_residual(bndB, gamma, ca, (0, 1))
    assert res.is_zero()
