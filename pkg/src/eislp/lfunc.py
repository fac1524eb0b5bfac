"""Kubota-Leopoldt p-adic L-functions and assembled comparison targets.

The weight space side: continuous characters sigma of Z_p^x are pairs
(a mod p-1, s in Z_p) acting by u -> omega(u)^a <u>^s.  The L-function side:
one convergent series evaluator behind kubota_leopoldt, whose correctness is
pinned by interpolation against exact generalized Bernoulli numbers at
integer points of both parities.

Poles are represented as values (LValue.pole), never exceptions, so the
product formulas here can cancel them against their forced zeros by shifted
evaluation when that is mathematically due.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, lcm

from sympy import bernoulli as _bernoulli_plus

from .characters import DirichletCharacter
from .padic import (
    DomainError,
    PadicError,
    PadicNumber,
    PrecisionExhausted,
    embed,
    iwasawa_log,
    pval,
    teichmuller,
    unit_power,
)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number, B_1 = -1/2 convention."""
    if n < 0:
        raise DomainError("Bernoulli numbers need n >= 0")
    if n == 1:
        return Fraction(-1, 2)
    return Fraction(_bernoulli_plus(n))


def bernoulli_poly(n: int, x: Fraction) -> Fraction:
    """B_n(x) = sum_i C(n,i) B_i x^(n-i)."""
    x = Fraction(x)
    return sum(comb(n, i) * bernoulli(i) * x ** (n - i) for i in range(n + 1))


class WeightChar:
    """A continuous character sigma = omega^a <z>^s of Z_p^x.

    a matters only mod p-1; s is the Iwasawa variable, an element of Z_p
    carried at the working precision.  When s is handed in as an int or
    Fraction the exact value is remembered alongside, so downstream
    evaluations can raise their working precision without substitution error.
    """

    __slots__ = ("p", "prec", "a", "s", "s_exact")

    def __init__(self, p: int, prec: int, a: int, s):
        self.p = p
        self.prec = prec
        self.a = a % (p - 1)
        if isinstance(s, PadicNumber):
            self.s_exact = None
        else:
            self.s_exact = Fraction(s)
            s = embed(p, s, prec)
        if not s.is_zero() and s.val < 0:
            raise DomainError("Iwasawa variable must lie in Z_p")
        self.s = s

    def evaluate(self, u) -> PadicNumber:
        if not isinstance(u, PadicNumber):
            u = embed(self.p, u, self.prec)
        if u.val != 0:
            raise DomainError("weight characters evaluate on units only")
        return teichmuller(u) ** self.a * unit_power(u, self.s)

    def parity(self) -> int:
        """sigma(-1), determined by the Teichmuller exponent."""
        return -1 if self.a % 2 else 1

    def times_z(self, j: int = 1) -> "WeightChar":
        # z^j = omega^j <z>^j
        s = self.s + j if self.s_exact is None else self.s_exact + j
        return WeightChar(self.p, self.prec, self.a + j, s)

    def inverse(self) -> "WeightChar":
        s = -self.s if self.s_exact is None else -self.s_exact
        return WeightChar(self.p, self.prec, -self.a, s)

    def __eq__(self, other):
        if not isinstance(other, WeightChar):
            return NotImplemented
        return (
            self.p == other.p and self.a == other.a and self.s == other.s
        )

    __hash__ = None

    def __repr__(self):
        return "WeightChar(p=%d, a=%d, s=%r)" % (self.p, self.a, self.s)

    def to_json(self) -> dict:
        return {"a": self.a, "s": self.s.to_json()}


class TwistedCharacter:
    """A tame character times omega^b: the p-adic valued characters of
    conductor dividing m*p that the L-series below integrates against."""

    __slots__ = ("tame", "b", "p", "prec")

    def __init__(self, tame: DirichletCharacter, b: int):
        self.tame = tame.primitive_part()
        self.p = tame.p
        self.prec = tame.prec
        self.b = b % (self.p - 1)

    def conductor(self) -> int:
        wild = self.p if self.b else 1
        return self.tame.conductor() * wild

    def parity(self) -> int:
        return self.tame.parity() * (-1 if self.b % 2 else 1)

    def is_trivial(self) -> bool:
        return self.b == 0 and self.tame.is_trivial()

    def value(self, n: int) -> PadicNumber:
        v = self.tame(n)
        if self.b == 0:
            return v
        if n % self.p == 0:
            return PadicNumber.zero(self.p, self.prec)
        w = teichmuller(embed(self.p, n, self.prec))
        return v * w**self.b

    def with_prec(self, prec: int) -> "TwistedCharacter":
        return TwistedCharacter(self.tame.with_prec(prec), self.b)


class LValue:
    """A p-adic L-value or a pole marker."""

    __slots__ = ("value", "is_pole")

    def __init__(self, value, is_pole: bool):
        self.value = value
        self.is_pole = is_pole

    @classmethod
    def finite(cls, value: PadicNumber) -> "LValue":
        return cls(value, False)

    @classmethod
    def pole(cls) -> "LValue":
        return cls(None, True)

    def unwrap(self) -> PadicNumber:
        if self.is_pole:
            raise PadicError("pole where a finite L-value was required")
        return self.value

    def __repr__(self):
        return "LValue(pole)" if self.is_pole else "LValue(%r)" % (self.value,)


def gen_bernoulli(chi, n: int) -> PadicNumber:
    """Generalized Bernoulli number B_{n,chi} as a p-adic number.

    chi may be a DirichletCharacter or a TwistedCharacter; the sum runs over
    the conductor, with primitive values.  For the trivial character this is
    B_n(1), so B_{1,1} = +1/2 while bernoulli(1) = -1/2; that asymmetry is
    the standard convention and is deliberate.
    """
    if isinstance(chi, DirichletCharacter):
        chi = TwistedCharacter(chi, 0)
    p, prec = chi.p, chi.prec
    f = chi.conductor()
    vf = pval(f, p)
    if vf:
        # B_n(a/f) has valuation down to -n*vf; the character values need
        # that much headroom or the sum collapses to a few digits
        chi = chi.with_prec(prec + n * vf + 2)
    total = PadicNumber.zero(p, prec + 2)
    for a in range(1, f + 1):
        v = chi.value(a)
        if v.is_zero():
            continue
        total = total + v * bernoulli_poly(n, Fraction(a, f))
    return (total * Fraction(f) ** (n - 1)).with_prec(prec)


def gen_bernoulli_exact(chi: DirichletCharacter, n: int) -> Fraction:
    """B_{n,chi} as an exact rational; chi must have values +-1."""
    chi = chi.primitive_part()
    f = chi.modulus
    total = Fraction(0)
    for a in range(1, f + 1):
        v = chi.int_value(a)
        if v:
            total += v * bernoulli_poly(n, Fraction(a, f))
    return total * Fraction(f) ** (n - 1)


def classical_L_nonpos(nu, m: int) -> PadicNumber:
    """L(nu, m) = -B_{1-m, nu}/(1-m) for integer m <= 0."""
    if m > 0:
        raise DomainError("classical special values here need m <= 0")
    n = 1 - m
    return gen_bernoulli(nu, n) / -n


def _series_cutoff(p: int, prec: int) -> int:
    # term j of the regularized sum has valuation >= j - v_p(j!) - 1
    # >= j(p-2)/(p-1) - 1, so this cutoff pushes the tail below p^prec
    return (prec + 2) * (p - 1) // (p - 2) + 3


def _lp_series(theta: TwistedCharacter, s_eval: PadicNumber, s_exact=None) -> LValue:
    """The one-variable p-adic L-function L_p(theta, s) by convergent series.

    L = 1/(s-1) * 1/F * sum_{a <= F, p∤a} theta(a) <a>^{1-s}
                        * sum_j C(1-s, j) (F/a)^j B_j
    over the period F = lcm(conductor(theta), p).  The omitted a = 0 mod p
    residues are exactly the removed Euler factor at p.  When the exact
    rational behind s_eval is known, passing it as s_exact removes all
    substitution error from the precision-raising step below.
    """
    p = theta.p
    prec = s_eval.prec
    if theta.is_trivial() and s_eval == 1:
        return LValue.pole()
    if (s_eval - 1).is_zero():
        # removable 0/0 point of the series: step off the point and accept
        # half the digits.  The step is p^(j+2), not p^j, because the first
        # derivative can have valuation as low as -2.
        j = max(prec // 2, 1)
        step = 1 + p ** (j + 2)
        out = _lp_series(theta, embed(p, step, prec + 6), step)
        return LValue.finite(out.unwrap().with_prec(j))
    F = lcm(theta.conductor(), p)
    # the divisions by (s - 1) and F cost a known number of digits; run the
    # whole sum at elevated precision and claim only the digits asked for
    work = prec + (s_eval - 1).val + pval(F, p) + 2
    if s_exact is None:
        s_exact = s_eval.lift_balanced()
    s_w = embed(p, s_exact, work)
    if theta.prec < work:
        theta = theta.with_prec(work)
    one_minus_s = 1 - s_w
    jmax = _series_cutoff(p, work)
    # C(1-s, j) built iteratively; B_j embedded once
    binom = embed(p, 1, work + 4)
    binoms = [binom]
    for j in range(1, jmax + 1):
        binom = binom * (one_minus_s - (j - 1)) / j
        binoms.append(binom)
    bern = [embed(p, bernoulli(j), work + 4) for j in range(jmax + 1)]
    total = PadicNumber.zero(p, work + 2)
    for a in range(1, F + 1):
        if a % p == 0:
            continue
        ch = theta.value(a)
        if ch.is_zero():
            continue
        ratio = embed(p, Fraction(F, a), work + 4)
        inner = PadicNumber.zero(p, work + 2)
        rpow = embed(p, 1, work + 4)
        for j in range(jmax + 1):
            if j:
                rpow = rpow * ratio
            inner = inner + binoms[j] * rpow * bern[j]
        total = total + ch * unit_power(embed(p, a, work + 2), one_minus_s) * inner
    result = total / (s_w - 1) / F
    result = result.with_prec(min(result.prec, prec))
    if result.prec - result.val <= 0 and not result.is_zero():
        raise PrecisionExhausted("L-series lost every digit")
    return LValue.finite(result)


def kubota_leopoldt(nu: DirichletCharacter, sigma: WeightChar) -> LValue:
    """L_p(nu, sigma) for a tame character nu and weight character sigma.

    Decomposing sigma = omega^a <z>^s, the value is computed through the
    one-variable series in the branch that its parity selects:
    L_p(nu*omega^(1-a), s) when nu*omega^(-a) is odd, and
    L_p(nu^(-1)*omega^a, 1-s) when it is even.  Poles appear exactly for
    trivial nu at sigma = 1 and sigma = z.
    """
    nu = nu.primitive_part()
    route_parity = nu.parity() * (-1 if sigma.a % 2 else 1)
    if route_parity == -1:
        theta = TwistedCharacter(nu, 1 - sigma.a)
        s_eval = sigma.s
        s_exact = sigma.s_exact
    else:
        theta = TwistedCharacter(nu.inverse(), sigma.a)
        s_eval = 1 - sigma.s
        s_exact = None if sigma.s_exact is None else 1 - sigma.s_exact
    return _lp_series(theta, s_eval, s_exact)


def zeta_p(sigma: WeightChar) -> LValue:
    """The p-adic zeta function: kubota_leopoldt at trivial nu."""
    return kubota_leopoldt(
        DirichletCharacter.trivial(sigma.p, sigma.prec), sigma
    )


def log_pk(k: int, sigma: WeightChar) -> PadicNumber:
    """The order-k logarithm factor: product of (s - i) for 0 <= i < k."""
    if k < 0:
        raise DomainError("k >= 0 required")
    out = embed(sigma.p, 1, sigma.prec + 2)
    for i in range(k):
        out = out * (sigma.s - i)
    return out


def stevens_constant(p: int, ell: int, prec: int) -> PadicNumber:
    """(p-1) / (p log_p(ell)), the constant attached to the normalization
    that gives the boundary eigensymbol value 1 on {infinity} - {0}."""
    lg = iwasawa_log(embed(p, ell, prec + 4))
    return embed(p, p - 1, prec + 4) / (lg * p)


def rhs_exceptional(ell: int, s: PadicNumber, normalized: bool = True) -> PadicNumber:
    """s (1 - <ell>^-s) zeta_p at sigma*z and at sigma, for sigma = <z>^s,
    times the normalization constant when requested.

    At s = 0 the two explicit zero factors meet the two zeta poles; the
    finite limit is taken by stepping s off zero by p^(prec/2).
    """
    p, prec = s.p, s.prec
    if s.is_zero():
        j = max(prec // 2, 1)
        shifted = embed(p, p ** (j + 2), prec + 6)
        return rhs_exceptional(ell, shifted, normalized).with_prec(j)
    sigma = WeightChar(p, prec, 0, s)
    z_plus = zeta_p(sigma.times_z(1))
    z_here = zeta_p(sigma)
    if z_plus.is_pole or z_here.is_pole:
        # only reachable when s = 0 mod p^prec, handled above; a true pole
        # at nonzero s cannot happen on this branch
        raise PadicError("unresolved pole in exceptional comparison value")
    ell_unit = embed(p, ell, prec + 2)
    out = s * (1 - unit_power(ell_unit, -s)) * z_plus.value * z_here.value
    if normalized:
        out = out * stevens_constant(p, ell, prec)
    return out


def rhs_normal(
    psi: DirichletCharacter,
    tau: DirichletCharacter,
    k: int,
    sigma: WeightChar,
) -> PadicNumber:
    """sigma^(-1)(R) log^[k+1](sigma) L_p(psi, sigma z) L_p(tau, sigma z^-k)
    with R the conductor of tau.  Defined on the sigma(-1) = psi(-1) side."""
    if sigma.parity() != psi.parity():
        raise DomainError("sigma parity must match psi(-1) on this branch")
    R = tau.conductor()
    log_factor = log_pk(k + 1, sigma)
    l_psi = kubota_leopoldt(psi, sigma.times_z(1))
    l_tau = kubota_leopoldt(tau, sigma.times_z(-k))
    if l_psi.is_pole or l_tau.is_pole:
        if log_factor.is_zero():
            p, prec = sigma.p, sigma.prec
            j = max(prec // 2, 1)
            base = sigma.s_exact
            if base is None:
                base = sigma.s.lift_balanced()
            shifted = WeightChar(p, prec + 6, sigma.a, base + p ** (j + 2))
            return rhs_normal(psi, tau, k, shifted).with_prec(j)
        raise PadicError("pole without a cancelling zero in normal comparison")
    out = log_factor * l_psi.value * l_tau.value
    if R != 1:
        out = out * sigma.inverse().evaluate(R)
    return out


def rhs_ordinary_exceptional(ell: int, sigma: WeightChar) -> PadicNumber:
    """(1 - sigma^(-1)(ell)) zeta_p(sigma z) zeta_p(sigma), odd sigma only."""
    if sigma.parity() != -1:
        raise DomainError("ordinary exceptional comparison needs odd sigma")
    z_plus = zeta_p(sigma.times_z(1))
    z_here = zeta_p(sigma)
    if z_plus.is_pole or z_here.is_pole:
        raise PadicError("pole in ordinary exceptional comparison value")
    factor = 1 - sigma.inverse().evaluate(ell)
    return factor * z_plus.value * z_here.value


def rhs_ordinary_normal(
    psi: DirichletCharacter,
    tau: DirichletCharacter,
    k: int,
    sigma: WeightChar,
) -> PadicNumber:
    """sigma^(-1)(Q) L_p(psi, sigma z) L_p(tau, sigma z^-k), up to the
    constant Gauss-sum factor, on the sigma(-1) = -psi(-1) side."""
    if sigma.parity() != -psi.parity():
        raise DomainError("sigma parity must be opposite to psi(-1) here")
    Q = psi.conductor()
    l_psi = kubota_leopoldt(psi, sigma.times_z(1))
    l_tau = kubota_leopoldt(tau, sigma.times_z(-k))
    if l_psi.is_pole or l_tau.is_pole:
        raise PadicError("pole in ordinary normal comparison value")
    out = l_psi.value * l_tau.value
    if Q != 1:
        out = out * sigma.inverse().evaluate(Q)
    return out
