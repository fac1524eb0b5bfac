"""q-expansions of Eisenstein series and the operators that move them around.

A QExpansion is a finite window c_0..c_B of coefficients together with the
bookkeeping (weight, level, nebentypus, truncation bound) that the operators
need.  Everything is immutable; U, V, and T_q return new objects with the
bound shrunk as required, and reading past the bound is an error rather than
a silent zero.

The two constructors build the Eisenstein families this package verifies:
the two-character series of weight k+2 and the weight-2 series attached to a
single prime.  Their p-stabilizations are the forms whose symbols the
overconvergent machinery lifts.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from sympy import divisors, isprime

from .characters import DirichletCharacter
from .lfunc import gen_bernoulli_exact
from .padic import DomainError, PadicError, PadicNumber, embed


class QExpansion:
    """A truncated q-expansion with p-adic coefficients.

    coeffs holds c_0..c_bound; family tags the outputs of the two Eisenstein
    constructors (("normal", psi, tau) or ("exceptional", ell)) so that
    stabilization and eigenvalue lookups know the arithmetic behind the
    coefficients.  Derived objects carry family None.
    """

    __slots__ = ("p", "prec", "weight", "level", "eps", "coeffs", "bound",
                 "family", "up_eigenvalue")

    def __init__(self, p, prec, weight, level, eps, coeffs, bound,
                 family=None, up_eigenvalue=None):
        if len(coeffs) != bound + 1:
            raise DomainError("coefficient window must be exactly c_0..c_B")
        self.p = p
        self.prec = prec
        self.weight = weight
        self.level = level
        self.eps = eps
        self.coeffs = tuple(coeffs)
        self.bound = bound
        self.family = family
        self.up_eigenvalue = up_eigenvalue

    def coefficient(self, n: int) -> PadicNumber:
        if n < 0 or n > self.bound:
            raise DomainError(
                "coefficient %d outside the trusted window 0..%d" % (n, self.bound)
            )
        return self.coeffs[n]

    def __sub__(self, other: "QExpansion") -> "QExpansion":
        if self.p != other.p or self.weight != other.weight:
            raise DomainError("mismatched q-expansions")
        b = min(self.bound, other.bound)
        coeffs = [self.coeffs[n] - other.coeffs[n] for n in range(b + 1)]
        return QExpansion(self.p, min(self.prec, other.prec), self.weight,
                          lcm(self.level, other.level), self.eps, coeffs, b)

    def scale(self, c) -> "QExpansion":
        """Multiply every coefficient by a scalar (exact or PadicNumber)."""
        coeffs = [v * c for v in self.coeffs]
        return QExpansion(self.p, self.prec, self.weight, self.level,
                          self.eps, coeffs, self.bound, self.family)

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "weight": self.weight,
            "level": self.level,
            "bound": self.bound,
            "coefficients": [c.to_json() for c in self.coeffs],
        }

    def to_csv(self) -> str:
        """One line per coefficient: n, valuation (empty for 0), unit, prec."""
        lines = ["n,val,unit,prec"]
        for n, c in enumerate(self.coeffs):
            if c.is_zero():
                lines.append("%d,,0,%d" % (n, c.prec))
            else:
                lines.append("%d,%d,%d,%d" % (n, c.val, c.unit, c.prec))
        return "\n".join(lines) + "\n"

    def __repr__(self):
        return "QExpansion(weight %d, level %d, B=%d)" % (
            self.weight, self.level, self.bound)


def _int_coefficients(psi, tau, kp1: int, bound: int) -> list:
    # divisor sums in plain integers; valid because both characters are
    # quadratic, which covers every series this package constructs
    out = [0] * (bound + 1)
    for n in range(1, bound + 1):
        out[n] = sum(
            psi.int_value(n // d) * tau.int_value(d) * d**kp1
            for d in divisors(n)
        )
    return out


def eisenstein_normal(k: int, psi: DirichletCharacter, tau: DirichletCharacter,
                      bound: int, prec: int) -> QExpansion:
    """The weight-(k+2) Eisenstein series attached to the pair (psi, tau).

    c_n = sum_{d|n} psi(n/d) tau(d) d^(k+1) for n >= 1; the constant term is
    0 when psi is nontrivial and -B_{k+2,tau} / (2(k+2)) otherwise.  Level is
    the product of the two conductors.
    """
    if psi.p != tau.p:
        raise DomainError("mixed primes")
    p = psi.p
    psi = psi.primitive_part()
    tau = tau.primitive_part()
    if psi.parity() * tau.parity() != (-1) ** k:
        raise DomainError("characters must satisfy psi*tau(-1) = (-1)^k")
    if k == 0 and psi.is_trivial() and tau.is_trivial():
        raise DomainError("weight 2 with both characters trivial is not a modular form")
    q_cond, r_cond = psi.conductor(), tau.conductor()
    if psi.is_quadratic() and tau.is_quadratic():
        ints = _int_coefficients(psi, tau, k + 1, bound)
        coeffs = [embed(p, c, prec) for c in ints]
    else:
        coeffs = [PadicNumber.zero(p, prec)]
        for n in range(1, bound + 1):
            acc = PadicNumber.zero(p, prec)
            for d in divisors(n):
                acc = acc + psi(n // d) * tau(d) * d ** (k + 1)
            coeffs.append(acc)
    if q_cond == 1:
        c0 = -gen_bernoulli_exact(tau, k + 2) / (2 * (k + 2))
        coeffs[0] = embed(p, c0, prec)
    eps = (psi * tau).primitive_part()
    return QExpansion(p, prec, k + 2, q_cond * r_cond, eps, coeffs, bound,
                      family=("normal", psi, tau))


def eisenstein_exceptional(ell: int, p: int, bound: int, prec: int) -> QExpansion:
    """The weight-2 series with c_0 = (ell-1)/24 and c_n the sum of divisors
    of n prime to ell."""
    if not isprime(ell):
        raise DomainError("%d is not prime" % ell)
    if ell == p:
        raise DomainError("the auxiliary prime must differ from p")
    coeffs = [embed(p, Fraction(ell - 1, 24), prec)]
    for n in range(1, bound + 1):
        coeffs.append(embed(p, sum(d for d in divisors(n) if d % ell), prec))
    eps = DirichletCharacter.trivial(p, prec)
    return QExpansion(p, prec, 2, ell, eps, coeffs, bound,
                      family=("exceptional", ell))


def apply_v(f: QExpansion, t: int) -> QExpansion:
    """V_t: c_n -> c_{n/t}; the level picks up a factor t."""
    if t < 1:
        raise DomainError("V_t needs t >= 1")
    coeffs = [
        f.coeffs[n // t] if n % t == 0 else PadicNumber.zero(f.p, f.prec)
        for n in range(f.bound + 1)
    ]
    return QExpansion(f.p, f.prec, f.weight, f.level * t, f.eps, coeffs, f.bound)


def apply_u(f: QExpansion, q: int) -> QExpansion:
    """U_q: c_n -> c_{nq}; the trusted window shrinks to bound // q."""
    if q < 1:
        raise DomainError("U_q needs q >= 1")
    b = f.bound // q
    coeffs = [f.coeffs[n * q] for n in range(b + 1)]
    return QExpansion(f.p, f.prec, f.weight, f.level, f.eps, coeffs, b)


def hecke_tq(f: QExpansion, q: int) -> QExpansion:
    """T_q away from the level: c_n -> c_{nq} + eps(q) q^(k+1) c_{n/q}."""
    if not isprime(q):
        raise DomainError("%d is not prime" % q)
    if f.level % q == 0 or q == f.p:
        raise DomainError(
            "T_%d is not defined at level %d over p=%d; use U" % (q, f.level, f.p)
        )
    kp1 = f.weight - 1
    eq = f.eps(q) * q**kp1
    b = f.bound // q
    coeffs = []
    for n in range(b + 1):
        c = f.coeffs[n * q]
        if n % q == 0:
            c = c + eq * f.coeffs[n // q]
        coeffs.append(c)
    return QExpansion(f.p, f.prec, f.weight, f.level, f.eps, coeffs, b)


def up_roots(f: QExpansion):
    """The two roots (unit, critical) of the U_p Hecke polynomial of a tagged
    Eisenstein series, as exact integers (quadratic nebentypus only)."""
    if f.family is None:
        raise DomainError("U_p roots are only known for tagged Eisenstein series")
    if f.family[0] == "exceptional":
        return 1, f.p
    _, psi, tau = f.family
    return psi.int_value(f.p), tau.int_value(f.p) * f.p ** (f.weight - 1)


def tq_eigenvalue(f: QExpansion, q: int) -> int:
    """The T_q eigenvalue of a tagged Eisenstein series as an exact integer."""
    if f.family is None:
        raise DomainError("eigenvalues are only known for tagged Eisenstein series")
    if f.family[0] == "exceptional":
        ell = f.family[1]
        if q == ell:
            return 1  # U_ell eigenvalue
        return 1 + q
    _, psi, tau = f.family
    return psi.int_value(q) + tau.int_value(q) * q ** (f.weight - 1)


def stabilize(f: QExpansion, mode: str) -> QExpansion:
    """The p-stabilization f - (other root) * f|V_p of a tagged series.

    mode "ord" keeps the unit U_p-eigenvalue, mode "crit" the critical one.
    The eigenvalue identity U_p g = lambda g is verified coefficient-wise up
    to the shrunk bound before returning.
    """
    if mode not in ("ord", "crit"):
        raise DomainError("mode must be 'ord' or 'crit'")
    alpha, beta = up_roots(f)
    keep, remove = (alpha, beta) if mode == "ord" else (beta, alpha)
    g = f - apply_v(f, f.p).scale(remove)
    ug = apply_u(g, f.p)
    for n in range(ug.bound + 1):
        if not (ug.coeffs[n] - g.coeffs[n] * keep).is_zero():
            raise PadicError("stabilization failed its eigenvalue check at n=%d" % n)
    return QExpansion(g.p, g.prec, g.weight, g.level, f.eps, g.coeffs, g.bound,
                      family=None, up_eigenvalue=keep)


def convolution_check(k: int, psi: DirichletCharacter, tau: DirichletCharacter,
                      t: int, bound: int, prec: int):
    """Compare coefficients of E|V_t against the Dirichlet convolution
    psi * (tau . id^(k+1)) * 1_t for 1 <= n <= bound.

    Returns None when every index matches, else the first mismatch.
    """
    f = apply_v(eisenstein_normal(k, psi, tau, bound, prec), t)
    p = psi.p
    for n in range(1, bound + 1):
        acc = PadicNumber.zero(p, prec)
        # the indicator factor is supported at the single index t, so the
        # triple convolution collapses to the double one at n/t
        if n % t == 0:
            m = n // t
            for e in divisors(m):
                acc = acc + psi(m // e) * (tau(e) * e ** (k + 1))
        if not (acc - f.coeffs[n]).is_zero():
            return n
    return None
