"""Truncated p-adic distributions realized as finite moment vectors.

A distribution is approximated by its first M moments against z^j.  The
precision contract is the standard filtration: moment j is only trusted
modulo p^(N-j) for the base precision N, and every operation tracks the
per-moment precision conservatively through PadicNumber arithmetic before
clamping back to that cap.
"""

from fractions import Fraction
from functools import lru_cache
from math import comb

from .padic import DomainError, PadicError, PadicNumber, embed

__all__ = [
    "TruncDist",
    "act",
    "theta_k",
    "rho_k",
    "dirac",
    "dirac_deriv",
    "solve_difference_equation",
]


def _binom(e: int, n: int) -> int:
    """Binomial coefficient C(e, n) for integer e of either sign."""
    if n < 0:
        return 0
    if e >= 0:
        return comb(e, n) if n <= e else 0
    return (-1) ** n * comb(-e + n - 1, n)


class TruncDist:
    """Moment vector (m_0, ..., m_{M-1}) of a distribution of a given weight.

    The weight is the integer w of the monoid action kappa(u) = u^w; the
    lifting pipeline uses both w = k >= 0 and w = -2-k.  Moments are
    PadicNumber values whose prec fields form the trusted-precision vector.
    """

    __slots__ = ("p", "weight", "prec", "moments")

    def __init__(self, p, weight, prec, moments):
        if not moments:
            raise DomainError("a distribution needs at least one moment")
        clamped = []
        for j, m in enumerate(moments):
            if m.p != p:
                raise DomainError("moment prime %d, expected %d" % (m.p, p))
            cap = max(prec - j, 0)
            clamped.append(m.with_prec(cap) if m.prec > cap else m)
        self.p = p
        self.weight = weight
        self.prec = prec
        self.moments = tuple(clamped)

    @classmethod
    def zero(cls, p, weight, size, prec):
        return cls(p, weight, prec, [PadicNumber.zero(p, prec)] * size)

    @property
    def size(self):
        return len(self.moments)

    @property
    def trust(self):
        """Per-moment absolute precision actually carried."""
        return tuple(m.prec for m in self.moments)

    def moment(self, j):
        if not 0 <= j < len(self.moments):
            raise DomainError("moment index %d outside 0..%d" % (j, self.size - 1))
        return self.moments[j]

    def is_zero(self):
        return all(m.unit == 0 for m in self.moments)

    def _compatible(self, other):
        if not isinstance(other, TruncDist):
            raise DomainError("expected a TruncDist")
        if other.p != self.p or other.weight != self.weight:
            raise DomainError("mixed primes or weights")
        if other.size != self.size:
            raise DomainError("moment counts %d and %d" % (self.size, other.size))

    def __add__(self, other):
        self._compatible(other)
        prec = min(self.prec, other.prec)
        return TruncDist(
            self.p, self.weight, prec,
            [a + b for a, b in zip(self.moments, other.moments)],
        )

    def __sub__(self, other):
        self._compatible(other)
        prec = min(self.prec, other.prec)
        return TruncDist(
            self.p, self.weight, prec,
            [a - b for a, b in zip(self.moments, other.moments)],
        )

    def __neg__(self):
        return TruncDist(self.p, self.weight, self.prec,
                         [-m for m in self.moments])

    def scale(self, c):
        return TruncDist(self.p, self.weight, self.prec,
                         [m * c for m in self.moments])

    def __eq__(self, other):
        if not isinstance(other, TruncDist):
            return NotImplemented
        if (other.p, other.weight, other.size) != (self.p, self.weight, self.size):
            return False
        return all(a == b for a, b in zip(self.moments, other.moments))

    def __ne__(self, other):
        eq = self.__eq__(other)
        return NotImplemented if eq is NotImplemented else not eq

    def __repr__(self):
        return "TruncDist(p=%d, weight=%d, prec=%d, size=%d)" % (
            self.p, self.weight, self.prec, self.size)

    def to_json(self):
        return {
            "p": self.p,
            "weight": self.weight,
            "prec": self.prec,
            "moments": [m.to_json() for m in self.moments],
        }

    @classmethod
    def from_json(cls, data):
        moments = [PadicNumber.from_json(m) for m in data["moments"]]
        return cls(data["p"], data["weight"], data["prec"], moments)


def _check_s0p(gamma, p):
    a, b, c, d = gamma
    for x in gamma:
        if not isinstance(x, int):
            raise DomainError("matrix entries must be integers")
    if a % p == 0:
        raise DomainError("upper-left entry must be prime to p")
    if c % p != 0:
        raise DomainError("lower-left entry must be divisible by p")
    if a * d - b * c == 0:
        raise DomainError("singular matrix")


@lru_cache(maxsize=None)
def _action_matrix(gamma, weight, size):
    """Row j holds the z-coefficients of (a-cz)^(w-j) (dz-b)^j mod z^size.

    Entries are exact Fractions whose denominators are powers of a, hence
    p-units, so scaling moments by them costs no precision.
    """
    a, b, c, d = gamma
    rows = []
    for j in range(size):
        e = weight - j
        # binomial series of (a-cz)^e; p | c makes coefficient n divisible
        # by p^n, so the tail cut at z^size lands below the filtration
        # guard the power: a = 0 is legal for weight k >= 0 callers, where
        # every surviving binomial has e - n >= 0
        f1 = [_binom(e, n) * Fraction(a) ** (e - n) * (-c) ** n
              if _binom(e, n) else Fraction(0)
              for n in range(size)]
        f2 = [comb(j, t) * d**t * (-b) ** (j - t) for t in range(j + 1)]
        row = []
        for i in range(size):
            total = Fraction(0)
            for t in range(min(i, j) + 1):
                if f2[t]:
                    total += f2[t] * f1[i - t]
            row.append(total)
        rows.append(tuple(row))
    return tuple(rows)


def act(gamma, mu):
    """Right weight-w action of gamma = (a, b, c, d) in S_0(p) on mu.

    Dual to f(z) |-> (a-cz)^w f((dz-b)/(a-cz)) on the function side; the
    new j-th moment pairs the old distribution against that image of z^j.
    """
    _check_s0p(gamma, mu.p)
    rows = _action_matrix(tuple(gamma), mu.weight, mu.size)
    p, prec, size, w = mu.p, mu.prec, mu.size, mu.weight
    c = gamma[2]
    vfloor = min(0, *(m.val for m in mu.moments))
    out = []
    for j, row in enumerate(rows):
        total = None
        for coeff, m in zip(row, mu.moments):
            if coeff == 0:
                continue
            # apparent zeros still carry O(p^t) uncertainty into the sum
            term = m * coeff
            total = term if total is None else total + term
        if total is None:
            total = PadicNumber.zero(p, prec)
        if c != 0 and (w - j < 0 or w >= size):
            # row j is a genuine series, not a polynomial: the tail cut at
            # z^size feeds this moment at valuation >= size - j, since each
            # series term carries a power of c and p | c
            total = total.with_prec(min(total.prec, size - j + vfloor))
        out.append(total)
    return TruncDist(p, w, prec, out)


def theta_k(mu, k):
    """The (k+1)-fold derivation sending weight -2-k into weight k.

    (theta mu)_j = j(j-1)...(j-k) m_{j-k-1} for j > k, zero below; the
    image therefore dies under rho_k, and the action intertwines up to a
    det^(k+1) twist.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    if mu.weight != -2 - k:
        raise DomainError("weight %d input, expected %d" % (mu.weight, -2 - k))
    if mu.size <= k + 1:
        raise DomainError(
            "need more than %d moments, have %d" % (k + 1, mu.size))
    p, prec = mu.p, mu.prec
    out = []
    for j in range(mu.size):
        if j <= k:
            out.append(PadicNumber.zero(p, prec))
            continue
        ff = 1
        for t in range(k + 1):
            ff *= j - t
        out.append(mu.moments[j - k - 1] * ff)
    return TruncDist(p, k, prec, out)


def rho_k(mu, k):
    """Project a weight-k distribution to its polynomial pairing (m_0..m_k)."""
    if k < 0 or mu.weight != k:
        raise DomainError("weight %d input, expected %d" % (mu.weight, k))
    if mu.size < k + 1:
        raise DomainError("need at least %d moments, have %d" % (k + 1, mu.size))
    return mu.moments[: k + 1]


def _p_integral(p, c):
    c = Fraction(c)
    if c.denominator % p == 0:
        raise DomainError("center must be p-integral")
    return c


def dirac(p, c, size, prec, weight=0):
    """Evaluation at c: moments c^j."""
    c = _p_integral(p, c)
    return TruncDist(p, weight, prec,
                     [embed(p, c**j, prec) for j in range(size)])


def dirac_deriv(p, c, order, size, prec, weight=0):
    """The order-th derivative-of-evaluation at c: f |-> f^(order)(c)."""
    c = _p_integral(p, c)
    if not 0 <= order < size:
        raise DomainError("derivative order %d outside 0..%d" % (order, size - 1))
    out = []
    for j in range(size):
        if j < order:
            out.append(PadicNumber.zero(p, prec))
            continue
        ff = 1
        for t in range(order):
            ff *= j - t
        out.append(embed(p, ff * c ** (j - order), prec))
    return TruncDist(p, weight, prec, out)


def solve_difference_equation(nu):
    """Find mu with mu|(1 1; 0 1) - mu = nu, given total measure zero.

    The translated moments mix only lower ones, so the system is triangular:
    moment j-1 of mu enters first in moment j of the difference, with unit
    coefficient divided by j.  The top moment of mu is unconstrained by the
    truncated data and is pinned to zero.  Divisions by j cost v_p(j) digits;
    the output trust vector records the actual loss.  The computed residual
    is checked against nu before returning.
    """
    p, w, prec, size = nu.p, nu.weight, nu.prec, nu.size
    if nu.moments[0].unit != 0:
        raise DomainError("total measure must vanish")
    if size == 1 or nu.is_zero():
        return TruncDist.zero(p, w, size, prec)
    # nu_j = sum_{i<j} C(j,i)(-1)^(j-i) m_i, leading term -j m_{j-1}
    ms = []
    for j in range(1, size):
        acc = nu.moments[j]
        for i in range(j - 1):
            acc = acc - ms[i] * (comb(j, i) * (-1) ** (j - i))
        ms.append(acc * Fraction(-1, j))
    ms.append(PadicNumber.zero(p, prec))
    mu = TruncDist(p, w, prec, ms)
    res = act((1, 1, 0, 1), mu) - mu
    if res != nu:
        raise PadicError("difference equation residual check failed")
    return mu
