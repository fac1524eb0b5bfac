"""Finite precision p-adic arithmetic for odd p.

A PadicNumber models an element of Q_p known modulo p^prec: it stores a
valuation and a unit part, with the unit reduced modulo p^(prec - val).  All
arithmetic propagates precision conservatively (sums keep the minimum absolute
precision, products add valuations and keep the minimum relative precision),
so every digit a result claims to have is a digit it actually has.

Nothing here assumes p > 3, but p = 2 is rejected: the logarithm and
exponential below use the disc |x| <= 1/p inside the region of convergence,
which fails at 2.
"""

from __future__ import annotations

from fractions import Fraction


class PadicError(Exception):
    """Base class for arithmetic failures in this package."""


class DomainError(PadicError):
    """Input outside the mathematical domain of the operation."""


class PrecisionExhausted(PadicError):
    """An operation needed digits that the inputs do not carry."""


def pval(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _split(n: int, p: int) -> tuple[int, int]:
    # n nonzero: n = unit * p^v with p not dividing unit
    v = pval(n, p)
    return v, n // p**v


class PadicNumber:
    """An element of Q_p known modulo p^prec.

    Invariants: for a nonzero value, val < prec, the unit lies in
    [1, p^(prec-val)) and is prime to p.  A value indistinguishable from zero
    has unit == 0 and val == prec, meaning "0 + O(p^prec)".
    """

    __slots__ = ("p", "prec", "val", "unit")

    def __init__(self, p: int, prec: int, val: int, unit: int):
        if p < 3 or p % 2 == 0:
            raise DomainError("p must be an odd prime, got %r" % (p,))
        self.p = p
        self.prec = prec
        rel = prec - val
        if rel <= 0 or unit % p**rel == 0:
            self.val = prec
            self.unit = 0
            return
        unit %= p**rel
        if unit % p == 0:
            # stored valuation was too small; renormalize
            shift = pval(unit, p)
            val += shift
            unit //= p**shift
            unit %= p ** (prec - val)
        self.val = val
        self.unit = unit

    # ---------------------------------------------------------------- build

    @classmethod
    def zero(cls, p: int, prec: int) -> "PadicNumber":
        return cls(p, prec, prec, 0)

    @classmethod
    def from_int(cls, p: int, n: int, prec: int) -> "PadicNumber":
        if n == 0:
            return cls.zero(p, prec)
        v, u = _split(n, p)
        return cls(p, prec, v, u)

    @classmethod
    def from_rational(cls, p: int, x, prec: int) -> "PadicNumber":
        """Embed an exact int or Fraction, correct to the full prec digits."""
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, prec)
        vn, un = _split(x.numerator, p)
        vd, ud = _split(x.denominator, p)
        val = vn - vd
        rel = prec - val
        if rel <= 0:
            return cls.zero(p, prec)
        unit = un * pow(ud, -1, p**rel) % p**rel
        return cls(p, prec, val, unit)

    # ------------------------------------------------------------- queries

    def is_zero(self) -> bool:
        """True when the value is indistinguishable from 0 at this precision."""
        return self.unit == 0

    def valuation(self) -> int:
        """Valuation; for an apparent zero this is a lower bound, namely prec."""
        return self.val

    def rel_prec(self) -> int:
        return self.prec - self.val if self.unit else 0

    def residue(self) -> int:
        """The image in Z/p.  Requires val >= 0."""
        if self.val > 0 or self.unit == 0:
            return 0
        if self.val < 0:
            raise DomainError("negative valuation, no residue mod p")
        return self.unit % self.p

    def lift(self) -> Fraction:
        """An exact rational congruent to self modulo p^prec."""
        if self.unit == 0:
            return Fraction(0)
        return Fraction(self.unit * Fraction(self.p) ** self.val)

    def lift_balanced(self) -> Fraction:
        """Like lift, with the unit in the balanced range around zero.

        Recovers small negative integers exactly, which matters when the
        lift is re-embedded at higher precision.
        """
        if self.unit == 0:
            return Fraction(0)
        m = self.p ** self.rel_prec()
        u = self.unit if self.unit <= m // 2 else self.unit - m
        return Fraction(u * Fraction(self.p) ** self.val)

    def digits(self) -> list[int]:
        """Base-p digits of the unit part, little endian, rel_prec of them."""
        out = []
        u = self.unit
        for _ in range(self.rel_prec()):
            out.append(u % self.p)
            u //= self.p
        return out

    def with_prec(self, prec: int) -> "PadicNumber":
        """Truncate (or formally extend, keeping only known digits) to prec."""
        if prec >= self.prec:
            if self.unit == 0:
                return PadicNumber.zero(self.p, self.prec)
            return self
        return PadicNumber(self.p, prec, self.val, self.unit)

    # ---------------------------------------------------------- arithmetic

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise DomainError("mixed primes %d and %d" % (self.p, other.p))
            return other
        if isinstance(other, (int, Fraction)):
            # exact scalar: give it enough digits that it never limits the
            # precision of the result
            return PadicNumber.from_rational(
                self.p, other, self.prec + abs(self.val) + 4
            )
        return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        p = a.p
        prec = min(a.prec, b.prec)
        va = min(a.val, b.val)
        total = a.unit * p ** (a.val - va) + b.unit * p ** (b.val - va)
        return PadicNumber(p, prec, va, total)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        return PadicNumber(self.p, self.prec, self.val, -self.unit)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b + (-self)

    def _scale_exact(self, x: Fraction) -> "PadicNumber":
        # multiplication by an exact rational only shifts the valuation; the
        # relative precision survives untouched (unlike _coerce, which would
        # truncate a scalar of large valuation)
        p = self.p
        if x == 0:
            return PadicNumber.zero(p, self.prec + abs(self.val) + 4)
        vn, un = _split(x.numerator, p)
        vd, ud = _split(x.denominator, p)
        v = vn - vd
        if self.unit == 0:
            return PadicNumber.zero(p, self.prec + v)
        rel = self.rel_prec()
        m = p**rel
        unit = self.unit * un % m
        if ud != 1:
            unit = unit * pow(ud, -1, m) % m
        return PadicNumber(p, self.val + v + rel, self.val + v, unit)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._scale_exact(Fraction(other))
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if a.unit == 0 or b.unit == 0:
            # O(p^Na) * (u p^vb + O(p^Nb)) = O(p^(Na+vb)) and symmetrically
            return PadicNumber.zero(a.p, min(a.prec + b.val, b.prec + a.val))
        rel = min(a.rel_prec(), b.rel_prec())
        val = a.val + b.val
        return PadicNumber(a.p, val + rel, val, a.unit * b.unit)

    __rmul__ = __mul__

    def inverse(self) -> "PadicNumber":
        if self.unit == 0:
            raise PrecisionExhausted(
                "inverting a number indistinguishable from zero (O(%d^%d))"
                % (self.p, self.prec)
            )
        rel = self.rel_prec()
        inv = pow(self.unit, -1, self.p**rel)
        return PadicNumber(self.p, -self.val + rel, -self.val, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            x = Fraction(other)
            if x == 0:
                raise ZeroDivisionError("division by exact zero")
            return self._scale_exact(1 / x)
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self * b.inverse()

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse()._scale_exact(Fraction(other))
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = PadicNumber.from_int(self.p, 1, self.prec - min(self.val, 0) * n + 2)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return (self - b).is_zero()

    def __ne__(self, other):
        eq = self.__eq__(other)
        if eq is NotImplemented:
            return eq
        return not eq

    __hash__ = None  # congruence equality is precision dependent

    def __repr__(self):
        if self.unit == 0:
            return "O(%d^%d)" % (self.p, self.prec)
        return "%d*%d^%d + O(%d^%d)" % (self.unit, self.p, self.val, self.p, self.prec)

    # -------------------------------------------------------- serialization

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "prec": self.prec,
            "val": None if self.unit == 0 else self.val,
            "unit_digits": self.digits(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "PadicNumber":
        p, prec = data["p"], data["prec"]
        if data["val"] is None:
            return cls.zero(p, prec)
        unit = 0
        for d in reversed(data["unit_digits"]):
            unit = unit * p + d
        return cls(p, prec, data["val"], unit)


def embed(p: int, x, prec: int) -> PadicNumber:
    """Embed an exact rational (int or Fraction) into Q_p at precision prec."""
    return PadicNumber.from_rational(p, x, prec)


def agreement_valuation(a: PadicNumber, b: PadicNumber) -> int:
    """Number of initial digits on which a and b agree.

    Returns the valuation of a - b, capped at the comparable precision; this
    is the "agreed digits" count used in verification reports (digits counted
    from p^0, so values with negative valuation can disagree at a negative
    index, reported as is).
    """
    d = a - b
    return d.prec if d.is_zero() else d.val


# ----------------------------------------------------------------- functions


def teichmuller(x: PadicNumber) -> PadicNumber:
    """The Teichmuller lift: the root of unity congruent to x mod p.

    x must be a unit.  Iterating y -> y^p contracts to the fixed point, one
    digit per step.
    """
    if x.val != 0:
        raise DomainError("teichmuller needs a p-adic unit")
    p, prec = x.p, x.prec
    mod = p**prec
    y = x.unit % mod
    for _ in range(prec + 1):
        y_next = pow(y, p, mod)
        if y_next == y:
            break
        y = y_next
    return PadicNumber(p, prec, 0, y)


def one_unit_part(x: PadicNumber) -> PadicNumber:
    """<x> = x / teichmuller(x), a 1-unit.  Requires x a unit."""
    return x * teichmuller(x).inverse()


def iwasawa_log(x: PadicNumber) -> PadicNumber:
    """The Iwasawa branch of log: log<x> for any unit x.

    Computed as log(1+t) = sum_{i>=1} -(-1)^i t^i / i with t = <x> - 1.
    Term i has valuation at least i*val(t) - val_p(i) >= i - log_p(i), so the
    series below the cutoff already accounts for every digit up to prec.
    """
    if x.val != 0:
        raise DomainError("iwasawa_log needs a p-adic unit")
    u = one_unit_part(x)
    p, prec = x.p, x.prec
    t = u - 1
    if t.is_zero():
        return PadicNumber.zero(p, prec)
    vt = t.val
    # smallest cutoff with i*vt - log_p(i) >= prec for all i beyond it
    imax = 1
    while imax * vt - _ilog(imax, p) < prec + 1:
        imax += 1
    total = PadicNumber.zero(p, prec)
    power = PadicNumber.from_int(p, 1, prec + vt)
    for i in range(1, imax + 1):
        power = power * t
        term = power / i
        total = total + (term if i % 2 == 1 else -term)
    return total.with_prec(prec)


def _ilog(n: int, p: int) -> int:
    # floor(log_p(n)) for n >= 1
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


def padic_exp(x: PadicNumber) -> PadicNumber:
    """exp on the disc pZ_p (odd p).  Raises DomainError outside it."""
    p, prec = x.p, x.prec
    if x.is_zero():
        return PadicNumber.from_int(p, 1, prec)
    if x.val < 1:
        raise DomainError("exp converges only on pZ_p for odd p")
    vt = x.val
    # term i has valuation i*vt - (i - s_p(i))/(p-1) >= i*(vt - 1/(p-1));
    # cutoff from the integer form i*(vt*(p-1) - 1) >= prec*(p-1)
    imax = (prec * (p - 1)) // (vt * (p - 1) - 1) + p + 2
    total = PadicNumber.from_int(p, 1, prec)
    term = PadicNumber.from_int(p, 1, prec + vt)
    for i in range(1, imax + 1):
        term = term * x / i
        total = total + term
    return total.with_prec(prec)


def unit_power(x: PadicNumber, s) -> PadicNumber:
    """<x>^s = exp(s * log<x>) for a unit x and s in Z_p (or an int)."""
    if isinstance(s, int):
        s = PadicNumber.from_int(x.p, s, x.prec + 2)
    if not s.is_zero() and s.val < 0:
        raise DomainError("exponent must lie in Z_p")
    y = s * iwasawa_log(x)
    if y.is_zero():
        return PadicNumber.from_int(x.p, 1, min(x.prec, y.prec))
    return padic_exp(y.with_prec(min(x.prec, y.prec)))
