"""Dirichlet characters of modulus prime to p, valued in Z_p.

Only tame characters live here: the modulus is coprime to p and the values
have order dividing p - 1, so they sit inside Z_p without any extension
arithmetic.  Everything the verification flows need is trivial or quadratic,
but the table representation below is agnostic to the order as long as the
values stay in the Teichmuller subgroup.

Characters of p-power conductor never appear as DirichletCharacter objects;
the weight-character machinery handles those through Teichmuller twists.
"""

from __future__ import annotations

from math import gcd, lcm

from sympy import factorint, kronecker_symbol

from .padic import DomainError, PadicNumber, embed, teichmuller


def _unit_group_gens(m: int) -> list[int]:
    """Canonical generators of (Z/mZ)^x, deterministic in m.

    For odd prime powers the smallest primitive root, lifted by CRT; powers
    of 2 contribute -1 and 5.  Used for the JSON descriptor.
    """
    if m <= 2:
        return []
    gens = []
    for q, e in sorted(factorint(m).items()):
        qe = q**e
        rest = m // qe
        if q == 2:
            locals_ = [qe - 1] if e >= 2 else []
            if e >= 3:
                locals_.append(5)
        else:
            phi = qe // q * (q - 1)
            g = 2
            while True:
                if gcd(g, q) == 1 and all(
                    pow(g, phi // r, qe) != 1 for r in factorint(phi)
                ):
                    break
                g += 1
            locals_ = [g]
        for g in locals_:
            # CRT lift to x = g mod q^e, x = 1 mod rest
            if rest == 1:
                x = g % m
            else:
                t = (1 - g) * pow(qe, -1, rest) % rest
                x = (g + qe * t) % m
            gens.append(x)
    return gens


def _unit_list(m: int) -> list[int]:
    if m == 1:
        return [0]
    return [a for a in range(m) if gcd(a, m) == 1]


class DirichletCharacter:
    """A character of (Z/mZ)^x with values in the Teichmuller subgroup of Z_p."""

    __slots__ = ("p", "prec", "modulus", "table", "_signs", "_conductor")

    def __init__(self, p: int, prec: int, modulus: int, table: dict):
        if gcd(modulus, p) != 1:
            raise DomainError(
                "tame character needs gcd(modulus, p) = 1, got modulus %d, p %d"
                % (modulus, p)
            )
        self.p = p
        self.prec = prec
        self.modulus = modulus
        self.table = table
        self._conductor = None
        # fast integer view when all values are +-1 (the usual case here)
        signs = {}
        one = embed(p, 1, prec)
        for a, v in table.items():
            if v == one:
                signs[a] = 1
            elif v == -one:
                signs[a] = -1
            else:
                signs = None
                break
        self._signs = signs

    # ---------------------------------------------------------------- build

    @classmethod
    def trivial(cls, p: int, prec: int, modulus: int = 1) -> "DirichletCharacter":
        one = embed(p, 1, prec)
        return cls(p, prec, modulus, {a: one for a in _unit_list(modulus)})

    # ------------------------------------------------------------ evaluate

    def __call__(self, n: int) -> PadicNumber:
        n = int(n)
        if self.modulus == 1:
            return self.table[0]
        if gcd(n, self.modulus) != 1:
            return PadicNumber.zero(self.p, self.prec)
        return self.table[n % self.modulus]

    def int_value(self, n: int) -> int:
        """chi(n) as an integer in {-1, 0, 1}; DomainError if not quadratic."""
        if self._signs is None:
            raise DomainError("character has values beyond +-1")
        if self.modulus == 1:
            return 1
        n = int(n) % self.modulus
        if gcd(n, self.modulus) != 1:
            return 0
        return self._signs[n]

    def is_quadratic(self) -> bool:
        """True when every value is +-1, so int_value is available."""
        return self._signs is not None

    # ------------------------------------------------------------- queries

    def parity(self) -> int:
        """chi(-1), as +1 or -1."""
        if self.modulus <= 2:
            return 1
        v = self.table[self.modulus - 1]
        return 1 if v == 1 else -1

    def is_odd(self) -> bool:
        return self.parity() == -1

    def conductor(self) -> int:
        """Smallest f | m such that chi factors through (Z/fZ)^x."""
        if self._conductor is not None:
            return self._conductor
        m = self.modulus
        one = embed(self.p, 1, self.prec)
        for f in sorted(d for d in range(1, m + 1) if m % d == 0):
            if all(
                self.table[a] == one
                for a in _unit_list(m)
                if a % f == 1 % f
            ):
                self._conductor = f
                return f
        raise AssertionError("unreachable: m itself always works")

    def is_trivial(self) -> bool:
        return self.conductor() == 1

    # ---------------------------------------------------------------- ops

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        if other.p != self.p:
            raise DomainError("mixed primes")
        m = lcm(self.modulus, other.modulus)
        prec = min(self.prec, other.prec)
        table = {a: self(a) * other(a) for a in _unit_list(m)}
        return DirichletCharacter(self.p, prec, m, table)

    def inverse(self) -> "DirichletCharacter":
        table = {a: v.inverse() for a, v in self.table.items()}
        return DirichletCharacter(self.p, self.prec, self.modulus, table)

    def extend(self, modulus: int) -> "DirichletCharacter":
        """The same character viewed at a larger (multiple) modulus."""
        if modulus % self.modulus != 0:
            raise DomainError("extension modulus must be a multiple")
        table = {a: self(a) for a in _unit_list(modulus)}
        return DirichletCharacter(self.p, self.prec, modulus, table)

    def primitive_part(self) -> "DirichletCharacter":
        f = self.conductor()
        if f == self.modulus:
            return self
        m = self.modulus
        table = {}
        for a in _unit_list(f):
            b = a
            while gcd(b, m) != 1:
                b += f
            table[a] = self.table[b % m]
        return DirichletCharacter(self.p, self.prec, f, table)

    def with_prec(self, prec: int) -> "DirichletCharacter":
        """The same character carried at a different precision.

        Raising precision is exact, not a formal extension: every value is a
        root of unity, hence the Teichmuller representative of its residue.
        """
        if prec == self.prec:
            return self
        if self._signs is not None:
            table = {a: embed(self.p, s, prec) for a, s in self._signs.items()}
        elif prec < self.prec:
            table = {a: v.with_prec(prec) for a, v in self.table.items()}
        else:
            table = {
                a: teichmuller(PadicNumber(self.p, prec, 0, v.unit))
                for a, v in self.table.items()
            }
        out = DirichletCharacter(self.p, prec, self.modulus, table)
        out._conductor = self._conductor
        return out

    def __eq__(self, other):
        if not isinstance(other, DirichletCharacter):
            return NotImplemented
        return (
            self.p == other.p
            and self.modulus == other.modulus
            and all(self.table[a] == other.table[a] for a in self.table)
        )

    __hash__ = None

    def __repr__(self):
        kind = "quadratic" if self._signs else "order>2"
        return "DirichletCharacter(mod %d, conductor %d, %s)" % (
            self.modulus,
            self.conductor(),
            kind,
        )

    # ------------------------------------------------------- serialization

    def to_json(self) -> dict:
        gens = _unit_group_gens(self.modulus)
        return {
            "modulus": self.modulus,
            "generator_images": [self.table[g].to_json() for g in gens],
        }

    @classmethod
    def from_json(cls, p: int, prec: int, data: dict) -> "DirichletCharacter":
        m = data["modulus"]
        gens = _unit_group_gens(m)
        images = [PadicNumber.from_json(d) for d in data["generator_images"]]
        if len(images) != len(gens):
            raise DomainError("generator image count mismatch")
        table = {a: None for a in _unit_list(m)}
        one = embed(p, 1, prec)
        table[1 % m] = one
        # breadth-first fill by multiplicativity
        frontier = [1 % m]
        while frontier:
            a = frontier.pop()
            for g, img in zip(gens, images):
                b = a * g % m
                if table[b] is None:
                    table[b] = table[a] * img
                    frontier.append(b)
        if any(v is None for v in table.values()):
            raise DomainError("generator images do not generate the unit group")
        return cls(p, prec, m, table)


def is_fundamental_discriminant(D: int) -> bool:
    if D == 0:
        return False
    if D == 1:
        return True

    def squarefree(n):
        return all(e == 1 for e in factorint(n).values())

    if D % 4 == 1:
        return squarefree(abs(D))
    if D % 4 == 0:
        q = D // 4
        return q % 4 in (2, 3) and squarefree(abs(q))
    return False


def make_quadratic(p: int, D: int, prec: int) -> DirichletCharacter:
    """The Kronecker symbol character attached to a fundamental discriminant.

    Modulus |D|, parity the sign of D.  D = 1 gives the trivial character of
    modulus 1.
    """
    if not is_fundamental_discriminant(D):
        raise DomainError("%d is not a fundamental discriminant" % D)
    if gcd(D, p) != 1:
        raise DomainError("discriminant must be coprime to p")
    if D == 1:
        return DirichletCharacter.trivial(p, prec)
    m = abs(D)
    table = {
        a: embed(p, kronecker_symbol(D, a), prec) for a in _unit_list(m)
    }
    return DirichletCharacter(p, prec, m, table)
