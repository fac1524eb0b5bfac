"""Classical modular symbols for Gamma_0(n) with nebentypus.

A symbol assigns to each degree-zero divisor of cusps a linear functional
on polynomials of degree <= k, covariantly for Gamma_0(n) twisted by a
character.  It is pinned down by its values on the finitely many divisors
{g 0} - {g oo} indexed by P^1(Z/n), subject to the two- and three-term
Manin relations, and we solve those relations over Z/p^N directly.

Values are stored raw, as the functional on the generator divisor itself.
Every matrix that then acts on a value, relation twists delta^-1 in
Gamma_0(n) as much as Hecke coset representatives, is upper-triangular mod
p or lies in Gamma_0(n); the same bookkeeping therefore drives the
distribution-valued lifts, where only such matrices may act.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

from .characters import DirichletCharacter
from .dist import _action_matrix
from .linalg import kernel
from .padic import DomainError, PadicNumber, embed

INFINITY = (1, 0)

MAT_S = (0, -1, 1, 0)
MAT_U = (0, -1, 1, 1)
MAT_I = (1, 0, 0, 1)


# --------------------------------------------------------------- matrices

def mat_mul(g, h):
    a, b, c, d = g
    e, f, x, y = h
    return (a * e + b * x, a * f + b * y, c * e + d * x, c * f + d * y)


def mat_det(g):
    return g[0] * g[3] - g[1] * g[2]


def mat_inv(g):
    """Inverse of a unimodular integer matrix (determinant +-1)."""
    s = mat_det(g)
    if s not in (1, -1):
        raise DomainError("matrix is not unimodular, det = %d" % s)
    return (s * g[3], -s * g[1], -s * g[2], s * g[0])


def _xgcd(a: int, b: int):
    """(g, x, y) with x*a + y*b = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


# ------------------------------------------------------------------ cusps

def normalize_cusp(a: int, c: int):
    """Primitive pair (a, c) for the cusp a/c; (1, 0) is infinity."""
    if c == 0:
        if a == 0:
            raise DomainError("0/0 is not a cusp")
        return (1, 0)
    g = gcd(a, c)
    a, c = a // g, c // g
    if c < 0:
        a, c = -a, -c
    return (a, c)


def mat_cusp(g, cusp):
    x, y = cusp
    return normalize_cusp(g[0] * x + g[1] * y, g[2] * x + g[3] * y)


def unimodular_path(cusp):
    """Determinant-one matrices g_i with {cusp} - {oo} = -sum of divisors
    {g_i 0} - {g_i oo}.

    Continued-fraction convergents h_i/k_i of the cusp chain the path
    {oo}, {h_0/k_0}, ..., {cusp} through unimodular steps.
    """
    if cusp == (1, 0):
        return ()
    a, c = cusp
    quotients = []
    while c:
        q = a // c
        quotients.append(q)
        a, c = c, a - q * c
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    mats = []
    for i, q in enumerate(quotients):
        h0, h1 = h1, q * h1 + h0
        k0, k1 = k1, q * k1 + k0
        s = 1 if i % 2 else -1
        mats.append((h1, s * h0, k1, s * k0))
    return tuple(mats)


# ------------------------------------------------------- the V_k action

@lru_cache(maxsize=None)
def vk_matrix(g, k: int):
    """Matrix of the right dual action on V_k in the basis dual to z^i.

    Row j gives the coefficients expressing (f|g)(z^j) in terms of the
    f(z^i); for weight k >= 0 every entry is an integer, for any integer
    matrix g with nonzero determinant.
    """
    if mat_det(g) == 0:
        raise DomainError("singular matrix")
    rows = _action_matrix(g, k, k + 1)
    out = []
    for row in rows:
        for x in row:
            if x.denominator != 1:
                raise AssertionError("polynomial action must be integral")
        out.append(tuple(int(x) for x in row))
    return tuple(out)


def apply_vk(coords, g, k: int):
    """coords|g for a length-(k+1) functional coordinate vector."""
    rows = vk_matrix(g, k)
    out = []
    for row in rows:
        acc = None
        for a, v in zip(row, coords):
            if a == 0:
                continue
            term = v * a
            acc = term if acc is None else acc + term
        if acc is None:
            acc = coords[0] - coords[0]
        out.append(acc)
    return tuple(out)


# ----------------------------------------------------------- presentation

@lru_cache(maxsize=None)
def _p1_data(n: int):
    if n == 1:
        return ((0, 0),), {(0, 0): 0}
    units = tuple(t for t in range(1, n) if gcd(t, n) == 1)
    seen = set()
    for u in range(n):
        for v in range(n):
            if gcd(gcd(u, v), n) != 1:
                continue
            seen.add(min(((t * u) % n, (t * v) % n) for t in units))
    classes = tuple(sorted(seen))
    return classes, {uv: i for i, uv in enumerate(classes)}


def _lift_to_sl2(n: int, u: int, v: int):
    """Matrix in SL_2(Z) whose bottom row is congruent to (u, v) mod n."""
    if n == 1:
        return MAT_I
    c, d = u % n, v % n
    for t in range(4 * n + 2):
        if gcd(c, d + t * n) == 1:
            d += t * n
            break
    else:
        raise AssertionError("no coprime lift of (%d, %d) mod %d" % (u, v, n))
    g, x, y = _xgcd(d, c)
    # x*d + y*c = 1, so (x, -y; c, d) has determinant one
    return (x, -y, c, d)


class SymbolPresentation:
    """Finite presentation of Gamma_0(n)-symbols over P^1(Z/n).

    For each class x a fixed unimodular lift rho_x generates the divisor
    D_x = {rho_x 0} - {rho_x oo}; a symbol is determined by its values on
    the D_x.  Relations are stored as lists of (index, matrix, unit a)
    meaning sum of eps(a) * value_index|matrix = 0, so one presentation
    serves every nebentypus at once.
    """

    __slots__ = ("level", "classes", "index", "lifts", "relations", "_terms")

    def __init__(self, level: int):
        if level < 1:
            raise DomainError("level must be positive")
        self.level = level
        self.classes, self.index = _p1_data(level)
        self.lifts = tuple(_lift_to_sl2(level, u, v) for u, v in self.classes)
        rels = []
        for x, rho in enumerate(self.lifts):
            # {g S 0} - {g S oo} = -({g 0} - {g oo})
            y, dy = self.decompose(mat_mul(rho, MAT_S))
            rels.append(((x, MAT_I, 1), (y, mat_inv(dy), dy[0] % level)))
            # (1 + U + U^2) ({0} - {oo}) = 0
            y, dy = self.decompose(mat_mul(rho, MAT_U))
            z, dz = self.decompose(mat_mul(rho, mat_mul(MAT_U, MAT_U)))
            rels.append(((x, MAT_I, 1),
                         (y, mat_inv(dy), dy[0] % level),
                         (z, mat_inv(dz), dz[0] % level)))
        self.relations = tuple(rels)
        self._terms = {}

    def class_index(self, c: int, d: int) -> int:
        n = self.level
        if n == 1:
            return 0
        units = (t for t in range(1, n) if gcd(t, n) == 1)
        key = min(((t * c) % n, (t * d) % n) for t in units)
        return self.index[key]

    def decompose(self, g):
        """Write g = delta * rho_x with delta in Gamma_0(n); returns (x, delta)."""
        x = self.class_index(g[2], g[3])
        delta = mat_mul(g, mat_inv(self.lifts[x]))
        if delta[2] % self.level:
            raise AssertionError("decomposition left the group")
        return x, delta

    def generator_divisor(self, x: int):
        """The cusp pair ({rho_x 0}, {rho_x oo})."""
        a, b, c, d = self.lifts[x]
        return normalize_cusp(b, d), normalize_cusp(a, c)

    def coset_terms(self, mats, src: "SymbolPresentation | None" = None,
                    amuls=None):
        """Evaluation data for phi |-> sum_s phi(s D_x)|s on this presentation.

        Returns, per class x, a tuple of (coefficient, unit a, class y,
        matrix m) such that the new value at x is
        sum of coefficient * eps(a) * (value_y | m), with the values read
        from the presentation src (defaults to self; differs for V_t).
        amuls multiplies the recorded unit per coset; a coset whose chosen
        representative differs from the double-coset one by some gamma
        picks up eps of that gamma's upper-left entry.
        """
        src = src or self
        if amuls is None:
            amuls = (1,) * len(mats)
        key = (tuple(mats), tuple(amuls), src.level)
        if key in self._terms:
            return self._terms[key]
        out = []
        for rho in self.lifts:
            tl = []
            for s, am in zip(mats, amuls):
                g = mat_mul(s, rho)
                for sgn, cusp in ((1, mat_cusp(g, (0, 1))),
                                  (-1, mat_cusp(g, (1, 0)))):
                    for h in unimodular_path(cusp):
                        y, delta = src.decompose(h)
                        tl.append((-sgn, (delta[0] * am) % src.level, y,
                                   mat_mul(mat_inv(delta), s)))
            out.append(tuple(tl))
        terms = tuple(out)
        self._terms[key] = terms
        return terms

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "classes": [list(uv) for uv in self.classes],
            "lifts": [list(g) for g in self.lifts],
        }

    def __repr__(self):
        return "SymbolPresentation(level=%d, generators=%d)" % (
            self.level, len(self.classes))


def build_presentation(n: int) -> SymbolPresentation:
    return SymbolPresentation(n)


# ---------------------------------------------------------------- symbols

def _eps_scalar(eps: DirichletCharacter, a: int):
    if eps.is_quadratic():
        return eps.int_value(a)
    return eps(a)


class ClassicalSymbol:
    """A Gamma_0(n)-covariant symbol with values in the dual of P_k."""

    __slots__ = ("presentation", "weight", "eps", "values")

    def __init__(self, presentation, weight, eps, values):
        if len(values) != len(presentation.classes):
            raise DomainError("one value per generator required")
        if any(len(v) != weight + 1 for v in values):
            raise DomainError("values must have length weight + 1")
        if eps.parity() != (-1) ** weight:
            raise DomainError("nebentypus parity must match the weight")
        self.presentation = presentation
        self.weight = weight
        self.eps = eps
        self.values = tuple(tuple(v) for v in values)

    @property
    def p(self) -> int:
        return self.values[0][0].p

    @property
    def prec(self) -> int:
        return min(x.prec for v in self.values for x in v)

    # ------------------------------------------------------------- algebra

    def scale(self, c) -> "ClassicalSymbol":
        vals = tuple(tuple(x * c for x in v) for v in self.values)
        return ClassicalSymbol(self.presentation, self.weight, self.eps, vals)

    def __add__(self, other):
        self._compatible(other)
        vals = tuple(tuple(a + b for a, b in zip(v, w))
                     for v, w in zip(self.values, other.values))
        return ClassicalSymbol(self.presentation, self.weight, self.eps, vals)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, ClassicalSymbol):
            return NotImplemented
        self._compatible(other)
        return all(a == b for v, w in zip(self.values, other.values)
                   for a, b in zip(v, w))

    __hash__ = None

    def _compatible(self, other):
        if (self.presentation.level != other.presentation.level
                or self.weight != other.weight):
            raise DomainError("incompatible symbols")

    # ---------------------------------------------------------- evaluation

    def _to_infinity(self, cusp):
        """phi({cusp} - {oo}) as a coordinate vector."""
        k = self.weight
        acc = [None] * (k + 1)
        for h in unimodular_path(cusp):
            y, delta = self.presentation.decompose(h)
            w = apply_vk(self.values[y], mat_inv(delta), k)
            e = _eps_scalar(self.eps, delta[0])
            for j in range(k + 1):
                term = w[j] * e
                acc[j] = -term if acc[j] is None else acc[j] - term
        zero = PadicNumber.zero(self.p, self.prec)
        return tuple(zero if a is None else a for a in acc)

    def evaluate(self, a, b):
        """phi({a} - {b}) for cusps given as primitive integer pairs."""
        va = self._to_infinity(normalize_cusp(*a))
        vb = self._to_infinity(normalize_cusp(*b))
        return tuple(x - y for x, y in zip(va, vb))

    def to_json(self) -> dict:
        return {
            "level": self.presentation.level,
            "weight": self.weight,
            "values": [[x.to_json() for x in v] for v in self.values],
        }


def _apply_terms(sym: ClassicalSymbol, terms, dest, scale=None):
    k = sym.weight
    vals = []
    for tl in terms:
        acc = [None] * (k + 1)
        for coef, a, y, mat in tl:
            e = _eps_scalar(sym.eps, a)
            w = apply_vk(sym.values[y], mat, k)
            for j in range(k + 1):
                term = w[j] * (coef * e) if isinstance(e, int) else w[j] * e * coef
                acc[j] = term if acc[j] is None else acc[j] + term
        zero = PadicNumber.zero(sym.p, sym.prec)
        row = [zero if a_ is None else a_ for a_ in acc]
        if scale is not None:
            row = [x * scale for x in row]
        vals.append(tuple(row))
    return ClassicalSymbol(dest, k, sym.eps, tuple(vals))


# ----------------------------------------------------------------- Hecke

def _tq_mats(q: int):
    return tuple((1, a, 0, q) for a in range(q)) + ((q, 0, 0, 1),)


def _uq_mats(q: int):
    return tuple((1, a, 0, q) for a in range(q))


def hecke_tq(sym: ClassicalSymbol, q: int) -> ClassicalSymbol:
    pres = sym.presentation
    if gcd(q, pres.level) != 1:
        raise DomainError("T_q needs q prime to the level, got q = %d" % q)
    # the coset (q, 0; 0, 1) sits in the double coset only after a group
    # element with upper-left q^-1 mod n, so it carries eps(q)^-1
    amuls = (1,) * q + (pow(q, -1, pres.level),)
    return _apply_terms(sym, pres.coset_terms(_tq_mats(q), amuls=amuls), pres)


def hecke_uq(sym: ClassicalSymbol, q: int) -> ClassicalSymbol:
    pres = sym.presentation
    if pres.level % q:
        raise DomainError("U_q needs q dividing the level, got q = %d" % q)
    return _apply_terms(sym, pres.coset_terms(_uq_mats(q)), pres)


def hecke_iota(sym: ClassicalSymbol) -> ClassicalSymbol:
    pres = sym.presentation
    return _apply_terms(sym, pres.coset_terms(((1, 0, 0, -1),)), pres)


def hecke_diamond(sym: ClassicalSymbol, a: int) -> ClassicalSymbol:
    if gcd(a, sym.presentation.level) != 1:
        raise DomainError("diamond needs a unit mod the level")
    return sym.scale(_eps_scalar(sym.eps, a))


def hecke_vt(sym: ClassicalSymbol, t: int,
             target: SymbolPresentation) -> ClassicalSymbol:
    if target.level != sym.presentation.level * t:
        raise DomainError("V_t target level must be source level times t")
    terms = target.coset_terms(((t, 0, 0, 1),), src=sym.presentation)
    return _apply_terms(sym, terms, target,
                        scale=Fraction(1, t ** (sym.weight + 1)))


def hecke_classical(sym: ClassicalSymbol, op, target=None) -> ClassicalSymbol:
    """Dispatch on op = ("T", q), ("U", q), ("iota",), ("diamond", a),
    or ("V", t) with the target presentation supplied separately."""
    kind = op[0]
    if kind == "T":
        return hecke_tq(sym, op[1])
    if kind == "U":
        return hecke_uq(sym, op[1])
    if kind == "iota":
        return hecke_iota(sym)
    if kind == "diamond":
        return hecke_diamond(sym, op[1])
    if kind == "V":
        if target is None:
            raise DomainError("V_t needs a target presentation")
        return hecke_vt(sym, op[1], target)
    raise DomainError("unknown Hecke operator %r" % (op,))


# ------------------------------------------------------- boundary symbols

def _complete_column(u: int, v: int):
    g, x, y = _xgcd(u, v)
    if g != 1:
        raise DomainError("column (%d, %d) is not primitive" % (u, v))
    # x*u + y*v = 1, so (u, -y; v, x) has determinant one
    return (u, -y, v, x)


def _phi_uv_point(M: int, s: int, u: int, v: int, cusp):
    """Realization data of the column (u, v) at a cusp, or None off the orbit.

    Searches gamma in Gamma_1(M) intersect Gamma_0(s) with
    gamma (u, v)^T = sign * cusp; returns (signs, r, sd) where signs lists
    the achievable signs and (r, sd) is the cusp itself.
    """
    r, sd = cusp
    ainv = mat_inv(_complete_column(u, v))
    period = lcm(M, s)
    found = []
    for sign in (1, -1):
        b = _complete_column(sign * r, sign * sd)
        for t in range(period):
            g = mat_mul(b, mat_mul((1, t, 0, 1), ainv))
            if (g[0] % M == 1 % M and g[3] % M == 1 % M
                    and g[2] % M == 0 and g[2] % s == 0):
                found.append(sign)
                break
    if not found:
        return None
    return tuple(found), r, sd


def _phi_uv_coords(k: int, M: int, s: int, u: int, v: int, cusp):
    """Integer coordinates of phi_{k,u,v} at a cusp, or None off the orbit.

    The value at gamma(u/v) is the homogeneous evaluation
    z^i |-> r^i s^(k-i) at the realized column (r, s) = gamma (u, v)^T,
    with gamma running over Gamma_1(M) intersect Gamma_0(s).
    """
    hit = _phi_uv_point(M, s, u, v, cusp)
    if hit is None:
        return None
    found, r, sd = hit
    if len(found) == 2 and k % 2:
        # -(u, v) lies in the same orbit, so an odd-weight value would
        # depend on the representative; this only happens for M | 4
        raise DomainError(
            "phi_{k,u,v} is ill-defined at this cusp (M = %d, odd k)" % M)
    e = found[0]
    return tuple((e * r) ** i * (e * sd) ** (k - i) for i in range(k + 1))


def _character_pairs(psi: DirichletCharacter, tau: DirichletCharacter,
                     s: int):
    """The (x, y, u, v) quadruples of the double character sum.

    x runs over units mod Q, y over units mod R, and (u, v) is a primitive
    column congruent to (x, Qy) modulo QR with v prime to s.  The datum a
    summand depends on is the class of its column, not the literal integer
    y, so a class whose smallest representative shares a factor with s is
    realized by a shifted column; only a class stuck on s for every
    representative (a prime dividing both s and Qy to the modulus) drops
    out of the sum."""
    q, r = psi.modulus, tau.modulus
    qr = q * r
    period = lcm(qr, s)
    pairs = []
    for x in range(1, q + 1):
        if gcd(x, q) != 1:
            continue
        for y in range(1, r + 1):
            if gcd(y, r) != 1:
                continue
            u, v = x, q * y
            for t in range(s + 1):
                if gcd(v + t * qr, s) == 1:
                    v += t * qr
                    break
            else:
                continue
            # move to a primitive column; steps of the full congruence
            # period stay inside one orbit, so the value is unchanged
            for t in range(period + 1):
                if gcd(u + t * period, v) == 1:
                    u += t * period
                    break
            else:
                raise AssertionError("no primitive representative")
            pairs.append((x, y, u, v))
    return tuple(pairs)


class BoundarySymbol:
    """Total Eisenstein boundary symbol, evaluable at every single cusp.

    Built from characters psi, tau of moduli Q, R as the usual double sum
    of the elementary symbols phi_{k,x,Qy}, with covariance group
    Gamma_1(QR) intersect Gamma_0(s); s > 1 gives the level-raised
    variant whose columns are chosen prime to s.
    """

    __slots__ = ("weight", "psi", "tau", "s", "_psi_inv", "_pairs")

    def __init__(self, weight: int, psi: DirichletCharacter,
                 tau: DirichletCharacter, s: int = 1):
        if psi.parity() * tau.parity() != (-1) ** weight:
            raise DomainError("need psi*tau(-1) = (-1)^k")
        self.weight = weight
        self.psi = psi
        self.tau = tau
        self.s = s
        self._psi_inv = psi.inverse()
        self._pairs = _character_pairs(psi, tau, s)

    @property
    def modulus(self) -> int:
        return self.psi.modulus * self.tau.modulus

    def value(self, cusp):
        """The functional at a single cusp, as k+1 coordinates."""
        cusp = normalize_cusp(*cusp)
        k, m, s = self.weight, self.modulus, self.s
        p, prec = self.psi.p, min(self.psi.prec, self.tau.prec)
        acc = [PadicNumber.zero(p, prec) for _ in range(k + 1)]
        for x, y, u, v in self._pairs:
            coords = _phi_uv_coords(k, m, s, u, v, cusp)
            if coords is None:
                continue
            c = self._psi_inv(x) * self.tau(y)
            for j in range(k + 1):
                if coords[j]:
                    acc[j] = acc[j] + c * coords[j]
        return tuple(acc)

    def value_vt(self, t: int, cusp):
        """The functional of the t-level-raised image under V_t at a cusp."""
        k = self.weight
        cusp = normalize_cusp(*cusp)
        w = self.value(mat_cusp((t, 0, 0, 1), cusp))
        w = apply_vk(w, (t, 0, 0, 1), k)
        return tuple(x * Fraction(1, t ** (k + 1)) for x in w)

    def restrict(self, pres: SymbolPresentation,
                 eps: DirichletCharacter | None = None) -> ClassicalSymbol:
        """The symbol on degree-zero divisors, presented at pres.level."""
        if pres.level % (self.modulus * self.s):
            raise DomainError("presentation level must be a multiple of M*s")
        if eps is None:
            eps = self.psi * self.tau
        vals = []
        for x in range(len(pres.classes)):
            ca, cb = pres.generator_divisor(x)
            va, vb = self.value(ca), self.value(cb)
            vals.append(tuple(a - b for a, b in zip(va, vb)))
        return ClassicalSymbol(pres, self.weight, eps, tuple(vals))


def boundary_phi(pres: SymbolPresentation, k: int, psi: DirichletCharacter,
                 tau: DirichletCharacter, s: int = 1) -> ClassicalSymbol:
    return BoundarySymbol(k, psi, tau, s).restrict(pres)


def phi_zero_ell(pres: SymbolPresentation, ell: int, p: int,
                 prec: int) -> ClassicalSymbol:
    """The weight-0 exceptional boundary symbol of prime level ell.

    The second character is the non-primitive principal character mod ell,
    so this is the double-sum construction with psi trivial.
    """
    psi = DirichletCharacter.trivial(p, prec, 1)
    tau = DirichletCharacter.trivial(p, prec, ell)
    return BoundarySymbol(0, psi, tau).restrict(pres, eps=psi)


# ------------------------------------------------------------ eigensolve

def _operator_rows(pres, k, eps, terms, pN):
    """Integer matrix rows of a Hecke operator on the value coordinates."""
    ncls = len(pres.classes)
    nv = ncls * (k + 1)
    rows = []
    for x in range(ncls):
        blocks = [[0] * nv for _ in range(k + 1)]
        for coef, a, y, mat in terms[x]:
            e = _eps_scalar(eps, a)
            if not isinstance(e, int):
                e = int(e.lift()) % pN
            rows_vk = vk_matrix(mat, k)
            for j in range(k + 1):
                row = blocks[j]
                base = y * (k + 1)
                for i in range(k + 1):
                    row[base + i] = (row[base + i] + coef * e * rows_vk[j][i]) % pN
        rows.extend(blocks)
    return rows


def _relation_rows(pres, k, eps, pN):
    ncls = len(pres.classes)
    nv = ncls * (k + 1)
    rows = []
    for rel in pres.relations:
        for j in range(k + 1):
            row = [0] * nv
            for y, mat, a in rel:
                e = _eps_scalar(eps, a)
                if not isinstance(e, int):
                    e = int(e.lift()) % pN
                rows_vk = vk_matrix(mat, k)
                base = y * (k + 1)
                for i in range(k + 1):
                    row[base + i] = (row[base + i] + e * rows_vk[j][i]) % pN
            rows.append(row)
    return rows


def classical_eigensymbol(pres: SymbolPresentation, k: int,
                          eps: DirichletCharacter, eigendata: dict,
                          iota_sign: int | None, p: int, prec: int,
                          normalization=((1, 0), (0, 1))):
    """Solve the Manin relations plus a joint eigensystem over Z/p^prec.

    eigendata maps ("T", q) or ("U", q) to an integer eigenvalue; the
    optional iota_sign pins the eigenvalue of the involution.  The kernel
    must contain exactly one generator of maximal order; the symbol is
    scaled so its value on the normalization divisor, paired with the
    constant polynomial, is one.  Returns (symbol, info) where info
    reports the kernel orders and the achieved precision.
    """
    if eps.parity() != (-1) ** k:
        raise DomainError("nebentypus parity must match the weight")
    pN = p ** prec
    ncls = len(pres.classes)
    nv = ncls * (k + 1)
    rows = _relation_rows(pres, k, eps, pN)
    for op, lam in sorted(eigendata.items()):
        kind, q = op
        if kind == "T":
            if gcd(q, pres.level) != 1:
                raise DomainError("T_q needs q prime to the level")
            mats = _tq_mats(q)
            amuls = (1,) * q + (pow(q, -1, pres.level),)
        elif kind == "U":
            if pres.level % q:
                raise DomainError("U_q needs q dividing the level")
            mats = _uq_mats(q)
            amuls = None
        else:
            raise DomainError("unknown eigendata key %r" % (op,))
        op_rows = _operator_rows(pres, k, eps,
                                 pres.coset_terms(mats, amuls=amuls), pN)
        for i, row in enumerate(op_rows):
            row[i] = (row[i] - lam) % pN
        rows.extend(op_rows)
    if iota_sign is not None:
        op_rows = _operator_rows(pres, k, eps,
                                 pres.coset_terms(((1, 0, 0, -1),)), pN)
        for i, row in enumerate(op_rows):
            row[i] = (row[i] - iota_sign) % pN
        rows.extend(op_rows)

    gens = kernel(rows, p, prec)
    if not gens:
        raise DomainError("eigensystem has no solution at this precision")
    orders = sorted((o for _, o in gens), reverse=True)
    top = [v for v, o in gens if o == orders[0]]
    if len(top) != 1:
        raise DomainError(
            "eigenspace is not one-dimensional: kernel orders %r" % orders)
    vec, order = top[0], orders[0]
    scale = p ** (prec - order)
    values = tuple(
        tuple(embed(p, (vec[x * (k + 1) + i] // scale) % p ** order, order)
              for i in range(k + 1))
        for x in range(ncls))
    sym = ClassicalSymbol(pres, k, eps, values)

    c = sym.evaluate(*normalization)[0]
    if c.is_zero():
        raise DomainError("symbol vanishes on the normalization divisor")
    sym = sym.scale(c.inverse())
    info = {
        "kernel_orders": orders,
        "precision": order,
        "secondary_order": orders[1] if len(orders) > 1 else 0,
        "normalization_valuation": c.val,
    }
    return sym, info
