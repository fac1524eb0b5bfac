"""Symbols with truncated-distribution values and their p-adic L-functions.

The classical machinery keeps one value per P^1-class and enforces the
relations numerically.  That is fine for k+1 coordinates per value but too
expensive for M moments per value, so here the relations are solved once
and for all: every class value becomes a word in a handful of free
generators, and all linear algebra happens in free coordinates.

Truncation honesty is graded.  Dropping moments i >= M of an input value
feeds moment j of any matrix action only at valuation >= M - j, so every
equation on output moment j is trusted mod p^(M-j) and no further.  Row j
of each linear system is therefore scaled by p^(N-M+j) before solving mod
p^N, which makes the kernel computation itself record what is honest: junk
generators inside the filtration span {p^(M-j) e_(g,j)} are expected and
harmless, anything else means the eigenspace genuinely is not
one-dimensional at this precision.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd
from zlib import crc32

from .characters import DirichletCharacter
from .dist import TruncDist, act, dirac, theta_k, _action_matrix
from .linalg import _leading, _vp, howell_form, kernel, solve
from .modsym import (
    MAT_I,
    ClassicalSymbol,
    SymbolPresentation,
    _character_pairs,
    _eps_scalar,
    _phi_uv_point,
    _tq_mats,
    _uq_mats,
    build_presentation,
    mat_cusp,
    mat_inv,
    mat_mul,
    normalize_cusp,
    unimodular_path,
)
from .padic import (
    DomainError,
    PadicError,
    PadicNumber,
    agreement_valuation,
    embed,
    pval,
)

__all__ = [
    "OCSymbol",
    "SolvedPresentation",
    "apply_up",
    "boundary_oc_symbol",
    "covariance_residual",
    "critical_eigensymbol",
    "hecke_oc",
    "lift_classical",
    "mellin_localized",
    "mellin_lp",
    "ordinary_eigenlift",
    "presentation_fingerprint",
    "relation_residuals",
    "rho_symbol",
    "solved_presentation",
    "theta_symbol",
    "up_decomposition_residual",
]


# ------------------------------------------------------ solved presentation

def _eliminate(pres: SymbolPresentation):
    """Worklist elimination of the two- and three-term relations.

    A relation with exactly one unexpressed class, appearing in it once,
    expresses that class through the others; relations where the class
    hits itself (the torsion ones) are left alone.  When the worklist
    stalls the first unexpressed class is promoted to a free generator.
    """
    n = len(pres.classes)
    lv = pres.level
    exprs: list = [None] * n
    consumed = [False] * len(pres.relations)
    free: list = []

    def compose(rel, skip, m0inv, a0inv):
        terms: dict = {}
        for idx, (y, mat, a) in enumerate(rel):
            if idx == skip:
                continue
            shift = mat_mul(mat, m0inv)
            for coef, aa, slot, mm in exprs[y]:
                m2 = shift if mm == MAT_I else mat_mul(mm, shift)
                key = ((a * aa * a0inv) % lv, slot, m2)
                terms[key] = terms.get(key, 0) - coef
        return tuple((c, a, slot, m)
                     for (a, slot, m), c in terms.items() if c)

    while True:
        progress = True
        while progress:
            progress = False
            for ridx, rel in enumerate(pres.relations):
                if consumed[ridx]:
                    continue
                unk = [i for i, t in enumerate(rel) if exprs[t[0]] is None]
                if len(unk) != 1:
                    continue
                y0, m0, a0 = rel[unk[0]]
                if sum(1 for t in rel if t[0] == y0) != 1:
                    continue
                consumed[ridx] = True
                a0inv = pow(a0, -1, lv) if lv > 1 else 0
                exprs[y0] = compose(rel, unk[0], mat_inv(m0), a0inv)
                progress = True
        if all(e is not None for e in exprs):
            break
        x = exprs.index(None)
        exprs[x] = ((1, 1 % lv, len(free), MAT_I),)
        free.append(x)
    leftover = tuple(rel for ridx, rel in enumerate(pres.relations)
                     if not consumed[ridx])
    return tuple(free), tuple(exprs), leftover


class SolvedPresentation:
    """A presentation with every class value expressed in free generators.

    exprs[x] is a tuple of (coef, a, slot, mat) meaning
    v_x = sum coef * eps(a) * (v_free[slot] | mat); the expressions are
    consequences of the relations alone, so they are valid in any
    coefficient module with the right action and for any nebentypus.
    Relations not used up by the elimination survive in leftover; a vector
    of free values is an actual symbol exactly when those still vanish.
    """

    __slots__ = ("base", "free", "exprs", "leftover")

    def __init__(self, base: SymbolPresentation):
        self.base = base
        self.free, self.exprs, self.leftover = _eliminate(base)

    def __repr__(self):
        return "SolvedPresentation(level=%d, free=%d, leftover=%d)" % (
            self.base.level, len(self.free), len(self.leftover))


_SOLVED: dict = {}


def solved_presentation(pres: SymbolPresentation) -> SolvedPresentation:
    sp = _SOLVED.get(pres.level)
    if sp is None:
        sp = SolvedPresentation(pres)
        _SOLVED[pres.level] = sp
    return sp


def presentation_fingerprint(pres: SymbolPresentation) -> str:
    return "%d.%d.%08x" % (pres.level, len(pres.classes),
                           crc32(repr(pres.classes).encode()))


def _expand_terms(spres: SolvedPresentation, terms):
    """Rewrite class-level terms (coef, a, y, mat) over the free slots.

    Coefficients on identical (a, slot, mat) triples are merged, which
    keeps the term count linear in practice."""
    lv = spres.base.level
    acc: dict = {}
    for coef, a, y, mat in terms:
        for c2, aa, slot, mm in spres.exprs[y]:
            m2 = mat if mm == MAT_I else mat_mul(mm, mat)
            key = ((a * aa) % lv, slot, m2)
            acc[key] = acc.get(key, 0) + coef * c2
    return tuple((c, a, slot, m) for (a, slot, m), c in acc.items() if c)


# ---------------------------------------------------------- integer rows

def _int_scalar(eps: DirichletCharacter, a: int, pN: int) -> int:
    e = _eps_scalar(eps, a)
    if isinstance(e, int):
        return e % pN
    return int(e.lift()) % pN


@lru_cache(maxsize=None)
def _int_action_matrix(mat, w, size, p, N):
    """The weight-w action matrix reduced mod p^N.

    Denominators are powers of the upper-left entry, a p-unit for every
    matrix the symbol algebra produces, so the reduction is exact."""
    pN = p ** N
    out = []
    for row in _action_matrix(mat, w, size):
        r = []
        for x in row:
            num = x.numerator % pN
            if x.denominator != 1:
                num = num * pow(x.denominator % pN, -1, pN) % pN
            r.append(num)
        out.append(tuple(r))
    return tuple(out)


def _term_row_blocks(spres, w, eps, terms, M, p, N):
    """M rows (one per output moment) of sum coef*eps(a)*(value_slot|mat)."""
    pN = p ** N
    nv = len(spres.free) * M
    blocks = [[0] * nv for _ in range(M)]
    for coef, a, slot, mat in terms:
        c = coef * _int_scalar(eps, a, pN) % pN
        if not c:
            continue
        amat = _int_action_matrix(mat, w, M, p, N)
        base = slot * M
        for j in range(M):
            row, arow = blocks[j], amat[j]
            for i in range(M):
                if arow[i]:
                    row[base + i] = (row[base + i] + c * arow[i]) % pN
    return blocks


def _graded(blocks, p, M, N):
    """Scale row j by p^(N-M+j): output moment j is honest mod p^(M-j)."""
    pN = p ** N
    out = []
    for j, row in enumerate(blocks):
        s = p ** (N - M + j)
        out.append([x * s % pN for x in row] if s > 1 else row)
    return out


def _relation_terms(rel):
    return tuple((1, a, y, mat) for (y, mat, a) in rel)


def _operator_data(pres, op, p):
    """Coset matrices and unit multipliers of a Hecke operator."""
    kind = op[0]
    if kind == "T":
        q = op[1]
        if gcd(q, pres.level) != 1:
            raise DomainError("T_q needs q prime to the level")
        # the (q, 0; 0, 1) coset re-enters the double coset through a group
        # element with upper-left q^-1 mod the level
        return _tq_mats(q), (1,) * q + (pow(q, -1, pres.level),)
    if kind == "U":
        q = op[1]
        if pres.level % q:
            raise DomainError("U_q needs q dividing the level")
        return _uq_mats(q), None
    if kind == "iota":
        return ((1, 0, 0, -1),), None
    raise DomainError("unknown operator %r" % (op,))


# -------------------------------------------------------------- the symbol

class OCSymbol:
    """Overconvergent symbol: distribution values on the free generators.

    weight is the distribution weight (k >= 0 on the classical side, -2-k
    on the theta side).  Values at arbitrary classes come from the solved
    presentation's expressions, values at cusp divisors from unimodular
    paths.  Each moment's PadicNumber prec is the honest claim about it;
    loss counts digits the linear algebra spent building the symbol.
    """

    __slots__ = ("solved", "weight", "eps", "values", "loss", "_cache")

    def __init__(self, solved: SolvedPresentation, weight: int,
                 eps: DirichletCharacter, values, loss: int = 0):
        values = tuple(values)
        if len(values) != len(solved.free):
            raise DomainError("one value per free generator required")
        size = values[0].size
        for v in values:
            if not isinstance(v, TruncDist):
                raise DomainError("values must be distributions")
            if v.weight != weight or v.size != size or v.p != values[0].p:
                raise DomainError("values must share weight, size and prime")
        self.solved = solved
        self.weight = weight
        self.eps = eps
        self.values = values
        self.loss = loss
        self._cache: dict = {}

    @property
    def presentation(self) -> SymbolPresentation:
        return self.solved.base

    @property
    def p(self) -> int:
        return self.values[0].p

    @property
    def size(self) -> int:
        return self.values[0].size

    @property
    def prec(self) -> int:
        return min(v.prec for v in self.values)

    # ------------------------------------------------------------- algebra

    def scale(self, c) -> "OCSymbol":
        return OCSymbol(self.solved, self.weight, self.eps,
                        (v.scale(c) for v in self.values), self.loss)

    def _compatible(self, other):
        if (not isinstance(other, OCSymbol)
                or other.solved.base.level != self.solved.base.level
                or other.weight != self.weight):
            raise DomainError("incompatible symbols")

    def __add__(self, other):
        self._compatible(other)
        return OCSymbol(self.solved, self.weight, self.eps,
                        (a + b for a, b in zip(self.values, other.values)),
                        max(self.loss, other.loss))

    def __sub__(self, other):
        self._compatible(other)
        return OCSymbol(self.solved, self.weight, self.eps,
                        (a - b for a, b in zip(self.values, other.values)),
                        max(self.loss, other.loss))

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, OCSymbol):
            return NotImplemented
        self._compatible(other)
        return all(a == b for a, b in zip(self.values, other.values))

    __hash__ = None

    # ---------------------------------------------------------- evaluation

    def class_value(self, x: int) -> TruncDist:
        """The value on the divisor of class x, expanded from free values."""
        got = self._cache.get(x)
        if got is not None:
            return got
        acc = None
        for coef, a, slot, mat in self.solved.exprs[x]:
            mu = self.values[slot] if mat == MAT_I else act(mat, self.values[slot])
            e = _eps_scalar(self.eps, a)
            c = coef * e if isinstance(e, int) else e * coef
            term = mu if isinstance(c, int) and c == 1 else mu.scale(c)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = TruncDist.zero(self.p, self.weight, self.size, self.prec)
        self._cache[x] = acc
        return acc

    def _to_infinity(self, cusp) -> TruncDist:
        acc = None
        for h in unimodular_path(cusp):
            y, delta = self.solved.base.decompose(h)
            mu = act(mat_inv(delta), self.class_value(y))
            e = _eps_scalar(self.eps, delta[0])
            term = mu if isinstance(e, int) and e == 1 else mu.scale(e)
            acc = -term if acc is None else acc - term
        if acc is None:
            return TruncDist.zero(self.p, self.weight, self.size, self.prec)
        return acc

    def evaluate(self, a, b) -> TruncDist:
        """Phi({a} - {b}) for cusps given as integer pairs."""
        va = self._to_infinity(normalize_cusp(*a))
        vb = self._to_infinity(normalize_cusp(*b))
        return va - vb

    # ------------------------------------------------------- serialization

    def to_json(self) -> dict:
        return {
            "level": self.solved.base.level,
            "fingerprint": presentation_fingerprint(self.solved.base),
            "weight": self.weight,
            "loss": self.loss,
            "eps": self.eps.to_json(),
            "eps_prec": self.eps.prec,
            "values": [v.to_json() for v in self.values],
        }

    @classmethod
    def from_json(cls, data: dict,
                  pres: SymbolPresentation | None = None) -> "OCSymbol":
        if pres is None:
            pres = build_presentation(data["level"])
        if presentation_fingerprint(pres) != data["fingerprint"]:
            raise DomainError("presentation does not match the checkpoint")
        values = [TruncDist.from_json(v) for v in data["values"]]
        p = values[0].p
        eps = DirichletCharacter.from_json(p, data["eps_prec"], data["eps"])
        return cls(solved_presentation(pres), data["weight"], eps, values,
                   data["loss"])

    def __repr__(self):
        return "OCSymbol(level=%d, weight=%d, size=%d, free=%d)" % (
            self.solved.base.level, self.weight, self.size, len(self.values))


# ----------------------------------------------------- residual diagnostics

def relation_residuals(sym: OCSymbol) -> list:
    """The leftover relation sums evaluated on the symbol.

    All of them vanish (within the carried trust) iff the free values
    actually assemble to a symbol."""
    out = []
    for rel in sym.solved.leftover:
        acc = None
        for y, mat, a in rel:
            mu = sym.class_value(y)
            if mat != MAT_I:
                mu = act(mat, mu)
            e = _eps_scalar(sym.eps, a)
            term = mu if isinstance(e, int) and e == 1 else mu.scale(e)
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


def covariance_residual(sym: OCSymbol, gamma, ca, cb) -> TruncDist:
    """act(gamma, Phi({gamma a} - {gamma b})) - eps(gamma) Phi({a} - {b})."""
    ca, cb = normalize_cusp(*ca), normalize_cusp(*cb)
    lhs = act(gamma, sym.evaluate(mat_cusp(gamma, ca), mat_cusp(gamma, cb)))
    e = _eps_scalar(sym.eps, gamma[0])
    return lhs - sym.evaluate(ca, cb).scale(e)


def up_decomposition_residual(sym: OCSymbol,
                              up_sym: "OCSymbol | None" = None) -> TruncDist:
    """(Phi|U_p)({oo} - {0}) minus its decomposition over the p discs.

    The operator route and the direct sum over paths {oo} - {a/p} acted by
    (1, a; 0, p) must agree for any symbol; this cross-checks every sign
    convention in the coset machinery at distribution level.
    """
    if up_sym is None:
        up_sym = hecke_oc(sym, ("U", sym.p))
    p = sym.p
    lhs = up_sym.evaluate((1, 0), (0, 1))
    rhs = None
    for a in range(p):
        term = act((1, a, 0, p), sym.evaluate((1, 0), (a, p)))
        rhs = term if rhs is None else rhs + term
    return lhs - rhs


# ------------------------------------------------------------------- Hecke

def hecke_oc(sym: OCSymbol, op, target: SymbolPresentation | None = None,
             ) -> OCSymbol:
    """Apply ("T", q), ("U", q), ("iota",), ("diamond", a) or ("V", t)."""
    spres = sym.solved
    base = spres.base
    kind = op[0]
    if kind == "diamond":
        return sym.scale(_eps_scalar(sym.eps, op[1]))
    post = None
    if kind == "V":
        t = op[1]
        if target is None or target.level != base.level * t:
            raise DomainError("V_t needs a target presentation of level "
                              "level*t")
        if t % sym.p == 0:
            raise DomainError("V_t needs t prime to p")
        mats, amuls = ((t, 0, 0, 1),), None
        dst = solved_presentation(target)
        terms_all = target.coset_terms(mats, src=base, amuls=amuls)
        post = Fraction(t) ** (-(sym.weight + 1))
    else:
        mats, amuls = _operator_data(base, op, sym.p)
        dst = spres
        terms_all = base.coset_terms(mats, amuls=amuls)
    acted: dict = {}
    out = []
    for g in dst.free:
        acc = None
        for coef, a, slot, mat in _expand_terms(spres, terms_all[g]):
            key = (slot, mat)
            mu = acted.get(key)
            if mu is None:
                mu = sym.values[slot] if mat == MAT_I else act(mat, sym.values[slot])
                acted[key] = mu
            e = _eps_scalar(sym.eps, a)
            c = coef * e if isinstance(e, int) else e * coef
            term = mu if isinstance(c, int) and c == 1 else mu.scale(c)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = TruncDist.zero(sym.p, sym.weight, sym.size, sym.prec)
        if post is not None:
            acc = acc.scale(post)
        out.append(acc)
    return OCSymbol(dst, sym.weight, sym.eps, out, sym.loss)


def apply_up(sym: OCSymbol, check: bool = False) -> OCSymbol:
    """Phi | U_p.  With check=True the disc decomposition is verified."""
    out = hecke_oc(sym, ("U", sym.p))
    if check:
        res = up_decomposition_residual(sym, out)
        if not res.is_zero():
            raise PadicError("U_p disc decomposition mismatch")
    return out


# ------------------------------------------------------------------- lifts

def _clear_denominators(phi: ClassicalSymbol) -> int:
    worst = 0
    for v in phi.values:
        for x in v:
            if not x.is_zero():
                worst = min(worst, x.val)
    return -worst


def lift_classical(phi: ClassicalSymbol, M: int, N: int) -> OCSymbol:
    """Some overconvergent lift of a classical symbol, moments up to M.

    The first k+1 moments on the free generators are phi's values, so
    rho_k of the result is phi on the nose (low moments of an action only
    see low moments).  The higher moments are solved from the leftover
    relations; any solution is a lift, the particular one is unspecified.

    When p divides the order of a stabilizer (p = 3 with three-torsion in
    the level, say) no integral lift need exist; the solve is then retried
    against p^c times the right side and the result carries denominators
    of valuation -c.  loss counts the denominator digits, input ones
    included; the per-moment precision fields already account for them.
    """
    k, p = phi.weight, phi.p
    pres = phi.presentation
    if M < k + 2:
        raise DomainError("need M >= k + 2 to lift weight %d" % k)
    if N < M:
        raise DomainError("need N >= M")
    if pres.level % p or (pres.level // p) % p == 0:
        raise DomainError("level must be divisible by p exactly once")
    spres = solved_presentation(pres)
    eps = phi.eps if phi.eps.prec >= N else phi.eps.with_prec(N)
    d = _clear_denominators(phi)
    if phi.prec + d < N:
        raise DomainError(
            "classical input carries %d digits, need %d; re-solve it at "
            "higher precision" % (phi.prec, N - d))
    pN = p ** N
    pd = p ** d
    F = len(spres.free)

    known = []
    for slot in range(F):
        vals = phi.values[spres.free[slot]]
        known.append([int((x * pd).lift()) % pN for x in vals])

    def is_unknown(col):
        return col % M > k

    unknowns = [(g, j) for g in range(F) for j in range(k + 1, M)]
    colmap = {(g, j): i for i, (g, j) in enumerate(unknowns)}
    rows, rhs = [], []
    for rel in spres.leftover:
        terms = _expand_terms(spres, _relation_terms(rel))
        blocks = _graded(_term_row_blocks(spres, k, eps, terms, M, p, N),
                         p, M, N)
        for j, row in enumerate(blocks):
            urow = [0] * len(unknowns)
            b = 0
            for col, c in enumerate(row):
                if not c:
                    continue
                g, i = divmod(col, M)
                if i > k:
                    urow[colmap[(g, i)]] = c
                else:
                    b = (b - c * known[g][i]) % pN
            if any(urow):
                rows.append(urow)
                rhs.append(b)
            elif b:
                raise DomainError(
                    "classical symbol fails the relations at this precision")
    x, c = None, 0
    if not rows:
        x = [0] * len(unknowns)
    while x is None and c < 4:
        x, _ = solve(rows, [b * p ** c % pN for b in rhs], p, N)
        if x is None:
            c += 1
    if x is None:
        raise DomainError("no overconvergent lift at this precision")

    pc = p ** c
    values = []
    for g in range(F):
        ms = []
        for j in range(M):
            if j <= k:
                ms.append(embed(p, known[g][j] * pc % pN,
                                min(N, phi.prec + d + c)))
            else:
                ms.append(embed(p, x[colmap[(g, j)]], M - j))
        values.append(TruncDist(p, k, N, ms))
    sym = OCSymbol(spres, k, eps, values, loss=d + c)
    if d + c:
        sym = sym.scale(Fraction(1, p ** (d + c)))
    for res in relation_residuals(sym):
        if not res.is_zero():
            raise PadicError("lift residual check failed")
    return sym


def ordinary_eigenlift(phi: ClassicalSymbol, alpha, M: int, N: int,
                       iterations: int | None = None):
    """The unique eigenlift of an ordinary U_p-eigensymbol.

    Iterates Phi -> (1/alpha) Phi|U_p from an arbitrary lift; the operator
    contracts the kernel of rho_k, so the iterates stabilize at the carried
    trust.  Returns (symbol, info) with the agreement history.
    """
    p = phi.p
    aval = pval(alpha, p) if isinstance(alpha, int) else alpha.val
    if aval != 0:
        raise DomainError("ordinary lift needs a unit U_p eigenvalue")
    inv = Fraction(1, alpha) if isinstance(alpha, int) else alpha.inverse()
    sym = lift_classical(phi, M, N)
    budget = iterations if iterations is not None else N + 4
    history = []
    for it in range(budget):
        nxt = apply_up(sym, check=(it == 0)).scale(inv)
        stable = all(a == b for a, b in zip(sym.values, nxt.values))
        history.append(_symbol_agreement(sym, nxt))
        sym = nxt
        if stable:
            return sym, {"iterations": it + 1, "agreement": history}
    raise PadicError("U_p iteration did not stabilize in %d steps" % budget)


def _symbol_agreement(s1: OCSymbol, s2: OCSymbol) -> int:
    return min(agreement_valuation(a, b)
               for v1, v2 in zip(s1.values, s2.values)
               for a, b in zip(v1.moments, v2.moments))


# -------------------------------------------------------- the eigensymbol

def _span_exponent(vectors, p, N) -> int:
    """log_p of the size of the module the vectors span in (Z/p^N)^n."""
    total = 0
    for row in howell_form(vectors, p, N):
        total += N - _vp(row[_leading(row)], p, N)
    return total


def _det_exponents(k: int, M: int):
    """How many digits of moment j the slope-(k+1) eigensystem can pin.

    Moments j <= k are the classical sector.  Above the weight the binding
    equation is the U_p row, and dividing by the eigenvalue beta costs
    val(beta) = k+1 digits against the data trust M-j.
    """
    return tuple(M - j if j <= k else max(0, M - j - k - 1)
                 for j in range(M))


def _quotient_order(vec, exps, p, M, N, F) -> int:
    """Order exponent of the vector's image modulo the filtration p^exps."""
    pN = p ** N
    m = 0
    for g in range(F):
        for j in range(M):
            x = vec[g * M + j] % pN
            if x:
                m = max(m, exps[j] - _vp(x, p, N))
    return max(m, 0)


def critical_eigensymbol(pres: SymbolPresentation, k: int,
                         eps: DirichletCharacter, eigendata: dict,
                         iota_sign: int, p: int, M: int, N: int,
                         normalization=((1, 0), (0, 1))):
    """Solve for the slope-(k+1) eigensymbol with M moments mod p^N.

    eigendata maps ("T", q) / ("U", q) to integer eigenvalues and must pin
    the eigensystem down to one dimension; the U_p entry must have
    valuation exactly k+1.  The kernel of the graded system is classified
    modulo the determination filtration of _det_exponents: data trust
    p^(M-j) at the classical moments, k+1 digits less above the weight,
    where dividing the U_p row by beta is what pins a moment.  Every
    vector of that filtration is structurally in the kernel; the symbol is
    accepted only when the kernel image modulo the filtration is cyclic,
    which is decided by comparing Howell span sizes.  Returns
    (symbol, info); the symbol is scaled so moment zero of its value on
    the normalization divisor is one.
    """
    if eps.parity() != (-1) ** k:
        raise DomainError("nebentypus parity must match the weight")
    if pres.level % p or (pres.level // p) % p == 0:
        raise DomainError("level must be divisible by p exactly once")
    if M < k + 2:
        raise DomainError("need M >= k + 2")
    if N < M:
        raise DomainError("need N >= M")
    beta = eigendata.get(("U", p))
    if beta is None:
        raise DomainError("eigendata must include the U_p eigenvalue")
    for lam in eigendata.values():
        if not isinstance(lam, int):
            raise DomainError("integer eigenvalue data required")
    if pval(beta, p) != k + 1:
        raise DomainError("critical slope means val_p(U_p eigenvalue) = k+1")
    if eps.prec < N:
        eps = eps.with_prec(N)
    spres = solved_presentation(pres)
    pN = p ** N
    F = len(spres.free)

    rows = []
    for rel in spres.leftover:
        terms = _expand_terms(spres, _relation_terms(rel))
        rows.extend(_graded(
            _term_row_blocks(spres, k, eps, terms, M, p, N), p, M, N))
    ops = sorted(eigendata.items()) + [(("iota",), iota_sign)]
    for op, lam in ops:
        mats, amuls = _operator_data(pres, op, p)
        terms_all = pres.coset_terms(mats, amuls=amuls)
        for slot, g in enumerate(spres.free):
            terms = _expand_terms(spres, terms_all[g])
            blocks = _term_row_blocks(spres, k, eps, terms, M, p, N)
            for j in range(M):
                col = slot * M + j
                blocks[j][col] = (blocks[j][col] - lam) % pN
            rows.extend(_graded(blocks, p, M, N))

    gens = kernel(rows, p, N)
    orders = sorted((o for _, o in gens), reverse=True)
    nv = F * M
    exps = _det_exponents(k, M)
    fil = []
    for col in range(nv):
        v = [0] * nv
        v[col] = p ** exps[col % M]
        fil.append(v)
    kvecs = [v for v, _ in gens]
    s_fil = _span_exponent(fil, p, N)
    s_all = _span_exponent(kvecs + fil, p, N)
    s_sub = _span_exponent([[x * p % pN for x in v] for v in kvecs] + fil,
                           p, N)
    m = s_all - s_fil
    ngen = s_all - s_sub
    if m == 0:
        raise DomainError(
            "no eigensymbol outside the filtration; kernel orders %r"
            % (orders,))
    if ngen > 1:
        raise DomainError(
            "eigenspace is not one-dimensional mod the filtration "
            "(%d generators); add auxiliary T_q eigenvalues" % ngen)
    vec = None
    for v, _ in gens:
        if _quotient_order(v, exps, p, M, N, F) == m:
            vec = v
            break
    if vec is None:
        raise PadicError("cyclic kernel quotient has no generator")

    values = []
    for g in range(F):
        ms = []
        for j in range(M):
            e = exps[j]
            ms.append(embed(p, vec[g * M + j] % p ** e if e else 0, e))
        values.append(TruncDist(p, k, M, ms))
    sym = OCSymbol(spres, k, eps, values, loss=N - m)
    info = {
        "kernel_orders": orders,
        "precision": m,
        "quotient_generators": ngen,
    }
    if normalization is not None:
        c = sym.evaluate(*normalization).moment(0)
        if c.is_zero():
            raise DomainError("symbol vanishes on the normalization divisor")
        sym = sym.scale(c.inverse())
        info["normalization_valuation"] = c.val
    return sym, info


# -------------------------------------------------------- boundary symbols

def boundary_oc_symbol(w: int, psi: DirichletCharacter,
                       tau: DirichletCharacter, pres: SymbolPresentation,
                       p: int, M: int, N: int, t: int = 1) -> OCSymbol:
    """The Eisenstein boundary symbol with distribution values, times V_t.

    Values are double character sums of point evaluations: at a cusp in
    the orbit of the column (u, v) the elementary symbol is
    (e*sd)^w * dirac(r/sd) at the realized point.  Columns are chosen
    prime to p, which forces every realized denominator to be a p-unit,
    so the values are distributions on Z_p and the symbol vanishes at all
    cusps with p in the denominator.  Weight w may be any integer;
    negative weights are the theta inputs.
    """
    if w == -1:
        raise DomainError("weight -1 boundary symbols are not defined")
    if psi.parity() * tau.parity() != (-1 if w % 2 else 1):
        raise DomainError("need psi*tau(-1) = (-1)^w")
    q, r = psi.modulus, tau.modulus
    lv = pres.level
    if lv % p or (lv // p) % p == 0:
        raise DomainError("level must be divisible by p exactly once")
    if lv % (q * r * t * p) or gcd(q * r * t, p) != 1:
        raise DomainError("level must be a multiple of Q*R*t*p, all prime "
                          "to p")
    if psi.prec < N:
        psi = psi.with_prec(N)
    if tau.prec < N:
        tau = tau.with_prec(N)
    spres = solved_presentation(pres)
    psi_inv = psi.inverse()
    pairs = _character_pairs(psi, tau, p)
    period = q * r

    def cusp_value(cusp):
        target = cusp
        if t > 1:
            target = normalize_cusp(*mat_cusp((t, 0, 0, 1), cusp))
        acc = None
        for x, y, u, v in pairs:
            hit = _phi_uv_point(period, p, u, v, target)
            if hit is None:
                continue
            signs, rr, ss = hit
            if len(signs) == 2 and w % 2:
                raise DomainError(
                    "ill-defined boundary value (M = %d, odd weight)"
                    % period)
            e = signs[0]
            coef = psi_inv(x) * tau(y) * (Fraction(e * ss) ** w)
            term = dirac(p, Fraction(rr, ss), M, N, weight=w).scale(coef)
            acc = term if acc is None else acc + term
        if acc is None:
            acc = TruncDist.zero(p, w, M, N)
        if t > 1:
            acc = act((t, 0, 0, 1), acc).scale(Fraction(t) ** (-(w + 1)))
        return acc

    values = []
    for g in spres.free:
        c0, cinf = pres.generator_divisor(g)
        values.append(cusp_value(c0) - cusp_value(cinf))
    sym = OCSymbol(spres, w, psi * tau, values)
    for res in relation_residuals(sym):
        if not res.is_zero():
            raise PadicError("boundary values fail the symbol relations")
    return sym


def theta_symbol(sym: OCSymbol) -> OCSymbol:
    """The (k+1)-fold derivative, weight -2-k into weight k = -2 - w."""
    k = -2 - sym.weight
    if k < 0:
        raise DomainError("theta needs weight <= -2")
    return OCSymbol(sym.solved, k, sym.eps,
                    (theta_k(v, k) for v in sym.values), sym.loss)


def rho_symbol(sym: OCSymbol) -> ClassicalSymbol:
    """Truncate to the polynomial pairing: the classical symbol under rho_k."""
    k = sym.weight
    if k < 0:
        raise DomainError("rho needs weight >= 0")
    if sym.size < k + 1:
        raise DomainError("need at least %d moments" % (k + 1))
    base = sym.solved.base
    vals = tuple(sym.class_value(x).moments[:k + 1]
                 for x in range(len(base.classes)))
    return ClassicalSymbol(base, k, sym.eps, vals)


# ------------------------------------------------------------------ Mellin

def _vp_factorial(m: int, p: int) -> int:
    s, n = 0, m
    while n:
        s += n % p
        n //= p
    return (m - s) // (p - 1)


def _series_tail_trust(p: int, size: int, depth: int) -> int:
    """Valuation floor of the dropped tail, terms m >= size.

    Term m carries (p^depth)^m / m!; the floor is eventually increasing in
    m, so a short scan finds it."""
    return min(depth * m - _vp_factorial(m, p)
               for m in range(size, size + 4 * p + 4))


def _binom_series(sigma, mmax: int):
    """binom(s, m) for m < mmax, s the <z>-exponent of sigma."""
    if sigma.s_exact is not None:
        out, acc = [], Fraction(1)
        for m in range(mmax):
            if m:
                acc *= Fraction(sigma.s_exact - (m - 1), m)
            out.append(acc)
        return out
    out, acc = [], embed(sigma.p, 1, sigma.prec)
    for m in range(mmax):
        if m:
            acc = (acc * (sigma.s - (m - 1))) * Fraction(1, m)
        out.append(acc)
    return out


def mellin_localized(measures: dict, sigma, beta, depth: int) -> PadicNumber:
    """Integrate sigma over Z_p^x against unit-disc data.

    measures maps a unit a mod p^depth to mu_a, whose image under
    (1, a; 0, p^depth) is the target measure restricted to the disc
    -a + p^depth Z_p.  On that disc sigma(p^depth z - a) expands through
    sigma(-a) (1 + u)^s with u = -p^depth z / a, giving

        beta^-depth sum_a sigma(-a) sum_m C(s,m) (-p^depth/a)^m m_m(mu_a).

    The dropped tail of each binomial series is accounted by a hard
    precision cap before the beta division.
    """
    p = sigma.p
    pd = p ** depth
    if (beta == 0) if isinstance(beta, int) else beta.is_zero():
        raise DomainError("U_p eigenvalue must be nonzero")
    if not measures:
        raise DomainError("no discs supplied")
    sizes = {mu.size for mu in measures.values()}
    if len(sizes) != 1:
        raise DomainError("disc data must share one moment count")
    size = sizes.pop()
    binoms = _binom_series(sigma, size)
    total = None
    for a in sorted(measures):
        if a % p == 0 or not 0 < a < pd:
            raise DomainError("disc labels must be units mod p^depth")
        mu = measures[a]
        x = Fraction(-pd, a)
        pw = Fraction(1)
        acc = None
        for m in range(size):
            term = (mu.moment(m) * pw) * binoms[m]
            acc = term if acc is None else acc + term
            pw *= x
        acc = acc * sigma.evaluate(-a)
        total = acc if total is None else total + acc
    tail = _series_tail_trust(p, size, depth)
    if total.prec > tail:
        total = total.with_prec(tail)
    if isinstance(beta, int):
        return total * Fraction(1, beta ** depth)
    return total * beta.inverse() ** depth


def mellin_lp(sym: OCSymbol, sigma, beta,
              depth: int | None = None) -> PadicNumber:
    """The p-adic L-value <sigma, Phi restricted to Z_p^x>.

    beta is the U_p eigenvalue of the symbol.  The measure is localized
    onto the unit discs via beta^depth Phi({oo}-{0}) = sum of the disc
    pieces Phi({oo}-{a/p^depth}); depth None evaluates at depth 1 and 2
    and keeps whichever is more precise.
    """
    if sigma.p != sym.p:
        raise DomainError("prime mismatch")
    if depth is None:
        r1 = mellin_lp(sym, sigma, beta, 1)
        r2 = mellin_lp(sym, sigma, beta, 2)
        return r2 if r2.prec > r1.prec else r1
    if depth < 1:
        raise DomainError("depth must be at least 1")
    p = sym.p
    pd = p ** depth
    measures = {a: sym.evaluate((1, 0), (a, pd))
                for a in range(1, pd) if a % p}
    return mellin_localized(measures, sigma, beta, depth)
