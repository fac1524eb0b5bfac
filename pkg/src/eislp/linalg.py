"""Linear algebra over Z/p^N: Howell form, kernels, affine solves.

Z/p^N is a chain ring, so matrices have a canonical Howell form: an echelon
basis of the row module that is additionally closed under multiplication by
p.  The closure is what makes kernel and solvability questions exact here;
plain Gaussian elimination over Z/p^N misses kernel vectors whose pivots sit
at positive valuation.

Everything below works on plain Python ints reduced mod p^N.  Callers keep
the p-adic interpretation; this module never imports the PadicNumber type.
"""

from __future__ import annotations


def _vp(x: int, p: int, cap: int) -> int:
    # valuation of x != 0 mod p^cap, capped
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


def _leading(row: list) -> int | None:
    for j, x in enumerate(row):
        if x:
            return j
    return None


def howell_form(rows: list, p: int, N: int) -> list:
    """The canonical Howell form of the row module spanned by rows mod p^N.

    Rows come back sorted by pivot column; each pivot entry is exactly a
    power of p and the entries above a pivot are reduced modulo that power.
    """
    mod = p**N
    if not rows:
        return []
    ncols = len(rows[0])
    basis: list = [None] * ncols
    stack = [[x % mod for x in r] for r in rows]

    def install(r, j, v):
        u = r[j] // p**v
        inv = pow(u, -1, mod)
        r = [(x * inv) % mod for x in r]
        basis[j] = r
        if v > 0:
            # closure: p^(N-v) * r leads strictly further right
            t = p ** (N - v)
            extra = [(x * t) % mod for x in r]
            stack.append(extra)

    while stack:
        r = stack.pop()
        while True:
            j = _leading(r)
            if j is None:
                break
            v = _vp(r[j], p, N)
            b = basis[j]
            if b is None:
                install(r, j, v)
                break
            vb = _vp(b[j], p, N)
            if v < vb:
                basis[j] = None
                install(r, j, v)
                r = b
                continue
            c = r[j] // p**vb
            r = [(x - c * y) % mod for x, y in zip(r, b)]

    out = [basis[j] for j in range(ncols) if basis[j] is not None]
    # reduce entries above each pivot (mod the pivot's power of p) so the
    # form is canonical; pivot columns are visited left to right
    pivcols = [(_leading(r), k) for k, r in enumerate(out)]
    for i in range(len(out)):
        row = out[i]
        lead = _leading(row)
        for j2, k in pivcols:
            if k == i or j2 <= lead or row[j2] == 0:
                continue
            prow = out[k]
            e2 = _vp(prow[j2], p, N)
            c = row[j2] // p**e2
            if c:
                row = [(x - c * y) % mod for x, y in zip(row, prow)]
        out[i] = row
    return out


def _augmented_howell(rows: list, p: int, N: int):
    # rows of [A^T | I]: the row span is exactly the set of pairs (A x, x)
    mod = p**N
    m = len(rows)
    n = len(rows[0]) if m else 0
    aug = []
    for i in range(n):
        left = [rows[r][i] % mod for r in range(m)]
        right = [1 if c == i else 0 for c in range(n)]
        aug.append(left + right)
    return howell_form(aug, p, N), m, n


def kernel(rows: list, p: int, N: int) -> list:
    """Generators of {x : A x = 0 mod p^N} for the matrix A given by rows.

    Returns a list of (vector, order_exponent) pairs: the vectors form a
    Howell basis of the kernel module and p^order_exponent * v = 0 mod p^N.
    """
    H, m, n = _augmented_howell(rows, p, N)
    gens = []
    for h in H:
        if any(h[:m]):
            continue
        v = h[m:]
        o = N - min(_vp(x, p, N) for x in v if x)
        gens.append((v, o))
    return gens


def solve(rows: list, b: list, p: int, N: int):
    """A particular solution of A x = b mod p^N, or None.

    Returns (x, max_pivot_valuation); the second component is how many
    digits of determinacy the worst division cost.  The full solution set is
    x + kernel(A).
    """
    mod = p**N
    H, m, n = _augmented_howell(rows, p, N)
    r = [x % mod for x in b]
    x = [0] * n
    for h in H:
        j = _leading(h)
        if j is None or j >= m:
            break
        if r[j] == 0:
            continue
        e = _vp(h[j], p, N)
        if _vp(r[j], p, N) < e:
            return None, 0
        c = r[j] // p**e
        r = [(u - c * v) % mod for u, v in zip(r, h[:m])]
        x = [(u + c * v) % mod for u, v in zip(x, h[m:])]
    if any(r):
        return None, 0
    maxe = 0
    for h in H:
        j = _leading(h)
        if j is not None and j < m:
            maxe = max(maxe, _vp(h[j], p, N))
    return x, maxe


def matvec(rows: list, x: list, p: int, N: int) -> list:
    mod = p**N
    return [sum(a * v for a, v in zip(row, x)) % mod for row in rows]
