"""Exact rational lattice infrastructure: GSO, LLL, duals, enumeration
oracles for successive minima / covering-radius brackets / generating
radius, and exact box counting.

A basis is a list of column vectors with Fraction entries.  All norms are
carried as squared rationals so every certified bound can be compared
exactly; enumeration works from the (rational) Gram matrix, so lattices
known only through an exact Gram (e.g. rings of integers under the
Minkowski metric) are supported too.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import qlinalg
from .dyadic import Q
from .qlinalg import dot, gram_matrix, int_identity, mat_inv, mat_vec, transpose


class LatticeBasis:
    """Immutable exact basis with cached GSO and potential."""

    def __init__(self, cols, exact: bool = True):
        self.cols = [tuple(Q(x) for x in c) for c in cols]
        self.exact = exact
        self._gso = None

    @property
    def n(self):
        return len(self.cols)

    @property
    def m(self):
        return len(self.cols[0])

    def gso(self):
        if self._gso is None:
            self._gso = gso([list(c) for c in self.cols])
        return self._gso

    def potential_sq(self) -> Fraction:
        return self.gso()[2]


def gso(cols):
    """Gram-Schmidt data: (bstar columns, mu lower-triangular, P(B)^2).

    mu[j][i] for i < j is the usual coefficient; P(B)^2 is the squared
    potential prod ||b*_j||^(2(n+1-j)), an exact rational.
    """
    n = len(cols)
    bstar = []
    mu = [[Q(0)] * n for _ in range(n)]
    d = []
    for j in range(n):
        v = [Q(x) for x in cols[j]]
        for i in range(j):
            if d[i] == 0:
                raise ValueError("rank-deficient basis")
            mu[j][i] = dot(cols[j], bstar[i]) / d[i]
            v = [a - mu[j][i] * b for a, b in zip(v, bstar[i])]
        bstar.append(v)
        d.append(dot(v, v))
        if d[-1] == 0:
            raise ValueError("rank-deficient basis")
    pot2 = Q(1)
    for j in range(n):
        pot2 *= d[j] ** (n - j)
    return bstar, mu, pot2


def gram_gso(g):
    """(mu, d) from a rational Gram matrix: d[i] = ||b*_i||^2."""
    n = len(g)
    mu = [[Q(0)] * n for _ in range(n)]
    d = [Q(0)] * n
    for i in range(n):
        d[i] = Q(g[i][i])
        for k in range(i):
            d[i] -= mu[i][k] ** 2 * d[k]
        if d[i] <= 0:
            raise ValueError("Gram matrix not positive definite")
        for j in range(i + 1, n):
            v = Q(g[j][i])
            for k in range(i):
                v -= mu[j][k] * mu[i][k] * d[k]
            mu[j][i] = v / d[i]
    return mu, d


def size_reduce(cols, transform=None):
    """Size-reduce in place semantics; returns (new_cols, U) with
    new = old * U (columns)."""
    n = len(cols)
    cols = [list(c) for c in cols]
    u = int_identity(n)
    bstar, mu, _ = gso(cols)
    d = [dot(b, b) for b in bstar]
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            mij = dot(cols[j], bstar[i]) / d[i]
            q = _round_half(mij)
            if q:
                cols[j] = [a - q * b for a, b in zip(cols[j], cols[i])]
                for r in range(n):
                    u[r][j] -= q * u[r][i]
    return cols, u


def _round_half(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def lll(cols, delta=Q(3, 4)):
    """Exact-rational LLL with incremental GSO maintenance; returns
    (reduced columns, U) with reduced = input * U."""
    delta = Q(delta)
    if not Q(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    n = len(cols)
    b = [list(map(Q, c)) for c in cols]
    u = int_identity(n)
    bstar, mu, _ = gso(b)
    d = [dot(s, s) for s in bstar]

    def red(k, i):
        q = _round_half(mu[k][i])
        if q:
            b[k] = [x - q * y for x, y in zip(b[k], b[i])]
            for r in range(n):
                u[r][k] -= q * u[r][i]
            mu[k][i] -= q
            for j in range(i):
                mu[k][j] -= q * mu[i][j]

    k = 1
    while k < n:
        red(k, k - 1)
        if d[k] >= (delta - mu[k][k - 1] ** 2) * d[k - 1]:
            for i in range(k - 2, -1, -1):
                red(k, i)
            k += 1
        else:
            # swap columns k-1 and k, update mu/d in place (Cohen 2.6.3)
            m = mu[k][k - 1]
            bnew = d[k] + m * m * d[k - 1]
            b[k], b[k - 1] = b[k - 1], b[k]
            for r in range(n):
                u[r][k], u[r][k - 1] = u[r][k - 1], u[r][k]
            for j in range(k - 1):
                mu[k][j], mu[k - 1][j] = mu[k - 1][j], mu[k][j]
            mu[k][k - 1] = m * d[k - 1] / bnew
            d[k] = d[k - 1] * d[k] / bnew
            d[k - 1] = bnew
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
    return b, u


def lll_integer(cols, delta=Q(3, 4)):
    """All-integer LLL (de Weger representation): maintains the integer
    quantities d_i = det Gram(b_1..b_i) and lambda_{ij} = mu_{ij} d_j, so
    no rational arithmetic occurs.  Returns (reduced cols, U)."""
    delta = Q(delta)
    p_num, p_den = delta.numerator, delta.denominator
    n = len(cols)
    b = [[int(x) for x in c] for c in cols]
    m = len(b[0])
    u = int_identity(n)
    d = [1] * (n + 1)            # d[0] = 1, d[i] = det Gram(b_0..b_{i-1})
    lam = [[0] * n for _ in range(n)]

    def init_row(i):
        for j in range(i + 1):
            val = sum(b[i][t] * b[j][t] for t in range(m))
            for k in range(j):
                val = (d[k + 1] * val - lam[i][k] * lam[j][k]) // d[k]
            if j < i:
                lam[i][j] = val
            else:
                d[i + 1] = val
                if val == 0:
                    raise ValueError("rank-deficient basis")

    for i in range(n):
        init_row(i)

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            for r in range(n):
                u[r][k] -= q * u[r][l]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    k = 1
    while k < n:
        red(k, k - 1)
        # Lovász: d[k+1] d[k-1] >= delta d[k]^2 - lam^2 rearranged in ints
        lhs = p_den * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2)
        rhs = p_num * d[k] * d[k]
        if lhs >= rhs:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for r in range(n):
                u[r][k], u[r][k - 1] = u[r][k - 1], u[r][k]
            for j in range(k - 1):
                lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
            lam_val = lam[k][k - 1]
            bnew = (d[k - 1] * d[k + 1] + lam_val * lam_val) // d[k]
            for i in range(k + 1, n):
                t = lam[i][k]
                lam[i][k] = (d[k + 1] * lam[i][k - 1] - lam_val * t) // d[k]
                lam[i][k - 1] = (bnew * t + lam_val * lam[i][k]) // d[k + 1]
            d[k] = bnew
            k = max(k - 1, 1)
    return [[Q(x) for x in c] for c in b], u


def lll_reference(cols, delta=Q(3, 4)):
    """Naive recompute-everything LLL, kept as a cross-check oracle."""
    delta = Q(delta)
    n = len(cols)
    b = [list(map(Q, c)) for c in cols]
    u = int_identity(n)

    def mu_d():
        bstar, mu, _ = gso(b)
        return mu, [dot(s, s) for s in bstar]

    mu, d = mu_d()
    k = 1
    while k < n:
        for i in range(k - 1, -1, -1):
            q = _round_half(mu[k][i])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[i])]
                for r in range(n):
                    u[r][k] -= q * u[r][i]
                mu, d = mu_d()
        if d[k] >= (delta - mu[k][k - 1] ** 2) * d[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for r in range(n):
                u[r][k], u[r][k - 1] = u[r][k - 1], u[r][k]
            mu, d = mu_d()
            k = max(k - 1, 1)
    return b, u


def lll_gram(g, delta=Q(3, 4)):
    """LLL on a Gram matrix; returns (new_gram, U) with
    new_gram = U^T g U."""
    n = len(g)
    # synthesize an exact rational Cholesky-like embedding: work directly
    # with transforms applied to the Gram
    u = int_identity(n)
    g = [[Q(x) for x in row] for row in g]

    def apply_colswap(i, j):
        for r in range(n):
            g[r][i], g[r][j] = g[r][j], g[r][i]
        g[i], g[j] = g[j], g[i]
        for r in range(n):
            u[r][i], u[r][j] = u[r][j], u[r][i]

    def apply_shear(j, i, q):
        # column j -= q * column i
        for r in range(n):
            g[r][j] -= q * g[r][i]
        for c in range(n):
            g[j][c] -= q * g[i][c]
        for r in range(n):
            u[r][j] -= q * u[r][i]

    k = 1
    while k < n:
        mu, d = gram_gso(g)
        for i in range(k - 1, -1, -1):
            q = _round_half(mu[k][i])
            if q:
                apply_shear(k, i, q)
                mu, d = gram_gso(g)
        if d[k] >= (Q(delta) - mu[k][k - 1] ** 2) * d[k - 1]:
            k += 1
        else:
            apply_colswap(k, k - 1)
            k = max(k - 1, 1)
    return g, u


def dual_basis(cols):
    """Columns of B^{-T} for a square exact basis."""
    rows = transpose([list(c) for c in cols])  # matrix with cols as columns
    inv = mat_inv(rows)
    # dual columns are rows of B^{-1}, i.e. columns of B^{-T}
    return [list(r) for r in inv]


def enumerate_short_gram(g, radius2: Fraction, max_count=None):
    """All nonzero (coeff, norm2) with norm2 <= radius2, one per +-pair,
    sorted by norm2.  Fincke-Pohst over the exact rational GSO of g.
    Raises RuntimeError when max_count vectors are exceeded."""
    n = len(g)
    mu, d = gram_gso(g)
    radius2 = Q(radius2)
    out = []
    coeffs = [0] * n

    def recurse(i, partial_norm, centers):
        if i < 0:
            if any(coeffs):
                out.append((tuple(coeffs), partial_norm))
                if max_count is not None and len(out) > max_count:
                    raise RuntimeError("enumeration cap exceeded")
            return
        center = centers[i]
        lim2 = (radius2 - partial_norm) / d[i]
        base = _round_half(center)
        for direction in (1, -1):
            z = base if direction == 1 else base - 1
            while True:
                diff = Q(z) - center
                dd = diff * diff
                if dd > lim2:
                    break
                coeffs[i] = z
                child = [centers[j] - mu[i][j] * z for j in range(i)]
                recurse(i - 1, partial_norm + d[i] * dd,
                        child + centers[i:])
                z += direction
        coeffs[i] = 0

    recurse(n - 1, Q(0), [Q(0)] * n)
    # deduplicate +-x: keep representative with last nonzero coeff > 0
    seen = {}
    for c, nrm in out:
        firstnz = next(x for x in reversed(c) if x != 0)
        rep = c if firstnz > 0 else tuple(-x for x in c)
        if rep not in seen:
            seen[rep] = nrm
    return sorted(seen.items(), key=lambda t: (t[1], t[0]))


@dataclass
class EnumerationReport:
    minima_sq: list          # exact squared successive minima
    witnesses: list          # coefficient vectors attaining them
    cov_upper_sq: Fraction   # certified (covering radius)^2 upper bracket
    cov_lower_sq: Fraction   # certified lower bracket
    rr_sq: Fraction          # exact squared generating radius
    dim: int = 0


DIM_CAP = 12


def _hkz_gram(g):
    """HKZ-reduce a Gram matrix (small dims); returns (gram, U)."""
    n = len(g)
    g = [[Q(x) for x in row] for row in g]
    u_total = int_identity(n)
    for j in range(n):
        # shortest vector of the projection orthogonal to first j vectors
        mu, d = gram_gso(g)
        # Gram of projected block in terms of coords j..n-1
        sub = _projected_gram(g, j)
        vec, lam2 = shortest_gram(sub)
        if lam2 >= sub[0][0]:
            continue  # current b*_j already attains the minimum
        # lift: coefficients on columns j..n-1
        ucol = _complete_unimodular(list(vec), n - j)
        # apply to columns j..n-1
        u_step = int_identity(n)
        for r in range(n - j):
            for c in range(n - j):
                u_step[j + r][j + c] = ucol[r][c]
        g = _apply_transform_gram(g, u_step)
        u_total = qlinalg.mat_mul(u_total, u_step)
        u_total = [[int(x) for x in row] for row in u_total]
    # final size reduction on the Gram
    g, u_sr = _size_reduce_gram(g)
    u_total = [[int(x) for x in row] for row in qlinalg.mat_mul(u_total, u_sr)]
    return g, u_total


def _projected_gram(g, j):
    """Gram of pi_j(b_j..b_{n-1}) (projection orthogonal to b_0..b_{j-1})."""
    n = len(g)
    mu, d = gram_gso(g)
    size = n - j
    out = [[Q(0)] * size for _ in range(size)]
    for a in range(size):
        for b in range(size):
            v = Q(g[j + a][j + b])
            for k in range(j):
                v -= mu[j + a][k] * mu[j + b][k] * d[k]
            out[a][b] = v
    return out


def _apply_transform_gram(g, u):
    ut = transpose(u)
    return qlinalg.mat_mul(ut, qlinalg.mat_mul(g, u))


def _size_reduce_gram(g):
    n = len(g)
    g = [[Q(x) for x in row] for row in g]
    u = int_identity(n)
    for j in range(1, n):
        for i in range(j - 1, -1, -1):
            mu, d = gram_gso(g)
            q = _round_half(mu[j][i])
            if q:
                for r in range(n):
                    g[r][j] -= q * g[r][i]
                for c in range(n):
                    g[j][c] -= q * g[i][c]
                for r in range(n):
                    u[r][j] -= q * u[r][i]
    return g, u


def _complete_unimodular(vec, n):
    """Unimodular n x n integer matrix whose first column is vec
    (vec primitive)."""
    from math import gcd
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g != 1:
        raise ValueError("coefficient vector not primitive")
    rows = [list(vec)]
    h, u = qlinalg.hnf_with_transform(rows and [list(vec)])
    # hnf_with_transform works on rows; we need completion: use the
    # standard trick via the row HNF of the 1 x n matrix transpose
    # Instead: build iteratively with extended gcd
    cols = [list(vec)]
    basis = int_identity(n)
    # Gaussian-style: find U with U e_1 = vec  <=> complete vec to a basis
    # via HNF of the column vector: compute unimodular V with V vec = e_1*g
    v = list(vec)
    trans = int_identity(n)
    for i in range(1, n):
        a, b = v[0], v[i]
        if b == 0:
            continue
        g_, x, y = _xgcd(a, b)
        # rows 0 and i of trans get combined
        r0 = [x * trans[0][c] + y * trans[i][c] for c in range(n)]
        ri = [(-b // g_) * trans[0][c] + (a // g_) * trans[i][c] for c in range(n)]
        trans[0], trans[i] = r0, ri
        v[0], v[i] = g_, 0
    if v[0] < 0:
        trans[0] = [-x for x in trans[0]]
        v[0] = -v[0]
    # trans @ vec = e_1; so U = trans^{-1} has first column vec
    u_inv = trans
    u = _int_inverse(u_inv)
    return u


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def _int_inverse(m):
    inv = mat_inv([[Q(x) for x in row] for row in m])
    out = []
    for row in inv:
        out.append([int(x) for x in row])
    return out


def shortest_gram(g):
    """(coefficient vector, norm2) of a shortest nonzero vector."""
    g2, u = lll_gram(g)
    n = len(g2)
    radius2 = min(Q(g2[i][i]) for i in range(n))
    vecs = enumerate_short_gram(g2, radius2)
    best_c, best_n = vecs[0]
    # map back through u
    coeff = mat_vec(u, list(best_c))
    return [int(x) for x in coeff], best_n


def successive_minima_gram(g):
    """Exact successive minima with witnesses, by per-index
    branch-and-bound over the HKZ-reduced GSO.  Returns
    (minima_sq list, witnesses in the ORIGINAL basis, hkz_gram, U)."""
    n = len(g)
    gh, u = _hkz_gram(g)
    mu, d = gram_gso(gh)
    minima, chosen = [], []
    for _k in range(n):
        # levels fully inside the witness span may be skipped as a whole
        t_min = 0
        for t in range(1, len(chosen) + 1):
            basis_t = [[int(i == j) for j in range(n)] for i in range(t)]
            if _span_contains(chosen, basis_t):
                t_min = t
            else:
                break
        best_norm, best_vec = None, None
        for j in range(t_min, n):
            cand = [int(i == j) for i in range(n)]
            if _int_rank(chosen + [cand]) == len(chosen) + 1:
                nrm = Q(gh[j][j])
                if best_norm is None or nrm < best_norm:
                    best_norm, best_vec = nrm, cand
        if best_vec is None:
            raise RuntimeError("no independent basis vector found")
        best = [best_norm, best_vec]

        coeffs = [0] * n

        def rec(i, partial, centers, nonzero_hi):
            if partial > best[0]:
                return
            if i < 0:
                if not any(coeffs):
                    return
                if partial < best[0] or best[1] is None:
                    if _int_rank(chosen + [list(coeffs)]) == len(chosen) + 1:
                        best[0], best[1] = partial, list(coeffs)
                return
            if i + 1 <= t_min and not nonzero_hi:
                return      # whole remaining subtree lies in the span
            center = centers[i]
            lim2 = (best[0] - partial) / d[i]
            base = _round_half(center)
            for direction in (1, -1):
                z = base if direction == 1 else base - 1
                while True:
                    diff = Q(z) - center
                    dd = diff * diff
                    if dd > lim2:
                        break
                    coeffs[i] = z
                    child = [centers[t] - mu[i][t] * z for t in range(i)]
                    rec(i - 1, partial + d[i] * dd,
                        child + centers[i:], nonzero_hi or (z != 0 and i >= t_min))
                    z += direction
                    lim2 = (best[0] - partial) / d[i]
            coeffs[i] = 0

        rec(n - 1, Q(0), [Q(0)] * n, False)
        minima.append(best[0])
        chosen.append(best[1])
    wits = [[int(x) for x in mat_vec(u, c)] for c in chosen]
    return minima, wits, gh, u


def _span_contains(gen_rows, test_rows) -> bool:
    """True iff every test row lies in the rational span of gen_rows."""
    if not gen_rows:
        return not test_rows
    base = _int_rank(gen_rows)
    return _int_rank([list(r) for r in gen_rows] + [list(t) for t in test_rows]) == base


ENUM_VECTOR_CAP = 2_000_000


def enumerate_minima_gram(g, up_to=None) -> EnumerationReport:
    """Exact successive minima, covering brackets and generating radius
    from a rational Gram matrix (dimension <= DIM_CAP)."""
    n = len(g)
    if n > DIM_CAP:
        raise ValueError(f"enumeration oracle capped at dimension {DIM_CAP}")
    up_to = n if up_to is None else min(up_to, n)
    minima_all, wits_all, gh, u = successive_minima_gram(g)
    minima = minima_all[:up_to]
    wits = wits_all[:up_to]
    mu, d = gram_gso(gh)
    cov_up2 = sum(d) / 4          # Babai bound on the HKZ-reduced GSO
    cov_lo2 = minima_all[n - 1] / 4
    rr2_final = None
    if up_to == n:
        rr2_final = _generating_radius_search(gh, minima_all[n - 1],
                                              4 * cov_up2, n)
    return EnumerationReport(minima, wits, cov_up2, cov_lo2, rr2_final, n)


def _generating_radius_search(gh, lam_n_sq, limit_sq, n):
    """Exact rr^2 by growing the enumeration radius from lambda_n to
    2*cov; None when the vector count cap is hit (skewed lattices)."""
    radius = Q(lam_n_sq)
    while True:
        try:
            vecs = enumerate_short_gram(gh, radius, max_count=200000)
        except RuntimeError:
            return None
        try:
            return _generating_radius_sq(gh, vecs, n)
        except RuntimeError:
            pass
        if radius >= limit_sq:
            return None
        radius = min(limit_sq, radius * Q(9, 8))


def _generating_radius_sq(g, sorted_vecs, n) -> Fraction:
    acc = []
    for c, nrm in sorted_vecs:
        acc.append(list(c))
        if len(acc) >= n and _int_rank(acc) == n and _index_one(acc, n):
            return nrm
    raise RuntimeError("generating radius not reached within enumeration radius")


def _int_rank(rows) -> int:
    h, _ = qlinalg.hnf_with_transform([list(r) for r in rows])
    return sum(1 for r in h if any(r))


def _index_one(rows, n) -> bool:
    h, _ = qlinalg.hnf_with_transform([list(r) for r in rows])
    live = [r for r in h if any(r)]
    if len(live) != n:
        return False
    det = Q(1)
    # echelon rows: product of pivots
    for r in live:
        piv = next(x for x in r if x != 0)
        det *= abs(piv)
    return det == 1


def enumerate_minima(cols, up_to=None) -> EnumerationReport:
    return enumerate_minima_gram(gram_matrix([list(c) for c in cols]), up_to)


def count_in_box(cols, r, shift=None, box_shift=None, sign_constraints=None,
                 cov_upper_sq=None):
    """Exact |(L + t) cap r(X + t')| for the unit-infinity-ball X, plus
    the counting-lemma interval when certifiable.

    Returns dict with keys: count, interval (lo, hi floats) or None,
    certified (bool).
    """
    import math
    m = len(cols[0])
    n = len(cols)
    r = Q(r)
    t = [Q(x) for x in (shift or [0] * m)]
    tp = [Q(x) for x in (box_shift or [0] * m)]
    if r < 0:
        raise ValueError("negative radius")
    # per-axis bounds for v = B u:  v_i in [r*tp_i - r - t_i, r*tp_i + r - t_i]
    lo = [r * tp[i] - r - t[i] for i in range(m)]
    hi = [r * tp[i] + r - t[i] for i in range(m)]
    binv = mat_inv(transpose([list(c) for c in cols]))
    ranges = []
    for i in range(n):
        a, b = Q(0), Q(0)
        for j in range(m):
            c = binv[i][j]
            if c >= 0:
                a += c * lo[j]
                b += c * hi[j]
            else:
                a += c * hi[j]
                b += c * lo[j]
        ranges.append((math.ceil(a), math.floor(b)))
    count = 0
    u = [0] * n

    def ok(v):
        for i in range(m):
            if not (lo[i] <= v[i] <= hi[i]):
                return False
        if sign_constraints:
            for axis, sgn in sign_constraints:
                val = v[axis] + t[axis]
                if sgn > 0 and val <= 0:
                    return False
                if sgn < 0 and val >= 0:
                    return False
        return True

    def rec(i):
        nonlocal count
        if i == n:
            v = [sum(cols[j][k] * u[j] for j in range(n)) for k in range(m)]
            if ok(v):
                count += 1
            return
        a, b = ranges[i]
        for z in range(a, b + 1):
            u[i] = z
            rec(i + 1)

    rec(0)
    interval = None
    certified = False
    if cov_upper_sq is None and n == m and n <= DIM_CAP:
        rep = enumerate_minima(cols)
        cov_upper_sq = rep.cov_upper_sq
    if cov_upper_sq is not None and r > 0 and not sign_constraints:
        c_val = math.sqrt(float(cov_upper_sq))
        if float(r) > 2 * c_val:
            covol = abs(float(qlinalg.mat_det(transpose([list(c) for c in cols]))))
            volx = 2.0 ** n
            mid = float(r) ** n * volx / covol
            import math as _m
            lo_e = mid * _m.exp(-2 * n * c_val / float(r))
            hi_e = mid * _m.exp(2 * n * c_val / float(r))
            interval = (lo_e, hi_e)
            certified = True
    return {"count": count, "interval": interval, "certified": certified}
