"""Exact linear algebra over Q and Z: determinants, HNF, SNF, kernels.

Matrices are lists of rows; a lattice basis is a list of column vectors
and gets transposed at the boundary where convenient.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

Q = Fraction


def vec_add(u, v):
    return [a + b for a, b in zip(u, v)]


def vec_sub(u, v):
    return [a - b for a, b in zip(u, v)]


def vec_scale(u, c):
    return [a * c for a in u]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def norm2(u):
    return dot(u, u)


def identity(n):
    return [[Q(int(i == j)) for j in range(n)] for i in range(n)]


def int_identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m):
    return [list(row) for row in zip(*m)]


def mat_mul(a, b):
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def mat_vec(a, v):
    return [dot(row, v) for row in a]


def mat_det(m):
    """Determinant by exact fraction elimination."""
    n = len(m)
    a = [[Q(x) for x in row] for row in m]
    det = Q(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Q(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            if a[r][col]:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def mat_inv(m):
    n = len(m)
    a = [[Q(x) for x in row] + [Q(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def solve(m, rhs):
    """Solve m x = rhs exactly (m square nonsingular)."""
    inv = mat_inv(m)
    return mat_vec(inv, rhs)


def charpoly(m):
    """Characteristic polynomial coefficients [c0..cn] of m, monic,
    via Faddeev-LeVerrier (exact)."""
    n = len(m)
    coeffs = [Q(0)] * (n + 1)
    coeffs[n] = Q(1)
    mk = [[Q(x) for x in row] for row in m]
    ak = [row[:] for row in mk]
    for k in range(1, n + 1):
        ck = -sum(ak[i][i] for i in range(n)) / k
        coeffs[n - k] = ck
        if k < n:
            for i in range(n):
                ak[i][i] += ck
            ak = mat_mul(mk, ak)
    return coeffs


# ---------------------------------------------------------------------------
# Integer matrices: HNF / SNF / kernels


def hnf_upper(cols: list[list[int]]) -> list[list[int]]:
    """Column-style upper-triangular HNF of the lattice spanned by the
    given integer columns (full rank n assumed).

    Returns n columns h_1..h_n with h_j[i] = 0 for i > j, h_j[j] > 0 and
    0 <= h_j[i] < h_i[i] for i < j.  This is the canonical representation
    used for ideals.
    """
    n = len(cols[0])
    work = [list(c) for c in cols]
    basis: list[list[int]] = []
    # eliminate from the bottom row upward
    for row in range(n - 1, -1, -1):
        # gcd-combine all columns with nonzero entry at `row`
        live = [c for c in work if any(c[i] for i in range(row + 1))]
        carrier = None
        rest = []
        for c in live:
            if c[row] == 0:
                rest.append(c)
                continue
            if carrier is None:
                carrier = c
                continue
            # extended gcd step on (carrier, c) at position row
            a, b = carrier[row], c[row]
            g, x, y = _xgcd(a, b)
            new_car = [x * p + y * q for p, q in zip(carrier, c)]
            new_oth = [(-b // g) * p + (a // g) * q for p, q in zip(carrier, c)]
            carrier, c2 = new_car, new_oth
            rest.append(c2)
        if carrier is None:
            raise ValueError("rank-deficient generator set for HNF")
        if carrier[row] < 0:
            carrier = [-x for x in carrier]
        basis.append(carrier)
        work = rest
    basis.reverse()  # basis[j] has pivot at row j
    # reduce off-diagonal entries: 0 <= h_j[i] < h_i[i] for i < j
    for j in range(n):
        for i in range(j - 1, -1, -1):
            piv = basis[i][i]
            q = basis[j][i] // piv
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], basis[i])]
    return basis


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_with_transform(rows: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style HNF: returns (H, U) with U unimodular, U*rows = H,
    H in lower echelon form processed column by column (pivot cols first)."""
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(r) for r in rows]
    u = int_identity(m)
    r = 0
    for col in range(n):
        piv = None
        for i in range(r, m):
            if a[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, m):
            while a[i][col] != 0:
                q = a[r][col] // a[i][col] if a[i][col] != 0 else 0
                if abs(a[i][col]) <= abs(a[r][col]):
                    q = a[r][col] // a[i][col]
                    a[r] = [x - q * y for x, y in zip(a[r], a[i])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[i])]
                    a[r], a[i] = a[i], a[r]
                    u[r], u[i] = u[i], u[r]
                else:
                    q = a[i][col] // a[r][col]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        if a[r][col] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = a[i][col] // a[r][col]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                u[i] = [x - q * y for x, y in zip(u[i], u[r])]
        r += 1
    return a, u


def int_kernel(rows: list[list[int]]) -> list[list[int]]:
    """Z-basis of {x : x^T rows = 0} (left kernel of the row matrix)."""
    h, u = hnf_with_transform(rows)
    ker = [u[i] for i in range(len(rows)) if all(v == 0 for v in h[i])]
    return ker


def express_int_combination(gen_rows: list[list[int]], target: list[int]):
    """Integer coefficients c with sum c_i * gen_rows[i] = target, or None."""
    h, u = hnf_with_transform([list(r) for r in gen_rows])
    live = [(i, h[i]) for i in range(len(h)) if any(h[i])]
    resid = list(target)
    coeffs_h = [0] * len(h)
    for i, row in live:
        piv_col = next(j for j, v in enumerate(row) if v)
        q, r = divmod(resid[piv_col], row[piv_col])
        if r:
            return None
        coeffs_h[i] = q
        resid = [a - q * b for a, b in zip(resid, row)]
    if any(resid):
        return None
    out = [0] * len(gen_rows)
    for i, c in enumerate(coeffs_h):
        if c:
            for j in range(len(gen_rows)):
                out[j] += c * u[i][j]
    return out


def smith_normal_form(mat: list[list[int]]) -> list[int]:
    """Invariant factors d_1 | d_2 | ... of an integer matrix."""
    a = [list(r) for r in mat]
    m = len(a)
    n = len(a[0]) if m else 0
    factors = []
    top = 0
    while top < min(m, n):
        # find nonzero pivot
        piv = None
        for i in range(top, m):
            for j in range(top, n):
                if a[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i0, j0 = piv
        a[top], a[i0] = a[i0], a[top]
        for r in a:
            r[top], r[j0] = r[j0], r[top]
        while True:
            # clear column
            changed = False
            for i in range(top + 1, m):
                if a[i][top]:
                    q = a[i][top] // a[top][top]
                    a[i] = [x - q * y for x, y in zip(a[i], a[top])]
                    if a[i][top]:
                        a[top], a[i] = a[i], a[top]
                        changed = True
            # clear row
            for j in range(top + 1, n):
                if a[top][j]:
                    q = a[top][j] // a[top][top]
                    for i in range(m):
                        a[i][j] -= q * a[i][top]
                    if a[top][j]:
                        for i in range(m):
                            a[i][top], a[i][j] = a[i][j], a[i][top]
                        changed = True
            if not changed:
                break
        # ensure divisibility of the rest
        p = a[top][top]
        fix = False
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if a[i][j] % p:
                    a[top] = [x + y for x, y in zip(a[top], a[i])]
                    fix = True
                    break
            if fix:
                break
        if fix:
            continue
        factors.append(abs(p))
        top += 1
    return factors


def gram_matrix(vectors) -> list[list[Fraction]]:
    return [[dot(u, v) for v in vectors] for u in vectors]


def content(xs) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g
