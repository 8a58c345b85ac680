"""Number fields with exact element arithmetic and certified embeddings.

A field is defined by a monic integer polynomial; elements carry exact
rational coordinates over a fixed integral basis.  Complex embeddings are
produced as certified balls at any requested precision, and comparison of
algebraic values against rational thresholds (or their k-th roots) is
decided exactly through Liouville-type separation bounds.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import gcd

import numpy as np

from . import polyq, qlinalg
from .dyadic import ComplexBall, Q, RealBall, ball_sqrt, dyadic_round

GT, LE = "GT", "LE"


def liouville_separation(poly) -> Fraction:
    """Minimum distance from any non-integer real root of poly to Z."""
    n = polyq.degree(poly)
    if n < 1:
        raise ValueError("degree must be >= 1")
    height = max(abs(int(c)) for c in poly)
    return Q(1, (n + 1) ** 3 * 2 ** n * (2 + height) ** n)


def _compose_power(poly, k: int):
    """Monic polynomial whose roots are the k-th powers of poly's roots.

    Uses Newton identities: power sums of the output are the (k*j)-th
    power sums of the input.  Exact over Q.
    """
    poly = polyq.trim([Q(c) for c in poly])
    d = polyq.degree(poly)
    f = [c / poly[-1] for c in poly]
    # power sums p_1..p_{k*d} of roots of f via Newton's identity
    e = [Q(0)] * (d + 1)        # elementary symmetric functions
    for i in range(1, d + 1):
        e[i] = Q((-1) ** i) * f[d - i]
    m = k * d
    p = [Q(0)] * (m + 1)
    for j in range(1, m + 1):
        acc = Q(0)
        for i in range(1, min(j, d)):
            acc += (Q(-1) ** (i - 1)) * e[i] * p[j - i]
        if j <= d:
            acc += (Q(-1) ** (j - 1)) * j * e[j]
        p[j] = acc
    # output power sums
    q = [p[k * j] for j in range(1, d + 1)]
    # invert Newton to get elementary symmetric of output
    eo = [Q(1)] + [Q(0)] * d
    for j in range(1, d + 1):
        acc = q[j - 1]
        for i in range(1, j):
            acc += (Q(-1) ** i) * eo[i] * q[j - 1 - i]
        eo[j] = acc * (Q(-1) ** (j - 1)) / j
    out = [Q(0)] * (d + 1)
    for i in range(d + 1):
        out[d - i] = (Q(-1) ** i) * eo[i]
    return out


def _kronecker_square_charpoly(poly):
    """Integer polynomial with roots w_i * w_j for all root pairs of poly
    (poly monic integer); includes |w|^2 for conjugate pairs."""
    n = polyq.degree(poly)
    comp = [[Q(0)] * n for _ in range(n)]
    for i in range(1, n):
        comp[i][i - 1] = Q(1)
    for i in range(n):
        comp[i][n - 1] = -Q(poly[i], poly[n])
    # Kronecker product
    big = [[Q(0)] * (n * n) for _ in range(n * n)]
    for i in range(n):
        for j in range(n):
            if comp[i][j] == 0:
                continue
            for a in range(n):
                for b in range(n):
                    if comp[a][b] != 0:
                        big[i * n + a][j * n + b] = comp[i][j] * comp[a][b]
    cp = qlinalg.charpoly(big)
    den = 1
    for c in cp:
        den = den * c.denominator // gcd(den, c.denominator)
    return [int(c * den) for c in cp]


def _scale_roots_to_int(poly, b: int):
    """Integer polynomial whose roots are b * (roots of poly)."""
    poly = polyq.trim([Q(c) for c in poly])
    d = polyq.degree(poly)
    scaled = [poly[i] * Q(b) ** (d - i) for i in range(d + 1)]
    den = 1
    for c in scaled:
        den = den * c.denominator // gcd(den, c.denominator)
    out = [int(c * den) for c in scaled]
    cont = 0
    for c in out:
        cont = gcd(cont, c)
    return [c // cont for c in out]


def decide_root_gt_int(int_poly, refine, c: int) -> str:
    """Decide whether a designated real root w of int_poly satisfies
    w > c (GT) or w <= c (LE), for an integer threshold c.

    `refine(prec)` must return a RealBall certified to contain w with
    radius <= 2^-prec.  Exact integer roots are snapped via the
    separation bound; equality resolves LE.
    """
    sep = liouville_separation(int_poly)
    prec = 32
    target = sep / 4
    while True:
        ball = refine(prec)
        if ball.definitely_gt(c):
            return GT
        if ball.definitely_lt(c) or ball.hi() == c:
            return LE
        if ball.rad <= target:
            z = round(ball.mid)
            if abs(ball.mid - z) + ball.rad < sep / 2:
                return GT if z > c else LE
            return GT if ball.mid > c else LE
        prec *= 2


class EmbeddingPoint:
    """Certified complex values of an element at every embedding."""

    __slots__ = ("values", "precision_bits")

    def __init__(self, values, precision_bits):
        self.values = values
        self.precision_bits = precision_bits

    def __repr__(self):
        return f"EmbeddingPoint({[complex(v) for v in self.values]})"


class FieldElement:
    """Element of a number field, exact coordinates in the integral basis."""

    __slots__ = ("field", "coords", "_cache")

    def __init__(self, field, coords):
        self.field = field
        self.coords = tuple(Q(c) for c in coords)
        if len(self.coords) != field.n:
            raise ValueError("coordinate length mismatch")
        self._cache: dict = {}

    # -- ring operations ---------------------------------------------------
    def __add__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field,
                            [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        other = self.field.coerce(other)
        return FieldElement(self.field,
                            [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return FieldElement(self.field, [-a for a in self.coords])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(self.field, [a * other for a in self.coords])
        other = self.field.coerce(other)
        tensor = self.field.mul_tensor()
        n = self.field.n
        out = [Q(0)] * n
        for i, xi in enumerate(self.coords):
            if xi == 0:
                continue
            for j, yj in enumerate(other.coords):
                if yj == 0:
                    continue
                c = xi * yj
                row = tensor[i][j]
                for t in range(n):
                    if row[t]:
                        out[t] += c * row[t]
        return FieldElement(self.field, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero element")
        m = self.field.mult_matrix(self)
        x = qlinalg.solve(m, list(self.field.one().coords))
        return FieldElement(self.field, x)

    def is_zero(self):
        return all(c == 0 for c in self.coords)

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            try:
                other = self.field.coerce(other)
            except Exception:
                return NotImplemented
        return self.field is other.field and self.coords == other.coords

    def __hash__(self):
        return hash((id(self.field), self.coords))

    def norm(self) -> Fraction:
        return qlinalg.mat_det(self.field.mult_matrix(self))

    def trace(self) -> Fraction:
        m = self.field.mult_matrix(self)
        return sum(m[i][i] for i in range(self.field.n))

    def charpoly(self):
        return qlinalg.charpoly(self.field.mult_matrix(self))

    def size(self) -> int:
        total = 0
        for c in self.coords:
            total += abs(c.numerator).bit_length() + c.denominator.bit_length()
        return total

    def __repr__(self):
        return f"FieldElement({list(self.coords)})"


class NumberField:
    """Monic-integer-polynomial number field with a fixed integral basis.

    The integral basis defaults to the power basis, which the caller
    asserts to be maximal; a supplied basis is verified to be closed
    under multiplication (LLL-reducedness is assumed, not verified).
    """

    def __init__(self, poly, integral_basis=None):
        poly = [int(c) for c in poly]
        if not poly or poly[-1] != 1:
            raise ValueError("defining polynomial must be monic with integer coefficients")
        n = len(poly) - 1
        if n < 2:
            raise ValueError("degree must be >= 2")
        self.poly = poly
        self.poly_q = [Q(c) for c in poly]
        self.n = n
        self._root_lock = threading.Lock()
        self._root_cache: dict = {}
        if not self._is_irreducible():
            raise ValueError("reducible defining polynomial")
        self.disc_poly = polyq.discriminant(self.poly_q)
        # signature by Sturm
        self.n_real = polyq.count_real_roots(self.poly_q)
        self.n_cplx = (n - self.n_real) // 2
        # integral basis: rows basis_pb[i] = power-basis coords of b_i
        if integral_basis is None:
            self.basis_pb = [[Q(int(i == j)) for j in range(n)] for i in range(n)]
        else:
            self.basis_pb = [[Q(c) for c in row] for row in integral_basis]
        self._pb_matrix = qlinalg.transpose(self.basis_pb)   # columns = basis
        det = qlinalg.mat_det(self._pb_matrix)
        if det == 0:
            raise ValueError("integral basis is singular")
        self._pb_inv = qlinalg.mat_inv(self._pb_matrix)
        index2 = 1 / (det * det)
        disc_field = self.disc_poly / index2
        if disc_field.denominator != 1:
            raise ValueError("disc(poly)/[O_K:Z[theta]]^2 is not an integer")
        self.disc_field = int(disc_field)
        self._check_basis_closed()


    # -- construction helpers ----------------------------------------------
    def _is_irreducible(self) -> bool:
        from . import intmath
        n = self.n
        disc = polyq.discriminant(self.poly_q)
        if disc == 0:
            return False
        dnum = abs(int(disc * disc.denominator ** 2)) or 1
        for p in intmath.primes_below(80):
            if dnum % p == 0:
                continue
            fac = polyq.factor_mod_p(self.poly, p)
            if len(fac) == 1 and fac[0][1] == 1:
                return True
        # certified subset-of-roots factor search
        prec = 64
        while True:
            try:
                roots = self._refine_roots(prec, order=False)
            except RuntimeError:
                prec *= 2
                continue
            result = self._subset_factor_test(roots)
            if result is not None:
                return result
            prec *= 2

    def _subset_factor_test(self, roots):
        from itertools import combinations
        n = self.n
        idx = range(n)
        for size in range(1, n // 2 + 1):
            for sub in combinations(idx, size):
                coeffs = [ComplexBall(1, 0)]
                for i in sub:
                    z = roots[i]
                    new = [ComplexBall(0, 0) for _ in range(len(coeffs) + 1)]
                    for d, c in enumerate(coeffs):
                        new[d + 1] = new[d + 1] + c
                        new[d] = new[d] + c * (-z)
                    coeffs = new
                cand = []
                ok = True
                for c in coeffs:
                    if c.rad >= Q(1, 4) or abs(c.im) > Q(1, 4) + c.rad:
                        ok = False
                        break
                    z = round(c.re)
                    if abs(c.re - z) + c.rad >= Q(1, 2):
                        ok = False
                        break
                    cand.append(int(z))
                if not ok:
                    return None  # not enough precision to settle this subset
                in_range = all(
                    abs(Q(cand[d]) - coeffs[d].re) <= coeffs[d].rad + Q(1, 4)
                    for d in range(len(cand)))
                if not in_range:
                    continue
                _, rem = polyq.poly_divmod(self.poly_q, [Q(c) for c in cand])
                if not rem:
                    return False
        return True

    def _check_basis_closed(self):
        for i in range(self.n):
            for j in range(i, self.n):
                bi = FieldElement(self, [Q(int(k == i)) for k in range(self.n)])
                bj = FieldElement(self, [Q(int(k == j)) for k in range(self.n)])
                prod = bi * bj
                for c in prod.coords:
                    if c.denominator != 1:
                        raise ValueError(
                            "supplied basis is not closed under multiplication")

    # -- element plumbing ----------------------------------------------------
    def element(self, coords) -> FieldElement:
        return FieldElement(self, coords)

    def zero(self) -> FieldElement:
        return FieldElement(self, [Q(0)] * self.n)

    def one(self) -> FieldElement:
        return self.from_power([Q(1)])

    def theta(self) -> FieldElement:
        return self.from_power([Q(0), Q(1)])

    def coerce(self, x) -> FieldElement:
        if isinstance(x, FieldElement):
            if x.field is not self:
                raise ValueError("element from a different field")
            return x
        if isinstance(x, (int, Fraction)):
            return self.one() * Q(x)
        raise TypeError(f"cannot coerce {x!r}")

    def to_power(self, elt: FieldElement):
        """Power-basis polynomial of an element."""
        vec = qlinalg.mat_vec(self._pb_matrix, list(elt.coords))
        return polyq.trim(vec)

    def from_power(self, poly) -> FieldElement:
        poly = [Q(c) for c in poly]
        if len(poly) > self.n:
            poly = polyq.poly_divmod(poly, self.poly_q)[1]
        poly = list(poly) + [Q(0)] * (self.n - len(poly))
        return FieldElement(self, qlinalg.mat_vec(self._pb_inv, poly[:self.n]))

    def mul_tensor(self):
        """Structure constants: tensor[i][j] = coords of b_i * b_j."""
        cached = getattr(self, "_mul_tensor", None)
        if cached is not None:
            return cached
        n = self.n
        tensor = []
        for i in range(n):
            row_i = []
            pa = self.basis_pb[i]
            for j in range(n):
                prod = polyq.poly_divmod(
                    polyq.poly_mul(pa, self.basis_pb[j]), self.poly_q)[1]
                row_i.append(tuple(self.from_power(prod).coords))
            tensor.append(row_i)
        self._mul_tensor = tensor
        return tensor

    def mult_matrix(self, elt: FieldElement):
        """Matrix of multiplication by elt on the integral basis (columns
        are images of basis vectors)."""
        tensor = self.mul_tensor()
        n = self.n
        cols = []
        for j in range(n):
            col = [Q(0)] * n
            for i, xi in enumerate(elt.coords):
                if xi == 0:
                    continue
                row = tensor[i][j]
                for t in range(n):
                    if row[t]:
                        col[t] += xi * row[t]
            cols.append(col)
        return qlinalg.transpose(cols)

    # -- embeddings ----------------------------------------------------------
    def _all_roots(self, prec: int):
        """Certified balls for all n roots, cached per precision."""
        with self._root_lock:
            hit = self._root_cache.get(prec)
        if hit is not None:
            return hit
        roots = self._refine_roots(prec)
        with self._root_lock:
            self._root_cache[prec] = roots
        return roots

    def _refine_roots(self, prec: int, order: bool = True):
        n = self.n
        approx = np.roots(list(reversed([float(c) for c in self.poly])))
        work = max(64, prec + 32)
        f = self.poly_q
        df = polyq.derivative(f)
        for _attempt in range(40):
            balls = []
            ok = True
            for z0 in approx:
                z = ComplexBall(dyadic_round(Q(float(z0.real)).limit_denominator(10 ** 12), work),
                                dyadic_round(Q(float(z0.imag)).limit_denominator(10 ** 12), work))
                z = self._newton(z, f, df, work, prec)
                if z is None:
                    ok = False
                    break
                balls.append(z)
            if ok and self._disks_disjoint(balls):
                return self._canonical_order(balls, prec) if order else balls
            work *= 2
        raise RuntimeError("root refinement failed to certify")

    def _newton(self, z: ComplexBall, f, df, work: int, prec: int):
        n = self.n
        target = Q(1, 1 << prec)
        for _ in range(work.bit_length() + 60):
            fz = _ceval(f, z.re, z.im)
            dfz = _ceval(df, z.re, z.im)
            d2 = dfz[0] * dfz[0] + dfz[1] * dfz[1]
            if d2 == 0:
                return None
            # certified radius: n * |f(z)| / |f'(z)|
            num2 = fz[0] * fz[0] + fz[1] * fz[1]
            _, hi = _sqrt_brackets(num2 / d2, work)
            rad = n * hi
            if rad <= target:
                return ComplexBall(z.re, z.im, rad)
            # Newton step: z - f/f'
            qre = (fz[0] * dfz[0] + fz[1] * dfz[1]) / d2
            qim = (fz[1] * dfz[0] - fz[0] * dfz[1]) / d2
            z = ComplexBall(dyadic_round(z.re - qre, work),
                            dyadic_round(z.im - qim, work))
        return None

    @staticmethod
    def _disks_disjoint(balls) -> bool:
        for i in range(len(balls)):
            for j in range(i + 1, len(balls)):
                d2 = ((balls[i].re - balls[j].re) ** 2
                      + (balls[i].im - balls[j].im) ** 2)
                r = balls[i].rad + balls[j].rad
                if d2 <= r * r:
                    return False
        return True

    def _canonical_order(self, balls, prec: int):
        reals, complexes = [], []
        for b in balls:
            if abs(b.im) <= b.rad:
                reals.append(ComplexBall(b.re, Q(0), b.rad + abs(b.im)))
            elif b.im > 0:
                complexes.append(b)
        if len(reals) != self.n_real or len(complexes) != self.n_cplx:
            raise RuntimeError("signature mismatch in root certification")
        reals.sort(key=lambda b: b.re)
        complexes.sort(key=lambda b: (b.re, b.im))
        ordered = list(reals)
        for z in complexes:
            ordered.append(z)
            ordered.append(z.conj())
        return ordered

    def places(self):
        """[(embedding index, n_nu)] — one entry per infinite place."""
        out = [(i, 1) for i in range(self.n_real)]
        for k in range(self.n_cplx):
            out.append((self.n_real + 2 * k, 2))
        return out

    def embed(self, alpha: FieldElement, precision_bits: int) -> EmbeddingPoint:
        """Certified embedding values, each radius <= 2^-precision_bits."""
        if precision_bits < 8:
            raise ValueError("precision_bits must be >= 8")
        key = ("emb", precision_bits)
        hit = alpha._cache.get(key)
        if hit is not None:
            return hit
        pa = self.to_power(alpha)
        height = max((abs(c) for c in pa), default=Q(0))
        extra = max(16, int(height).bit_length() + 8 * self.n)
        work = precision_bits + extra
        target = Q(1, 1 << precision_bits)
        while True:
            roots = self._all_roots(work)
            vals = []
            ok = True
            for z in roots:
                v = _ceval_ball(pa, z, work)
                if v.rad > target:
                    ok = False
                    break
                vals.append(v)
            if ok:
                pt = EmbeddingPoint(vals, precision_bits)
                alpha._cache[key] = pt
                return pt
            work *= 2

    # -- exact comparisons ---------------------------------------------------
    def abs2_ball(self, alpha: FieldElement, place_idx: int, prec: int) -> RealBall:
        emb_idx = self.places()[place_idx][0]
        pt = self.embed(alpha, prec)
        return pt.values[emb_idx].abs2()

    def sign_at_real_place(self, alpha: FieldElement, place_idx: int) -> int:
        """Exact sign of sigma(alpha) at a real place (0 iff alpha == 0)."""
        if alpha.is_zero():
            return 0
        emb_idx, nnu = self.places()[place_idx]
        if nnu != 1:
            raise ValueError("sign only defined at real places")
        prec = 32
        while True:
            v = self.embed(alpha, prec).values[emb_idx].re
            r = self.embed(alpha, prec).values[emb_idx].rad
            if v - r > 0:
                return 1
            if v + r < 0:
                return -1
            prec *= 2

    def abs2_pow_cmp(self, alpha: FieldElement, place_idx: int,
                     k: int, c: Fraction) -> str:
        """Decide (|sigma(alpha)|^2)^k > c exactly; equality resolves LE."""
        c = Q(c)
        if c < 0:
            return GT if not alpha.is_zero() else LE
        if alpha.is_zero():
            return LE
        # fast interval path
        for prec in (48, 128, 320):
            t = self.abs2_ball(alpha, place_idx, prec)
            tk = _ball_pow(t, k)
            if tk.definitely_gt(c):
                return GT
            if tk.definitely_lt(c) or tk.hi() == c:
                return LE
        # certified Liouville path on the Kronecker-square polynomial
        cp = alpha.charpoly()
        den = 1
        for cc in cp:
            den = den * cc.denominator // gcd(den, cc.denominator)
        int_cp = [int(cc * den) for cc in cp]
        kron = _kronecker_square_charpoly(int_cp)       # roots include |sigma|^2
        powed = _compose_power(kron, k)                 # roots (|sigma|^2)^k
        b = c.denominator
        scaled = _scale_roots_to_int(powed, b)          # roots b*(...)
        target_int = c.numerator

        def refine(p):
            t = self.abs2_ball(alpha, place_idx, p + k.bit_length() * 4 + 8)
            tk = _ball_pow(t, k)
            return RealBall(tk.mid * b, tk.rad * b)

        return decide_root_gt_int(scaled, refine, target_int)

    def signed_pow_cmp(self, alpha: FieldElement, place_idx: int,
                       k: int, g: Fraction) -> str:
        """Decide sigma(alpha) > g^(1/k) at a real place (g >= 0)."""
        g = Q(g)
        if g < 0:
            raise ValueError("signed comparison needs g >= 0")
        s = self.sign_at_real_place(alpha, place_idx)
        if s <= 0:
            return GT if (s == 0 and g < 0) else LE
        return self.abs2_pow_cmp(alpha, place_idx, k, g * g)  # (|a|^2)^k vs g^2

    # -- exact Minkowski Gram -------------------------------------------------
    def conj_automorphism(self):
        """Field automorphism realizing complex conjugation at every
        embedding, as a FieldElement image of theta; None if not found."""
        key = getattr(self, "_conj", "unset")
        if key != "unset":
            return key
        cand = []
        if self.n_cplx == 0:
            cand.append(self.theta())
        if self.n == 2:
            cand.append(self.from_power([-Q(self.poly[1]), Q(-1)]))
        if self.poly[0] != 0:
            # theta^{-1} = -(theta^{n-1} + c_{n-1} theta^{n-2} + ... + c_1)/c0
            coeffs = [-Q(self.poly[i], self.poly[0]) for i in range(1, self.n + 1)]
            cand.append(self.from_power(coeffs))
        for psi in cand:
            if not _is_root_in_field(self, psi):
                continue
            if self._certify_conjugation(psi):
                self._conj = psi
                return psi
        self._conj = None
        return None

    def _certify_conjugation(self, psi: FieldElement) -> bool:
        prec = 64
        pts = self.embed(psi, prec)
        th = self.embed(self.theta(), prec)
        for i in range(self.n):
            a = pts.values[i]
            b = th.values[i].conj()
            if abs(a.re - b.re) > a.rad + b.rad + Q(1, 1 << 40):
                return False
            if abs(a.im - b.im) > a.rad + b.rad + Q(1, 1 << 40):
                return False
        return True

    def minkowski_gram(self, elements) -> list[list[Fraction]]:
        """Exact rational Gram matrix of elements under the Minkowski
        metric, via the conjugation-twisted trace form."""
        psi = self.conj_automorphism()
        if psi is None:
            raise ValueError("exact Minkowski Gram unavailable: no "
                             "conjugation automorphism found for this field")
        conj = {}

        def conj_elt(e):
            if e not in conj:
                pw = self.to_power(e)
                acc = self.zero()
                power = self.one()
                for c in pw:
                    acc = acc + power * c
                    power = power * psi
                conj[e] = acc
            return conj[e]

        out = []
        for x in elements:
            row = []
            for y in elements:
                row.append((x * conj_elt(y)).trace())
            out.append(row)
        return out

    def minkowski_columns(self, elements, prec: int):
        """Real coordinates of elements in K_R (isometric basis): one
        coordinate per real embedding, (sqrt2*Re, sqrt2*Im) per pair.
        Returns columns of RealBalls."""
        s2lo, s2hi = _sqrt_brackets(Q(2), prec + 8)
        s2 = RealBall((s2lo + s2hi) / 2, (s2hi - s2lo) / 2)
        cols = []
        for e in elements:
            pt = self.embed(e, prec + 8)
            col = []
            for i in range(self.n_real):
                v = pt.values[i]
                col.append(RealBall(v.re, v.rad))
            for kidx in range(self.n_cplx):
                v = pt.values[self.n_real + 2 * kidx]
                col.append(RealBall(v.re, v.rad) * s2)
                col.append(RealBall(v.im, v.rad) * s2)
            cols.append(col)
        return cols

    def __repr__(self):
        return f"NumberField({self.poly}, disc={self.disc_field})"


def _poly_eval_mod(f, arg_poly, mod_poly):
    """f(arg_poly) mod mod_poly over Q."""
    acc = []
    for c in reversed(f):
        acc = polyq.poly_add(polyq.poly_divmod(
            polyq.poly_mul(acc, arg_poly), mod_poly)[1], [c])
    return polyq.trim(acc)


def _is_root_in_field(field: NumberField, psi: FieldElement) -> bool:
    pw = field.to_power(psi)
    val = _poly_eval_mod(field.poly_q, pw, field.poly_q)
    return not polyq.trim(val)


def _ceval(poly, re: Fraction, im: Fraction):
    """Exact complex Horner at a rational point; returns (re, im)."""
    are, aim = Q(0), Q(0)
    for c in reversed(poly):
        are, aim = are * re - aim * im + Q(c), are * im + aim * re
    return are, aim


def _ceval_ball(poly, z: ComplexBall, work: int) -> ComplexBall:
    acc = ComplexBall(0, 0)
    for c in reversed(poly):
        acc = (acc * z + ComplexBall(Q(c), 0)).round_mid(work)
    return acc


def _ball_pow(b: RealBall, k: int) -> RealBall:
    out = RealBall(Q(1))
    base = b
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


def _sqrt_brackets(x: Fraction, prec: int):
    from .dyadic import sqrt_bracket
    return sqrt_bracket(x, prec)


# ---------------------------------------------------------------------------
# Spec-facing operation wrappers


def new_field(poly, integral_basis=None) -> NumberField:
    return NumberField(poly, integral_basis)


def embed(alpha: FieldElement, precision_bits: int) -> EmbeddingPoint:
    return alpha.field.embed(alpha, precision_bits)


def cmp_root_threshold(poly, which_root: int, g, k: int, mode: str) -> str:
    """Exact comparison of a root of an integer polynomial against g^(1/k).

    mode 'real_value': roots are the real roots in ascending order and
    the signed value is compared.  mode 'abs_value': roots are all complex
    roots (canonically ordered) and |root| is compared; g must be >= 0.
    """
    g = Q(g)
    poly = [int(c) for c in poly]
    pq = [Q(c) for c in poly]
    sq = polyq.squarefree_part_z(poly)
    sq_q = [Q(c) for c in sq]
    if mode == "real_value":
        intervals = polyq.isolate_real_roots(sq_q)
        if which_root >= len(intervals):
            raise IndexError("real root index out of range")
        lo, hi = intervals[which_root]
        if g < 0:
            raise ValueError("negative g has no real k-th root here")
        # sign first
        lo2, hi2 = polyq.refine_root_bisect(sq_q, lo, hi, 16)
        while lo2 < 0 < hi2:
            lo2, hi2 = polyq.refine_root_bisect(sq_q, lo2, hi2, 64)
            if polyq.poly_eval(sq_q, Q(0)) == 0 and lo2 <= 0 <= hi2:
                break
        if hi2 <= 0:
            return LE if g >= 0 else GT
        # positive root: compare value^k vs g
        powed = _compose_power(sq_q, k)
        b = g.denominator
        scaled = _scale_roots_to_int(powed, b)

        def refine(p):
            l, h = polyq.refine_root_bisect(sq_q, lo, hi, p + k.bit_length() * 4 + 8)
            ball = RealBall((l + h) / 2, (h - l) / 2)
            return RealBall(_ball_pow(ball, k).mid * b, _ball_pow(ball, k).rad * b)

        return decide_root_gt_int(scaled, refine, g.numerator)
    if mode == "abs_value":
        if g < 0:
            raise ValueError("abs mode needs g >= 0")
        helper = _RootAbsHelper(sq)
        return helper.compare(which_root, g, k)
    raise ValueError(f"unknown mode {mode!r}")


class _RootAbsHelper:
    """Decides |w_i| > g^(1/k) for roots of a squarefree integer poly."""

    def __init__(self, poly):
        self.poly = poly
        self.pq = [Q(c) for c in poly]
        self.df = polyq.derivative(self.pq)
        self._ball_cache: dict = {}

    def _balls(self, prec):
        if prec in self._ball_cache:
            return self._ball_cache[prec]
        approx = np.roots(list(reversed([float(c) for c in self.poly])))
        work = max(64, prec + 32)
        nf_stub = _PolyRootRefiner(self.pq, self.df, len(self.pq) - 1)
        while True:
            balls = nf_stub.refine_all(approx, work, prec)
            if balls is not None:
                balls.sort(key=lambda b: (b.re, b.im))
                self._ball_cache[prec] = balls
                return balls
            work *= 2

    def compare(self, idx, g, k):
        # fast path
        for prec in (48, 160):
            b = self._balls(prec)[idx]
            t = _ball_pow(b.abs2(), k)
            if t.definitely_gt(g * g):
                return GT
            if t.definitely_lt(g * g) or t.hi() == g * g:
                return LE
        kron = _kronecker_square_charpoly(self.poly)
        powed = _compose_power(kron, k)
        bden = (g * g).denominator
        scaled = _scale_roots_to_int(powed, bden)

        def refine(p):
            b = self._balls(p + 8 * k + 16)[idx]
            t = _ball_pow(b.abs2(), k)
            return RealBall(t.mid * bden, t.rad * bden)

        return decide_root_gt_int(scaled, refine, (g * g).numerator)


class _PolyRootRefiner:
    def __init__(self, pq, df, n):
        self.pq, self.df, self.n = pq, df, n

    def refine_all(self, approx, work, prec):
        balls = []
        for z0 in approx:
            z = ComplexBall(dyadic_round(Q(float(z0.real)).limit_denominator(10 ** 12), work),
                            dyadic_round(Q(float(z0.imag)).limit_denominator(10 ** 12), work))
            z = self._newton(z, work, prec)
            if z is None:
                return None
            balls.append(z)
        if NumberField._disks_disjoint(balls):
            return balls
        return None

    def _newton(self, z, work, prec):
        target = Q(1, 1 << prec)
        for _ in range(work.bit_length() + 60):
            fz = _ceval(self.pq, z.re, z.im)
            dfz = _ceval(self.df, z.re, z.im)
            d2 = dfz[0] * dfz[0] + dfz[1] * dfz[1]
            if d2 == 0:
                return None
            num2 = fz[0] * fz[0] + fz[1] * fz[1]
            _, hi = _sqrt_brackets(num2 / d2, work)
            rad = self.n * hi
            if rad <= target:
                return ComplexBall(z.re, z.im, rad)
            qre = (fz[0] * dfz[0] + fz[1] * dfz[1]) / d2
            qim = (fz[1] * dfz[0] - fz[0] * dfz[1]) / d2
            z = ComplexBall(dyadic_round(z.re - qre, work),
                            dyadic_round(z.im - qim, work))
        return None


def cmp_element(alpha: FieldElement, sigma: int, scale, g, k: int,
                signed: bool = False) -> str:
    """Decide scale*|sigma(alpha)| > g^(1/k) (or the signed variant at a
    real place).  Equality resolves LE; zero vs zero resolves LE."""
    field = alpha.field
    scale = Q(scale)
    g = Q(g)
    if scale <= 0:
        raise ValueError("scale entry must be positive")
    if alpha.is_zero():
        return LE
    if signed:
        s = field.sign_at_real_place(alpha, sigma)
        if s <= 0:
            return LE
    # scale*|a| > g^(1/k)  <=>  (|a|^2)^k > g^2 / scale^(2k)
    c = g * g / scale ** (2 * k)
    return field.abs2_pow_cmp(alpha, sigma, k, c)


def element_norm(alpha: FieldElement) -> Fraction:
    return alpha.norm()
