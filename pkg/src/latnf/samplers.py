"""Discrete Gaussian sampling with certified statistical distance, the
Gaussian tail/smoothing helpers, and perfectly uniform sampling in
(shifted lattice) x (box with ray constraints): the box sampler that the
ideal walk builds on.

Exactness discipline: all membership decisions happen through exact
rational comparisons (k-th powers of the box radius stay rational), so
conditioned on success the box samplers are *perfectly* uniform; only the
Gaussian samplers carry a statistical-distance budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from . import intmath, lattice_core, qlinalg
from .approx_reduction import approx_bkz_ideal
from .dyadic import Q, RealBall, sqrt_bracket
from .ideal_arith import HnfIdeal, hnf_mul
from .nf_core import GT, LE, FieldElement, NumberField, cmp_element
from .qlinalg import dot, mat_inv, mat_vec, transpose

RETRY_CAP = math.ceil(math.e ** 3 * 40)   # per uniform draw, then error
RADIUS_CONSTANT = 48
RADIUS_C_HALF = 24                        # the C/2 of the basis-shortness check


class CapExceeded(Exception):
    pass


# ---------------------------------------------------------------------------
# Discrete Gaussians


def sample_z_gaussian(s, c, delta, rng) -> int:
    """Sample within statistical distance delta of the discrete Gaussian
    on Z with width s and center c; support hard-truncated to
    [c - s*t, c + s*t] with t = sqrt(log(2/delta) + 2).

    Small windows use exact-weight inversion; very wide ones round a
    continuous Gaussian (total variation O(t/s), far below delta there).
    """
    if float(s) <= 0 or not 0 < delta < 1:
        raise ValueError("need s > 0 and delta in (0,1)")
    t = math.sqrt(math.log(2.0 / delta) + 2.0)
    return _z_gaussian(s, c, t, delta, rng)


_WEIGHT_WINDOW_CAP = 4_000_000


def _z_gaussian(s, c, t: float, delta: float, rng) -> int:
    """Windowed integer Gaussian: |output - c| <= s*t always."""
    sf = float(s)
    cf = float(c)
    span = 2 * t * sf
    if span <= 4096 or (span <= _WEIGHT_WINDOW_CAP
                        and 2 * math.pi * t / sf > delta / 4):
        lo = math.ceil(cf - sf * t)
        hi = math.floor(cf + sf * t)
        if lo > hi:
            return round(cf)
        weights = [math.exp(-math.pi * (z - cf) ** 2 / (sf * sf))
                   for z in range(lo, hi + 1)]
        total = sum(weights)
        u = rng.random() * total
        acc = 0.0
        for z, w in zip(range(lo, hi + 1), weights):
            acc += w
            if u <= acc:
                return z
        return hi
    if 2 * math.pi * t / sf > delta / 4:
        raise ValueError("no admissible integer-Gaussian regime "
                         f"(s={sf:.3g}, delta={delta:.3g})")
    # rounded continuous Gaussian, exact big-int arithmetic on the center
    s_q = Q(s) if not isinstance(s, float) else Q(sf).limit_denominator(1 << 40)
    c_q = Q(c) if not isinstance(c, float) else Q(cf).limit_denominator(1 << 40)
    sigma_cont = s_q * Q(math.floor(2 ** 40 / math.sqrt(2 * math.pi)), 2 ** 40)
    bound = s_q * Q(math.ceil(t * 2 ** 20), 2 ** 20)
    while True:
        g = rng.gauss(0.0, 1.0)
        offset = sigma_cont * Q(g).limit_denominator(1 << 48)
        z = _round_half(c_q + offset)
        if abs(Q(z) - c_q) <= bound:
            return z


def klein_window_t(n: int, eps_g: float) -> float:
    """The per-coordinate truncation t = sqrt(log(2 n^2 / eps))."""
    return math.sqrt(math.log(2.0 * n * n / eps_g))


def klein_min_width(basis_cols, eps_g: float) -> float:
    """Smallest admissible s: sqrt((log(1/eps)+2 log n+3)/pi) max||b_i||."""
    n = len(basis_cols)
    maxn = max(math.sqrt(float(dot([Q(x) for x in c], [Q(x) for x in c])))
               for c in basis_cols)
    return math.sqrt((math.log(1 / eps_g) + 2 * math.log(n) + 3) / math.pi) * maxn


def klein_sample(basis_cols, s, center, eps_g, rng):
    """GPV/Klein sampler over the lattice spanned by the rational columns.

    Returns (coeffs, vector).  Every output satisfies the hard bound
    ||v - c|| <= s sqrt(n log(2 n^2 / eps_g)) by per-coordinate windowing.
    """
    n = len(basis_cols)
    s = Q(s)
    if float(s) < klein_min_width(basis_cols, eps_g) * (1 - 1e-12):
        raise ValueError("Gaussian width below the sampler's precondition")
    center = [Q(x) for x in center]
    bstar, mu, _ = lattice_core.gso([list(map(Q, c)) for c in basis_cols])
    d = [dot(b, b) for b in bstar]
    delta = eps_g / (2 * n)
    t = math.sqrt(math.log(n / delta))
    c_res = list(center)
    coeffs = [0] * n
    for i in range(n - 1, -1, -1):
        ci = dot(c_res, bstar[i]) / d[i]
        lo_s, hi_s = sqrt_bracket(Q(s) * Q(s) / d[i], 64)
        si = (lo_s + hi_s) / 2
        z = _z_gaussian(si, ci, t, delta, rng)
        coeffs[i] = z
        c_res = [a - z * b for a, b in zip(c_res, basis_cols[i])]
    vec = [Q(0)] * len(basis_cols[0])
    for i in range(n):
        vec = [a + coeffs[i] * Q(b) for a, b in zip(vec, basis_cols[i])]
    return coeffs, vec


def smoothing_upper(minima_sq_last: Fraction, n: int, eps: float) -> float:
    """eta_eps(L) <= sqrt(log(2n(1+1/eps))/pi) * lambda_n."""
    return math.sqrt(math.log(2 * n * (1 + 1 / eps)) / math.pi) * math.sqrt(
        float(minima_sq_last))


def gaussian_tail_discrete(s: float, n: int, eps: float) -> float:
    """Banaszczyk-type: Pr[||x|| >= s sqrt(log(1/eps) + 2n)] <= eps."""
    return s * math.sqrt(math.log(1 / eps) + 2 * n)


def gaussian_tail_continuous(s: float, n: int, eps: float) -> float:
    """Chernoff/union: Pr[||x|| >= s sqrt(2n log(2n/eps))] <= eps."""
    return s * math.sqrt(2 * n * math.log(2 * n / eps))


# ---------------------------------------------------------------------------
# Perfectly uniform sampling in box x lattice


@dataclass
class AxisBox:
    """Product of intervals and discs in the real Minkowski coordinates.

    intervals: list of (coord index, halfwidth RadiusExpr-scaled) for the
    1-dim factors; discs: list of ((i, j), radius) pairs of coordinates.
    Halfwidths/radii are RadiusExpr values so membership stays exact.
    """
    intervals: list
    discs: list


class RadiusExpr:
    """A positive real of the form (rational)^(1/k): supports exact
    comparison with rationals, scaling by rationals, and brackets."""

    __slots__ = ("pow_value", "k")

    def __init__(self, pow_value: Fraction, k: int):
        self.pow_value = Q(pow_value)
        self.k = int(k)
        if self.pow_value < 0:
            raise ValueError("negative radius power")

    @staticmethod
    def exact(x) -> "RadiusExpr":
        return RadiusExpr(Q(x), 1)

    def scale(self, c) -> "RadiusExpr":
        c = Q(c)
        if c < 0:
            raise ValueError
        return RadiusExpr(self.pow_value * c ** self.k, self.k)

    def cmp_value(self, v: Fraction) -> int:
        """sign(v - r) for rational v >= 0."""
        v = Q(v)
        if v < 0:
            return -1
        lhs = v ** self.k
        if lhs < self.pow_value:
            return -1
        if lhs > self.pow_value:
            return 1
        return 0

    def cmp_value_sq(self, v_sq: Fraction) -> int:
        """sign(sqrt(v_sq) - r) for rational v_sq >= 0."""
        lhs = Q(v_sq) ** self.k
        rhs = self.pow_value ** 2
        return -1 if lhs < rhs else (1 if lhs > rhs else 0)

    def bracket(self, prec: int = 64):
        return intmath.rational_root_bracket(self.pow_value, self.k, prec)

    def floor_times(self, c: Fraction) -> int:
        """floor(c * r) for rational c >= 0."""
        c = Q(c)
        return intmath.rational_root_floor(self.pow_value * c ** self.k, self.k)

    def __float__(self):
        lo, hi = self.bracket(53)
        return float((lo + hi) / 2)

    def __repr__(self):
        return f"RadiusExpr({float(self):.6g} = ({self.pow_value})^(1/{self.k}))"


def walk_radius(field: NumberField, modulus_norm: Fraction, blocksize: int,
                omega, constant: int = RADIUS_CONSTANT) -> RadiusExpr:
    """RADIUS(m) = const * omega * b^(2n/b) * n^(7/2) * |D|^(3/(2n)) * N(m)^(1/n),
    held exactly as a (2 b n)-th root of a rational."""
    n = field.n
    b = blocksize
    k = 2 * b * n
    val = (Q(constant * Q(omega)) ** k
           * Q(b) ** (4 * n * n)
           * Q(n) ** (7 * b * n)
           * Q(abs(field.disc_field)) ** (3 * b)
           * Q(modulus_norm) ** (2 * b))
    return RadiusExpr(val, k)


@dataclass
class BoxSpec:
    radius: RadiusExpr
    half_real_places: list       # real place indices carrying a sign constraint
    signs: list                  # the sign of sigma(tau) at those places
    shift: object = None


def perfect_box_grid(cols, grid_n: int, box: "GridBox", c_scale, eps, rng):
    """Perfectly uniform sample from c*S intersected with the lattice
    spanned by cols (subset of (1/N)Z^n).

    box describes S as a product of symmetric intervals/discs with
    RadiusExpr halfwidths; returns integer coefficient vector or None.
    """
    n = len(cols)
    cols = [[Q(x) for x in c] for c in cols]
    for col in cols:
        for x in col:
            if (x * grid_n).denominator != 1:
                raise ValueError("basis columns must lie in (1/N)Z^n")
    u = _uniform_grid_point(box, grid_n, Q(c_scale) + Q(eps), rng)
    binv = mat_inv(transpose(cols))
    v = mat_vec(binv, u)
    w = [_round_half(x) for x in v]
    out = [Q(0)] * len(cols[0])
    for i in range(n):
        out = [a + w[i] * b for a, b in zip(out, cols[i])]
    if _box_member(box, out, Q(c_scale)):
        return w
    return None


def _round_half(x: Fraction) -> int:
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


@dataclass
class GridBox:
    """Centered product of intervals and discs, RadiusExpr sizes."""
    intervals: list   # (coord, RadiusExpr halfwidth)
    discs: list       # ((coord_i, coord_j), RadiusExpr radius)

    def dim(self):
        return len(self.intervals) + 2 * len(self.discs)


def _uniform_grid_point(box: GridBox, grid_n: int, scale, rng):
    """Exactly uniform point of scale*box intersected with (1/N)Z^dim."""
    dim = box.dim()
    out = [Q(0)] * dim
    for coord, hw in box.intervals:
        kmax = hw.floor_times(Q(scale) * grid_n)
        out[coord] = Q(rng.randint(-kmax, kmax), grid_n)
    for (ci, cj), rad in box.discs:
        kmax = rad.floor_times(Q(scale) * grid_n)
        r_scaled = rad.scale(Q(scale))
        while True:
            k1 = rng.randint(-kmax, kmax)
            k2 = rng.randint(-kmax, kmax)
            v_sq = Q(k1 * k1 + k2 * k2, grid_n * grid_n)
            if r_scaled.cmp_value_sq(v_sq) <= 0:
                out[ci] = Q(k1, grid_n)
                out[cj] = Q(k2, grid_n)
                break
    return out


def _box_member(box: GridBox, point, scale) -> bool:
    for coord, hw in box.intervals:
        if hw.scale(scale).cmp_value(abs(Q(point[coord]))) > 0:
            return False
    for (ci, cj), rad in box.discs:
        v_sq = Q(point[ci]) ** 2 + Q(point[cj]) ** 2
        if rad.scale(scale).cmp_value_sq(v_sq) > 0:
            return False
    return True


def perfect_box_lattice(c_cols, grid_n: int, t_tilde, box: GridBox, eps,
                        membership_oracle, rng, inner_cap: int = 200):
    """One attempt of the shifted-lattice perfect sampler.

    c_cols approximates the true basis B in (1/N)Z^n; t_tilde approximates
    the shift.  Draws u until the (1+3eps) pre-filter accepts, then makes
    a single call to the exact membership oracle on the integer vector
    v + w0 and returns the oracle's payload (or None on failure).
    """
    n = len(c_cols)
    cinv = mat_inv(transpose([[Q(x) for x in c] for c in c_cols]))
    w0 = [_round_half(x) for x in mat_vec(cinv, [Q(x) for x in t_tilde])]
    eps = Q(eps)
    for _ in range(inner_cap):
        u = _uniform_grid_point(box, grid_n, 1 + 4 * eps, rng)
        v = [_round_half(x) for x in mat_vec(cinv, u)]
        cv = [Q(0)] * len(c_cols[0])
        for i in range(n):
            cv = [a + v[i] * Q(b) for a, b in zip(cv, c_cols[i])]
        if _box_member(box, cv, 1 + 3 * eps):
            cand = [vi + wi for vi, wi in zip(v, w0)]
            return membership_oracle(cand)
    return None


# ---------------------------------------------------------------------------
# Algorithm: uniform sampling in x((b + gamma) cap tau K^{m,1}) cap r B_inf


@dataclass
class BoxSampleResult:
    beta: FieldElement          # the algebraic part: x*beta lies in the box
    radius: RadiusExpr
    draws: int
    reduced_basis: list
    gamma_red: FieldElement


@dataclass
class SamplerConfig:
    radius_constant: int = RADIUS_CONSTANT
    retry_cap: int = RETRY_CAP
    grid_n_override: int | None = None
    time_budget: float | None = 120.0   # wall seconds per box-sampler call


def _real_coord_layout(field: NumberField):
    """Coordinate layout of the real Minkowski space: list of
    ('real', place) or ('cplx', place, (i, j))."""
    out = []
    idx = 0
    for i in range(field.n_real):
        out.append(("real", i, idx))
        idx += 1
    for k in range(field.n_cplx):
        out.append(("cplx", field.n_real + k, (idx, idx + 1)))
        idx += 2
    return out


def instantiate_grid_n(field: NumberField, omega, constant: int) -> int:
    """The grid denominator N: n^(n/2+2) |D|^2 (2n)^n e^(2n^2/e)
    * const*omega*e^(2n/e)*n^3, rounded up with certified e-powers."""
    n = field.n
    d = abs(field.disc_field)
    e_up1 = math.exp(2 * n * n / math.e) * (1 + 1e-9) + 1
    e_up2 = math.exp(2 * n / math.e) * (1 + 1e-9) + 1
    val = (n ** (n // 2 + 2) * n * d * d * (2 * n) ** n * e_up1
           * constant * float(omega) * e_up2 * n ** 3)
    return int(math.ceil(val))


def sample_in_box(field: NumberField, m0: HnfIdeal | None, m_inf: list[int],
                  b_ideal: HnfIdeal, gamma: FieldElement, tau: FieldElement,
                  blocksize: int, x, omega, rng,
                  cfg: SamplerConfig | None = None,
                  reduced_cache: dict | None = None) -> BoxSampleResult:
    """Uniform sampling in x((b + gamma) cap tau K^{m,1}) cap r B_inf,
    r = RADIUS(x b m0).  Returns the algebraic element beta with
    beta in (b + gamma) cap tau K^{m,1} and x*beta inside the box.
    """
    cfg = cfg or SamplerConfig()
    n = field.n
    ok_ring = HnfIdeal.ring_of_integers(field)
    m0 = m0 or ok_ring
    bm = hnf_mul(b_ideal, m0) if m0 != ok_ring else b_ideal
    x = [Q(v) for v in x]
    norm_total = b_ideal.norm() * m0.norm()
    for v in x:
        norm_total *= v
    radius = walk_radius(field, norm_total, blocksize, omega,
                         cfg.radius_constant)

    # (1) reduced basis of x * b * m0 with the radiusboundofD check
    cache_key = (bm, tuple(x), blocksize)
    if reduced_cache is not None and cache_key in reduced_cache:
        red = reduced_cache[cache_key]
    else:
        red = approx_bkz_ideal(x, bm, blocksize)
        if reduced_cache is not None:
            reduced_cache[cache_key] = red
    cols_balls = _columns_with_x(field, red.elements, x, red.precision_bits)
    for col in cols_balls:
        norm_sq_up = sum((abs(c.mid) + c.rad) ** 2 for c in col)
        # || x b_i || <= r / (24 n^2): compare squares times (24 n^2)^2
        if radius.cmp_value_sq(norm_sq_up * Q(RADIUS_C_HALF * n * n) ** 2) > 0:
            raise ValueError("reduced basis too long for the radius "
                             "(radiusboundofD check failed)")

    # (2) modulus-aware shift gamma_m with gamma_m = tau mod m0
    if m0 == ok_ring:
        gamma_m = gamma
    else:
        gamma_m = _crt_shift(field, b_ideal, m0, gamma, tau)

    # (3) reduce gamma_m modulo the reduced basis (exact rational solve)
    gamma_red = _babai_reduce(field, gamma_m, red.elements)

    # (4) box: per-place halfwidths; sign-constrained real places get
    # halfwidth r/2 and center sign(tau)*r/2; complex pairs become discs
    # of radius sqrt(2) r in the isometric coordinates
    layout = _real_coord_layout(field)
    intervals, discs = [], []
    shift_centers = {}
    tau_signs = {}
    for kind, place, pos in layout:
        if kind == "real":
            if place in m_inf:
                sgn = field.sign_at_real_place(tau, place)
                if sgn == 0:
                    raise ValueError("tau vanishes at a constrained place")
                tau_signs[place] = sgn
                intervals.append((pos, radius.scale(Q(1, 2))))
                shift_centers[pos] = sgn
            else:
                intervals.append((pos, radius))
        else:
            i, j = pos
            discs.append(((i, j), _radius_times_sqrt2(radius)))
    box = GridBox(intervals, discs)

    grid_n = cfg.grid_n_override or instantiate_grid_n(
        field, omega, cfg.radius_constant)
    # the instantiated N assumes a unit-scale lattice; rescale by the
    # certified lambda_1 lower bound when the ideal lattice is small
    from .approx_reduction import _lambda1_lower_sq
    lam1_sq = _lambda1_lower_sq(field, x, bm)
    if lam1_sq < 1:
        shift = (lam1_sq.denominator.bit_length()
                 - lam1_sq.numerator.bit_length()) // 2 + 2
        grid_n <<= max(0, shift)
    eps = Q(1, 6 * n)

    def oracle(coeff_vec):
        beta0 = gamma_red
        for cf, el in zip(coeff_vec, red.elements):
            if cf:
                beta0 = beta0 + el * cf
        if _in_tau_box(field, beta0, x, radius, m_inf, tau_signs):
            return beta0
        return None

    prec = max(red.precision_bits, 2 * grid_n.bit_length() + 96)
    draws = 0
    import time as _time
    t_start = _time.monotonic()
    while True:
        if cfg.time_budget and _time.monotonic() - t_start > cfg.time_budget:
            raise CapExceeded("box sampler time budget spent")
        cols = _columns_with_x(field, red.elements, x, prec)
        max_err = max(c.rad for col in cols for c in col)
        if max_err > Q(1, 4 * grid_n):
            prec *= 2
            continue
        c_cols = [[Q(_round_half(c.mid * grid_n), grid_n) for c in col]
                  for col in cols]
        g_col = _columns_with_x(field, [gamma_red], x, prec)[0]
        r_lo, r_hi = radius.bracket(prec)
        if r_hi - r_lo > Q(1, 4 * grid_n) or max(c.rad for c in g_col) > Q(1, 8 * grid_n):
            prec *= 2
            continue
        t_true = []
        for kind, place, pos in layout:
            if kind == "real":
                base = -g_col[pos].mid
                if pos in shift_centers:
                    base = base + shift_centers[pos] * (r_lo + r_hi) / 4
                t_true.append(base)
            else:
                i, j = pos
                t_true.append(-g_col[i].mid)
                t_true.append(-g_col[j].mid)
        t_tilde = [Q(_round_half(v * grid_n), grid_n) for v in t_true]
        while draws < cfg.retry_cap:
            if cfg.time_budget and _time.monotonic() - t_start > cfg.time_budget:
                raise CapExceeded("box sampler time budget spent")
            draws += 1
            got = perfect_box_lattice(c_cols, grid_n, t_tilde, box, eps,
                                      oracle, rng)
            if got is not None:
                return BoxSampleResult(got, radius, draws, red.elements,
                                       gamma_red)
        raise CapExceeded(f"box sampler failed after {draws} draws")


def _in_tau_box(field: NumberField, beta0: FieldElement, x,
                radius: RadiusExpr, m_inf, tau_signs) -> bool:
    """Exact membership: |x_s sigma(beta0)| <= r at all embeddings, and
    sign(sigma(beta0)) = sign(sigma(tau)) at constrained real places."""
    if beta0.is_zero():
        return False
    places = field.places()
    for pidx, (emb_idx, _n_nu) in enumerate(places):
        xval = Q(x[emb_idx])
        # |x sigma(beta)| > r  <=>  (|sigma|^2)^k > r^(2k)/x^(2k)
        verdict = cmp_element(beta0, pidx, xval, radius.pow_value,
                              radius.k, signed=False)
        if verdict == GT:
            return False
    for place in m_inf:
        if field.sign_at_real_place(beta0, place) != tau_signs[place]:
            return False
    return True


def _columns_with_x(field: NumberField, elements, x, prec: int):
    from .approx_reduction import minkowski_columns_x
    return minkowski_columns_x(field, elements, x, prec)


def _crt_shift(field: NumberField, b_ideal: HnfIdeal, m0: HnfIdeal,
               gamma: FieldElement, tau: FieldElement) -> FieldElement:
    """gamma_m in (b + gamma) with gamma_m = tau mod m0, via 1 = beta + mu."""
    if b_ideal.denom != 1 or m0.denom != 1:
        raise ValueError("CRT shift needs integral ideals")
    rows = [list(col) for col in b_ideal.hnf] + [list(col) for col in m0.hnf]
    one = []
    for c in field.one().coords:
        if Q(c).denominator != 1:
            raise ValueError("1 has non-integer coordinates in this basis")
        one.append(int(c))
    coeffs = qlinalg.express_int_combination(rows, one)
    if coeffs is None:
        raise ValueError("b and m0 are not coprime")
    n = field.n
    b_elts = b_ideal.basis_elements()
    beta = field.zero()
    for i in range(n):
        if coeffs[i]:
            beta = beta + b_elts[i] * coeffs[i]
    mu = field.one() - beta
    return tau * beta + gamma * mu


def _babai_reduce(field: NumberField, gamma_m: FieldElement,
                  basis_elements) -> FieldElement:
    """gamma_m minus its round-off in the given algebraic basis."""
    n = field.n
    cols = [list(e.coords) for e in basis_elements]
    t = mat_vec(mat_inv(transpose(cols)), list(gamma_m.coords))
    out = gamma_m
    for i in range(n):
        q = _round_half(Q(t[i]))
        if q:
            out = out - basis_elements[i] * q
    return out


def _radius_times_sqrt2(r: RadiusExpr) -> RadiusExpr:
    if r.k % 2 == 0:
        return RadiusExpr(r.pow_value * Q(2) ** (r.k // 2), r.k)
    return RadiusExpr(r.pow_value ** 2 * Q(2) ** r.k, 2 * r.k)
