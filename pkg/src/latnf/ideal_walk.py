"""The ideal sampler: random-walk prime multiplication, Gaussian
distortion on the discretized hyperplane, box sampling; plus the
per-sample hard checks (membership, congruence, signs, norm bound,
boundedness) and the shifting/norm-independence experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from . import intmath, samplers
from .divisor_log import (Divisor, ideal_divisor_zero, log_embedding,
                          principal_divisor)
from .dyadic import Q, RealBall, exp_ball
from .ideal_arith import HnfIdeal, hnf_mul, sample_prime_uniform
from .nf_core import FieldElement, NumberField
from .samplers import (BoxSampleResult, CapExceeded, SamplerConfig,
                       klein_sample, sample_in_box, walk_radius)


@dataclass
class WalkParams:
    prime_bound: int          # B
    walk_length: int          # N
    s: Fraction               # Gaussian width on H, 1/n^2
    eps: Fraction             # error budget
    delta: Fraction           # dyadic grid parameter
    omega: Fraction
    blocksize: int

    def as_dict(self):
        return {"B": self.prime_bound, "N": self.walk_length,
                "s": str(self.s), "eps": str(self.eps),
                "delta_log2": self.delta.denominator.bit_length() - 1
                if self.delta < 1 else float(self.delta),
                "omega": str(self.omega), "blocksize": self.blocksize}


def walk_params(field: NumberField, m0: HnfIdeal | None, m_inf,
                eps, omega=1, blocksize=2, b_override: int | None = None,
                index: int = 1) -> WalkParams:
    """Walk length, prime bound and grid parameter from the paper's
    formulas, with the Pic-volume term replaced by its certified upper
    bound log(N(m0) 2^{|mR|}) + log|Delta|."""
    n = field.n
    eps = Q(eps)
    if not 0 < eps < min(1, Q(20, n)):
        raise ValueError("eps must lie in (0, min(1, 20/n))")
    m0_norm = int(m0.norm()) if m0 is not None else 1
    pic_bound = math.log(m0_norm * 2 ** len(m_inf)) + math.log(abs(field.disc_field))
    walk_n = math.ceil(7 * n + 2 * math.log(1 / float(eps)) + pic_bound
                       - math.log(index) + 2)
    if b_override is not None:
        prime_b = b_override
    else:
        prime_b = max(50, math.ceil(12 * math.log(abs(field.disc_field)) ** 2
                                    * m0_norm ** 2))
    s = Q(1, n * n)
    delta = _delta_dyadic(field, eps, omega, s)
    return WalkParams(prime_b, walk_n, s, eps, delta, Q(omega), blocksize)


def _delta_dyadic(field: NumberField, eps: Fraction, omega, s: Fraction) -> Fraction:
    """Largest dyadic below the displayed delta formula, computed in
    log2 space with a safety margin."""
    n = field.n
    e40 = float(eps) / 40
    expo = 4 * n * n * float(s) + 1
    log2_delta = (expo * math.log2(e40) + math.log2(float(s))
                  - n * math.log2(float(omega))
                  - 10 * n * n * math.log2(math.e)
                  - math.log2(abs(field.disc_field))
                  - 0.5 * math.log2(n * math.log(2 * n / e40)))
    k = math.floor(log2_delta) - 2
    return Q(1, 2 ** (-k)) if k < 0 else Q(2) ** k


@dataclass
class WalkTrace:
    primes: list
    grid_point: list          # the exact Gaussian grid sample on H
    distortion: list          # the rational A_sigma per embedding
    beta: FieldElement
    b_tilde: HnfIdeal
    draws: int
    params: WalkParams
    input_ideal: HnfIdeal
    input_y: list
    m0_norm: Fraction = Q(1)


def hyperplane_basis(field: NumberField, delta: Fraction):
    """Basis (delta/n)(e_i - e_{i+1}) of the discretized hyperplane."""
    r1 = field.n_real + field.n_cplx
    scale = Q(delta) / field.n
    cols = []
    for i in range(r1 - 1):
        col = [Q(0)] * r1
        col[i] = scale
        col[i + 1] = -scale
        cols.append(col)
    return cols


def sample_beta(field: NumberField, m0: HnfIdeal | None, m_inf,
                b_ideal: HnfIdeal, y, tau: FieldElement,
                params: WalkParams, rng,
                cfg: SamplerConfig | None = None) -> WalkTrace:
    """One run of the ideal sampler: returns beta with its full trace.

    y is the positive rational distortion per embedding; tau must be
    coprime to m0 (congruence and sign conditions are taken from it).
    """
    n = field.n
    y = [Q(v) for v in y]
    # walk part: multiply by N uniform primes
    primes = []
    b_tilde = b_ideal
    for _ in range(params.walk_length):
        p = sample_prime_uniform(field, params.prime_bound, m0, None, rng)
        primes.append(p)
        b_tilde = hnf_mul(b_tilde, p.hnf)
    # Gaussian distortion on the discretized hyperplane
    r1 = field.n_real + field.n_cplx
    if r1 >= 2:
        basis = hyperplane_basis(field, params.delta)
        eps_g = float(params.eps) / 4
        _coeffs, grid = klein_sample(basis, params.s, [Q(0)] * r1, eps_g, rng)
    else:
        grid = [Q(0)]
    # rational A_sigma with |A/exp(a_nu / n_nu) - 1| <= delta/(2n)
    a_by_place = list(grid)
    rel_bits = max(8, (4 * n * (1 / params.delta)).numerator.bit_length() + 4)
    dist = [Q(1)] * n
    for (emb_idx, nnu), a_nu in zip(field.places(), a_by_place):
        val = exp_ball(Q(a_nu) / nnu, rel_bits)
        a_mid = val.mid
        dist[emb_idx] = a_mid
        if nnu == 2:
            dist[emb_idx + 1] = a_mid
    x = [d * yv for d, yv in zip(dist, y)]
    res = sample_in_box(field, m0, m_inf, b_tilde, field.zero(), tau,
                        params.blocksize, x, params.omega, rng, cfg)
    m0_norm = Q(m0.norm()) if m0 is not None else Q(1)
    return WalkTrace(primes, [Q(g) for g in grid], dist, res.beta, b_tilde,
                     res.draws, params, b_ideal, y, m0_norm)


# ---------------------------------------------------------------------------
# Per-sample hard checks


def check_membership(trace: WalkTrace) -> bool:
    return trace.b_tilde.contains(trace.beta)


def check_congruence(trace: WalkTrace, m0: HnfIdeal | None,
                     tau: FieldElement) -> bool:
    if m0 is None:
        return True
    field = trace.beta.field
    if m0 == HnfIdeal.ring_of_integers(field):
        return True
    return m0.contains(trace.beta - tau)


def check_signs(trace: WalkTrace, m_inf, tau: FieldElement) -> bool:
    field = trace.beta.field
    for place in m_inf:
        if (field.sign_at_real_place(trace.beta, place)
                != field.sign_at_real_place(tau, place)):
            return False
    return True


def check_norm_bound(trace: WalkTrace) -> bool:
    """|N(beta)| <= N(b) B^N r^n with r = RADIUS(m0), exactly."""
    field = trace.beta.field
    params = trace.params
    r = samplers.walk_radius(field, trace.m0_norm,
                             params.blocksize, params.omega)
    rhs_base = trace.input_ideal.norm() * Q(params.prime_bound) ** params.walk_length
    lhs = abs(trace.beta.norm())
    # compare lhs^k <= rhs_base^k * r^{nk} (r^k = pow_value)
    return lhs ** r.k <= rhs_base ** r.k * r.pow_value ** field.n


def boundedness_check(trace: WalkTrace, m0: HnfIdeal | None = None,
                      slack: float = 1e-6) -> bool:
    """||(beta)|| <= 5 log(B^N r^n) + ||a|| + s sqrt(n log(8 n^2/eps))."""
    field = trace.beta.field
    params = trace.params
    n = field.n
    prime_hint = list(trace.primes)
    div_b = principal_divisor(trace.beta, 96, finite_support=None)
    lhs = div_b.euclid_norm(96)
    r = samplers.walk_radius(field, trace.m0_norm,
                             params.blocksize, params.omega)
    r_lo, r_hi = r.bracket(64)
    log_bnrn = (params.walk_length * math.log(params.prime_bound)
                + n * math.log(float(r_hi)))
    a_div = input_divisor_norm(trace)
    rhs = (5 * log_bnrn + float(a_div.hi())
           + float(params.s) * math.sqrt(n * math.log(8 * n * n / float(params.eps))))
    return float(lhs.hi()) <= rhs + slack


def input_divisor_norm(trace: WalkTrace, prec: int = 64) -> RealBall:
    """||d0(b) + Log(y)|| for the walk input."""
    field = trace.beta.field
    d0 = ideal_divisor_zero(trace.input_ideal, prec)
    y_logs = []
    for (emb_idx, nnu) in field.places():
        from .dyadic import log_ball
        y_logs.append(log_ball(Q(trace.input_y[emb_idx]), prec) * nnu)
    total = Divisor(field, d0.finite_part,
                    [a + b for a, b in zip(d0.infinite_part, y_logs)])
    return total.euclid_norm(prec)


# ---------------------------------------------------------------------------
# Statistical experiments


def chi2_two_sample(counts_a: dict, counts_b: dict) -> tuple[float, int]:
    """Two-sample chi-square statistic and degrees of freedom over the
    union of observed categories (small categories pooled)."""
    keys = sorted(set(counts_a) | set(counts_b), key=str)
    na = sum(counts_a.values())
    nb = sum(counts_b.values())
    stat = 0.0
    used = 0
    pooled_a = pooled_b = 0
    for k in keys:
        a = counts_a.get(k, 0)
        b = counts_b.get(k, 0)
        if a + b < 10:
            pooled_a += a
            pooled_b += b
            continue
        ea = (a + b) * na / (na + nb)
        eb = (a + b) * nb / (na + nb)
        stat += (a - ea) ** 2 / ea + (b - eb) ** 2 / eb
        used += 1
    if pooled_a + pooled_b >= 10:
        ea = (pooled_a + pooled_b) * na / (na + nb)
        eb = (pooled_a + pooled_b) * nb / (na + nb)
        stat += (pooled_a - ea) ** 2 / ea + (pooled_b - eb) ** 2 / eb
        used += 1
    return stat, max(1, used - 1)


def chi2_sf(stat: float, dof: int) -> float:
    """Survival function of the chi-square distribution (regularized
    upper incomplete gamma), float precision."""
    return _gammainc_upper(dof / 2.0, stat / 2.0)


def _gammainc_upper(a: float, x: float) -> float:
    if x < 0 or a <= 0:
        raise ValueError
    if x == 0:
        return 1.0
    if x < a + 1:
        # lower series
        term = 1.0 / a
        total = term
        k = a
        for _ in range(10000):
            k += 1
            term *= x / k
            total += term
            if abs(term) < abs(total) * 1e-15:
                break
        lower = total * math.exp(-x + a * math.log(x) - math.lgamma(a))
        return max(0.0, 1.0 - lower)
    # continued fraction for upper
    tiny = 1e-300
    b = x + 1 - a
    c = 1 / tiny
    d = 1 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1 / d
        delta = d * c
        h *= delta
        if abs(delta - 1) < 1e-15:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def shifting_experiment(field: NumberField, b_ideal: HnfIdeal, y,
                        alpha: FieldElement, n_samples: int, params: WalkParams,
                        rng, cfg=None, m0=None, m_inf=()):
    """Empirical check of D_{a+((alpha))}(. alpha) = D_a(.): runs the
    sampler on a and on the alpha-shifted input, pulls the second stream
    back by alpha, and chi-square-compares the two."""
    tau = field.one()
    counts_a: dict = {}
    counts_b: dict = {}
    shifted_ideal = hnf_mul(b_ideal, HnfIdeal.principal(field, alpha))
    # y' = y * |sigma(alpha)|^{-1}: rational only if the embeddings are;
    # instead fold alpha into the box by exact division of the output.
    pt = field.embed(alpha, 64)
    y_shift = []
    for emb_idx in range(field.n):
        a2 = pt.values[emb_idx].abs2()
        # rational approximation of |sigma(alpha)|^{-1}; statistical only
        approx = Q(1) / Q(math.sqrt(float(a2.mid))).limit_denominator(10 ** 9)
        y_shift.append(Q(y[emb_idx]) * approx)
    y_shift = _symmetrize_conj(field, y_shift)
    alpha_inv = alpha.inverse()
    for _ in range(n_samples):
        t1 = sample_beta(field, m0, list(m_inf), b_ideal, y, tau, params, rng, cfg)
        counts_a[t1.beta.coords] = counts_a.get(t1.beta.coords, 0) + 1
        t2 = sample_beta(field, m0, list(m_inf), shifted_ideal, y_shift, tau,
                         params, rng, cfg)
        pulled = t2.beta * alpha_inv
        counts_b[pulled.coords] = counts_b.get(pulled.coords, 0) + 1
    stat, dof = chi2_two_sample(counts_a, counts_b)
    return {"chi2": stat, "dof": dof, "p_value": chi2_sf(stat, dof),
            "support_a": len(counts_a), "support_b": len(counts_b)}


def _symmetrize_conj(field: NumberField, xs):
    out = list(xs)
    for k in range(field.n_cplx):
        j = field.n_real + 2 * k
        v = (out[j] + out[j + 1]) / 2
        out[j] = out[j + 1] = v
    return out
