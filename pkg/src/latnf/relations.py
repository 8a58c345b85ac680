"""Relation machinery: smoothness testing, the residue-dependent modulus
branch, single relations (walk + box + smooth test), Gaussian-input
random relations, and exceptional S-units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

from . import intmath, samplers
from .divisor_log import kessler_lambda1_lower, log_s_embed, LogSUnitVector
from .dyadic import Q, exp_ball
from .ideal_arith import (HnfIdeal, PrimeIdeal, hnf_inv, hnf_mul, ord_at,
                          primes_up_to)
from .ideal_walk import WalkParams, sample_beta, walk_params
from .nf_core import FieldElement, NumberField
from .samplers import SamplerConfig, walk_radius


class FactorBase:
    """Sorted duplicate-free list of prime ideals with HNF lookup."""

    def __init__(self, primes):
        seen = {}
        for p in primes:
            seen[p.hnf] = p
        self.primes = sorted(seen.values(), key=lambda p: p.sort_key())
        self._index = {p.hnf: i for i, p in enumerate(self.primes)}

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes)

    def __getitem__(self, i):
        return self.primes[i]

    def index_of(self, prime: PrimeIdeal):
        return self._index.get(prime.hnf)

    def excluding(self, m0_primes):
        bad = {p.hnf for p in m0_primes}
        return FactorBase([p for p in self.primes if p.hnf not in bad])

    def rational_primes(self):
        return sorted({p.p for p in self.primes})


def smooth_factor(a: HnfIdeal, fb: FactorBase):
    """Exact valuation vector of a over the factor base, or None if the
    cofactor is nontrivial.  Verified by full reconstruction."""
    if not a.is_integral():
        raise ValueError("smooth_factor expects an integral ideal")
    field = a.field
    nrm = int(a.norm())
    vals = [0] * len(fb)
    for i, p in enumerate(fb):
        if nrm % p.p:
            continue
        vals[i] = ord_at(a, p)
    from latnf.ideal_arith import _prime_power
    recon = HnfIdeal.ring_of_integers(field)
    for p, v in zip(fb, vals):
        if v:
            recon = hnf_mul(recon, _prime_power(p, v))
    if recon != a:
        return None
    return vals


def smooth_density_lower(field: NumberField, a_cut, b_bound, x, rho_upper,
                         b_sm: int = 16) -> float:
    """Lower bound (4 log B)^(1-u) u^(-u) / (rho B) on the local density
    of ideals with prime factors of norm in (A, B]; preconditions are
    reported, never clamped."""
    if b_bound < b_sm:
        raise ValueError(f"B = {b_bound} below the smoothness floor {b_sm}")
    if a_cut > b_bound / (4 * math.log(b_bound)):
        raise ValueError("A exceeds B/(4 log B)")
    if x < b_bound * math.e ** field.n:
        raise ValueError("x below B e^n")
    u = math.log(x) / math.log(b_bound)
    return (4 * math.log(b_bound)) ** (1 - u) * u ** (-u) / (rho_upper * b_bound)


def branch_x(field: NumberField) -> float:
    """x = max(log^(2/3)|D| / log^(4/3) log|D|, n^(2/3)/log^(2/3) n)."""
    ld = math.log(abs(field.disc_field))
    n = field.n
    return max(ld ** (2 / 3) / math.log(ld) ** (4 / 3),
               n ** (2 / 3) / math.log(n) ** (2 / 3))


def modulus_branch(field: NumberField, rho_tilde: float,
                   x_override: float | None = None):
    """(x, m0, m0_primes): m0 = product of primes of norm < x when the
    residue estimate is large, trivial otherwise."""
    x = x_override if x_override is not None else branch_x(field)
    if rho_tilde <= math.exp(x * math.log(x) ** 2):
        return x, HnfIdeal.ring_of_integers(field), []
    prims = [p for p in primes_up_to(field, math.ceil(x))
             if p.norm() < x]
    m0 = HnfIdeal.ring_of_integers(field)
    for p in prims:
        m0 = hnf_mul(m0, p.hnf)
    return x, m0, prims


@dataclass
class RelationConfig:
    b_sm: int = 16
    b_rw: int = 16
    budget_c: Fraction = Q(1)
    attempt_cap: int = 250
    time_budget: float = 90.0     # wall seconds per relation input, then redraw
    kessler_c: int = 1000
    rr_bound: float | None = None
    blocksize: int | None = None          # default max(2, ceil(n^(2/3)))
    omega_override: int | None = None
    walk_b_override: int | None = None
    sampler: SamplerConfig | None = None
    x_override: float | None = None
    eps_override: Fraction | None = None


def default_blocksize(field: NumberField) -> int:
    return max(2, min(field.n, math.ceil(field.n ** (2 / 3))))


def choose_omega(field: NumberField, m0_norm, blocksize, x, cfg: RelationConfig,
                 constant=None) -> int:
    """Smallest positive integer omega with
    r^n >= e^n max(B_sm, B_rw, 10 x^2)."""
    if cfg.omega_override is not None:
        return cfg.omega_override
    target = math.e ** field.n * max(cfg.b_sm, cfg.b_rw, 10 * x * x)
    target_q = Q(math.ceil(target * 2 ** 20), 2 ** 20)
    omega = 1
    const = constant if constant is not None else (
        cfg.sampler.radius_constant if cfg.sampler else samplers.RADIUS_CONSTANT)
    while True:
        r = walk_radius(field, Q(m0_norm), blocksize, omega, const)
        # r^n >= target  <=>  pow^n >= target^k
        if r.pow_value ** field.n >= target_q ** r.k:
            return omega
        omega += 1


def b_max_bound(field: NumberField, m0_norm, blocksize, omega, x,
                cfg: RelationConfig) -> float:
    """max(exp(sqrt(log r^n loglog r^n)), B_sm, B_rw, 10 x^2)."""
    r = walk_radius(field, Q(m0_norm), blocksize, omega)
    _lo, hi = r.bracket(40)
    log_rn = field.n * math.log(float(hi))
    return max(math.exp(math.sqrt(log_rn * math.log(log_rn))),
               cfg.b_sm, cfg.b_rw, 10 * x * x)


@dataclass
class SUnitRelation:
    alpha: object                 # FieldElement (or CompactElement downstream)
    valuations: tuple             # v over fb: alpha O_K * a^{-1} = prod p^v
    total_valuations: tuple       # valuations of (alpha) over fb
    input_ideal: HnfIdeal
    attempts: int
    origin: object = None

    def log_s_vector(self, fb: FactorBase, prec: int = 64) -> LogSUnitVector:
        return log_s_embed(self.alpha, list(fb), prec)


@dataclass
class RelationStats:
    attempts: int = 0
    successes: int = 0
    soft_bound: float | None = None

    def rate(self):
        return self.successes / self.attempts if self.attempts else 0.0


def _walk_params_for(field: NumberField, m0: HnfIdeal, blocksize: int,
                     omega, cfg: RelationConfig) -> WalkParams:
    m0_norm = int(m0.norm())
    r = walk_radius(field, Q(m0_norm), blocksize, omega)
    _lo, hi = r.bracket(40)
    rn_up = math.ceil(float(hi) ** field.n)
    if cfg.eps_override is not None:
        eps = cfg.eps_override
    else:
        eps = Q(1, 1200 * abs(field.disc_field) * rn_up)
        cap = min(Q(1), Q(20, field.n))
        if eps >= cap:
            eps = cap / 2
    return walk_params(field, m0 if m0_norm > 1 else None, [], eps,
                       omega=omega, blocksize=blocksize,
                       b_override=cfg.walk_b_override)


def compute_one_relation(field: NumberField, a: HnfIdeal, fb: FactorBase,
                         y, rng, cfg: RelationConfig, rho_tilde: float,
                         stats: RelationStats | None = None) -> SUnitRelation:
    """Algorithm: residue branch, then repeat the ideal sampler until
    alpha O_K a^{-1} is fb-smooth; outputs the verified relation."""
    blocksize = cfg.blocksize or default_blocksize(field)
    x, m0, m0_primes = modulus_branch(field, rho_tilde, cfg.x_override)
    if m0_primes and any(fb.index_of(p) is not None for p in m0_primes):
        raise ValueError("factor base may not contain divisors of m0")
    if any(ord_at(a, p) != 0 for p in m0_primes):
        raise ValueError("input ideal must be coprime to m0")
    omega = choose_omega(field, int(m0.norm()), blocksize, x, cfg)
    params = _walk_params_for(field, m0, blocksize, omega, cfg)
    tau = _sample_tau(field, m0, m0_primes, rng)
    stats = stats if stats is not None else RelationStats()
    a_inv = hnf_inv(a)
    m0_arg = m0 if int(m0.norm()) > 1 else None
    import time as _time
    t_start = _time.monotonic()
    for _ in range(cfg.attempt_cap):
        if _time.monotonic() - t_start > cfg.time_budget:
            raise samplers.CapExceeded(
                f"relation time budget spent after {stats.attempts} attempts")
        stats.attempts += 1
        try:
            trace = sample_beta(field, m0_arg, [], a, y, tau, params, rng,
                                cfg.sampler)
        except samplers.CapExceeded:
            continue
        rel_ideal = hnf_mul(HnfIdeal.principal(field, trace.beta), a_inv)
        vals = smooth_factor(rel_ideal, fb)
        if vals is None:
            continue
        stats.successes += 1
        total = [v + ord_at(a, p) for v, p in zip(vals, fb)]
        return SUnitRelation(trace.beta, tuple(vals), tuple(total), a,
                             stats.attempts, origin=trace)
    raise samplers.CapExceeded(
        f"no smooth relation after {cfg.attempt_cap} attempts")


def _sample_tau(field: NumberField, m0: HnfIdeal, m0_primes, rng) -> FieldElement:
    if int(m0.norm()) == 1:
        return field.one()
    ok = HnfIdeal.ring_of_integers(field)
    bound = int(m0.norm())
    for _ in range(10000):
        coords = [rng.randrange(bound) for _ in range(field.n)]
        tau = field.element(coords)
        if tau.is_zero():
            continue
        if all(ord_at(HnfIdeal.principal(field, tau), p) == 0
               for p in m0_primes):
            return tau
    raise RuntimeError("failed to sample a unit mod m0")


# ---------------------------------------------------------------------------
# Algorithm: random relation with Gaussian input


@dataclass
class RandomRelationConfig:
    relation: RelationConfig = dfield(default_factory=RelationConfig)
    sigma_override: float | None = None
    concentration_slack: float = 1e-6


def rr_default_bound(field: NumberField, fb: FactorBase) -> float:
    """Desk default for the generating-radius prior: 1.0, so the Gaussian
    width starts at 3 max(sqrt(log n0), 1) and the pipeline escalates it
    when verification reports a proper sublattice.  The paper's analytic
    bound poly(log|Delta|, max log N(p)) is available via cfg.rr_bound."""
    return 1.0


def rr_analytic_bound(field: NumberField, fb: FactorBase) -> float:
    mx = max((math.log(p.norm()) for p in fb), default=1.0)
    return 3 * max(1.0, math.log(abs(field.disc_field)), mx)


def grid_denominator(field: NumberField, omega: int) -> int:
    """Dyadic power of two at least omega^n exp(11 + 16 log^2|D| + 9 n^2)."""
    n = field.n
    log2_n = (n * math.log2(omega if omega > 1 else 1)
              + (11 + 16 * math.log(abs(field.disc_field)) ** 2 + 9 * n * n)
              * math.log2(math.e))
    return 2 ** math.ceil(log2_n + 1)


@dataclass
class RandomRelationOutput:
    vector: list                  # -(v_p + a_p) over fb
    relation: SUnitRelation
    gauss_point: list             # the sampled divisor coordinates
    sigma: float
    r0_bound: float


def random_relation(field: NumberField, fb: FactorBase, rng,
                    cfg: RandomRelationConfig | None = None,
                    rho_tilde: float | None = None) -> RandomRelationOutput:
    """Gaussian divisor input -> one relation; output lies in the
    Log-S-unit lattice, with a certified concentration bound checked."""
    cfg = cfg or RandomRelationConfig()
    rel_cfg = cfg.relation
    n = field.n
    r1 = field.n_real + field.n_cplx
    blocksize = rel_cfg.blocksize or default_blocksize(field)
    x, m0, m0_primes = modulus_branch(field, rho_tilde or 1.0,
                                      rel_cfg.x_override)
    omega = choose_omega(field, int(m0.norm()), blocksize, x, rel_cfg)
    rr_b = rel_cfg.rr_bound if rel_cfg.rr_bound is not None else (
        rr_default_bound(field, fb))
    sigma = cfg.sigma_override or 3 * max(math.sqrt(math.log(r1 + len(fb))), rr_b)
    grid_n = grid_denominator(field, omega)
    # Klein over Div_{K,S,N}: standard basis e_p, plus e_nu / N
    dim = len(fb) + r1
    cols = []
    for i in range(len(fb)):
        col = [Q(0)] * dim
        col[i] = Q(1)
        cols.append(col)
    for j in range(r1):
        col = [Q(0)] * dim
        col[len(fb) + j] = Q(1, grid_n)
        cols.append(col)
    sigma_q = Q(math.ceil(sigma * 2 ** 12), 2 ** 12)
    eps_g = 1 / 100
    log2_norms = [math.log2(p.norm()) for p in fb]
    size_clamp = 1.5 * 0.8 * sigma * sum(log2_norms) + 64
    rel = None
    for _redraw in range(24):
        _coeffs, vec = samplers.klein_sample(cols, sigma_q, [Q(0)] * dim,
                                             eps_g, rng)
        a_p = [int(v) for v in vec[:len(fb)]]
        b_nu = [Q(v) for v in vec[len(fb):]]
        # oversized ideals make single attempts disproportionately slow;
        # redraw instead (the verification loop, not the sampler, gates
        # correctness)
        if sum(abs(a) * l for a, l in zip(a_p, log2_norms)) > size_clamp:
            continue
        # a-ideal and rational y close to exp of the infinite part
        a_ideal = HnfIdeal.ring_of_integers(field)
        for p, e in zip(fb, a_p):
            step = p.hnf if e > 0 else hnf_inv(p.hnf)
            for _ in range(abs(e)):
                a_ideal = hnf_mul(a_ideal, step)
        rel_bits = grid_n.bit_length() + 16
        y = [Q(1)] * n
        for (emb_idx, nnu), b in zip(field.places(), b_nu):
            val = exp_ball(Q(b) / nnu, rel_bits).mid
            y[emb_idx] = val
            if nnu == 2:
                y[emb_idx + 1] = val
        try:
            rel = compute_one_relation(field, a_ideal, fb, y, rng, rel_cfg,
                                       rho_tilde if rho_tilde is not None else 1.0)
            break
        except samplers.CapExceeded:
            continue      # redraw the Gaussian input
    if rel is None:
        raise samplers.CapExceeded("random relation: every Gaussian redraw "
                                   "exhausted its attempt cap")
    out_vec = [-(v + ap) for v, ap in zip(rel.valuations, a_p)]
    # identity check: the finite part of Log_S(alpha) equals out_vec
    lsv = rel.log_s_vector(fb)
    if list(lsv.val_part) != out_vec:
        raise RuntimeError("relation valuation identity failed")
    r0 = concentration_bound(field, fb, sigma, rel.origin.params)
    norm_sq = float(lsv.norm_sq().hi())
    if math.sqrt(norm_sq) > r0 + cfg.concentration_slack:
        raise RuntimeError("concentration bound violated")
    return RandomRelationOutput(out_vec, rel, a_p + [float(b) for b in b_nu],
                                sigma, r0)


def concentration_bound(field: NumberField, fb: FactorBase, sigma: float,
                        params: WalkParams) -> float:
    """Certified per-sample bound: the Klein hard bound 3 sigma n0 plus
    the boundedness-property terms of the sampler."""
    n = field.n
    n0 = len(fb) + field.n_real + field.n_cplx
    r = walk_radius(field, Q(1), params.blocksize, params.omega)
    _lo, hi = r.bracket(40)
    log_bnrn = (params.walk_length * math.log(params.prime_bound)
                + n * math.log(float(hi)))
    tail = float(params.s) * math.sqrt(n * math.log(8 * n * n / float(params.eps)))
    return 3 * sigma * n0 + 5 * log_bnrn + tail + 1.0


# ---------------------------------------------------------------------------
# Exceptional S-units


def exceptional_unit(field: NumberField, q: PrimeIdeal, fb: FactorBase,
                     m0: HnfIdeal, m0_primes, rng,
                     cfg: RelationConfig) -> SUnitRelation:
    """alpha with alpha O_K = q * prod_{p in fb} p^{v_p} (ord_q = 1),
    sampled through the modulus m0/q."""
    if ord_at(m0, q) == 0:
        raise ValueError("q must divide m0")
    if any(fb.index_of(p) is not None for p in m0_primes):
        raise ValueError("factor base may not contain divisors of m0")
    m0_over_q = hnf_mul(m0, hnf_inv(q.hnf))
    blocksize = cfg.blocksize or default_blocksize(field)
    x = cfg.x_override if cfg.x_override is not None else branch_x(field)
    omega = choose_omega(field, int(m0_over_q.norm()), blocksize, x, cfg)
    params = _walk_params_for(field, m0_over_q, blocksize, omega, cfg)
    rest = [p for p in m0_primes if p != q]
    tau = _sample_tau(field, m0_over_q, rest, rng) if int(
        m0_over_q.norm()) > 1 else field.one()
    q_inv = hnf_inv(q.hnf)
    m0_arg = m0_over_q if int(m0_over_q.norm()) > 1 else None
    attempts = 0
    for _ in range(cfg.attempt_cap):
        attempts += 1
        trace = sample_beta(field, m0_arg, [], q.hnf, [Q(1)] * field.n, tau,
                            params, rng, cfg.sampler)
        rel_ideal = hnf_mul(HnfIdeal.principal(field, trace.beta), q_inv)
        vals = smooth_factor(rel_ideal, fb)
        if vals is None:
            continue
        return SUnitRelation(trace.beta, tuple(vals), tuple(vals), q.hnf,
                             attempts, origin=trace)
    raise samplers.CapExceeded(
        f"no exceptional unit after {cfg.attempt_cap} attempts")


def sample_budget(field: NumberField, s_size: int, sigma: float, k: int,
                  c: float = 1.0) -> int:
    """6k + 6(|S|+r)[log((|S|+r) sigma) + C loglog|D|]: a hint, not a
    guarantee (verification is by the determinant check)."""
    r = field.n_real + field.n_cplx - 1
    m = s_size + r
    if m == 0:
        return 6 * k
    return math.ceil(6 * k + 6 * m * (math.log(m * sigma)
                                      + c * math.log(math.log(abs(field.disc_field)))))
