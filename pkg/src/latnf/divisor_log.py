"""Divisors, degree and Exp/Log maps, S-unit log embeddings, and the
closed-form volume bounds attached to them.

Infinite coordinates are certified RealBalls throughout, so degrees,
norms and volumes all come with tracked error bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from . import intmath
from .dyadic import Q, RealBall, ball_exp, ball_sqrt, log_ball
from .ideal_arith import HnfIdeal, PrimeIdeal, hnf_inv, hnf_mul, kummer_dedekind, ord_at
from .nf_core import FieldElement, NumberField


class Divisor:
    """Finite support over prime ideals plus real coefficients at the
    infinite places (one per place, already weighted by nothing: the
    coefficient a_nu itself)."""

    def __init__(self, field: NumberField, finite_part=None, infinite_part=None):
        self.field = field
        self.finite_part: dict[PrimeIdeal, int] = dict(finite_part or {})
        self.finite_part = {p: int(e) for p, e in self.finite_part.items() if e != 0}
        places = field.places()
        if infinite_part is None:
            infinite_part = [RealBall(0) for _ in places]
        self.infinite_part = [v if isinstance(v, RealBall) else RealBall(Q(v))
                              for v in infinite_part]
        if len(self.infinite_part) != len(places):
            raise ValueError("one infinite coefficient per place required")

    def __add__(self, other):
        if self.field is not other.field:
            raise ValueError("divisors over different fields")
        fin = dict(self.finite_part)
        for p, e in other.finite_part.items():
            fin[p] = fin.get(p, 0) + e
        inf = [a + b for a, b in zip(self.infinite_part, other.infinite_part)]
        return Divisor(self.field, fin, inf)

    def __neg__(self):
        return Divisor(self.field, {p: -e for p, e in self.finite_part.items()},
                       [-v for v in self.infinite_part])

    def __sub__(self, other):
        return self + (-other)

    def scale_infinite(self, c) -> "Divisor":
        return Divisor(self.field, self.finite_part,
                       [v * Q(c) for v in self.infinite_part])

    def euclid_norm_sq(self) -> RealBall:
        acc = RealBall(Q(0))
        for e in self.finite_part.values():
            acc = acc + RealBall(Q(e * e))
        for v in self.infinite_part:
            acc = acc + v * v
        return acc

    def euclid_norm(self, prec=64) -> RealBall:
        return ball_sqrt(self.euclid_norm_sq(), prec)

    def __repr__(self):
        fin = {f"N={p.norm()}": e for p, e in self.finite_part.items()}
        return f"Divisor({fin}, {[float(v) for v in self.infinite_part]})"


def degree(d: Divisor, prec: int = 64) -> RealBall:
    """deg = sum a_p log N(p) + sum a_nu, exact finite part modulo the
    certified log balls."""
    acc = RealBall(Q(0))
    for p, e in d.finite_part.items():
        acc = acc + log_ball(Q(p.norm()), prec) * Q(e)
    for v in d.infinite_part:
        acc = acc + v
    return acc


def ideal_divisor(a: HnfIdeal, primes=None) -> Divisor:
    """d(a): the finite divisor of a factored over its support."""
    field = a.field
    support = primes if primes is not None else _support_primes(a)
    fin = {}
    for p in support:
        v = ord_at(a, p)
        if v:
            fin[p] = v
    # exactness check: product reconstructs a
    from .ideal_arith import _prime_power
    recon = HnfIdeal.ring_of_integers(field)
    for p, e in fin.items():
        step = _prime_power(p, abs(e))
        recon = hnf_mul(recon, step if e > 0 else hnf_inv(step))
    if recon != a:
        raise ValueError("support does not factor the ideal "
                         "(index-divisor prime or incomplete support)")
    return Divisor(field, fin, None)


def _support_primes(a: HnfIdeal) -> list[PrimeIdeal]:
    field = a.field
    nrm = a.norm()
    rationals = set(intmath.factorint(nrm.numerator or 1))
    rationals |= set(intmath.factorint(nrm.denominator))
    rationals |= set(intmath.factorint(a.denom))
    rationals.discard(1)
    out = []
    for p in sorted(rationals):
        for prime, _e in kummer_dedekind(field, p):
            out.append(prime)
    return out


def ideal_divisor_zero(a: HnfIdeal, prec: int = 64, primes=None) -> Divisor:
    """d0(a): degree-zero normalization of d(a)."""
    field = a.field
    d = ideal_divisor(a, primes=primes)
    lognorm = log_ball(Q(a.norm()), prec) if a.norm() != 1 else RealBall(Q(0))
    inf = []
    for _idx, nnu in field.places():
        inf.append(lognorm * Q(-nnu, field.n))
    return Divisor(field, d.finite_part, inf)


def principal_divisor(alpha: FieldElement, prec: int = 64,
                      finite_support=None) -> Divisor:
    """((alpha)): ord part over the support of (alpha), infinite part
    -n_nu log|sigma_nu(alpha)|; degree certified near zero."""
    if alpha.is_zero():
        raise ValueError("zero element has no divisor")
    field = alpha.field
    ideal = HnfIdeal.principal(field, alpha)
    fin = ideal_divisor(ideal, primes=finite_support).finite_part
    logv = log_embedding(alpha, prec)
    inf = [-v for v in logv.entries]
    return Divisor(field, fin, inf)


@dataclass
class LogVector:
    """Vector over the infinite places: entries n_nu*log|sigma_nu(.)|."""
    entries: list            # RealBall per place
    weights: list            # n_nu per place

    def norm_sq(self) -> RealBall:
        acc = RealBall(Q(0))
        for v in self.entries:
            acc = acc + v * v
        return acc

    def sum(self) -> RealBall:
        acc = RealBall(Q(0))
        for v in self.entries:
            acc = acc + v
        return acc


def log_embedding(alpha: FieldElement, prec: int = 64) -> LogVector:
    """Log(alpha) = (n_nu log|sigma_nu(alpha)|)_nu as certified balls."""
    if alpha.is_zero():
        raise ValueError("Log of zero")
    field = alpha.field
    entries = []
    weights = []
    work = prec + 16
    while True:
        pt = field.embed(alpha, work)
        try:
            entries = []
            for idx, nnu in field.places():
                a2 = pt.values[idx].abs2()
                if a2.lo() <= 0:
                    raise _NeedMore
                lg = _ball_log_interval(a2, prec + 8)
                entries.append(lg * Q(nnu, 2))
            break
        except _NeedMore:
            work *= 2
    weights = [nnu for _i, nnu in field.places()]
    return LogVector(entries, weights)


class _NeedMore(Exception):
    pass


def _ball_log_interval(b: RealBall, prec: int) -> RealBall:
    lo = log_ball(b.lo(), prec)
    hi = log_ball(b.hi(), prec)
    l, h = lo.lo(), hi.hi()
    return RealBall((l + h) / 2, (h - l) / 2)


@dataclass
class LogSUnitVector:
    """(-valuations over S, Log(alpha)): a Log-S-unit lattice point."""
    val_part: list           # ints, one per prime in S (negated valuations)
    inf_part: LogVector
    provenance: object       # the S-unit itself (plain or compact)

    def norm_sq(self) -> RealBall:
        acc = RealBall(Q(sum(v * v for v in self.val_part)))
        return acc + self.inf_part.norm_sq()

    def degree(self, s_primes, prec: int = 64) -> RealBall:
        acc = RealBall(Q(0))
        for v, p in zip(self.val_part, s_primes):
            acc = acc + log_ball(Q(p.norm()), prec) * Q(v)
        return acc + self.inf_part.sum()


def log_s_embed(alpha: FieldElement, s_primes: list[PrimeIdeal],
                prec: int = 64) -> LogSUnitVector:
    """Log_S(alpha) = ((-v_p)_p, Log(alpha)); errors if alpha is not an
    S-unit (reporting the first offending prime)."""
    field = alpha.field
    ideal = HnfIdeal.principal(field, alpha)
    vals = [ord_at(ideal, p) for p in s_primes]
    from .ideal_arith import _prime_power
    recon = HnfIdeal.ring_of_integers(field)
    for p, e in zip(s_primes, vals):
        if e:
            step = _prime_power(p, abs(e))
            recon = hnf_mul(recon, step if e > 0 else hnf_inv(step))
    if recon != ideal:
        offender = _first_offender(ideal, s_primes)
        raise ValueError(f"element is not an S-unit; offending prime {offender}")
    return LogSUnitVector([-v for v in vals], log_embedding(alpha, prec), alpha)


def _first_offender(ideal: HnfIdeal, s_primes):
    for p in _support_primes(ideal):
        if all(p != q for q in s_primes) and ord_at(ideal, p) != 0:
            return p
    return None


# ---------------------------------------------------------------------------
# Closed-form volumes and bounds


def exp_divisor(d: Divisor, prec: int = 64):
    """Exp(d): returns (x, a, vol) where x is the per-embedding positive
    distortion e^(a_nu / n_nu) (balls), a = prod p^(a_p), and vol is the
    certified ball sqrt|Delta| e^(deg d)."""
    field = d.field
    a = HnfIdeal.ring_of_integers(field)
    for p, e in d.finite_part.items():
        step = p.hnf if e > 0 else hnf_inv(p.hnf)
        for _ in range(abs(e)):
            a = hnf_mul(a, step)
    xs = []
    for (idx, nnu), coeff in zip(field.places(), d.infinite_part):
        scaled = coeff * Q(1, nnu)
        e_lo = ball_exp(RealBall(scaled.lo()), prec)
        e_hi = ball_exp(RealBall(scaled.hi()), prec)
        l, h = e_lo.lo(), e_hi.hi()
        ball = RealBall((l + h) / 2, (h - l) / 2)
        xs.append(ball)
        if nnu == 2:
            xs.append(ball)
    deg = degree(d, prec)
    e_lo = ball_exp(RealBall(deg.lo()), prec)
    e_hi = ball_exp(RealBall(deg.hi()), prec)
    ev = RealBall((e_lo.lo() + e_hi.hi()) / 2, (e_hi.hi() - e_lo.lo()) / 2)
    sq = ball_sqrt(RealBall(Q(abs(field.disc_field))), prec)
    return xs, a, sq * ev


def simplex_volume(field: NumberField, alpha: float) -> float:
    """vol of {b_nu <= n_nu*alpha, sum b = 0}: sqrt(r+1) (n alpha)^r / r!."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    r = field.n_real + field.n_cplx - 1
    return math.sqrt(r + 1) * (field.n * alpha) ** r / math.factorial(r)


def unit_lattice_covolume_target(field: NumberField, h: int, reg: float) -> float:
    """Product-measure covolume of the Log-S-unit lattice:
    h * R * sqrt(n_R + n_C)."""
    if h < 1 or reg <= 0:
        raise ValueError("need h >= 1 and R > 0")
    return h * reg * math.sqrt(field.n_real + field.n_cplx)


def gamma_k_bound(field: NumberField, cyclotomic: bool = False) -> float:
    """Certified upper bound on the ideal-lattice gap Gamma_K; exactly 1
    for (caller-flagged) cyclotomic fields."""
    if cyclotomic:
        return 1.0
    return abs(field.disc_field) ** (1.0 / field.n)


def pic0_log_volume_bound(field: NumberField, m0_norm: int = 1,
                          real_places_in_m: int = 0) -> float:
    """Certified upper bound log vol(Pic0) <= log(N(m0) 2^{|mR|}) + log|D|."""
    return math.log(m0_norm * 2 ** real_places_in_m) + math.log(abs(field.disc_field))


def kessler_lambda1_lower(field: NumberField, c: int = 1000) -> Fraction:
    """Certified rational lower bound on lambda_1 of the log-(S-)unit
    lattice: 1 / (c sqrt(n) log(n)^3), clamped at 1."""
    n = field.n
    # rational upper bounds for sqrt(n) and log(n)^3
    _, s_up = _sqrt_up(Q(n))
    ln = log_ball(Q(n), 32)
    l_up = ln.hi()
    denom = Q(c) * s_up * (l_up ** 3)
    if denom < 1:
        denom = Q(1)
    return Q(1) / denom


def _sqrt_up(x: Fraction):
    from .dyadic import sqrt_bracket
    return sqrt_bracket(x, 32)
