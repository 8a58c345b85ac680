"""Provable block reduction: HKZ by enumeration, the Hanrot-Pujol-Stehle
BKZ' loop with a tour budget, and the recursive variant that bounds every
basis vector by 2n * b^(2n/b) * lambda_n.

All shortness bounds are checked by exact rational comparisons of suitable
integer powers, so no floating point enters any guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from . import lattice_core, qlinalg
from .dyadic import Q
from .lattice_core import gram_gso, gso
from .qlinalg import gram_matrix, int_identity, mat_mul, transpose


@dataclass
class BkzConfig:
    blocksize: int
    tour_cap_constant: Fraction = Q(1)
    max_tours: int | None = None
    record_transform: bool = True


@dataclass
class ReductionTrace:
    hkz_calls: int = 0
    tours: int = 0
    potential_sq_ledger: list = field(default_factory=list)
    transform: list | None = None


def _scale_integral(cols):
    den = 1
    for c in cols:
        for x in c:
            x = Q(x)
            den = den * x.denominator // gcd(den, x.denominator)
    return [[int(Q(x) * den) for x in c] for c in cols], den


def hkz_reduce(cols, trace: ReductionTrace | None = None):
    """HKZ-reduce an exact basis (dimension <= enumeration cap);
    returns (columns, U) with out = in * U."""
    if len(cols) > lattice_core.DIM_CAP:
        raise ValueError("HKZ oracle capped at dimension "
                         f"{lattice_core.DIM_CAP}")
    g = gram_matrix([list(map(Q, c)) for c in cols])
    _, u = lattice_core._hkz_gram(g)
    out = _apply_u(cols, u)
    if trace is not None:
        trace.hkz_calls += 1
        trace.potential_sq_ledger.append(gso(out)[2])
    return out, u


def _apply_u(cols, u):
    n = len(cols)
    m = len(cols[0])
    out = []
    for j in range(n):
        col = [Q(0)] * m
        for i in range(n):
            if u[i][j]:
                col = [a + u[i][j] * Q(b) for a, b in zip(col, cols[i])]
        out.append(col)
    return out


def _projected_cols(cols, j):
    """pi_j(b_j..b_{n-1}): components orthogonal to b_0..b_{j-1}."""
    bstar, mu, _ = gso([list(map(Q, c)) for c in cols])
    d = [qlinalg.dot(b, b) for b in bstar]
    n = len(cols)
    out = []
    for t in range(j, n):
        v = [Q(x) for x in cols[t]]
        for i in range(j):
            coef = qlinalg.dot(cols[t], bstar[i]) / d[i]
            v = [a - coef * b for a, b in zip(v, bstar[i])]
        out.append(v)
    return out


def c1_bound_sq_ok(cols, b: int) -> bool:
    """Check ||c_1|| <= 2 b^((n-1)/(2(b-1)) + 3/2) covol^(1/n) exactly.

    Raise both sides to the power 2n(b-1):
    ||c1||^(2n(b-1)) <= 4^(n(b-1)) * b^(n(n-1) + 3n(b-1)) * det(G)^(b-1).
    """
    n = len(cols)
    c1 = [Q(x) for x in cols[0]]
    lhs = qlinalg.dot(c1, c1) ** (n * (b - 1))
    detg = qlinalg.mat_det(gram_matrix([list(map(Q, c)) for c in cols]))
    rhs = (Q(4) ** (n * (b - 1)) * Q(b) ** (n * (n - 1) + 3 * n * (b - 1))
           * detg ** (b - 1))
    return lhs <= rhs


def bkz_prime(cols, cfg: BkzConfig):
    """BKZ' of Hanrot-Pujol-Stehle on an integral basis.

    Runs tours of blockwise HKZ + global size reduction until a no-change
    fixpoint, with a hard tour cap after which the run continues only
    until the first-vector bound is satisfied or nothing changes.
    Returns (columns, trace).
    """
    n = len(cols)
    b = cfg.blocksize
    if not 2 <= b <= n:
        raise ValueError("blocksize must lie in [2, n]")
    cols = [[Q(x) for x in c] for c in cols]
    trace = ReductionTrace(transform=int_identity(n) if cfg.record_transform else None)
    # log-magnitudes via bit lengths (entries may be far beyond float range)
    max_norm_sq = max(qlinalg.dot(c, c) for c in cols)
    log2_norm = max(1, max_norm_sq.numerator.bit_length()
                    - max_norm_sq.denominator.bit_length()) / 2
    detg = abs(qlinalg.mat_det(gram_matrix(cols)))
    log2_det = (detg.numerator.bit_length() - detg.denominator.bit_length()) / (2 * n)
    log_q = max(2.0, (log2_norm - log2_det) * math.log(2))
    cap = cfg.max_tours
    if cap is None:
        base = n ** 3 / b ** 2 * (math.log(n) + math.log(max(2.0, math.log(max(2.0, log_q) + 2))))
        cap = max(64, math.ceil(float(cfg.tour_cap_constant) * base) * 8)

    def one_tour(cur):
        changed = False
        for k in range(0, n - b + 1):
            block = _projected_cols(cur, k)[:b]
            ints, _ = _scale_integral(block)
            _, u_blk = hkz_reduce(ints, trace)
            if u_blk != int_identity(b):
                changed = True
            u_step = int_identity(n)
            for r in range(b):
                for c in range(b):
                    u_step[k + r][k + c] = u_blk[r][c]
            cur = _apply_u(cur, u_step)
            _merge_transform(trace, u_step)
            cur, u_sr = lattice_core.size_reduce(cur)
            if u_sr != int_identity(n):
                changed = True
            _merge_transform(trace, u_sr)
        return cur, changed

    while True:
        cols, changed = one_tour(cols)
        trace.tours += 1
        if not changed:
            break
        if trace.tours >= cap and c1_bound_sq_ok(cols, b):
            break
    return cols, trace


def _merge_transform(trace: ReductionTrace, u_step):
    if trace.transform is not None:
        trace.transform = [[int(x) for x in row]
                           for row in mat_mul(trace.transform, u_step)]


def bkz_full(cols, cfg: BkzConfig):
    """Recursive BKZ' delivering ||c_j|| <= 2n b^(2n/b) lambda_n for all j.

    Applies BKZ' to the basis, then to each det^2-scaled projected tail
    block, and finishes with a global size reduction (the backward lift).
    """
    n = len(cols)
    b = cfg.blocksize
    cols = [[Q(x) for x in c] for c in cols]
    total_trace = ReductionTrace(
        transform=int_identity(n) if cfg.record_transform else None)
    cols, tr = bkz_prime(cols, cfg)
    _absorb(total_trace, tr)
    for j in range(1, n - b + 1):
        block = _projected_cols(cols, j)
        ints, _ = _scale_integral(block)
        nb = len(ints)
        sub_cfg = BkzConfig(blocksize=min(b, nb), tour_cap_constant=cfg.tour_cap_constant,
                            max_tours=cfg.max_tours, record_transform=True)
        if nb >= 2:
            _, tr_sub = bkz_prime(ints, sub_cfg)
            u_sub = tr_sub.transform
            u_step = int_identity(n)
            for r in range(nb):
                for c in range(nb):
                    u_step[j + r][j + c] = u_sub[r][c]
            cols = _apply_u(cols, u_step)
            _merge_transform(total_trace, u_step)
            total_trace.hkz_calls += tr_sub.hkz_calls
            total_trace.potential_sq_ledger.extend(tr_sub.potential_sq_ledger)
    cols, u_sr = lattice_core.size_reduce(cols)
    _merge_transform(total_trace, u_sr)
    return cols, total_trace


def _absorb(total: ReductionTrace, tr: ReductionTrace):
    total.hkz_calls += tr.hkz_calls
    total.tours += tr.tours
    total.potential_sq_ledger.extend(tr.potential_sq_ledger)
    if total.transform is not None and tr.transform is not None:
        total.transform = [[int(x) for x in row]
                           for row in mat_mul(total.transform, tr.transform)]


def full_bound_sq_ok(cols, b: int, lambda_n_sq: Fraction) -> bool:
    """Check ||c_j||^2b <= (2n)^2b * b^(4n) * lambda_n^2b for all j."""
    n = len(cols)
    rhs = Q(2 * n) ** (2 * b) * Q(b) ** (4 * n) * Q(lambda_n_sq) ** b
    for c in cols:
        if qlinalg.dot([Q(x) for x in c], [Q(x) for x in c]) ** b > rhs:
            return False
    return True
