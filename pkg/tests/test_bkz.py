import random
from fractions import Fraction as Q

import pytest

from latnf.bkz import (BkzConfig, bkz_full, bkz_prime, c1_bound_sq_ok,
                       full_bound_sq_ok, hkz_reduce, _projected_cols)
from latnf.lattice_core import enumerate_minima, gso, shortest_gram
from latnf.qlinalg import dot, gram_matrix, mat_det, transpose


def _random_basis(rng, n, spread):
    while True:
        cols = [[rng.randrange(-spread, spread + 1) for _ in range(n)]
                for _ in range(n)]
        if mat_det(transpose(cols)) != 0:
            return cols


class TestHkz:
    def test_identity_fixed(self):
        out, u = hkz_reduce([[1, 0], [0, 1]])
        assert sum(x * x for x in out[0]) == 1

    def test_skew_two_dim(self):
        out, _ = hkz_reduce([[1, 0], [100, 1]])
        assert dot(out[0], out[0]) == 1

    def test_projected_minima(self):
        rng = random.Random(5)
        for _ in range(6):
            cols = _random_basis(rng, 3, 9)
            out, u = hkz_reduce(cols)
            assert abs(mat_det([[Q(x) for x in r] for r in u])) == 1
            bstar, _, _ = gso(out)
            for j in range(3):
                g = gram_matrix(_projected_cols(out, j))
                _, lam2 = shortest_gram(g)
                assert dot(bstar[j], bstar[j]) == lam2

    def test_potential_increase_bound(self):
        rng = random.Random(6)
        for _ in range(5):
            cols = _random_basis(rng, 3, 12)
            p_in = gso([[Q(x) for x in c] for c in cols])[2]
            out, _ = hkz_reduce(cols)
            p_out = gso(out)[2]
            assert p_out <= Q(3) ** (4 * 3 * 3) * p_in

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            hkz_reduce([[int(i == j) for j in range(13)] for i in range(13)])


class TestBkzPrime:
    def test_z2_trivial(self):
        out, tr = bkz_prime([[1, 0], [0, 1]], BkzConfig(blocksize=2))
        assert c1_bound_sq_ok(out, 2)
        assert tr.tours == 1

    def test_already_hkz_single_tour(self):
        cols = [[1, 0], [0, 2]]
        out, tr = bkz_prime(cols, BkzConfig(blocksize=2))
        assert tr.tours == 1
        assert [[int(x) for x in c] for c in out] == cols

    def test_six_dim_bound(self):
        rng = random.Random(11)
        cols = _random_basis(rng, 6, 50)
        out, tr = bkz_prime(cols, BkzConfig(blocksize=3))
        assert c1_bound_sq_ok(out, 3)

    def test_unimodular_transform(self):
        rng = random.Random(13)
        cols = _random_basis(rng, 4, 20)
        out, tr = bkz_prime(cols, BkzConfig(blocksize=2))
        n = 4
        recon = [[sum(Q(cols[i][r]) * tr.transform[i][j] for i in range(n))
                  for r in range(n)] for j in range(n)]
        assert recon == [[Q(x) for x in c] for c in out]
        assert abs(mat_det([[Q(x) for x in r] for r in tr.transform])) == 1

    def test_potential_ledger(self):
        rng = random.Random(14)
        cols = _random_basis(rng, 5, 40)
        p0 = gso([[Q(x) for x in c] for c in cols])[2]
        out, tr = bkz_prime(cols, BkzConfig(blocksize=3))
        for i, p2 in enumerate(tr.potential_sq_ledger):
            assert p2 <= Q(3) ** (4 * 9 * (i + 1)) * p0

    def test_coefficient_bit_bound(self):
        # every size-reduced intermediate coefficient fits in
        # 5 log2(n P) + 3 bits: check the final basis
        rng = random.Random(15)
        cols = _random_basis(rng, 4, 30)
        out, _ = bkz_prime(cols, BkzConfig(blocksize=2))
        _, _, pot2 = gso(out)
        import math
        bound = 5 * math.log2(4 * float(pot2) ** 0.5) + 3
        for c in out:
            for x in c:
                assert abs(Q(x).numerator).bit_length() <= bound + 1


class TestBkzFull:
    def test_zn(self):
        out, _ = bkz_full([[1, 0, 0], [0, 1, 0], [0, 0, 1]],
                          BkzConfig(blocksize=2))
        assert all(dot(c, c) == 1 for c in out)

    def test_dim5_bound(self):
        rng = random.Random(16)
        cols = _random_basis(rng, 5, 30)
        out, _ = bkz_full(cols, BkzConfig(blocksize=3))
        rep = enumerate_minima(out)
        assert full_bound_sq_ok(out, 3, rep.minima_sq[-1])

    def test_diag_with_outlier(self):
        cols = [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, 1, 0, 0],
                [0, 0, 0, 1, 0], [0, 0, 0, 0, 1000]]
        out, _ = bkz_full(cols, BkzConfig(blocksize=2))
        assert dot(out[0], out[0]) == 1
        rep = enumerate_minima(out)
        assert full_bound_sq_ok(out, 2, rep.minima_sq[-1])

    def test_hkz_first_vector_matches_lambda1(self):
        rng = random.Random(17)
        for _ in range(4):
            cols = _random_basis(rng, 4, 15)
            out, _ = hkz_reduce(cols)
            rep = enumerate_minima(cols)
            assert dot(out[0], out[0]) == rep.minima_sq[0]
