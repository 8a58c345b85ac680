import math
import random
from fractions import Fraction as Q

import pytest

from latnf.ideal_arith import HnfIdeal, hnf_mul, primes_up_to
from latnf.ideal_walk import (WalkParams, boundedness_check, check_congruence,
                              check_membership, check_norm_bound, check_signs,
                              chi2_sf, chi2_two_sample, sample_beta,
                              shifting_experiment, walk_params)
from latnf.nf_core import new_field
from latnf.samplers import SamplerConfig


@pytest.fixture(scope="module")
def qi():
    return new_field([1, 0, 1])


@pytest.fixture(scope="module")
def qr2():
    return new_field([-2, 0, 1])


FAST = SamplerConfig(radius_constant=2)


def fast_params(field, eps=Q(1, 4), b_override=40):
    return walk_params(field, None, [], eps, b_override=b_override)


class TestWalkParams:
    def test_qi_deterministic(self, qi):
        p1 = walk_params(qi, None, [], Q(1, 4))
        p2 = walk_params(qi, None, [], Q(1, 4))
        assert p1.walk_length == p2.walk_length
        # N = ceil(7n + 2 log 4 + picbound + 2) with picbound = log 4
        expect = math.ceil(14 + 2 * math.log(4) + math.log(4) + 2)
        assert p1.walk_length == expect

    def test_smaller_eps_increases_n(self, qi):
        n1 = walk_params(qi, None, [], Q(1, 4)).walk_length
        n2 = walk_params(qi, None, [], Q(1, 8)).walk_length
        assert n2 > n1

    def test_delta_positive_dyadic(self, qi):
        p = walk_params(qi, None, [], Q(1, 4), omega=1)
        assert 0 < p.delta < Q(1, 2 ** 40)
        # largest dyadic below the formula: a power of two
        assert p.delta.numerator == 1
        assert p.delta.denominator & (p.delta.denominator - 1) == 0

    def test_eps_range(self, qi):
        with pytest.raises(ValueError):
            walk_params(qi, None, [], Q(3, 2))


class TestSampleBetaHardChecks:
    def test_qi_batch(self, qi):
        rng = random.Random(20)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        params = fast_params(qi)
        for _ in range(8):
            tr = sample_beta(qi, None, [], ok_ring, [1, 1], qi.one(),
                             params, rng, FAST)
            assert check_membership(tr)
            assert check_norm_bound(tr)
            assert boundedness_check(tr)
            assert not tr.beta.is_zero()

    def test_divisibility(self, qi):
        rng = random.Random(21)
        p1 = primes_up_to(qi, 2)[0]
        params = fast_params(qi)
        from latnf.ideal_arith import ord_at
        for _ in range(4):
            tr = sample_beta(qi, None, [], p1.hnf, [1, 1], qi.one(),
                             params, rng, FAST)
            ideal = HnfIdeal.principal(qi, tr.beta)
            assert ord_at(ideal, p1) >= 1

    def test_congruence_mod_three(self, qi):
        rng = random.Random(22)
        m0 = HnfIdeal.from_integer(qi, 3)
        tau = qi.element([2, 0])
        ok_ring = HnfIdeal.ring_of_integers(qi)
        params = walk_params(qi, m0, [], Q(1, 4), b_override=40)
        for _ in range(4):
            tr = sample_beta(qi, m0, [], ok_ring, [1, 1], tau, params,
                             rng, FAST)
            assert check_congruence(tr, m0, tau)
            assert check_membership(tr)

    def test_sign_pattern_real_quadratic(self, qr2):
        rng = random.Random(23)
        ok_ring = HnfIdeal.ring_of_integers(qr2)
        params = fast_params(qr2)
        for _ in range(3):
            tr = sample_beta(qr2, None, [0, 1], ok_ring, [1, 1], qr2.one(),
                             params, rng, FAST)
            assert check_signs(tr, [0, 1], qr2.one())

    def test_boundedness_negative_control(self, qi):
        rng = random.Random(24)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        params = fast_params(qi)
        tr = sample_beta(qi, None, [], ok_ring, [1, 1], qi.one(), params,
                         rng, FAST)
        # tamper: pretend the walk was much shorter than it was
        tr.params = WalkParams(2, 1, tr.params.s, tr.params.eps,
                               tr.params.delta, tr.params.omega,
                               tr.params.blocksize)
        assert not check_norm_bound(tr)


class TestShifting:
    def test_alpha_one_identical(self, qi):
        rng = random.Random(25)
        params = fast_params(qi)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        report = shifting_experiment(qi, ok_ring, [1, 1], qi.one(), 60,
                                     params, rng, FAST)
        assert report["p_value"] > 1e-3

    def test_alpha_two_pushforward(self, qi):
        rng = random.Random(26)
        params = fast_params(qi)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        alpha = qi.element([2, 0])
        report = shifting_experiment(qi, ok_ring, [1, 1], alpha, 250,
                                     params, rng, FAST)
        assert report["p_value"] > 1e-3

    def test_alpha_unit_rotation(self, qi):
        rng = random.Random(27)
        params = fast_params(qi)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        alpha = qi.element([0, 1])   # i
        report = shifting_experiment(qi, ok_ring, [1, 1], alpha, 250,
                                     params, rng, FAST)
        assert report["p_value"] > 1e-3


class TestNormIndependence:
    def test_scaling_y_invariance(self, qi):
        # y and 2y give statistically indistinguishable outputs: the code
        # consumes only y's ratios (structural) and the chi-square agrees
        rng = random.Random(28)
        params = fast_params(qi)
        ok_ring = HnfIdeal.ring_of_integers(qi)
        counts_a, counts_b = {}, {}
        for _ in range(250):
            t1 = sample_beta(qi, None, [], ok_ring, [1, 1], qi.one(),
                             params, rng, FAST)
            counts_a[t1.beta.coords] = counts_a.get(t1.beta.coords, 0) + 1
            t2 = sample_beta(qi, None, [], ok_ring, [2, 2], qi.one(),
                             params, rng, FAST)
            counts_b[t2.beta.coords] = counts_b.get(t2.beta.coords, 0) + 1
        stat, dof = chi2_two_sample(counts_a, counts_b)
        assert chi2_sf(stat, dof) > 1e-3


class TestChi2Helper:
    def test_sf_against_scipy(self):
        from scipy.stats import chi2 as scipy_chi2
        for stat, dof in ((3.0, 2), (10.0, 5), (25.0, 10), (120.0, 100)):
            assert abs(chi2_sf(stat, dof)
                       - float(scipy_chi2.sf(stat, dof))) < 1e-9

    def test_two_sample_identical(self):
        a = {1: 50, 2: 60, 3: 70}
        stat, dof = chi2_two_sample(a, dict(a))
        assert stat == 0
