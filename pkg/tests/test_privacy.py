import numpy as np
import pytest

from sketchdp import (
    PrivacyBudget,
    advanced_composition,
    frobenius_norm,
    gaussian_calibration,
    gaussian_mechanism_sigma,
    matrix_rank,
    randomized_response,
    rr_low_rank_baseline,
)
from conftest import random_matrix, rank_r_matrix

# frozen high-precision formula evaluations (mpmath, 50 digits)
SIGMA_EPS1_DELTA005 = 1.7941225779941015  # sqrt(ln 25)
SIGMA_EPS1_DELTA1E5 = 3.4257946547165430  # sqrt(ln 125000)
EPS_PRIME_10_01_1E6 = 1.8622581362691099  # sqrt(20 ln 1e6) * 0.1 + 0.2


class TestPrivacyBudget:
    def test_accepts_boundary_epsilon(self):
        b = PrivacyBudget(1.0, 1e-5)
        assert b.epsilon == 1.0

    @pytest.mark.parametrize("eps,delta", [(0.0, 0.1), (-0.5, 0.1), (1.5, 0.1),
                                           (0.5, 0.0), (0.5, 1.0), (0.5, -0.2)])
    def test_rejects_out_of_range(self, eps, delta):
        with pytest.raises(ValueError):
            PrivacyBudget(eps, delta)

    def test_halved(self):
        b = PrivacyBudget(0.8, 0.01).halved()
        assert (b.epsilon, b.delta) == (0.4, 0.005)


class TestGaussianMechanismSigma:
    def test_worked_example_delta005(self):
        sigma = gaussian_mechanism_sigma(1.0, PrivacyBudget(1.0, 0.05))
        assert sigma == pytest.approx(SIGMA_EPS1_DELTA005, rel=1e-12)

    def test_worked_example_delta1e5(self):
        sigma = gaussian_mechanism_sigma(1.0, PrivacyBudget(1.0, 1e-5))
        assert sigma == pytest.approx(SIGMA_EPS1_DELTA1E5, rel=1e-12)

    def test_linear_in_sensitivity(self):
        b = PrivacyBudget(0.7, 1e-4)
        assert gaussian_mechanism_sigma(2.0, b) == 2.0 * gaussian_mechanism_sigma(1.0, b)

    def test_rejects_nonpositive_sensitivity(self):
        with pytest.raises(ValueError):
            gaussian_mechanism_sigma(0.0, PrivacyBudget(0.5, 0.01))

    def test_calibration_record(self):
        b = PrivacyBudget(0.5, 0.01)
        cal = gaussian_calibration(2.5, b)
        assert cal.sigma == gaussian_mechanism_sigma(2.5, b)
        assert cal.sensitivity == 2.5
        assert cal.budget == b


class TestAdvancedComposition:
    def test_basic_single(self):
        assert advanced_composition(1, PrivacyBudget(0.5, 0.01)) == (0.5, 0.01)

    def test_basic_two(self):
        eps, delta = advanced_composition(2, PrivacyBudget(0.3, 0.02))
        assert eps == pytest.approx(0.6, rel=1e-15)
        assert delta == pytest.approx(0.04, rel=1e-15)

    def test_advanced_worked_example(self):
        eps, delta = advanced_composition(10, PrivacyBudget(0.1, 1e-8), 1e-6)
        assert eps == pytest.approx(EPS_PRIME_10_01_1E6, rel=1e-12)
        assert delta == pytest.approx(10 * 1e-8 + 1e-6, rel=1e-15)

    def test_rejects_zero_k(self):
        with pytest.raises(ValueError):
            advanced_composition(0, PrivacyBudget(0.1, 0.01))

    def test_monotone_in_k(self):
        b = PrivacyBudget(0.1, 1e-6)
        prev = (0.0, 0.0)
        for k in range(1, 30):
            cur = advanced_composition(k, b, 1e-7)
            assert cur[0] >= prev[0] and cur[1] >= prev[1]
            prev = cur
        prev = (0.0, 0.0)
        for k in range(1, 30):
            cur = advanced_composition(k, b)
            assert cur[0] >= prev[0] and cur[1] >= prev[1]
            prev = cur


class TestRandomizedResponse:
    def test_noise_scale_empirical(self):
        # 500x500 sample stddev within 2% of the calibrated sigma
        a = np.zeros((500, 500))
        out = randomized_response(a, PrivacyBudget(1.0, 1e-5), seed=5)
        observed = float(np.std(out - a, ddof=1))
        assert observed == pytest.approx(SIGMA_EPS1_DELTA1E5, rel=0.02)

    def test_deterministic_per_seed(self):
        a = random_matrix(20, 30, seed=1)
        b = PrivacyBudget(0.5, 1e-4)
        out1 = randomized_response(a, b, seed=9)
        out2 = randomized_response(a, b, seed=9)
        assert np.array_equal(out1, out2)

    def test_noise_independent_of_input(self):
        # the drawn noise depends only on the seed; recovering it by
        # subtraction reintroduces one rounding step per entry
        b = PrivacyBudget(0.5, 1e-4)
        a1 = random_matrix(15, 10, seed=2)
        a2 = random_matrix(15, 10, seed=3)
        n1 = randomized_response(a1, b, seed=4) - a1
        n2 = randomized_response(a2, b, seed=4) - a2
        assert np.allclose(n1, n2, rtol=0, atol=1e-12)

    def test_zero_override_returns_copy(self):
        a = random_matrix(6, 6, seed=7)
        out = randomized_response(a, PrivacyBudget(0.5, 0.01), 0, noise_scale_override=0.0)
        assert np.array_equal(out, a)
        assert out is not a

    def test_pooled_moment_checks(self):
        # mean within 4 sigma/sqrt(N), variance within 4 standard errors
        b = PrivacyBudget(0.9, 1e-3)
        sigma = gaussian_mechanism_sigma(1.0, b)
        a = random_matrix(400, 300, seed=11)
        noise = randomized_response(a, b, seed=12) - a
        n = noise.size
        assert abs(noise.mean()) <= 4.0 * sigma / np.sqrt(n)
        var = float(noise.var(ddof=1))
        se_var = sigma * sigma * np.sqrt(2.0 / (n - 1))
        assert abs(var - sigma * sigma) <= 4.0 * se_var


class TestRrLowRankBaseline:
    def test_zero_noise_exact_rank(self):
        a = rank_r_matrix(40, 30, 4, seed=21, scale=3.0)
        res = rr_low_rank_baseline(
            a, 4, PrivacyBudget(0.5, 0.01), 0, noise_scale_override=0.0
        )
        assert res.achieved_error <= 1e-8 * frobenius_norm(a)

    def test_output_rank_bounded(self):
        a = random_matrix(25, 35, seed=22)
        res = rr_low_rank_baseline(a, 6, PrivacyBudget(0.9, 1e-4), 3)
        assert matrix_rank(res.b) <= 6

    def test_error_constant_factor(self):
        # error / (sqrt(km) + sqrt(kn)) lands in [0.1, 10] across 20 seeds
        m, n, k = 128, 1024, 5
        a = rank_r_matrix(m, n, k, seed=30, scale=50.0)
        budget = PrivacyBudget(1.0, 1e-5)
        denom = np.sqrt(k * m) + np.sqrt(k * n)
        for seed in range(20):
            res = rr_low_rank_baseline(a, k, budget, seed)
            ratio = res.achieved_error / denom
            assert 0.1 <= ratio <= 10.0, f"seed {seed}: ratio {ratio}"

    def test_budget_recorded(self):
        a = random_matrix(10, 12, seed=40)
        budget = PrivacyBudget(0.7, 1e-3)
        res = rr_low_rank_baseline(a, 3, budget, 1)
        assert res.budget_spent == budget
        assert res.alpha_used == 1.0
