"""Unit tests for privacy calibration."""

import math
import time

import pytest

from src.privacy.accounting import (
    NoiseSchedule,
    PrivacyTarget,
    allocate_schedule,
    compose_sigmas,
    compute_rho1,
    compute_rho_k,
    gaussian_delta,
    gaussian_epsilon,
    noiseless_schedule,
    solve_sigma_star,
    std_normal_cdf,
    std_normal_inv_cdf,
    std_normal_upper_quantile,
)


class TestStdNormal:
    """Tests for the standard normal CDF and quantiles."""

    def test_cdf_at_zero(self):
        """Test that the median maps to one half."""
        assert std_normal_cdf(0.0) == 0.5

    def test_cdf_known_value(self):
        """Test Phi(-0.5) against its high-precision value."""
        assert std_normal_cdf(-0.5) == pytest.approx(0.3085375387259869, abs=1e-12)

    @pytest.mark.parametrize("x", [0.1, 1.0, 2.5, 7.0])
    def test_cdf_symmetry(self, x):
        """Test Phi(x) + Phi(-x) = 1."""
        assert std_normal_cdf(x) + std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("x", [math.inf, -math.inf, math.nan])
    def test_cdf_rejects_non_finite(self, x):
        """Test that non-finite input is an argument error."""
        with pytest.raises(ValueError):
            std_normal_cdf(x)

    def test_inv_cdf_median(self):
        """Test that the inverse CDF of one half is zero."""
        assert std_normal_inv_cdf(0.5) == pytest.approx(0.0, abs=1e-15)

    def test_inv_cdf_known_value(self):
        """Test the 97.5% quantile."""
        assert std_normal_inv_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-12)

    @pytest.mark.parametrize("q", [1e-12, 0.01, 0.3, 0.7, 0.999, 1 - 1e-9])
    def test_inv_cdf_round_trip(self, q):
        """Test Phi(Phi^-1(q)) = q."""
        assert std_normal_cdf(std_normal_inv_cdf(q)) == pytest.approx(q, rel=1e-9)

    @pytest.mark.parametrize("q", [0.0, 1.0, -0.1, 1.5])
    def test_inv_cdf_rejects_out_of_range(self, q):
        """Test that q outside (0, 1) is an argument error."""
        with pytest.raises(ValueError):
            std_normal_inv_cdf(q)

    def test_upper_quantile_small_tail(self):
        """Test Phi^-1(1 - 1e-4) computed from the tail."""
        assert std_normal_upper_quantile(1e-4) == pytest.approx(3.719016485455709, abs=1e-10)

    def test_upper_quantile_tiny_tail(self):
        """Test that tails far below double spacing near 1 stay accurate."""
        z = std_normal_upper_quantile(1e-20)
        assert std_normal_cdf(-z) == pytest.approx(1e-20, rel=1e-9)


class TestGaussianDelta:
    """Tests for the analytic Gaussian mechanism delta."""

    def test_known_value(self):
        """Test delta(1, 1) = Phi(-0.5) - e Phi(-1.5)."""
        assert gaussian_delta(1.0, 1.0) == pytest.approx(0.1269367, abs=1e-6)

    def test_large_noise_gives_tiny_delta(self):
        """Test that sigma = 100 at epsilon = 1 gives a negligible delta."""
        assert gaussian_delta(1.0, 100.0) < 1e-6

    def test_decreasing_in_sigma(self):
        """Test strict decrease in sigma."""
        values = [gaussian_delta(1.0, s) for s in (0.5, 1.0, 2.0, 4.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_decreasing_in_epsilon(self):
        """Test strict decrease in epsilon at fixed sigma."""
        values = [gaussian_delta(e, 1.5) for e in (0.25, 0.5, 1.0, 2.0)]
        assert all(a > b for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize("epsilon,sigma", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
    def test_rejects_non_positive(self, epsilon, sigma):
        """Test that non-positive arguments are rejected."""
        with pytest.raises(ValueError):
            gaussian_delta(epsilon, sigma)


class TestSolveSigmaStar:
    """Tests for calibrating sigma*."""

    def test_round_trip_grid(self):
        """Test delta(eps, sigma*) = delta/2 over the calibration grid, quickly."""
        start = time.perf_counter()
        for epsilon in (0.5, 1.0, 4.0):
            for delta in (1e-9, 1e-7, 1e-5):
                sigma = solve_sigma_star(PrivacyTarget(epsilon, delta))
                assert gaussian_delta(epsilon, sigma) == pytest.approx(delta / 2, rel=1e-9)
        assert time.perf_counter() - start < 1.0

    def test_inverts_known_delta(self):
        """Test that delta = 2 * delta(1, 1) recovers sigma = 1."""
        sigma = solve_sigma_star(PrivacyTarget(1.0, 0.253872))
        assert sigma == pytest.approx(1.0, abs=1e-4)

    def test_more_privacy_needs_more_noise(self):
        """Test that sigma* grows as epsilon shrinks."""
        loose = solve_sigma_star(PrivacyTarget(4.0, 1e-7))
        tight = solve_sigma_star(PrivacyTarget(1.0, 1e-7))
        assert tight > loose

    @pytest.mark.parametrize("epsilon,delta", [(0.0, 1e-7), (1.0, 0.0), (1.0, 1.0), (math.inf, 1e-7)])
    def test_invalid_target(self, epsilon, delta):
        """Test PrivacyTarget validation."""
        with pytest.raises(ValueError):
            PrivacyTarget(epsilon, delta)


class TestGaussianEpsilon:
    """Tests for recovering epsilon from noise."""

    @pytest.mark.parametrize("epsilon", [0.5, 1.0, 4.0])
    def test_inverts_solve_sigma_star(self, epsilon):
        """Test gaussian_epsilon(solve_sigma_star(eps, delta), delta) = eps."""
        sigma = solve_sigma_star(PrivacyTarget(epsilon, 1e-7))
        assert gaussian_epsilon(sigma, 1e-7) == pytest.approx(epsilon, rel=1e-9)

    def test_huge_noise_spends_nothing(self):
        """Test that noise already meeting delta/2 at epsilon ~ 0 reports 0."""
        assert gaussian_epsilon(1e6, 0.5) == 0.0


class TestComposeSigmas:
    """Tests for Gaussian composition."""

    def test_even_split(self):
        """Test that two sigma*sqrt(2) mechanisms compose to sigma*."""
        assert compose_sigmas([2.0 * math.sqrt(2), 2.0 * math.sqrt(2)]) == pytest.approx(2.0)

    @pytest.mark.parametrize("sigmas", [[], [1.0, 0.0], [-1.0]])
    def test_rejects_invalid(self, sigmas):
        """Test that empty or non-positive inputs are rejected."""
        with pytest.raises(ValueError):
            compose_sigmas(sigmas)


class TestAllocateSchedule:
    """Tests for splitting sigma* across levels."""

    @pytest.fixture
    def target(self):
        return PrivacyTarget(4.0, 1e-7)

    def test_single_level_is_sigma_star(self, target):
        """Test that T = 1 uses sigma* itself."""
        schedule = allocate_schedule(target, 1, decay=0.7)
        assert len(schedule.sigmas) == 1
        assert schedule.sigma(1) == pytest.approx(schedule.sigma_star, rel=1e-15)

    def test_even_two_way_split(self, target):
        """Test that T = 2, c = 1 gives sigma* sqrt(2) twice."""
        schedule = allocate_schedule(target, 2)
        expected = schedule.sigma_star * math.sqrt(2)
        assert schedule.sigma(1) == pytest.approx(expected, rel=1e-12)
        assert schedule.sigma(2) == pytest.approx(expected, rel=1e-12)

    def test_nine_levels_even(self, target):
        """Test that T = 9, c = 1 gives sigma_k = 3 sigma*."""
        schedule = allocate_schedule(target, 9)
        for k in range(1, 10):
            assert schedule.sigma(k) == pytest.approx(3 * schedule.sigma_star, rel=1e-12)

    @pytest.mark.parametrize("decay", [0.5, 0.9, 1.0])
    @pytest.mark.parametrize("max_len", [1, 2, 3, 5, 9, 16])
    def test_composition_identity(self, target, decay, max_len):
        """Test sum 1/sigma_k^2 = 1/sigma*^2."""
        schedule = allocate_schedule(target, max_len, decay=decay)
        assert schedule.composition_residual() <= 1e-9
        assert compose_sigmas(schedule.sigmas) == pytest.approx(schedule.sigma_star, rel=1e-9)

    def test_geometric_decay(self, target):
        """Test sigma_k = c sigma_{k-1}."""
        schedule = allocate_schedule(target, 4, decay=0.8)
        for k in range(2, 5):
            assert schedule.sigma(k) == pytest.approx(0.8 * schedule.sigma(k - 1), rel=1e-12)

    def test_schedule_spends_the_budget(self, target):
        """Test that the composed sigmas recompute to the target epsilon."""
        schedule = allocate_schedule(target, 6, decay=0.9)
        spent = gaussian_epsilon(compose_sigmas(schedule.sigmas), target.delta)
        assert spent == pytest.approx(target.epsilon, rel=1e-9)

    def test_caps_broadcast_and_rho1(self, target):
        """Test that one cap applies to every level and rho_1 uses it."""
        schedule = allocate_schedule(target, 3, caps=10)
        assert schedule.caps == (10, 10, 10)
        assert schedule.rho1 == pytest.approx(compute_rho1(schedule.sigma(1), 1e-7, 10))

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_len": 0},
            {"max_len": 3, "decay": 0.0},
            {"max_len": 3, "decay": 1.5},
            {"max_len": 3, "eta": 1.0},
            {"max_len": 3, "caps": [1, 2]},
            {"max_len": 3, "sample_p": 0.0},
        ],
    )
    def test_rejects_invalid_arguments(self, target, kwargs):
        """Test argument validation."""
        with pytest.raises(ValueError):
            allocate_schedule(target, **kwargs)

    def test_to_dict(self, target):
        """Test conversion to dictionary."""
        data = allocate_schedule(target, 2, caps=5).to_dict()
        assert data["max_len"] == 2
        assert data["private"] is True
        assert data["caps"] == [5, 5]
        assert data["epsilon"] == 4.0


class TestComputeRho1:
    """Tests for the level-1 threshold."""

    def test_single_cap(self):
        """Test that Delta_1 = 1 gives 1 + sigma Phi^-1(1 - delta/2)."""
        expected = 1.0 + 2.0 * std_normal_upper_quantile(1e-7 / 2)
        assert compute_rho1(2.0, 1e-7, 1) == pytest.approx(expected, rel=1e-12)

    def test_matches_brute_force_scan(self):
        """Test the vectorized maximum against a direct scan."""
        brute = max(
            1 / math.sqrt(t) + std_normal_inv_cdf((1 - 1e-5 / 2) ** (1 / t))
            for t in range(1, 101)
        )
        assert compute_rho1(1.0, 1e-5, 100) == pytest.approx(brute, abs=1e-6)

    def test_zero_noise(self):
        """Test that sigma_1 = 0 reduces to the t = 1 term."""
        assert compute_rho1(0.0, 1e-7, 50) == pytest.approx(1.0)

    @pytest.mark.parametrize("args", [(-1.0, 1e-7, 5), (1.0, 0.0, 5), (1.0, 1e-7, 0)])
    def test_rejects_invalid(self, args):
        """Test argument validation."""
        with pytest.raises(ValueError):
            compute_rho1(*args)


class TestComputeRhoK:
    """Tests for the level-k threshold."""

    def test_clamped_fraction(self):
        """Test that size_prev >= size_valid gives sigma Phi^-1(1 - eta)."""
        expected = 2.0 * std_normal_upper_quantile(0.01)
        assert compute_rho_k(2.0, 0.01, 50, 20) == pytest.approx(expected, rel=1e-12)

    def test_known_value(self):
        """Test sigma = 1, eta = 0.01, 10 / 1000 gives Phi^-1(1 - 1e-4)."""
        assert compute_rho_k(1.0, 0.01, 10, 1000) == pytest.approx(3.719, abs=1e-3)

    @pytest.mark.parametrize("size_prev,size_valid", [(0, 10), (10, 0), (0, 0)])
    def test_empty_sets_give_infinity(self, size_prev, size_valid):
        """Test the +inf sentinel for empty search spaces."""
        assert compute_rho_k(1.0, 0.01, size_prev, size_valid) == math.inf

    @pytest.mark.parametrize("eta", [0.0, 1.0, -0.5])
    def test_rejects_invalid_eta(self, eta):
        """Test that eta outside (0, 1) is rejected."""
        with pytest.raises(ValueError):
            compute_rho_k(1.0, eta, 10, 10)


class TestNoiselessSchedule:
    """Tests for the unsafe debug schedule."""

    def test_is_flagged_non_private(self):
        """Test zero noise, fixed thresholds, and the private flag."""
        schedule = noiseless_schedule(3, caps=[4, 5, 6], threshold=0.25)
        assert isinstance(schedule, NoiseSchedule)
        assert schedule.private is False
        assert schedule.sigmas == (0.0, 0.0, 0.0)
        assert schedule.rho1 == 0.25
        assert schedule.threshold_override == 0.25
        assert schedule.caps == (4, 5, 6)
        assert schedule.composition_residual() == 0.0

    def test_rejects_infinite_threshold(self):
        """Test that the threshold must be finite."""
        with pytest.raises(ValueError):
            noiseless_schedule(2, caps=3, threshold=math.inf)
