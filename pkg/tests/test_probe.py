import math

import numpy as np
import pytest

from conftest import PATH_3, PROJ_3, random_laplacian

from hrpareto import (
    DomainError,
    GhrParams,
    IDENTITY,
    InputError,
    LOG,
    PairwiseFamilySpec,
    PrecisionMatrix,
    SQUARED_LOG,
    StatFn,
    cross_difference,
    homogeneity_residual,
    homogeneity_residual_scan,
    log_density_unnormalized,
    log_pairwise_density,
    mu_hr,
    residual_grid,
)


class TestStatFn:
    def test_parse(self):
        assert StatFn.parse("log") == LOG
        assert StatFn.parse("identity") == IDENTITY
        assert StatFn.parse("squared_log") == SQUARED_LOG
        assert StatFn.parse("power:0.5") == StatFn("power", 0.5)

    def test_parse_rejects_bad_input(self):
        with pytest.raises(InputError):
            StatFn.parse("cosine")
        with pytest.raises(InputError):
            StatFn.parse("power")  # missing exponent
        with pytest.raises(InputError):
            StatFn.parse("log:2")

    def test_power_zero_rejected(self):
        with pytest.raises(InputError):
            StatFn("power", 0.0)

    def test_evaluation(self):
        assert LOG(math.e) == pytest.approx(1.0)
        assert IDENTITY(3.5) == pytest.approx(3.5)
        assert StatFn("power", 2.0)(3.0) == pytest.approx(9.0)
        assert SQUARED_LOG(math.e**2) == pytest.approx(4.0)


class TestLogPairwiseDensity:
    def test_log_family_matches_hr_density(self, rng):
        theta = PrecisionMatrix.from_matrix(random_laplacian(rng, 4))
        mu = mu_hr(theta)
        family = PairwiseFamilySpec.log_family(mu, theta.theta)
        params = GhrParams(mu, theta)
        for _ in range(20):
            y = np.exp(rng.uniform(-1.5, 1.5, 4))
            y[int(rng.integers(4))] = 3.0
            assert log_pairwise_density(family, y) == pytest.approx(
                log_density_unnormalized(params, y), abs=1e-12
            )

    def test_identity_family_hand_values(self):
        family = PairwiseFamilySpec.uniform(IDENTITY, np.ones(3), PROJ_3)
        assert log_pairwise_density(family, 2.0 * np.ones(3)) == pytest.approx(-6.0, abs=1e-12)
        assert log_pairwise_density(family, 4.0 * np.ones(3)) == pytest.approx(-12.0, abs=1e-12)

    def test_rejects_nonpositive_point(self):
        family = PairwiseFamilySpec.log_family(np.ones(3), PROJ_3)
        with pytest.raises(DomainError):
            log_pairwise_density(family, [1.0, -2.0, 1.0])

    def test_q2_diagonal_absorption(self, rng):
        # Adding c to theta_ii while subtracting c from the squared-log
        # marginal coefficient leaves the density unchanged.
        d = 3
        base_theta = random_laplacian(rng, d)
        shift = rng.uniform(0.5, 1.5, d)
        stats = ((LOG, SQUARED_LOG),) * d
        mu1 = np.column_stack([rng.normal(size=d), np.zeros(d)])
        mu2 = mu1.copy()
        mu2[:, 1] = -shift
        f1 = PairwiseFamilySpec(d, 2, stats, (LOG,) * d, mu1, base_theta)
        f2 = PairwiseFamilySpec(d, 2, stats, (LOG,) * d, mu2, base_theta + np.diag(shift))
        for _ in range(10):
            y = np.exp(rng.uniform(-1.0, 1.0, d))
            assert log_pairwise_density(f1, y) == pytest.approx(
                log_pairwise_density(f2, y), abs=1e-10
            )


class TestHomogeneityResidual:
    def test_log_family_with_standard_degree_is_exact(self, rng):
        theta = PrecisionMatrix.from_matrix(random_laplacian(rng, 3))
        family = PairwiseFamilySpec.log_family(mu_hr(theta), theta.theta)
        for _ in range(20):
            y = np.exp(rng.uniform(-2.0, 2.0, 3))
            y[int(rng.integers(3))] = 2.0
            t = float(rng.uniform(1.1, 10.0))
            assert homogeneity_residual(family, y, t) < 1e-12

    def test_identity_family_hand_value(self):
        family = PairwiseFamilySpec.uniform(IDENTITY, np.ones(3), PROJ_3)
        expected = abs(-12.0 + 6.0 + 4.0 * math.log(2.0))
        assert homogeneity_residual(family, 2.0 * np.ones(3), 2.0) == pytest.approx(
            expected, abs=1e-12
        )
        assert expected == pytest.approx(3.227, abs=5e-4)

    def test_unit_scaling_gives_zero(self):
        family = PairwiseFamilySpec.uniform(IDENTITY, np.ones(3), PROJ_3)
        assert homogeneity_residual(family, 2.0 * np.ones(3), 1.0) == 0.0

    def test_rejects_bad_t(self):
        family = PairwiseFamilySpec.log_family(np.ones(3), PROJ_3)
        with pytest.raises(DomainError):
            homogeneity_residual(family, 2.0 * np.ones(3), 0.0)


class TestResidualScan:
    def test_grid_is_deterministic_and_in_region(self):
        g1 = residual_grid(3, 50, seed=1)
        g2 = residual_grid(3, 50, seed=1)
        assert np.array_equal(g1, g2)
        assert np.all(g1 > 0.0)
        assert np.all(g1.max(axis=1) > 1.0)
        assert np.all(g1 >= math.exp(-2.0) - 1e-12)
        assert np.all(g1 <= math.exp(2.0) + 1e-12)

    def test_log_statistics_scan_is_flat(self, rng):
        theta = PrecisionMatrix.from_matrix(random_laplacian(rng, 4))
        family = PairwiseFamilySpec.log_family(mu_hr(theta), theta.theta)
        scan = homogeneity_residual_scan(family)
        assert scan.max_residual <= 1e-12

    def test_identity_statistics_scan_violates(self, rng):
        for _ in range(5):
            mu = rng.normal(size=3)
            family = PairwiseFamilySpec.uniform(IDENTITY, mu, PROJ_3)
            scan = homogeneity_residual_scan(family)
            assert scan.max_residual > 0.1

    def test_power_statistics_scan_violates(self, rng):
        family = PairwiseFamilySpec.uniform(StatFn("power", 0.5), rng.normal(size=3), PROJ_3)
        assert homogeneity_residual_scan(family).max_residual > 0.1


class TestCrossDifference:
    def base_family(self):
        return PairwiseFamilySpec.log_family(np.array([1.5, 1.0, 1.5]), PATH_3)

    def test_zero_for_absent_interaction(self):
        family = self.base_family()
        value = cross_difference(family, 0, 2, (math.e, 1.0), (math.e, 1.0), np.full(3, math.e))
        assert abs(value) < 1e-12

    def test_recovers_interaction_strength(self):
        family = self.base_family()
        value = cross_difference(family, 0, 1, (math.e, 1.0), (math.e, 1.0), np.full(3, math.e))
        assert value == pytest.approx(2.0, abs=1e-12)  # -2 theta_01 = 2

    def test_degenerate_pair_gives_zero(self):
        family = self.base_family()
        value = cross_difference(family, 0, 1, (2.0, 2.0), (math.e, 1.0), np.full(3, math.e))
        assert abs(value) < 1e-12

    def test_antisymmetry_in_each_pair(self, rng):
        family = self.base_family()
        base = np.full(3, math.e)
        yi, yj = (1.7, 0.4), (2.5, 0.9)
        v = cross_difference(family, 0, 1, yi, yj, base)
        assert cross_difference(family, 0, 1, yi[::-1], yj, base) == pytest.approx(-v, abs=1e-12)
        assert cross_difference(family, 0, 1, yi, yj[::-1], base) == pytest.approx(-v, abs=1e-12)

    def test_ratio_recovers_minus_two_theta(self, rng):
        theta = random_laplacian(rng, 4)
        family = PairwiseFamilySpec.log_family(rng.normal(size=4), theta)
        base = np.full(4, 2.0)
        for i in range(4):
            for j in range(4):
                if i == j:
                    continue
                yi, yj = (3.0, 0.5), (1.4, 0.7)
                dti = math.log(3.0) - math.log(0.5)
                dtj = math.log(1.4) - math.log(0.7)
                value = cross_difference(family, i, j, yi, yj, base)
                assert value / (dti * dtj) == pytest.approx(-2.0 * theta[i, j], abs=1e-10)

    def test_rejects_equal_indices(self):
        with pytest.raises(InputError):
            cross_difference(self.base_family(), 1, 1, (1.0, 2.0), (1.0, 2.0), np.ones(3))


class TestPairwiseFamilySpec:
    def test_support_connectivity_flag(self):
        connected = PairwiseFamilySpec.log_family(np.ones(3), PATH_3)
        assert connected.support_connected
        blocks = np.array([[1.0, -1.0, 0.0], [-1.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
        disconnected = PairwiseFamilySpec.log_family(np.ones(3), blocks)
        assert not disconnected.support_connected

    def test_shape_validation(self):
        with pytest.raises(InputError):
            PairwiseFamilySpec(3, 1, ((LOG,),) * 2, (LOG,) * 3, np.ones((3, 1)), PROJ_3)
        with pytest.raises(InputError):
            PairwiseFamilySpec(3, 1, ((LOG,),) * 3, (LOG,) * 3, np.ones((3, 2)), PROJ_3)
