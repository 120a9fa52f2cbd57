import numpy as np
import pytest

from ramsey_lab.atomphys import REFERENCE_TRAP, RB87
from ramsey_lab import twomode
from ramsey_lab.twomode import (
    TwoModeConfig,
    collisional_shift,
    drift_crossing_time,
    drift_fringe_probability,
    loss_visibility,
    phase_diffusion_std,
    phase_rate,
    population_imbalance_visibility,
    sample_interaction_phase,
    tf_phase_diffusion_rate,
    total_number_phase_std,
)


@pytest.fixture
def cfg():
    return TwoModeConfig.from_species(RB87, REFERENCE_TRAP, 1e6)


class TestPhaseRate:
    def test_chi_combination(self, cfg):
        assert cfg.chi == pytest.approx((cfg.g11 - 2 * cfg.g12 + cfg.g22) / 2)
        assert cfg.chi < 0  # a12 exceeds the mean of a11, a22 for this pair

    def test_rate_decomposition(self, cfg):
        # rate(N/2+n, N/2-n) = omega_diff + (g11-g22) N/2 + 2 chi n
        n_tot, n = 1e6, 1234.0
        r = phase_rate(cfg, n_tot / 2 + n, n_tot / 2 - n)
        expected = cfg.omega_diff + (cfg.g11 - cfg.g22) * n_tot / 2 + 2 * cfg.chi * n
        assert r == pytest.approx(expected, rel=1e-12)

    def test_collisional_shift(self, cfg):
        assert collisional_shift(cfg, 1e6) == pytest.approx(
            (cfg.g11 - cfg.g22) * 5e5, rel=1e-12)


class TestPhaseDiffusion:
    def test_anchor_rate(self, cfg):
        # |chi| sqrt(N) ~ 57 mrad/s for 1e6 atoms in the reference trap.
        assert phase_diffusion_std(cfg, 1e6, 1.0) == pytest.approx(0.057, rel=0.05)

    def test_linear_in_time(self, cfg):
        t = np.array([0.1, 0.2, 0.4])
        std = phase_diffusion_std(cfg, 1e6, t)
        assert std[2] / std[0] == pytest.approx(4.0, rel=1e-12)

    def test_echo_same_rate(self, cfg):
        assert phase_diffusion_std(cfg, 1e6, 0.5, echo=True) == pytest.approx(
            phase_diffusion_std(cfg, 1e6, 0.5, echo=False))

    def test_monte_carlo_matches_analytic(self, cfg):
        n_tot, t = 10 ** 6, 0.5
        phases = sample_interaction_phase(cfg, n_tot, t, n_shots=20000, seed=11)
        assert phases.std() == pytest.approx(
            phase_diffusion_std(cfg, n_tot, t), rel=0.05)

    def test_monte_carlo_echo_spread_and_mean(self, cfg):
        n_tot, t = 10 ** 6, 0.5
        phases = sample_interaction_phase(cfg, n_tot, t, n_shots=20000,
                                          seed=12, echo=True)
        assert phases.std() == pytest.approx(
            phase_diffusion_std(cfg, n_tot, t), rel=0.05)
        # echo removes the deterministic mean phase
        assert abs(phases.mean()) < 5 * phases.std() / np.sqrt(20000)

    def test_closed_form_matches_couplings(self, cfg):
        # tf_phase_diffusion_rate = 2 |chi| sqrt(N)
        rate = tf_phase_diffusion_rate(RB87, REFERENCE_TRAP, 1e6)
        assert rate == pytest.approx(2 * abs(cfg.chi) * np.sqrt(1e6), rel=1e-10)

    def test_closed_form_atom_number_power(self):
        r1 = tf_phase_diffusion_rate(RB87, REFERENCE_TRAP, 1e5)
        r2 = tf_phase_diffusion_rate(RB87, REFERENCE_TRAP, 1e6)
        assert r1 / r2 == pytest.approx(10 ** 0.1, rel=1e-10)


class TestTotalNumberChannel:
    def test_no_echo_scaling(self, cfg):
        std = total_number_phase_std(cfg, 1e4, 0.5)
        assert std == pytest.approx(abs(cfg.g11 - cfg.g22) / 2 * 1e4 * 0.5, rel=1e-12)

    def test_echo_cancels_exactly(self, cfg):
        assert total_number_phase_std(cfg, 1e4, 0.5, echo=True) == 0.0

    def test_echo_cancellation_monte_carlo(self, cfg):
        # Vary the total number shot to shot: echoed phases must not depend
        # on it beyond the binomial diffusion.
        rng = np.random.default_rng(5)
        t = 0.5
        spreads = []
        for n_tot in (9 * 10 ** 5, 10 ** 6, 11 * 10 ** 5):
            ph = sample_interaction_phase(cfg, n_tot, t, n_shots=5000,
                                          seed=int(rng.integers(1 << 30)), echo=True)
            spreads.append(ph.mean())
        # means stay at zero regardless of N (the (g11 - g22) N/2 term would
        # shift them by ~milliradians times the N difference otherwise)
        assert np.max(np.abs(spreads)) < 0.01
        no_echo_shift = abs(collisional_shift(cfg, 11e5) - collisional_shift(cfg, 9e5)) * t
        assert no_echo_shift > 10 * np.max(np.abs(spreads))


class TestLossVisibility:
    @pytest.mark.parametrize("ratio,expected", [
        (2.0, 0.9428), (10.0, 0.5750), (2.5, 0.9035)])
    def test_population_ratio_anchors(self, ratio, expected):
        assert population_imbalance_visibility(ratio, 1.0) == pytest.approx(
            expected, abs=1e-4)

    def test_equal_populations_full_contrast(self):
        assert population_imbalance_visibility(3.0, 3.0) == pytest.approx(1.0)

    def test_exponential_loss(self):
        # after time t, population ratio is exp((k2-k1) t)
        v = loss_visibility(1.0, 1.0 + np.log(2), 1.0)
        assert v == pytest.approx(0.9428, abs=1e-4)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            population_imbalance_visibility(-1.0, 1.0)


class TestDriftModel:
    def test_half_probability_at_zero_time_phase(self):
        assert drift_fringe_probability(0.0, 0.8, 1.0, 10.0) == pytest.approx(0.9)

    def test_crossing_time(self):
        nu = 2 * np.pi / 0.141 ** 2  # rate giving ~141 ms first crossing
        t_c = drift_crossing_time(nu)
        assert t_c == pytest.approx(0.141, rel=1e-6)
        # chirped phase is pi/2 there
        assert nu * t_c ** 2 / 4 == pytest.approx(np.pi / 2, rel=1e-12)

    def test_envelope_decay(self):
        p = drift_fringe_probability(np.array([0.0, 1.0]), 1.0, 1.0, 0.0)
        assert p[0] == pytest.approx(1.0)
        assert p[1] == pytest.approx(0.5 * (1 + np.exp(-1.0)))

    def test_rejects_nonpositive_drift(self):
        with pytest.raises(ValueError):
            drift_crossing_time(0.0)


class TestDifferentialLoss:
    @pytest.mark.parametrize("k1, k2, expected", [
        (1.0, 0.5, 0.9428),
        (0.9, 0.1, 0.6000),
    ])
    def test_survival_fraction_anchors(self, k1, k2, expected):
        assert twomode.differential_loss_visibility(k1, k2) == pytest.approx(
            expected, abs=5e-4)

    def test_swap_invariance(self):
        assert twomode.differential_loss_visibility(0.3, 0.8) == pytest.approx(
            twomode.differential_loss_visibility(0.8, 0.3), rel=1e-14)

    def test_common_rescaling_invariance(self):
        assert twomode.differential_loss_visibility(0.4, 0.9) == pytest.approx(
            twomode.differential_loss_visibility(0.2, 0.45), rel=1e-14)

    def test_fringe_probability(self):
        v = twomode.differential_loss_visibility(0.6, 0.2)
        phases = np.linspace(0, 2 * np.pi, 9)
        p = twomode.loss_fringe_probability(0.6, 0.2, phases)
        assert p == pytest.approx(0.5 * (1 + v * np.cos(phases)), rel=1e-13)
        assert twomode.loss_fringe_probability(0.6, 0.2, 0.0) == pytest.approx(
            0.5 * (1 + v))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            twomode.differential_loss_visibility(0.0, 0.5)
        with pytest.raises(ValueError):
            twomode.differential_loss_visibility(0.5, 1.2)


class TestDetuningToPopulation:
    def test_anchor(self):
        # 20 Hz detuning error over 5 ms shifts the mid-fringe population
        # by about 0.3
        dp = twomode.detuning_noise_to_population(5e-3, 2 * np.pi * 20.0)
        assert dp == pytest.approx(0.314, abs=0.002)

    def test_linear_scaling(self):
        base = twomode.detuning_noise_to_population(1e-3, 10.0)
        assert twomode.detuning_noise_to_population(3e-3, 10.0) == pytest.approx(
            3 * base, rel=1e-14)
        assert twomode.detuning_noise_to_population(1e-3, 20.0) == pytest.approx(
            2 * base, rel=1e-14)

    def test_rejects_negative_time(self):
        with pytest.raises(ValueError):
            twomode.detuning_noise_to_population(-1e-3, 1.0)
