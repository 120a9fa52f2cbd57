import numpy as np
import pytest

from ramsey_lab import bloch
from ramsey_lab.bloch import (
    PulseConfig,
    detuning_sensitivity,
    monte_carlo_pz,
    optimal_detuning,
    optimal_eps,
    power_sensitivity,
    pz_variance,
    pz_variance_small_eps,
    rabi_from_power_noise,
    ramsey_fringe,
    resonant_variance,
    simulate_sequence,
    transition_probability,
)

RABI = 2 * np.pi * 500.0


def first_zero_crossing(pulse: PulseConfig) -> float:
    """Smallest T > 0 with the fringe at a zero crossing of its sine."""
    omt = pulse.generalized_rabi * pulse.pulse_duration
    xi = bloch._phase_offset(pulse.eps, omt)
    k = int(np.floor(xi / np.pi)) + 1
    t = (k * np.pi - xi) / abs(pulse.detuning)
    while t <= 0:
        k += 1
        t = (k * np.pi - xi) / abs(pulse.detuning)
    return t


class TestPulseConfig:
    def test_resonant_duration_is_quarter_period(self):
        p = PulseConfig(RABI, 0.0)
        assert p.pulse_duration == pytest.approx(np.pi / 2 / RABI)

    def test_detuned_duration(self):
        p = PulseConfig(RABI, 0.5 * RABI)
        expected = np.arccos(-0.25) / (RABI * np.sqrt(1.25))
        assert p.pulse_duration == pytest.approx(expected)

    def test_rejects_detuning_at_or_above_rabi(self):
        with pytest.raises(ValueError):
            PulseConfig(RABI, RABI)


class TestFringe:
    def test_resonant_full_transfer(self):
        p = PulseConfig(RABI, 0.0)
        for t in [0.0, 1e-3, 1e-2]:
            assert ramsey_fringe(p, t) == pytest.approx(-1.0)
            assert transition_probability(ramsey_fringe(p, t)) == pytest.approx(1.0)

    @pytest.mark.parametrize("eps", [0.02, 0.05, 0.2, 0.4, 0.7])
    @pytest.mark.parametrize("free_time", [0.0, 1e-3, 3.7e-3, 1e-2])
    def test_matches_unitary_simulator(self, eps, free_time):
        det = eps * RABI
        p = PulseConfig(RABI, det)
        assert ramsey_fringe(p, free_time) == pytest.approx(
            simulate_sequence(RABI, det, free_time), abs=1e-12)

    @pytest.mark.parametrize("eps", [0.05, 0.3, 0.6])
    def test_designed_pulse_gives_full_contrast(self, eps):
        # The equator-reaching pulse length makes cos(Omega_R t) = -eps^2, so
        # the fringe amplitude prefactor 1 - alpha^2 equals 1 at any eps.
        t = np.linspace(0, 0.05, 20001)
        amp = np.ptp(ramsey_fringe(PulseConfig(RABI, eps * RABI), t))
        assert amp == pytest.approx(2.0, abs=1e-4)

    def test_off_design_pulse_loses_contrast(self):
        # Using the resonant quarter-period duration at large detuning leaves
        # the Bloch vector off the equator and shrinks the fringe.
        t = np.linspace(0, 0.05, 20001)
        det = 0.9 * RABI
        dur = np.pi / 2 / RABI
        vals = np.array([simulate_sequence(RABI, det, ti, pulse_duration=dur)
                         for ti in t[::40]])
        assert np.ptp(vals) < 1.99

    def test_array_input(self):
        p = PulseConfig(RABI, 0.1 * RABI)
        t = np.array([0.0, 1e-3, 2e-3])
        out = ramsey_fringe(p, t)
        assert out.shape == (3,)


class TestSensitivityCoefficients:
    """f(eps) and g(eps) cross-checked against finite differences of the
    independent 2x2 unitary simulator at the first fringe zero crossing."""

    @pytest.mark.parametrize("eps", [0.05, 0.1, 0.2, 0.4])
    def test_power_coefficient_oracle(self, eps):
        det = eps * RABI
        p = PulseConfig(RABI, det)
        t = first_zero_crossing(p)
        h = 1e-6

        def pz(x):
            return simulate_sequence(RABI * np.sqrt(1 + x), det, t,
                                     pulse_duration=p.pulse_duration)

        slope = (pz(h) - pz(-h)) / (2 * h)
        assert power_sensitivity(eps) == pytest.approx(slope ** 2, rel=1e-5)

    @pytest.mark.parametrize("eps", [0.02, 0.05, 0.1, 0.2, 0.4, 0.6])
    def test_detuning_coefficient_oracle(self, eps):
        det = eps * RABI
        p = PulseConfig(RABI, det)
        t = first_zero_crossing(p)
        dd = 1e-6 * RABI

        def pz(x):
            return simulate_sequence(RABI, det + x, t,
                                     pulse_duration=p.pulse_duration)

        slope = (pz(dd) - pz(-dd)) / (2 * dd) * RABI
        assert detuning_sensitivity(eps) == pytest.approx(slope ** 2, rel=1e-5)

    def test_frozen_values(self):
        # Oracle-derived reference values (finite differences of the unitary
        # simulator, frozen).
        assert power_sensitivity(0.2) == pytest.approx(1.330164e-2, rel=1e-5)
        assert detuning_sensitivity(0.2) == pytest.approx(6.156171e1, rel=1e-5)
        assert power_sensitivity(0.05) == pytest.approx(8.155487e-4, rel=1e-5)
        assert detuning_sensitivity(0.05) == pytest.approx(9.869303e2, rel=1e-5)

    def test_small_eps_limits(self):
        eps = np.array([0.01, 0.03, 0.1])
        approx_f = (np.pi / 2 - 1) ** 2 * eps ** 2
        approx_g = (np.pi / (2 * eps)) ** 2
        assert power_sensitivity(eps) == pytest.approx(approx_f, rel=0.05)
        assert detuning_sensitivity(eps) == pytest.approx(approx_g, rel=0.05)


class TestVarianceBudget:
    def test_small_eps_approximation_tracks_exact(self):
        # g-dominated budget typical of clock operation.
        dpp, ddo = 0.005, 0.012
        eps = np.linspace(0.05, 0.4, 15)
        exact = pz_variance(eps, dpp, ddo)
        approx = pz_variance_small_eps(eps, dpp, ddo)
        assert np.all(np.abs(approx / exact - 1.0) < 0.05)

    def test_optimal_eps_minimizes_small_eps_variance(self):
        dpp, ddo = 0.01, 0.001
        e_opt = optimal_eps(dpp, ddo)
        grid = np.linspace(0.5 * e_opt, 2.0 * e_opt, 2001)
        v = pz_variance_small_eps(grid, dpp, ddo)
        assert abs(grid[np.argmin(v)] - e_opt) < 2 * (grid[1] - grid[0])

    def test_optimal_detuning_prefactor(self):
        # |Delta_opt| = 1.66 sqrt(dDelta * Omega * P/dP)
        dpp, dd = 0.01, 2 * np.pi * 0.5
        d_opt = optimal_detuning(dpp, dd, RABI)
        assert d_opt == pytest.approx(1.66 * np.sqrt(dd * RABI / dpp), rel=0.01)

    def test_resonant_power_term_is_fourth_order(self):
        # (pi/4)^2 (dP/P)^2 = 1.54e-5 in P_z for 0.5% power noise.
        var = resonant_variance(0.005, 0.0)
        assert np.sqrt(var) == pytest.approx((np.pi / 4) ** 2 * 0.005 ** 2, rel=1e-12)
        assert np.sqrt(var) == pytest.approx(1.54e-5, rel=0.01)

    def test_resonant_detuning_term(self):
        var = resonant_variance(0.0, 1e-3)
        assert np.sqrt(var) == pytest.approx(2e-3)

    def test_rabi_noise_is_half_power_noise(self):
        assert rabi_from_power_noise(0.01) == pytest.approx(0.005)


class TestSinglePulse:
    def test_resonant_pi_half_is_half_transfer(self):
        p = bloch.rabi_transition_probability(RABI, 0.0, np.pi / 2 / RABI)
        assert p == pytest.approx(0.5)

    def test_resonant_pi_pulse_full_transfer(self):
        assert bloch.rabi_transition_probability(RABI, 0.0, np.pi / RABI) \
            == pytest.approx(1.0)

    def test_detuned_designed_pulse_reaches_half(self):
        det = 0.5 * RABI
        t = bloch.pi_half_duration(RABI, det)
        assert bloch.rabi_transition_probability(RABI, det, t) == pytest.approx(0.5)

    def test_bounded_and_periodic(self):
        t = np.linspace(0, 0.02, 500)
        p = bloch.rabi_transition_probability(RABI, 0.3 * RABI, t)
        assert np.all((p >= 0) & (p <= 1))
        period = 2 * np.pi / np.hypot(RABI, 0.3 * RABI)
        p2 = bloch.rabi_transition_probability(RABI, 0.3 * RABI, t + period)
        assert p2 == pytest.approx(p, abs=1e-9)

    @pytest.mark.parametrize("eps", [0.05, 0.3, 0.5, 0.7, 0.9])
    def test_optimal_evolution_time_zero_crossing(self, eps):
        det = eps * RABI
        assert ramsey_fringe(PulseConfig(RABI, det),
                             bloch.optimal_evolution_time(RABI, det)) \
            == pytest.approx(0.0, abs=1e-10)

    def test_optimal_evolution_time_resonant_error(self):
        with pytest.raises(ValueError):
            bloch.optimal_evolution_time(RABI, 0.0)

    def test_ideal_probability_slope(self):
        t_free = 0.1
        det = np.pi / 2 / t_free  # mid fringe
        h = 1e-7
        slope = (bloch.ideal_ramsey_probability(det + h, t_free)
                 - bloch.ideal_ramsey_probability(det - h, t_free)) / (2 * h)
        assert abs(slope) == pytest.approx(t_free / 2, rel=1e-6)
        assert bloch.ideal_ramsey_probability(0.0, t_free) == pytest.approx(1.0)

    def test_max_detuning_fluctuation_anchor(self):
        dd = bloch.max_detuning_fluctuation(5e-3, 1e6)
        assert dd == pytest.approx(0.2)
        assert dd / (2 * np.pi) == pytest.approx(0.0318, rel=0.01)
        assert bloch.max_detuning_fluctuation(5e-3, 1e8) == pytest.approx(dd / 10)

    def test_oscillator_stability_bound(self):
        s = bloch.oscillator_stability_bound(5e-3, 1e6, 6.834682611e9)
        assert s == pytest.approx(4.66e-12, rel=0.01)

    def test_beamsplitter_sensitivity_terms(self):
        w = 2 * np.pi * 833
        assert bloch.single_beamsplitter_sensitivity(0, w, 2 * np.pi * 10, 0) == 0.0
        assert bloch.single_beamsplitter_sensitivity(0, w, 0, 0.005) \
            == pytest.approx(np.pi / 4 * 0.005)
        est = bloch.single_beamsplitter_sensitivity(
            2 * np.pi * 100, w, 2 * np.pi * 10, 0)
        assert est == pytest.approx((2 - np.pi / 2) * 0.12 * 0.012, rel=1e-3)

    def test_beamsplitter_exact_companion_same_order(self):
        w = 2 * np.pi * 833
        est = bloch.single_beamsplitter_sensitivity(
            2 * np.pi * 100, w, 2 * np.pi * 10, 0.002)
        exact = bloch.single_beamsplitter_sensitivity_exact(
            2 * np.pi * 100, w, 2 * np.pi * 10, 0.002)
        assert exact == pytest.approx(est, rel=0.8)

    def test_optimal_eps_exact_matches_approximation(self):
        # printed closed form within 8% of the numerical minimizer when the
        # optimum sits below eps = 0.32
        for dpp, ddo in [(0.005, 1e-4), (0.01, 3e-4), (0.02, 5e-4)]:
            approx = optimal_eps(dpp, ddo)
            exact = bloch.optimal_eps_exact(dpp, ddo)
            assert exact < 0.32
            assert approx == pytest.approx(exact, rel=0.08)


class TestMonteCarlo:
    def test_variance_matches_linear_budget(self):
        eps = 0.2
        det = eps * RABI
        p = PulseConfig(RABI, det)
        t = first_zero_crossing(p)
        dpp, dd = 0.002, 2e-4 * RABI
        _, std = monte_carlo_pz(RABI, det, t, dpp, dd, n_shots=4000, seed=7)
        predicted = np.sqrt(pz_variance(eps, dpp, dd / RABI))
        assert std == pytest.approx(predicted, rel=0.1)

    def test_resonant_detuning_coefficient_from_pulses(self):
        # The resonant budget term 4 (dDelta/Omega)^2 comes from detuning
        # fluctuations during the pulses only (the fringe phase is scanned,
        # not accumulated). Finite differences of the simulator at a mid
        # fringe point with pulses-only detuning shift reproduce it.
        eps = 0.02
        det = eps * RABI
        p = PulseConfig(RABI, det)
        t = first_zero_crossing(p)
        dd = 1e-6 * RABI

        def pz(x):
            return simulate_sequence(RABI, det, t,
                                     pulse_duration=p.pulse_duration,
                                     detuning_first=det + x,
                                     detuning_second=det + x)

        slope = (pz(dd) - pz(-dd)) / (2 * dd) * RABI
        assert slope ** 2 == pytest.approx(4.0, rel=0.02)
        assert np.sqrt(resonant_variance(0.0, 5e-4)) == pytest.approx(1e-3)
