import numpy as np
import pytest

from ramsey_lab.squeezing import (
    SpinMoments,
    best_phase_sensitivity,
    dicke_moments,
    minimal_quadrature_variance,
    oat_moments,
    optimal_alignment_angle,
    phase_sensitivity,
    rotation_about,
    standard_quantum_limit,
    wineland_parameter,
)


class TestClosedFormMoments:
    def test_untwisted_coherent_state(self):
        m = oat_moments(100, 0.0)
        assert m.mean[0] == pytest.approx(50.0)
        assert m.covariance[1, 1] == pytest.approx(25.0)
        assert m.covariance[2, 2] == pytest.approx(25.0)
        assert m.covariance[1, 2] == pytest.approx(0.0)
        # Var(Jx) = 0 for the polarized direction of a CSS
        assert m.covariance[0, 0] == pytest.approx(0.0, abs=1e-9)

    def test_two_atom_hand_computation(self):
        # N = 2 worked out by hand: Cov(Jy,Jz) = sin(mu)/2.
        mu = 0.3
        m = oat_moments(2, mu)
        assert m.mean[0] == pytest.approx(np.cos(mu))
        assert m.covariance[1, 2] == pytest.approx(np.sin(mu) / 2)
        assert m.covariance[2, 2] == pytest.approx(0.5)

    @pytest.mark.parametrize("n", [2, 3, 10, 40, 120])
    @pytest.mark.parametrize("mu", [0.0, 0.01, 0.1, 0.5])
    def test_matches_dicke_oracle(self, n, mu):
        analytic = oat_moments(n, mu)
        exact = dicke_moments(n, mu)
        assert analytic.mean == pytest.approx(exact.mean, abs=1e-9)
        assert analytic.covariance == pytest.approx(exact.covariance, abs=1e-8)

    def test_large_n_small_mu_stability(self):
        # exp/log forms stay finite where naive powers would underflow
        m = oat_moments(10 ** 6, 1e-9)
        assert np.isfinite(m.mean[0])
        assert m.mean[0] == pytest.approx(5e5, rel=1e-6)


class TestRotations:
    @pytest.mark.parametrize("axis,angle", [
        ("x", 0.4), ("y", -0.7), ("z", 1.1)])
    def test_moment_transform_matches_state_rotation(self, axis, angle):
        n, mu = 20, 0.15
        rotated = oat_moments(n, mu).rotated(rotation_about(axis, angle))
        exact = dicke_moments(n, mu, rotations=((axis, angle),))
        assert rotated.mean == pytest.approx(exact.mean, abs=1e-9)
        assert rotated.covariance == pytest.approx(exact.covariance, abs=1e-8)

    def test_rotation_composition(self):
        n, mu = 16, 0.2
        seq = (("x", 0.3), ("y", 0.5))
        m = oat_moments(n, mu)
        m = m.rotated(rotation_about("x", 0.3)).rotated(rotation_about("y", 0.5))
        exact = dicke_moments(n, mu, rotations=seq)
        assert m.covariance == pytest.approx(exact.covariance, abs=1e-8)

    def test_orthogonality(self):
        r = rotation_about("y", 0.37)
        assert r @ r.T == pytest.approx(np.eye(3), abs=1e-14)


class TestAlignment:
    def test_aligned_variance_is_minimal(self):
        m = oat_moments(100, 0.05)
        nu = optimal_alignment_angle(m)
        aligned = m.rotated(rotation_about("x", nu))
        assert aligned.covariance[2, 2] == pytest.approx(
            minimal_quadrature_variance(m), rel=1e-10)
        assert aligned.covariance[2, 2] < m.covariance[2, 2]

    def test_squeezing_beats_coherent_state(self):
        css = oat_moments(200, 0.0)
        squeezed = oat_moments(200, 0.02)
        assert wineland_parameter(squeezed) < wineland_parameter(css)
        assert wineland_parameter(css) == pytest.approx(1.0)

    def test_minimal_variance_eigenvalue(self):
        m = oat_moments(60, 0.1)
        block = m.covariance[1:, 1:]
        assert minimal_quadrature_variance(m) == pytest.approx(
            np.linalg.eigvalsh(block)[0], rel=1e-12)


class TestPhaseSensitivity:
    def test_unsqueezed_is_flat_sql(self):
        n = 10 ** 4
        phi = np.linspace(-1.2, 1.2, 7)
        dphi = phase_sensitivity(n, 0.0, phi)
        assert dphi == pytest.approx(np.full(7, standard_quantum_limit(n)), rel=1e-9)

    def test_squeezed_beats_sql_at_optimum(self):
        n = 1000
        mu = 2.0 / n ** (2 / 3)  # near-optimal twisting strength scaling
        best, _ = best_phase_sensitivity(n, mu)
        assert best < 0.5 * standard_quantum_limit(n)

    def test_sensitivity_matches_dicke_oracle(self):
        # full pipeline at small N: align, rotate by phi, slope and variance
        n, mu, phi = 40, 0.12, 0.3
        nu = optimal_alignment_angle(oat_moments(n, mu))
        exact = dicke_moments(n, mu, rotations=(("x", nu), ("y", phi)))
        jx_aligned = oat_moments(n, mu).rotated(
            rotation_about("x", nu)).mean[0]
        expected = np.sqrt(exact.covariance[2, 2]) / abs(np.cos(phi) * jx_aligned)
        assert phase_sensitivity(n, mu, phi) == pytest.approx(expected, rel=1e-8)

    def test_wineland_parameter_consistent_with_sensitivity(self):
        # xi^2 = (dphi_best / sql)^2 up to the operating-phase optimization
        n, mu = 400, 0.01
        m = oat_moments(n, mu)
        xi2 = wineland_parameter(m)
        best, _ = best_phase_sensitivity(n, mu)
        assert best ** 2 / standard_quantum_limit(n) ** 2 == pytest.approx(
            xi2, rel=0.05)

    def test_sql_rejects_bad_input(self):
        with pytest.raises(ValueError):
            standard_quantum_limit(0)
