import numpy as np
import pytest
from scipy import constants as const

from ramsey_lab.atomphys import RB87
from ramsey_lab.imaging import (
    CloudConfig,
    ImagingConfig,
    atoms_per_pixel,
    column_density_grid,
    detection_noise,
    monte_carlo_sigma,
    optimize_parameters,
    pixel_detection_variance,
    shadow_count_for_atoms,
    simulate_image_pair,
    write_pgm,
)


@pytest.fixture
def cfg():
    return ImagingConfig()


@pytest.fixture
def cloud():
    return CloudConfig.thomas_fermi(RB87, 2 * np.pi * 50, 2 * np.pi * 57,
                                    2 * np.pi * 28, 1e6)


class TestConfig:
    def test_cross_section(self, cfg):
        assert cfg.cross_section == pytest.approx(
            3 * RB87.wavelength ** 2 / (2 * np.pi))

    def test_detuning_factor(self):
        on = ImagingConfig(probe_detuning=0.0)
        off = ImagingConfig(probe_detuning=RB87.natural_linewidth)
        assert on.detuning_factor == pytest.approx(1.0)
        assert off.detuning_factor == pytest.approx(5.0)

    def test_saturation_count_by_hand(self, cfg):
        # eta * A_px_object * tau * I_sat / (h c / lambda)
        expected = (0.17 * (13e-6 / 8) ** 2 * 100e-6 * 16.7
                    / (const.h * const.c / RB87.wavelength))
        assert cfg.saturation_count == pytest.approx(expected, rel=1e-12)

    def test_full_well_check(self):
        assert not ImagingConfig(intensity_ratio=15).exceeds_full_well()
        assert ImagingConfig(intensity_ratio=25).exceeds_full_well()

    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            ImagingConfig(exposure_time=0.0)


class TestAtomExtraction:
    def test_no_atoms_no_signal(self, cfg):
        e = cfg.bright_count
        assert atoms_per_pixel(cfg, e, e) == pytest.approx(0.0)

    def test_inversion_round_trip(self, cfg):
        n_px = np.array([0.0, 1.0, 20.0, 80.0, 150.0])
        e_f = shadow_count_for_atoms(cfg, n_px)
        back = atoms_per_pixel(cfg, cfg.bright_count, e_f)
        assert back == pytest.approx(n_px, abs=1e-8)

    def test_shadow_monotone_decreasing(self, cfg):
        e_f = shadow_count_for_atoms(cfg, np.linspace(0, 200, 40))
        assert np.all(np.diff(e_f) < 0)

    def test_optically_thin_limit(self, cfg):
        # for weak absorption the two terms reduce to
        # N ~= c0 (L/e_i + 1/e_sat) (e_i - e_f)
        n_px = 0.01
        e_f = shadow_count_for_atoms(cfg, n_px)
        e_i = cfg.bright_count
        approx = cfg.atoms_per_count * (cfg.detuning_factor / e_i
                                        + 1 / cfg.saturation_count) * (e_i - e_f)
        assert approx == pytest.approx(n_px, rel=1e-3)

    def test_rejects_nonpositive_counts(self, cfg):
        with pytest.raises(ValueError):
            atoms_per_pixel(cfg, 0.0, 10.0)


class TestNoisePairing:
    def test_monte_carlo_selects_standard_pairing(self):
        # Poisson shot noise propagated through the estimator matches the
        # grouping where each frame multiplies its own derivative; the
        # swapped grouping overestimates strongly at high optical depth.
        cfg = ImagingConfig(intensity_ratio=2.0)
        e_i = cfg.bright_count
        e_f = 0.05 * e_i
        rng = np.random.default_rng(0)
        b = np.maximum(rng.poisson(e_i, 60000).astype(float), 1)
        s = np.maximum(rng.poisson(e_f, 60000).astype(float), 1)
        mc = atoms_per_pixel(cfg, b, s).std()
        std_std = np.sqrt(pixel_detection_variance(cfg, e_f))
        std_swp = np.sqrt(pixel_detection_variance(cfg, e_f, pairing="swapped"))
        assert mc == pytest.approx(std_std, rel=0.03)
        assert std_swp > 2 * mc

    def test_pairings_agree_at_weak_absorption(self, cfg):
        e_f = 0.98 * cfg.bright_count
        a = pixel_detection_variance(cfg, e_f)
        b = pixel_detection_variance(cfg, e_f, pairing="swapped")
        assert a == pytest.approx(b, rel=0.01)

    def test_unknown_pairing(self, cfg):
        with pytest.raises(ValueError):
            pixel_detection_variance(cfg, 100.0, pairing="other")


class TestCloudModel:
    def test_column_density_normalized(self, cloud, cfg):
        atoms, roi = column_density_grid(cloud, cfg)
        assert atoms[roi].sum() == pytest.approx(cloud.n_atoms, rel=5e-3)

    def test_peak_column_density(self, cloud, cfg):
        atoms, _ = column_density_grid(cloud, cfg)
        rx, ry = cloud.expanded_radii()
        dpx = cfg.pixel_size / cfg.magnification
        expected = 2.5 * cloud.n_atoms / (np.pi * rx * ry) * dpx ** 2
        assert atoms.max() == pytest.approx(expected, rel=1e-4)

    def test_ballistic_expansion(self, cloud):
        rx, ry = cloud.expanded_radii()
        assert rx == pytest.approx(
            cloud.radius_x * np.sqrt(1 + (cloud.omega_x * 0.03) ** 2))
        assert rx > cloud.radius_x


class TestDetectionNoise:
    def test_reference_budget(self, cloud, cfg):
        res = detection_noise(cloud, cfg)
        # frozen oracle value for the default configuration
        assert res["sigma_det"] == pytest.approx(129.9, rel=0.01)
        assert 7.0 < res["shot_noise_ratio"] < 11.0
        assert res["full_well_ok"]

    def test_monte_carlo_agrees(self, cloud, cfg):
        mc = monte_carlo_sigma(cloud, cfg, n_shots=120, seed=5)
        assert mc == pytest.approx(detection_noise(cloud, cfg)["sigma_det"],
                                   rel=0.15)

    def test_image_pair_total_unbiased(self, cloud, cfg):
        res = simulate_image_pair(cloud, cfg, seed=3)
        assert res["true_atoms"] == pytest.approx(cloud.n_atoms, rel=5e-3)
        assert res["total_atoms"] == pytest.approx(
            res["true_atoms"], abs=6 * detection_noise(cloud, cfg)["sigma_det"])

    def test_more_light_less_noise_until_full_well(self, cloud):
        s_low = detection_noise(cloud, ImagingConfig(intensity_ratio=2.0))
        s_mid = detection_noise(cloud, ImagingConfig(intensity_ratio=15.0))
        assert s_mid["sigma_det"] < s_low["sigma_det"]


class TestOptimization:
    def test_optimum_respects_full_well(self, cloud):
        base = ImagingConfig()
        best = optimize_parameters(cloud, base,
                                   intensity_ratios=np.arange(2.0, 31.0, 1.0))
        assert best["bright_count"] <= base.full_well
        assert best["intensity_ratio"] < 21.0  # s=21 overfills the well

    def test_optimum_is_best_feasible(self, cloud):
        base = ImagingConfig()
        ratios = np.arange(2.0, 31.0, 4.0)
        best = optimize_parameters(cloud, base, intensity_ratios=ratios)
        from dataclasses import replace
        for s in ratios:
            c = replace(base, intensity_ratio=float(s))
            if c.exceeds_full_well():
                continue
            assert detection_noise(cloud, c)["sigma_det"] >= best["sigma_det"] - 1e-9

    def test_infeasible_raises(self, cloud):
        with pytest.raises(ValueError):
            optimize_parameters(cloud, ImagingConfig(),
                                intensity_ratios=[30.0, 40.0])


class TestPgm:
    def test_round_trip_header_and_payload(self, tmp_path):
        img = np.arange(12, dtype=float).reshape(3, 4)
        path = tmp_path / "img.pgm"
        write_pgm(path, img, max_value=11.0)
        raw = path.read_bytes()
        header, payload = raw.split(b"65535\n", 1)
        assert header == b"P5\n4 3\n"
        data = np.frombuffer(payload, dtype=">u2").reshape(3, 4)
        assert data[0, 0] == 0
        assert data[2, 3] == 65535

    def test_rejects_non_2d(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm(tmp_path / "x.pgm", np.zeros(5))
