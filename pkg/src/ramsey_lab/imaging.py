"""Absorption imaging: atom-number extraction from bright/shadow frame pairs,
the photon shot-noise budget, synthetic Poisson images and parameter
optimization under camera constraints.

With saturation included, the atom number seen by one pixel follows from the
bright-field and shadow photoelectron counts e_i and e_f:

    N_px = c0 * [ L * ln(e_i/e_f) + (e_i - e_f)/e_sat ]

where c0 = A_px / (M^2 sigma_0) is the object-plane pixel area over the
resonant cross section sigma_0 = 3 lambda^2 / (2 pi), L = (4 Delta^2 +
Gamma^2)/Gamma^2 accounts for probe detuning, and e_sat is the photoelectron
count corresponding to the saturation intensity over one exposure. Photon shot
noise on both frames propagates to a per-pixel detection variance; summed over
the region of interest it gives the atom-number resolution sigma_det.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import constants as const

from .atomphys import AtomSpecies, RB87


@dataclass(frozen=True)
class ImagingConfig:
    """Probe, camera and geometry parameters of the absorption imaging system."""

    species: AtomSpecies = RB87
    pixel_size: float = 13e-6        # m, on the camera
    magnification: float = 8.0
    exposure_time: float = 100e-6    # s
    quantum_efficiency: float = 0.17  # photoelectrons per photon
    intensity_ratio: float = 15.0    # probe intensity I / I_sat
    probe_detuning: float = 0.0      # rad/s
    full_well: float = 60e3          # photoelectrons per pixel

    def __post_init__(self):
        for name in ("pixel_size", "magnification", "exposure_time",
                     "quantum_efficiency", "intensity_ratio", "full_well"):
            if getattr(self, name) <= 0:
                raise ValueError(f"ImagingConfig.{name} must be positive")

    @property
    def cross_section(self) -> float:
        """Resonant scattering cross section sigma_0 = 3 lambda^2 / (2 pi)."""
        return 3.0 * self.species.wavelength ** 2 / (2.0 * np.pi)

    @property
    def detuning_factor(self) -> float:
        """L = (4 Delta^2 + Gamma^2) / Gamma^2; equals 1 on resonance."""
        gamma = self.species.natural_linewidth
        return (4.0 * self.probe_detuning ** 2 + gamma ** 2) / gamma ** 2

    @property
    def object_pixel_area(self) -> float:
        return (self.pixel_size / self.magnification) ** 2

    @property
    def atoms_per_count(self) -> float:
        """c0 = object-plane pixel area / cross section."""
        return self.object_pixel_area / self.cross_section

    @property
    def photon_energy(self) -> float:
        return const.h * const.c / self.species.wavelength

    @property
    def saturation_count(self) -> float:
        """Photoelectrons per pixel for I = I_sat over one exposure."""
        return (self.quantum_efficiency * self.object_pixel_area
                * self.exposure_time * self.species.saturation_intensity
                / self.photon_energy)

    @property
    def bright_count(self) -> float:
        """Mean bright-field photoelectrons per pixel."""
        return self.intensity_ratio * self.saturation_count

    def exceeds_full_well(self) -> bool:
        return self.bright_count > self.full_well


def atoms_per_pixel(cfg: ImagingConfig, bright, shadow) -> np.ndarray:
    """Atom number in each pixel from the photoelectron counts of both frames."""
    e_i = np.asarray(bright, dtype=float)
    e_f = np.asarray(shadow, dtype=float)
    if np.any(e_i <= 0) or np.any(e_f <= 0):
        raise ValueError("photoelectron counts must be positive")
    out = cfg.atoms_per_count * (cfg.detuning_factor * np.log(e_i / e_f)
                                 + (e_i - e_f) / cfg.saturation_count)
    return out if out.ndim else float(out)


def shadow_count_for_atoms(cfg: ImagingConfig, n_atoms_px) -> np.ndarray:
    """Mean shadow photoelectrons e_f that produce the given pixel atom number.

    Inverts the atom-number relation for e_f with a vectorized Newton
    iteration; the left side is strictly decreasing in e_f so the iteration
    converges from any interior starting point (a bisection fallback guards
    pathological steps).
    """
    n_px = np.atleast_1d(np.asarray(n_atoms_px, dtype=float))
    if np.any(n_px < 0):
        raise ValueError("pixel atom numbers must be >= 0")
    e_i = cfg.bright_count
    e_sat = cfg.saturation_count
    big_l = cfg.detuning_factor
    target = n_px / cfg.atoms_per_count
    # optically thin start, refined by Newton on
    # h(e_f) = L ln(e_i/e_f) + (e_i - e_f)/e_sat - target
    e_f = np.clip(e_i - target * e_sat / (1.0 + big_l * e_sat / e_i),
                  1e-12 * e_i, e_i)
    for _ in range(80):
        h = big_l * np.log(e_i / e_f) + (e_i - e_f) / e_sat - target
        dh = -big_l / e_f - 1.0 / e_sat
        step = h / dh
        e_new = e_f - step
        bad = (e_new <= 0) | (e_new > e_i)
        e_new[bad] = 0.5 * e_f[bad]
        if np.max(np.abs(e_new - e_f) / e_f) < 1e-13:
            e_f = e_new
            break
        e_f = e_new
    return e_f if np.ndim(n_atoms_px) else float(e_f[0])


def pixel_detection_variance(cfg: ImagingConfig, shadow_mean,
                             pairing: str = "standard") -> np.ndarray:
    """Photon shot-noise variance of the per-pixel atom number.

    pairing="standard" propagates each frame's shot noise through its own
    logarithmic derivative:

        sigma^2 = c0^2 [ e_i (L/e_i + 1/e_sat)^2 + e_f (L/e_f + 1/e_sat)^2 ]

    pairing="swapped" uses the alternative grouping with the opposite frame in
    each bracket; Monte Carlo over Poisson frames agrees with "standard".
    """
    e_f = np.asarray(shadow_mean, dtype=float)
    e_i = cfg.bright_count
    e_sat = cfg.saturation_count
    big_l = cfg.detuning_factor
    c0 = cfg.atoms_per_count
    if pairing == "standard":
        out = c0 ** 2 * (e_i * (big_l / e_i + 1.0 / e_sat) ** 2
                         + e_f * (big_l / e_f + 1.0 / e_sat) ** 2)
    elif pairing == "swapped":
        out = c0 ** 2 * (e_i * (big_l / e_f + 1.0 / e_sat) ** 2
                         + e_f * (big_l / e_i + 1.0 / e_sat) ** 2)
    else:
        raise ValueError("pairing must be 'standard' or 'swapped'")
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Expanded cloud model


@dataclass(frozen=True)
class CloudConfig:
    """Thomas-Fermi cloud after ballistic expansion, seen along z."""

    n_atoms: float
    radius_x: float  # m, in-trap TF radius along x
    radius_y: float
    omega_x: float   # rad/s
    omega_y: float
    expansion_time: float = 30e-3  # s

    def expanded_radii(self) -> tuple[float, float]:
        t = self.expansion_time
        return (self.radius_x * np.sqrt(1.0 + (self.omega_x * t) ** 2),
                self.radius_y * np.sqrt(1.0 + (self.omega_y * t) ** 2))

    @classmethod
    def thomas_fermi(cls, species: AtomSpecies, omega_x: float, omega_y: float,
                     omega_z: float, n_atoms: float,
                     expansion_time: float = 30e-3) -> "CloudConfig":
        from .atomphys import TrapConfig, tf_chemical_potential
        trap = TrapConfig.cartesian(omega_x, omega_y, omega_z)
        mu = tf_chemical_potential(species, trap, n_atoms)
        rx = np.sqrt(2.0 * mu / (species.mass * omega_x ** 2))
        ry = np.sqrt(2.0 * mu / (species.mass * omega_y ** 2))
        return cls(n_atoms=n_atoms, radius_x=rx, radius_y=ry,
                   omega_x=omega_x, omega_y=omega_y,
                   expansion_time=expansion_time)


def column_density_grid(cloud: CloudConfig, cfg: ImagingConfig,
                        margin: float = 1.3) -> tuple[np.ndarray, np.ndarray]:
    """(atoms per pixel, inside-ROI mask) on the camera pixel grid.

    The column density of a Thomas-Fermi profile integrated along the line of
    sight is (5 N / (2 pi Rx Ry)) (1 - x^2/Rx^2 - y^2/Ry^2)^(3/2); the ROI is
    the pixel rectangle bounding the expanded TF radii.
    """
    rx, ry = cloud.expanded_radii()
    dpx = cfg.pixel_size / cfg.magnification
    nx = int(np.ceil(margin * rx / dpx))
    ny = int(np.ceil(margin * ry / dpx))
    x = (np.arange(-nx, nx + 1)) * dpx
    y = (np.arange(-ny, ny + 1)) * dpx
    xx, yy = np.meshgrid(x, y, indexing="ij")
    u = 1.0 - (xx / rx) ** 2 - (yy / ry) ** 2
    ncol = np.where(u > 0,
                    2.5 * cloud.n_atoms / (np.pi * rx * ry) * np.maximum(u, 0) ** 1.5,
                    0.0)
    atoms = ncol * dpx ** 2
    roi = (np.abs(xx) <= rx) & (np.abs(yy) <= ry)
    return atoms, roi


def detection_noise(cloud: CloudConfig, cfg: ImagingConfig,
                    pairing: str = "standard") -> dict:
    """Atom-number resolution of one absorption image of the cloud.

    Returns the ROI-summed shot-noise sigma_det, the peak pixel load, the
    projection noise sqrt(N p (1-p)) at p = 1/2, and the ratio sqrt(N) /
    sigma_det used to compare against single-shot number resolution.
    """
    atoms, roi = column_density_grid(cloud, cfg)
    e_f = shadow_count_for_atoms(cfg, atoms[roi])
    var = pixel_detection_variance(cfg, e_f, pairing=pairing)
    sigma_det = float(np.sqrt(var.sum()))
    n = cloud.n_atoms
    return {
        "sigma_det": sigma_det,
        "roi_pixels": int(roi.sum()),
        "bright_count": cfg.bright_count,
        "full_well_ok": not cfg.exceeds_full_well(),
        "min_shadow_count": float(e_f.min()),
        "peak_atoms_per_pixel": float(atoms.max()),
        "projection_noise_atoms": float(np.sqrt(n * 0.25)),
        "shot_noise_ratio": float(np.sqrt(n) / sigma_det),
    }


def simulate_image_pair(cloud: CloudConfig, cfg: ImagingConfig,
                        seed: int = 0) -> dict:
    """Synthetic bright/shadow frames with Poisson photon shot noise.

    Returns the two frames, the per-pixel atom estimate and the total over
    the elliptical ROI.
    """
    atoms, roi = column_density_grid(cloud, cfg)
    rng = np.random.default_rng(seed)
    e_f_mean = shadow_count_for_atoms(cfg, atoms)
    bright = rng.poisson(cfg.bright_count, size=atoms.shape).astype(float)
    shadow = rng.poisson(e_f_mean).astype(float)
    bright = np.maximum(bright, 1.0)
    shadow = np.maximum(shadow, 1.0)
    est = atoms_per_pixel(cfg, bright, shadow)
    return {
        "bright": bright,
        "shadow": shadow,
        "atoms_estimate": est,
        "roi": roi,
        "total_atoms": float(est[roi].sum()),
        "true_atoms": float(atoms[roi].sum()),
    }


def monte_carlo_sigma(cloud: CloudConfig, cfg: ImagingConfig,
                      n_shots: int = 50, seed: int = 0) -> float:
    """Spread of the ROI-summed atom estimate over repeated Poisson frames."""
    totals = np.empty(n_shots)
    for i in range(n_shots):
        totals[i] = simulate_image_pair(cloud, cfg, seed=seed ^ (i + 1))["total_atoms"]
    return float(totals.std(ddof=1))


def optimize_parameters(cloud: CloudConfig, base: ImagingConfig,
                        intensity_ratios=None, exposure_times=None,
                        magnifications=None, return_surface: bool = False) -> dict:
    """Grid search for the lowest sigma_det under the full-well constraint.

    Scans probe intensity, exposure and magnification; configurations whose
    bright frame would saturate the camera are discarded. With return_surface
    the result includes one row per scanned point: (intensity_ratio,
    exposure_time, magnification, feasible, sigma_det).
    """
    if intensity_ratios is None:
        intensity_ratios = np.arange(1.0, 31.0, 1.0)
    if exposure_times is None:
        exposure_times = [base.exposure_time]
    if magnifications is None:
        magnifications = [base.magnification]
    best = None
    n_feasible = 0
    surface = []
    for mag in magnifications:
        for tau in exposure_times:
            for s in intensity_ratios:
                cfg = replace(base, magnification=float(mag),
                              exposure_time=float(tau), intensity_ratio=float(s))
                if cfg.exceeds_full_well():
                    if return_surface:
                        surface.append((float(s), float(tau), float(mag),
                                        False, float("nan")))
                    continue
                n_feasible += 1
                res = detection_noise(cloud, cfg)
                if return_surface:
                    surface.append((float(s), float(tau), float(mag),
                                    True, res["sigma_det"]))
                if best is None or res["sigma_det"] < best["sigma_det"]:
                    best = dict(res)
                    best.update(intensity_ratio=float(s), exposure_time=float(tau),
                                magnification=float(mag))
    if best is None:
        raise ValueError("no configuration satisfies the full-well constraint")
    best["n_feasible"] = n_feasible
    if return_surface:
        best["surface"] = surface
    return best


def write_pgm(path, image, max_value: int | None = None) -> None:
    """Write a 2D array as a binary 16-bit PGM image."""
    img = np.asarray(image, dtype=float)
    if img.ndim != 2:
        raise ValueError("image must be 2D")
    if max_value is None:
        max_value = max(float(img.max()), 1.0)
    scaled = np.clip(img / max_value * 65535.0, 0, 65535).astype(">u2")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n65535\n".encode())
        fh.write(scaled.tobytes())
