"""Atomic physics inputs: species constants, magnetic sensitivity of the clock
transition, Thomas-Fermi condensate properties and two-mode coupling constants.

All frequencies inside the library are angular (rad/s) unless a variable is
explicitly named as an ordinary frequency in Hz (the hyperfine splitting f0 and
the Breit-Rabi transition frequency). Magnetic fields are stored in tesla and
scattering lengths in metres; convenience constructors accept gauss and Bohr
radii.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace

import numpy as np
from scipy import constants as const

HBAR = const.hbar
BOHR_RADIUS = const.physical_constants["Bohr radius"][0]
BOHR_MAGNETON = const.physical_constants["Bohr magneton"][0]
GAUSS = 1e-4  # tesla


def gauss_to_tesla(b_gauss):
    return np.asarray(b_gauss, dtype=float) * GAUSS


@dataclass(frozen=True)
class AtomSpecies:
    """Physical constants of a two-level (clock transition) alkali atom."""

    mass: float                 # kg
    natural_linewidth: float    # rad/s
    wavelength: float           # m (imaging transition)
    saturation_intensity: float  # W/m^2
    hyperfine_splitting: float  # Hz (ordinary frequency, as printed)
    lande_gj: float
    lande_gi: float
    a11: float                  # m
    a12: float                  # m
    a22: float                  # m
    bohr_magneton: float = BOHR_MAGNETON  # J/T

    def __post_init__(self):
        for name in ("mass", "natural_linewidth", "wavelength",
                     "saturation_intensity", "hyperfine_splitting",
                     "a11", "a12", "a22", "bohr_magneton"):
            if getattr(self, name) <= 0:
                raise ValueError(f"AtomSpecies.{name} must be positive")

    @classmethod
    def from_bohr_radii(cls, *, a11, a12, a22, **kwargs) -> "AtomSpecies":
        return cls(a11=a11 * BOHR_RADIUS, a12=a12 * BOHR_RADIUS,
                   a22=a22 * BOHR_RADIUS, **kwargs)

    def with_a12_scale(self, scale: float) -> "AtomSpecies":
        """Return a copy with the interspecies scattering length rescaled."""
        return replace(self, a12=self.a12 * scale)


# 87Rb clock states |F=1,mF=0> -> |F=2,mF=0>; scattering lengths from
# coupled-channel calculations, imaging on the D2 cycling transition.
RB87 = AtomSpecies.from_bohr_radii(
    mass=86.909180527 * const.atomic_mass,
    natural_linewidth=2 * np.pi * 6.067e6,
    wavelength=780.241e-9,
    saturation_intensity=16.7,          # 1.67 mW/cm^2
    hyperfine_splitting=6.834682611e9,  # Hz
    lande_gj=2.00233113,
    lande_gi=-0.0009951414,
    a11=100.9,
    a12=98.9,
    a22=94.9,
)


@dataclass(frozen=True)
class TrapConfig:
    """Harmonic trap; Cartesian (3 frequencies) or cylindrical (radial+axial)."""

    omega_x: float = 0.0  # rad/s
    omega_y: float = 0.0
    omega_z: float = 0.0
    omega_rho: float = 0.0

    def __post_init__(self):
        if self.omega_rho > 0:
            if self.omega_z <= 0:
                raise ValueError("cylindrical trap requires omega_z > 0")
        else:
            if min(self.omega_x, self.omega_y, self.omega_z) <= 0:
                raise ValueError("Cartesian trap requires three positive frequencies")

    @classmethod
    def cartesian(cls, omega_x, omega_y, omega_z) -> "TrapConfig":
        return cls(omega_x=omega_x, omega_y=omega_y, omega_z=omega_z)

    @classmethod
    def cylindrical(cls, omega_rho, omega_z) -> "TrapConfig":
        return cls(omega_rho=omega_rho, omega_z=omega_z)

    @property
    def omega_bar(self) -> float:
        """Geometric mean of the trapping frequencies."""
        if self.omega_rho > 0:
            return (self.omega_rho ** 2 * self.omega_z) ** (1.0 / 3.0)
        return (self.omega_x * self.omega_y * self.omega_z) ** (1.0 / 3.0)


# Crossed dipole trap of the reference experiment, 2*pi*(50, 57, 28) Hz.
REFERENCE_TRAP = TrapConfig.cartesian(2 * np.pi * 50.0, 2 * np.pi * 57.0, 2 * np.pi * 28.0)
# Cylindrically symmetric trap with matching omega_bar used for the GPE runs.
REFERENCE_TRAP_CYL = TrapConfig.cylindrical(2 * np.pi * 55.0, 2 * np.pi * 30.0)


@dataclass(frozen=True)
class FieldConfig:
    """Magnetic bias field and oscillator noise levels."""

    bias_field: float = 0.0          # T
    field_noise: float = 0.0         # T
    oscillator_frequency: float = 0.0  # rad/s
    oscillator_noise: float = 0.0    # rad/s

    def __post_init__(self):
        if self.bias_field < 0:
            raise ValueError("bias field must be >= 0")
        if self.field_noise < 0 or self.oscillator_noise < 0:
            raise ValueError("noise terms must be >= 0")


def _breit_rabi_x(species: AtomSpecies) -> float:
    # x carries 1/T so that B*x is dimensionless; the sign convention of the
    # g-factor difference is unobservable in f = f0*sqrt(1 + (Bx)^2), so the
    # magnitude is used.
    return species.bohr_magneton * abs(species.lande_gj - species.lande_gi) / (
        const.h * species.hyperfine_splitting)


def breit_rabi_frequency(species: AtomSpecies, bias_field) -> float:
    """Clock transition frequency f(B) in Hz at magnetic field B (tesla)."""
    b = np.asarray(bias_field, dtype=float)
    if np.any(b < 0):
        raise ValueError("magnetic field must be >= 0")
    x = _breit_rabi_x(species)
    out = species.hyperfine_splitting * np.sqrt(1.0 + (b * x) ** 2)
    return out if out.ndim else float(out)


def resonance_sensitivity_kappa(species: AtomSpecies, bias_field) -> float:
    """d(omega_res)/dB in rad/s per tesla: kappa = 2*pi*f0*B*x^2/sqrt(1+B^2x^2)."""
    b = np.asarray(bias_field, dtype=float)
    if np.any(b < 0):
        raise ValueError("magnetic field must be >= 0")
    x = _breit_rabi_x(species)
    out = 2 * np.pi * species.hyperfine_splitting * b * x ** 2 / np.sqrt(1.0 + (b * x) ** 2)
    return out if out.ndim else float(out)


def detuning_fluctuation(kappa: float, field_noise: float, oscillator_noise: float) -> float:
    """Quadrature combination (delta Delta)^2 = kappa^2 dB^2 + d(omega_app)^2."""
    if kappa < 0 or field_noise < 0 or oscillator_noise < 0:
        raise ValueError("inputs must be >= 0")
    return float(np.hypot(kappa * field_noise, oscillator_noise))


def tf_chemical_potential(species: AtomSpecies, trap: TrapConfig, n_atoms: float) -> float:
    """Thomas-Fermi chemical potential (J) of a single-component condensate."""
    if n_atoms <= 0:
        raise ValueError("atom number must be positive")
    wbar = trap.omega_bar
    a_ho = np.sqrt(HBAR / (species.mass * wbar))
    return 0.5 * HBAR * wbar * (15.0 * n_atoms * species.a11 / a_ho) ** 0.4


def tf_couplings(species: AtomSpecies, trap: TrapConfig, n_atoms: float):
    """Two-mode coupling constants (g11, g12, g22) in rad/s per atom.

    Thomas-Fermi overlap integrals with the component-1 density profile:
    g_ij = (U_ij/U_11) * (2^(1/5)/(7*hbar)) * (15*U_11/pi)^(2/5) * (m*wbar^2/N)^(3/5).
    """
    if n_atoms <= 0:
        raise ValueError("atom number must be positive")
    m = species.mass
    u11 = 4 * np.pi * HBAR ** 2 * species.a11 / m
    prefactor = (2.0 ** 0.2 / (7.0 * HBAR)) * (15.0 * u11 / np.pi) ** 0.4 \
        * (m * trap.omega_bar ** 2 / n_atoms) ** 0.6
    g11 = prefactor
    g12 = prefactor * species.a12 / species.a11
    g22 = prefactor * species.a22 / species.a11
    return g11, g12, g22


def miscibility_parameter(a11: float, a12: float, a22: float) -> float:
    """a11*a22/a12^2; values below 1 classify the pair as immiscible."""
    if a12 == 0:
        raise ValueError("a12 must be nonzero")
    return a11 * a22 / a12 ** 2


def is_miscible(a11: float, a12: float, a22: float) -> bool:
    return miscibility_parameter(a11, a12, a22) > 1.0


def load_species(path) -> AtomSpecies:
    """Load a species preset from a key = value config file ([species] section).

    Scattering lengths are given in Bohr radii, the linewidth and hyperfine
    splitting in Hz, the saturation intensity in mW/cm^2.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read or "species" not in parser:
        raise ValueError(f"no [species] section found in {path}")
    s = parser["species"]
    return AtomSpecies.from_bohr_radii(
        mass=s.getfloat("mass_amu") * const.atomic_mass,
        natural_linewidth=2 * np.pi * s.getfloat("linewidth_hz"),
        wavelength=s.getfloat("wavelength_nm") * 1e-9,
        saturation_intensity=s.getfloat("saturation_intensity_mw_cm2") * 10.0,
        hyperfine_splitting=s.getfloat("hyperfine_splitting_hz"),
        lande_gj=s.getfloat("lande_gj"),
        lande_gi=s.getfloat("lande_gi"),
        a11=s.getfloat("a11_a0"),
        a12=s.getfloat("a12_a0"),
        a22=s.getfloat("a22_a0"),
    )
