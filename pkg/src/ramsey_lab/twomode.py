"""Two-mode description of the interferometer: mean-field phase evolution,
interaction phase diffusion, spin-echo cancellation, loss-induced contrast and
a slow-drift fringe model.

The relative phase between the two condensate components evolves as

    dphi/dt = (omega_1 - omega_2) + (g11 - g12) N1 - (g22 - g12) N2

with per-atom coupling rates g_ij (rad/s per atom, see
atomphys.tf_couplings). Writing N1 = N/2 + n, N2 = N/2 - n this splits into a
total-number channel proportional to (g11 - g22) and a number-difference
channel proportional to chi = (g11 - 2 g12 + g22)/2. The binomial
number-difference noise of a 50/50 beamsplitter gives the phase diffusion,
while shot-to-shot total-number fluctuations feed the first channel; a spin
echo cancels the total-number channel exactly but not the diffusion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atomphys import HBAR, AtomSpecies, TrapConfig, tf_couplings


@dataclass(frozen=True)
class TwoModeConfig:
    """Per-atom coupling rates (rad/s per atom) and bare frequency difference."""

    g11: float
    g12: float
    g22: float
    omega_diff: float = 0.0  # omega_1 - omega_2, rad/s

    @classmethod
    def from_species(cls, species: AtomSpecies, trap: TrapConfig,
                     n_atoms: float, omega_diff: float = 0.0) -> "TwoModeConfig":
        g11, g12, g22 = tf_couplings(species, trap, n_atoms)
        return cls(g11=g11, g12=g12, g22=g22, omega_diff=omega_diff)

    @property
    def chi(self) -> float:
        """Number-difference coupling (g11 - 2 g12 + g22)/2, rad/s per atom."""
        return (self.g11 - 2.0 * self.g12 + self.g22) / 2.0


def phase_rate(cfg: TwoModeConfig, n1, n2) -> np.ndarray:
    """dphi/dt for populations n1, n2 (atoms)."""
    out = cfg.omega_diff + (cfg.g11 - cfg.g12) * np.asarray(n1, float) \
        - (cfg.g22 - cfg.g12) * np.asarray(n2, float)
    return out if np.ndim(out) else float(out)


def collisional_shift(cfg: TwoModeConfig, n_total: float) -> float:
    """Mean-field frequency shift at equal splitting, (g11 - g22) N/2 (rad/s)."""
    return (cfg.g11 - cfg.g22) * n_total / 2.0


def phase_diffusion_std(cfg: TwoModeConfig, n_total: float, total_time,
                        echo: bool = False) -> np.ndarray:
    """Standard deviation of the interaction phase after time total_time.

    Binomial splitting gives Var(n) = N/4 for the half number difference n,
    so the spread grows as |chi| sqrt(N) t. A spin echo at mid sequence
    reverses the deterministic phase but the number-difference channel
    re-enters with opposite sign after the population swap, leaving the same
    per-total-time diffusion rate.
    """
    del echo  # rate is identical with and without the echo
    t = np.asarray(total_time, dtype=float)
    out = abs(cfg.chi) * np.sqrt(n_total) * t
    return out if out.ndim else float(out)


def total_number_phase_std(cfg: TwoModeConfig, n_total_std: float, total_time,
                           echo: bool = False) -> np.ndarray:
    """Phase spread from shot-to-shot total atom number fluctuations.

    Without echo the spread is |g11 - g22|/2 * dN * T; the echo swaps the
    populations at T/2 so this channel cancels identically.
    """
    t = np.asarray(total_time, dtype=float)
    if echo:
        out = np.zeros_like(t)
    else:
        out = abs(cfg.g11 - cfg.g22) / 2.0 * n_total_std * t
    return out if out.ndim else float(out)


def sample_interaction_phase(cfg: TwoModeConfig, n_total: int, total_time: float,
                             n_shots: int = 4000, seed: int = 0,
                             echo: bool = False) -> np.ndarray:
    """Monte Carlo interaction phases over binomial beamsplitter outcomes.

    Integrates the piecewise-constant phase rate exactly; with echo the
    accumulated phase of the first half is reversed and the populations swap.
    """
    rng = np.random.default_rng(seed)
    n1 = rng.binomial(n_total, 0.5, n_shots).astype(float)
    n2 = n_total - n1
    if not echo:
        return phase_rate(cfg, n1, n2) * total_time
    half = total_time / 2.0
    return (phase_rate(cfg, n2, n1) - phase_rate(cfg, n1, n2)) * half


def tf_phase_diffusion_rate(species: AtomSpecies, trap: TrapConfig,
                            n_atoms: float) -> float:
    """Closed-form Thomas-Fermi diffusion rate 2 chi sqrt(N) (rad/s).

    Equals (a11 - 2 a12 + a22)/a11 * 2 (15 sqrt(m) hbar^2 wbar^3 a11)^(2/5)
    / (7 hbar) / N^(1/10); multiply by the echo half-interval (or half the
    full Ramsey time) to get the phase spread.
    """
    m = species.mass
    ratio = (species.a11 - 2.0 * species.a12 + species.a22) / species.a11
    core = (15.0 * np.sqrt(m) * HBAR ** 2 * trap.omega_bar ** 3 * species.a11) ** 0.4
    return abs(ratio) * 2.0 * core / (7.0 * HBAR) / n_atoms ** 0.1


def population_imbalance_visibility(n1, n2) -> np.ndarray:
    """Fringe visibility 2 sqrt(n1 n2)/(n1 + n2) of unequal populations.

    Asymmetric losses during the interrogation leave unequal mode populations;
    the interference contrast is bounded by this normalized overlap.
    """
    a = np.asarray(n1, dtype=float)
    b = np.asarray(n2, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("populations must be >= 0")
    out = 2.0 * np.sqrt(a * b) / (a + b)
    return out if out.ndim else float(out)


def loss_visibility(rate1: float, rate2: float, total_time) -> np.ndarray:
    """Visibility after exponential one-body losses at different rates.

    Populations decay as exp(-k_i t) from an equal split, so
    V = 2 sqrt(k1' k2')/(k1' + k2') with k_i' = exp(-k_i t).
    """
    t = np.asarray(total_time, dtype=float)
    return population_imbalance_visibility(np.exp(-rate1 * t), np.exp(-rate2 * t))


def differential_loss_visibility(k1: float, k2: float) -> float:
    """Visibility 2 sqrt(k1 k2)/(k1 + k2) for survival fractions k1, k2.

    k_i is the fraction of each component remaining at readout; equal
    survival keeps V = 1 and the value is invariant under swapping or
    common rescaling of the fractions.
    """
    if not (0.0 < k1 <= 1.0 and 0.0 < k2 <= 1.0):
        raise ValueError("survival fractions must lie in (0, 1]")
    return float(population_imbalance_visibility(k1, k2))


def loss_fringe_probability(k1: float, k2: float, phase) -> np.ndarray:
    """Fringe p(phi) = (1/2)(1 + V cos phi) at the loss-limited visibility."""
    v = differential_loss_visibility(k1, k2)
    out = 0.5 * (1.0 + v * np.cos(np.asarray(phase, dtype=float)))
    return out if out.ndim else float(out)


def detuning_noise_to_population(free_time: float, detuning_noise: float) -> float:
    """Mid-fringe population shift dp = T dDelta / 2."""
    if free_time < 0:
        raise ValueError("time must be >= 0")
    return free_time * detuning_noise / 2.0


def drift_fringe_probability(total_time, visibility0: float, decay_time: float,
                             drift_rate: float) -> np.ndarray:
    """Transition probability under a linear frequency drift.

    A resonance drifting at rate nu (rad/s^2) chirps the accumulated phase to
    nu T^2 / 4 for pulses referenced at mid sequence:

        p(T) = (1/2) [1 + V0 exp(-T/tau) cos(nu T^2 / 4)]
    """
    t = np.asarray(total_time, dtype=float)
    out = 0.5 * (1.0 + visibility0 * np.exp(-t / decay_time)
                 * np.cos(drift_rate * t ** 2 / 4.0))
    return out if out.ndim else float(out)


def drift_crossing_time(drift_rate: float) -> float:
    """Time where the drift-chirped fringe first crosses p = 1/2."""
    if drift_rate <= 0:
        raise ValueError("drift rate must be positive")
    return float(np.sqrt(2.0 * np.pi / drift_rate))
