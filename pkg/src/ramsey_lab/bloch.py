"""Two-level Ramsey sequence algebra on the Bloch sphere.

A pulse of Rabi frequency Omega at detuning Delta rotates the Bloch vector
about an axis tilted by the relative detuning eps = |Delta|/Omega at the
generalized Rabi frequency Omega_R = Omega*sqrt(1 + eps^2). The pulse length
is chosen so that a ground-state atom ends on the equator:

    t_pulse = arccos(-eps^2) / Omega_R

After free evolution for a time T and a second identical pulse, the z
projection of the Bloch vector is

    P_z(T) = alpha^2 + (1 - alpha^2) * sin(|Delta| T + xi)

with alpha = (eps^2 + cos(Omega_R t)) / (eps^2 + 1) and a phase offset xi
fixed by the pulse parameters. Populations are p = (1 - P_z)/2 for the initial
state, so P_z = -1 means full transfer.

The module also provides the first-order propagation of pulse-power and
detuning fluctuations into P_z noise, the optimum operating detuning, and a
brute-force 2x2 unitary simulator used as an independent cross-check and as
the engine for Monte Carlo noise estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PulseConfig:
    """Rabi frequency and detuning of the Ramsey beamsplitter pulses (rad/s)."""

    rabi_frequency: float
    detuning: float

    def __post_init__(self):
        if self.rabi_frequency <= 0:
            raise ValueError("Rabi frequency must be positive")
        if abs(self.detuning) >= self.rabi_frequency:
            raise ValueError("pulses require |detuning| < Rabi frequency to "
                             "reach the equator")

    @property
    def eps(self) -> float:
        return abs(self.detuning) / self.rabi_frequency

    @property
    def generalized_rabi(self) -> float:
        return self.rabi_frequency * np.sqrt(1.0 + self.eps ** 2)

    @property
    def pulse_duration(self) -> float:
        """Equator-reaching pulse length arccos(-eps^2)/Omega_R (s)."""
        return np.arccos(-self.eps ** 2) / self.generalized_rabi


def _phase_offset(eps: float, omega_r_t: float) -> float:
    """Fringe phase offset xi of the two-pulse sequence."""
    s = np.sin(omega_r_t)
    num = (1.0 + 2.0 * eps ** 2) * np.cos(omega_r_t) + 1.0
    den = 2.0 * eps * np.sqrt(1.0 + eps ** 2) * s
    # At eps = 0 the ratio num/den -> +-inf with the sign of s; arctan then
    # returns +-pi/2 and the xi branch below reproduces the resonant fringe.
    with np.errstate(divide="ignore"):
        base = np.arctan(num / den)
    n = 1.0 if s < 0 else 0.0
    return n * np.pi - base


def ramsey_fringe(pulse: PulseConfig, free_time) -> np.ndarray:
    """P_z after the pi/2 - T - pi/2 sequence, for scalar or array T."""
    t_arr = np.asarray(free_time, dtype=float)
    eps = pulse.eps
    omega_r_t = pulse.generalized_rabi * pulse.pulse_duration
    alpha = (eps ** 2 + np.cos(omega_r_t)) / (eps ** 2 + 1.0)
    xi = _phase_offset(eps, omega_r_t)
    out = alpha ** 2 + (1.0 - alpha ** 2) * np.sin(abs(pulse.detuning) * t_arr + xi)
    return out if out.ndim else float(out)


def transition_probability(pz) -> np.ndarray:
    """Population transferred out of the initial state, p = (1 - P_z)/2."""
    return (1.0 - np.asarray(pz, dtype=float)) / 2.0


def pi_half_duration(rabi_frequency: float, detuning: float) -> float:
    """Equator-reaching pulse length arccos(-eps^2)/Omega_R (s)."""
    return PulseConfig(rabi_frequency, detuning).pulse_duration


def rabi_transition_probability(rabi_frequency: float, detuning, duration) -> np.ndarray:
    """Single-pulse transfer p = (Omega/Omega_R)^2 sin^2(Omega_R t / 2)."""
    if rabi_frequency <= 0:
        raise ValueError("Rabi frequency must be positive")
    d = np.asarray(detuning, dtype=float)
    t = np.asarray(duration, dtype=float)
    if np.any(t < 0):
        raise ValueError("duration must be >= 0")
    omega_r = np.hypot(rabi_frequency, d)
    out = (rabi_frequency / omega_r) ** 2 * np.sin(omega_r * t / 2.0) ** 2
    return out if out.ndim else float(out)


def optimal_evolution_time(rabi_frequency: float, detuning: float) -> float:
    """Free evolution time T0 = arcsin(1 - 2 eps^2)/|Delta| of the first
    maximal-slope zero crossing of the fringe."""
    if detuning == 0:
        raise ValueError("T0 is undefined on resonance (the fringe is flat)")
    eps = PulseConfig(rabi_frequency, detuning).eps
    return float(np.arcsin(1.0 - 2.0 * eps ** 2) / abs(detuning))


def ideal_ramsey_probability(detuning, free_time) -> np.ndarray:
    """Transition probability (1/2)(1 + cos(T Delta)) of an ideal sequence.

    Convention of the phase-referenced sequence where zero detuning gives
    full constructive transfer; mid-fringe slope magnitude is T/2.
    """
    out = 0.5 * (1.0 + np.cos(np.asarray(free_time, float)
                              * np.asarray(detuning, float)))
    return out if np.ndim(out) else float(out)


def max_detuning_fluctuation(free_time: float, n_atoms: float) -> float:
    """Largest useful detuning fluctuation 1/(T sqrt(N)) in rad/s.

    Shot-to-shot detuning noise beyond this bound dominates the projection
    noise of an N-atom measurement at interrogation time T.
    """
    if free_time <= 0 or n_atoms < 1:
        raise ValueError("need T > 0 and N >= 1")
    return 1.0 / (free_time * np.sqrt(n_atoms))


def oscillator_stability_bound(free_time: float, n_atoms: float,
                               hyperfine_splitting: float) -> float:
    """Relative local-oscillator stability implied by max_detuning_fluctuation."""
    return max_detuning_fluctuation(free_time, n_atoms) / (
        2.0 * np.pi * hyperfine_splitting)


def single_beamsplitter_sensitivity(detuning: float, rabi_frequency: float,
                                    detuning_noise: float,
                                    power_rel_noise: float) -> float:
    """First-order shift of the single-pulse transfer probability.

    |dp| = (2 - pi/2) (Delta/Omega) (dDelta/Omega) + (pi/4) (dP/P)
    """
    eps = abs(detuning) / rabi_frequency
    return (2.0 - np.pi / 2.0) * eps * (detuning_noise / rabi_frequency) \
        + (np.pi / 4.0) * power_rel_noise


def single_beamsplitter_sensitivity_exact(detuning: float, rabi_frequency: float,
                                          detuning_noise: float,
                                          power_rel_noise: float) -> float:
    """Finite-difference companion of single_beamsplitter_sensitivity.

    Evaluates the transfer probability of the equator-reaching pulse at the
    perturbed detuning and Rabi frequency and adds the two first-order
    contributions in magnitude, like the printed estimate.
    """
    t = pi_half_duration(rabi_frequency, detuning)

    def p(rabi, det):
        return rabi_transition_probability(rabi, det, t)

    h_d = detuning_noise if detuning_noise > 0 else 1.0
    dp_det = (p(rabi_frequency, detuning + h_d)
              - p(rabi_frequency, detuning - h_d)) / 2.0
    dp_det *= detuning_noise / h_d
    h_p = power_rel_noise if power_rel_noise > 0 else 1e-6
    dp_pow = (p(rabi_frequency * np.sqrt(1 + h_p), detuning)
              - p(rabi_frequency * np.sqrt(1 - h_p), detuning)) / 2.0
    dp_pow *= power_rel_noise / h_p
    return abs(dp_det) + abs(dp_pow)


# ---------------------------------------------------------------------------
# Noise propagation


def power_sensitivity(eps) -> np.ndarray:
    """f(eps): squared coefficient of (dP/P)^2 in the P_z variance.

    f = ( eps*(arccos(-eps^2) - sqrt(1-eps^4)) / (1+eps^2)^(3/2) )^2
    """
    e = np.asarray(eps, dtype=float)
    val = e * (np.arccos(-e ** 2) - np.sqrt(1.0 - e ** 4)) / (1.0 + e ** 2) ** 1.5
    out = val ** 2
    return out if out.ndim else float(out)


def detuning_sensitivity(eps) -> np.ndarray:
    """g(eps): squared coefficient of (dDelta/Omega)^2 in the P_z variance.

    g = ( arcsin(1-2eps^2)/eps
          + 2*(sqrt(1-eps^4) + eps^2*arccos(-eps^2)) / (1+eps^2)^(3/2) )^2

    The 1/eps pole reflects the vanishing slope of the central fringe exactly
    on resonance; use resonant_variance for the eps = 0 operating point.
    """
    e = np.asarray(eps, dtype=float)
    with np.errstate(divide="ignore"):
        val = np.arcsin(1.0 - 2.0 * e ** 2) / e \
            + 2.0 * (np.sqrt(1.0 - e ** 4) + e ** 2 * np.arccos(-e ** 2)) \
            / (1.0 + e ** 2) ** 1.5
    out = val ** 2
    return out if out.ndim else float(out)


def pz_variance(eps, power_rel_noise, detuning_noise_rel) -> np.ndarray:
    """First-order variance of P_z at the central fringe zero crossing.

    (dP_z)^2 = f(eps)*(dP/P)^2 + g(eps)*(dDelta/Omega)^2, where dP/P is the
    relative pulse power fluctuation and dDelta/Omega the detuning fluctuation
    in units of the Rabi frequency.
    """
    return power_sensitivity(eps) * np.asarray(power_rel_noise, float) ** 2 \
        + detuning_sensitivity(eps) * np.asarray(detuning_noise_rel, float) ** 2


def pz_variance_small_eps(eps, power_rel_noise, detuning_noise_rel) -> np.ndarray:
    """Leading small-eps approximation of pz_variance.

    (dP_z)^2 ~= (pi/2 - 1)^2 eps^2 (dP/P)^2 + (pi/(2 eps))^2 (dDelta/Omega)^2
    """
    e = np.asarray(eps, dtype=float)
    return (np.pi / 2 - 1.0) ** 2 * e ** 2 * np.asarray(power_rel_noise, float) ** 2 \
        + (np.pi / (2.0 * e)) ** 2 * np.asarray(detuning_noise_rel, float) ** 2


def optimal_eps(power_rel_noise: float, detuning_noise_rel: float) -> float:
    """Relative detuning minimizing the small-eps variance.

    eps_opt = sqrt(|dDelta/Omega * P/dP|) / sqrt(1 - 2/pi)
    """
    if power_rel_noise <= 0 or detuning_noise_rel <= 0:
        raise ValueError("noise amplitudes must be positive")
    return np.sqrt(detuning_noise_rel / power_rel_noise) / np.sqrt(1.0 - 2.0 / np.pi)


def optimal_detuning(power_rel_noise: float, detuning_noise: float,
                     rabi_frequency: float) -> float:
    """Detuning magnitude (rad/s) at the small-eps optimum.

    |Delta_opt| = sqrt(dDelta * Omega * P/dP) / sqrt(1 - 2/pi)
                ~= 1.66 sqrt(dDelta * Omega * P/dP)
    """
    eps = optimal_eps(power_rel_noise, detuning_noise / rabi_frequency)
    return eps * rabi_frequency


def optimal_eps_exact(power_rel_noise: float, detuning_noise_rel: float) -> float:
    """Numerical minimizer of the exact variance pz_variance over eps."""
    from scipy.optimize import minimize_scalar
    if power_rel_noise <= 0 or detuning_noise_rel <= 0:
        raise ValueError("noise amplitudes must be positive")
    res = minimize_scalar(
        lambda e: pz_variance(e, power_rel_noise, detuning_noise_rel),
        bounds=(1e-5, 0.999), method="bounded",
        options={"xatol": 1e-10})
    return float(res.x)


def resonant_variance(power_rel_noise, detuning_noise_rel,
                      first_pulse_detuning_rel=0.0) -> np.ndarray:
    """P_z variance exactly on resonance (eps = 0).

    (dP_z)^2 = (pi/4)^4 (dP/P)^4 + 4 (dDelta/Omega)^2
               + (pi^2/4) (dDelta_1/Delta_1)^2

    The power term is fourth order because the fringe extremum is stationary;
    the last term covers a fractional error of the first-pulse detuning when
    the sequence is deliberately offset.
    """
    return (np.pi / 4.0) ** 4 * np.asarray(power_rel_noise, float) ** 4 \
        + 4.0 * np.asarray(detuning_noise_rel, float) ** 2 \
        + (np.pi ** 2 / 4.0) * np.asarray(first_pulse_detuning_rel, float) ** 2


def rabi_from_power_noise(power_rel_noise) -> np.ndarray:
    """Relative Rabi frequency noise for given relative power noise.

    Omega scales with the field amplitude, the power with its square, so
    dOmega/Omega = (1/2) dP/P.
    """
    return 0.5 * np.asarray(power_rel_noise, dtype=float)


# ---------------------------------------------------------------------------
# Brute-force two-level simulator (independent cross-check / Monte Carlo)


def _pulse_unitary(rabi: float, detuning: float, duration: float) -> np.ndarray:
    """2x2 propagator of H = (hbar/2)(Delta sigma_z + Omega sigma_x)."""
    omega_r = np.hypot(rabi, detuning)
    half = omega_r * duration / 2.0
    c, s = np.cos(half), np.sin(half)
    nx = rabi / omega_r
    nz = detuning / omega_r
    return np.array([[c - 1j * s * nz, -1j * s * nx],
                     [-1j * s * nx, c + 1j * s * nz]])


def simulate_sequence(rabi: float, detuning: float, free_time: float,
                      pulse_duration: float | None = None,
                      detuning_first: float | None = None,
                      detuning_second: float | None = None) -> float:
    """P_z from direct 2x2 unitary evolution of pi/2 - T - pi/2.

    Independent of the closed-form fringe expression; pulse detunings may be
    overridden separately to model shot-to-shot fluctuations.
    """
    d1 = detuning if detuning_first is None else detuning_first
    d2 = detuning if detuning_second is None else detuning_second
    if pulse_duration is None:
        eps = abs(detuning) / rabi
        pulse_duration = np.arccos(-eps ** 2) / (rabi * np.sqrt(1 + eps ** 2))
    u1 = _pulse_unitary(rabi, d1, pulse_duration)
    u2 = _pulse_unitary(rabi, d2, pulse_duration)
    phase = detuning * free_time / 2.0
    u_free = np.array([[np.exp(-1j * phase), 0.0], [0.0, np.exp(1j * phase)]])
    psi = u2 @ (u_free @ (u1 @ np.array([1.0 + 0j, 0.0])))
    return float(abs(psi[0]) ** 2 - abs(psi[1]) ** 2)


def monte_carlo_pz(rabi: float, detuning: float, free_time: float,
                   power_rel_noise: float, detuning_noise: float,
                   n_shots: int = 2000, seed: int = 0,
                   fringe_phase_offset: float = 0.0):
    """Sample P_z over Gaussian power and detuning fluctuations.

    Power noise rescales the Rabi frequency of both pulses by sqrt(1 + dP/P);
    detuning noise shifts the detuning of the whole sequence. When
    ``fringe_phase_offset`` is nonzero the free evolution time is shifted so
    the sampled point sits at that phase of the central fringe. Returns
    (mean, std) of P_z.
    """
    rng = np.random.default_rng(seed)
    dpp = rng.normal(0.0, power_rel_noise, n_shots)
    dd = rng.normal(0.0, detuning_noise, n_shots)
    t_eff = free_time + (fringe_phase_offset / detuning if detuning != 0 else 0.0)
    eps = abs(detuning) / rabi
    duration = np.arccos(-eps ** 2) / (rabi * np.sqrt(1 + eps ** 2))
    vals = np.empty(n_shots)
    for i in range(n_shots):
        vals[i] = simulate_sequence(rabi * np.sqrt(1.0 + dpp[i]),
                                    detuning + dd[i], t_eff,
                                    pulse_duration=duration)
    return float(vals.mean()), float(vals.std(ddof=1))
