"""Fitting and statistics helpers for fringe scans, decay envelopes and
shot-to-shot scatter.

The fixed-frequency sinusoid fit is linear in its parameters: a fringe
p(phi) = a + b cos(phi) + c sin(phi) is solved by least squares on the design
matrix {1, cos, sin}, and the visibility of a probability fringe normalized to
p = (1/2)(1 + V cos(phi - phi0)) is V = 2 sqrt(b^2 + c^2). Nonlinear models
(chirped drift envelope) go through scipy.optimize.least_squares with a
deterministic grid-search initialization so fits are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize


@dataclass
class FringeFit:
    """Result of a fixed-frequency sinusoid fit p = a + b cos + c sin."""

    offset: float
    amplitude: float
    phase: float            # radians, p ~ offset + amplitude*cos(phi - phase)
    visibility: float       # 2*amplitude, for probability fringes around 1/2
    params: np.ndarray      # (a, b, c)
    covariance: np.ndarray  # 3x3 covariance of (a, b, c)
    residual_std: float

    @property
    def amplitude_std(self) -> float:
        b, c = self.params[1], self.params[2]
        amp = np.hypot(b, c)
        if amp == 0:
            return float(np.sqrt(self.covariance[1, 1]))
        grad = np.array([0.0, b / amp, c / amp])
        return float(np.sqrt(grad @ self.covariance @ grad))

    @property
    def visibility_std(self) -> float:
        return 2.0 * self.amplitude_std


def fit_fringe(phase, signal, sigma=None) -> FringeFit:
    """Least-squares fit of a sinusoid with known frequency.

    phase: fringe phase of each point (radians); signal: measured values;
    sigma: optional per-point standard deviations for weighting.
    """
    phi = np.asarray(phase, dtype=float)
    y = np.asarray(signal, dtype=float)
    if phi.shape != y.shape or phi.ndim != 1:
        raise ValueError("phase and signal must be equal-length 1D arrays")
    if phi.size < 4:
        raise ValueError("need at least 4 points to fit offset, amplitude, phase")
    x = np.column_stack([np.ones_like(phi), np.cos(phi), np.sin(phi)])
    if sigma is not None:
        w = 1.0 / np.asarray(sigma, dtype=float)
        xw = x * w[:, None]
        yw = y * w
    else:
        xw, yw = x, y
    params, _, _, _ = np.linalg.lstsq(xw, yw, rcond=None)
    resid = yw - xw @ params
    dof = phi.size - 3
    s2 = float(resid @ resid) / dof
    cov = np.linalg.inv(xw.T @ xw)
    if sigma is None:
        cov = cov * s2
    a, b, c = params
    amp = float(np.hypot(b, c))
    return FringeFit(offset=float(a), amplitude=amp,
                     phase=float(np.arctan2(c, b)), visibility=2.0 * amp,
                     params=params, covariance=cov,
                     residual_std=float(np.sqrt(s2)))


def range_visibility(signal) -> float:
    """Peak-to-peak visibility estimate (max - min) of a probability fringe.

    Biased upward by noise at the extremes; kept as the quick-look companion
    of fit_fringe.
    """
    y = np.asarray(signal, dtype=float)
    return float(y.max() - y.min())


@dataclass
class DecayFit:
    """Result of an exponential fit y = amplitude * exp(-t/tau)."""

    amplitude: float
    tau: float
    amplitude_std: float
    tau_std: float


def fit_exponential_decay(t, y, sigma=None) -> DecayFit:
    """Fit y = A exp(-t/tau) by weighted linear regression on log(y).

    The log transform maps multiplicative noise to additive; per-point sigmas
    (of y) are propagated to log space as sigma/y.
    """
    t_arr = np.asarray(t, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr <= 0):
        raise ValueError("exponential decay fit requires positive values")
    ylog = np.log(y_arr)
    if sigma is not None:
        w = y_arr / np.asarray(sigma, dtype=float)
    else:
        w = np.ones_like(y_arr)
    x = np.column_stack([np.ones_like(t_arr), t_arr])
    xw = x * w[:, None]
    params, _, _, _ = np.linalg.lstsq(xw, ylog * w, rcond=None)
    resid = ylog * w - xw @ params
    dof = max(t_arr.size - 2, 1)
    s2 = float(resid @ resid) / dof
    cov = np.linalg.inv(xw.T @ xw)
    if sigma is None:
        cov = cov * s2
    loga, rate = params
    tau = -1.0 / rate
    amp = float(np.exp(loga))
    amp_std = amp * float(np.sqrt(cov[0, 0]))
    tau_std = float(np.sqrt(cov[1, 1])) * tau ** 2
    return DecayFit(amplitude=amp, tau=float(tau),
                    amplitude_std=amp_std, tau_std=tau_std)


@dataclass
class DriftFit:
    """Result of the chirped-fringe fit p = (1/2)[1 + V0 e^(-T/tau) cos(nu T^2/4)]."""

    visibility0: float
    tau: float
    drift_rate: float
    residual_std: float
    success: bool
    param_std: np.ndarray = field(default_factory=lambda: np.full(3, np.nan))


def _drift_model(params, t):
    v0, tau, nu = params
    return 0.5 * (1.0 + v0 * np.exp(-t / tau) * np.cos(nu * t ** 2 / 4.0))


def fit_drift_envelope(t, p, drift_rate_max: float = 2000.0,
                       n_grid: int = 200) -> DriftFit:
    """Fit the drifting-resonance fringe model to probabilities p(T).

    The model is strongly multimodal in the chirp rate nu, so the nonlinear
    solver is started from the best point of a deterministic grid over
    [0, drift_rate_max] (rad/s^2) with V0 and tau refit linearly at each
    candidate via a coarse inner least squares.
    """
    t_arr = np.asarray(t, dtype=float)
    p_arr = np.asarray(p, dtype=float)
    if t_arr.size < 6:
        raise ValueError("need at least 6 points for the drift fit")

    best = None
    v0_init = min(max(2.0 * np.std(p_arr - 0.5) * np.sqrt(2.0), 0.1), 1.0)
    tau_init = max(t_arr.max(), 1e-3)
    for nu in np.linspace(0.0, drift_rate_max, n_grid):
        guess = np.array([v0_init, tau_init, nu])
        r = _drift_model(guess, t_arr) - p_arr
        cost = float(r @ r)
        if best is None or cost < best[0]:
            best = (cost, guess)

    result = optimize.least_squares(
        lambda q: _drift_model(q, t_arr) - p_arr, best[1],
        bounds=([0.0, 1e-6, 0.0], [1.5, np.inf, np.inf]), method="trf")
    dof = max(t_arr.size - 3, 1)
    s2 = 2.0 * result.cost / dof
    try:
        jtj_inv = np.linalg.inv(result.jac.T @ result.jac)
        param_std = np.sqrt(np.diag(jtj_inv) * s2)
    except np.linalg.LinAlgError:
        param_std = np.full(3, np.nan)
    v0, tau, nu = result.x
    return DriftFit(visibility0=float(v0), tau=float(tau), drift_rate=float(nu),
                    residual_std=float(np.sqrt(s2)), success=bool(result.success),
                    param_std=param_std)


def projection_noise_std(p_mean: float, n_atoms: float) -> float:
    """Quantum projection noise of the probability, sqrt(p(1-p)/N)."""
    if not 0.0 <= p_mean <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n_atoms <= 0:
        raise ValueError("atom number must be positive")
    return float(np.sqrt(p_mean * (1.0 - p_mean) / n_atoms))


def allan_style_scatter(p_samples, n_atoms: float) -> float:
    """Shot-to-shot scatter in units of the projection noise.

    std(p) / sqrt(pbar (1 - pbar) / N); a value of 1 means the measurement
    is projection-noise limited.
    """
    p_arr = np.asarray(p_samples, dtype=float)
    pbar = float(np.clip(p_arr.mean(), 1e-12, 1.0 - 1e-12))
    return float(p_arr.std(ddof=1) / projection_noise_std(pbar, n_atoms))
