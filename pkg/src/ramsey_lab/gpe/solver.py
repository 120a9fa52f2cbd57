"""Coupled two-component Gross-Pitaevskii dynamics in a cylindrically
symmetric trap.

Equations are nondimensionalized with hbar = m = 1, the frequency unit is the
geometric mean trap frequency wbar and the length unit the oscillator length
a_ho = sqrt(hbar / (m wbar)). The coupling constants become g_ij = 4 pi
a_ij / a_ho and wavefunctions keep the normalization integral |psi|^2 dV = N,
so the mean-field terms g_ij |psi|^2 are rates in units of wbar.

Time stepping is a symmetric Strang composition per step dt:

    phase(dt/2) -> CN_rho(dt/2) -> CN_z(dt) -> CN_rho(dt/2) -> phase(dt/2)

The nonlinear-plus-potential phase substep is exact (it is diagonal and leaves
the densities invariant). Each kinetic substep is a Crank-Nicolson Cayley
transform (1 + i dt H/2)^(-1) (1 - i dt H/2) of the corresponding 1D operator,
which is exactly norm conserving because the finite-volume radial Laplacian is
self-adjoint under the cell-volume inner product. Ground states come from the
same scheme in imaginary time with renormalization after every step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..atomphys import HBAR, AtomSpecies, RB87
from . import kernels
from .grid import CylGrid


@dataclass(frozen=True)
class GpeConfig:
    """Physical and numerical parameters of a two-component simulation."""

    species: AtomSpecies = RB87
    omega_rho: float = 2 * np.pi * 55.0  # rad/s
    omega_z: float = 2 * np.pi * 30.0
    n_atoms: float = 1e6
    n_rho: int = 128
    n_z: int = 256
    margin: float = 1.6        # domain half-size over the TF radius
    dt: float = 2.5e-3         # time step in units of 1/wbar
    a12_scale: float = 1.0     # rescaling of the interspecies coupling

    def __post_init__(self):
        if self.n_atoms <= 0 or self.dt <= 0 or self.margin <= 1.0:
            raise ValueError("invalid GpeConfig parameters")

    @property
    def omega_bar(self) -> float:
        return (self.omega_rho ** 2 * self.omega_z) ** (1.0 / 3.0)

    @property
    def oscillator_length(self) -> float:
        return np.sqrt(HBAR / (self.species.mass * self.omega_bar))

    @property
    def couplings(self) -> tuple[float, float, float]:
        """(g11, g12, g22) in oscillator units, including a12_scale."""
        a_ho = self.oscillator_length
        return (4 * np.pi * self.species.a11 / a_ho,
                4 * np.pi * self.species.a12 * self.a12_scale / a_ho,
                4 * np.pi * self.species.a22 / a_ho)

    @property
    def chemical_potential(self) -> float:
        """Thomas-Fermi mu in units of hbar*wbar (component-1 coupling)."""
        return 0.5 * (15.0 * self.n_atoms * self.species.a11
                      / self.oscillator_length) ** 0.4

    @property
    def healing_length(self) -> float:
        """Central healing length 1/sqrt(2 mu) in oscillator units."""
        return 1.0 / np.sqrt(2.0 * self.chemical_potential)

    def tf_radii(self) -> tuple[float, float]:
        """(R_rho, R_z) Thomas-Fermi radii in oscillator units."""
        mu = self.chemical_potential
        wb = self.omega_bar
        return (np.sqrt(2.0 * mu) * wb / self.omega_rho,
                np.sqrt(2.0 * mu) * wb / self.omega_z)

    def make_grid(self) -> CylGrid:
        r_rho, r_z = self.tf_radii()
        return CylGrid(n_rho=self.n_rho, n_z=self.n_z,
                       rho_max=self.margin * r_rho, z_max=self.margin * r_z)

    def potential(self, grid: CylGrid) -> np.ndarray:
        """Harmonic potential in oscillator units on the grid."""
        rho, z = grid.meshes()
        wb = self.omega_bar
        return 0.5 * ((self.omega_rho / wb) ** 2 * rho ** 2
                      + (self.omega_z / wb) ** 2 * z ** 2)


@dataclass
class TwoComponentState:
    """Wavefunction pair on a shared grid, normalization sum = N."""

    psi1: np.ndarray
    psi2: np.ndarray
    grid: CylGrid

    def populations(self) -> tuple[float, float]:
        return self.grid.norm_squared(self.psi1), self.grid.norm_squared(self.psi2)

    def total_atoms(self) -> float:
        return sum(self.populations())

    def overlap(self) -> complex:
        """Coherence integral psi1* psi2 dV."""
        return complex(self.grid.integrate(np.conj(self.psi1) * self.psi2))

    def visibility(self) -> float:
        """Ramsey fringe contrast 2 |overlap| / N.

        Scanning the final beamsplitter phase phi gives populations
        N/2 + |O| sin(phi + arg O), so the fitted fringe amplitude equals
        this normalized coherence exactly for ideal pulses.
        """
        return 2.0 * abs(self.overlap()) / self.total_atoms()

    def copy(self) -> "TwoComponentState":
        return TwoComponentState(self.psi1.copy(), self.psi2.copy(), self.grid)


# ---------------------------------------------------------------------------
# Crank-Nicolson machinery


class _CnStepper:
    """Precomputed Cayley factors for one splitting configuration."""

    def __init__(self, cfg: GpeConfig, grid: CylGrid, dt: float):
        self.dt = dt
        lo, di, up = grid.radial_operator_bands()
        self.rho_bands = self._factors(lo, di, up, dt / 2.0)
        lo, di, up = grid.axial_operator_bands()
        self.z_bands = self._factors(lo, di, up, dt)

    @staticmethod
    def _factors(lower, diag, upper, dt):
        # H = -(1/2) Laplacian; Cayley: (I + i dt H / 2) x = (I - i dt H / 2) b
        shift = 0.5j * dt * (-0.5)
        n = diag.shape[0]
        eye = np.ones(n)
        plus = (eye + shift * diag, shift * lower, shift * upper)
        minus = (eye - shift * diag, -shift * lower, -shift * upper)
        return plus, minus

    @staticmethod
    def _apply_cn(bands, psi):
        (dp, lp, up_), (dm, lm, um) = bands
        rhs = kernels.apply_tridiagonal(lm, dm, um, psi)
        return kernels.solve_tridiagonal(lp, dp, up_, rhs)

    def kinetic_sweep(self, psi: np.ndarray) -> np.ndarray:
        """CN_rho(dt/2), CN_z(dt), CN_rho(dt/2) applied to one component."""
        psi = self._apply_cn(self.rho_bands, psi)
        psi = np.ascontiguousarray(self._apply_cn(self.z_bands, psi.T).T)
        return self._apply_cn(self.rho_bands, psi)


def evolve(state: TwoComponentState, cfg: GpeConfig, duration: float,
           dt: float | None = None) -> TwoComponentState:
    """Real-time propagation over duration (seconds); returns state (in place).

    The step count is rounded so an integer number of Strang steps covers the
    interval exactly.
    """
    if duration < 0:
        raise ValueError("duration must be >= 0")
    if duration == 0:
        return state
    t_total = duration * cfg.omega_bar
    dt_target = cfg.dt if dt is None else dt * cfg.omega_bar
    n_steps = max(int(np.ceil(t_total / dt_target)), 1)
    dt_step = t_total / n_steps
    grid = state.grid
    pot = cfg.potential(grid)
    g11, g12, g22 = cfg.couplings
    stepper = _CnStepper(cfg, grid, dt_step)
    psi1, psi2 = state.psi1, state.psi2
    for _ in range(n_steps):
        kernels.phase_step(psi1, psi2, pot, g11, g12, g22, dt_step / 2.0)
        psi1 = stepper.kinetic_sweep(psi1)
        psi2 = stepper.kinetic_sweep(psi2)
        kernels.phase_step(psi1, psi2, pot, g11, g12, g22, dt_step / 2.0)
    if not (np.all(np.isfinite(psi1.view(float)))
            and np.all(np.isfinite(psi2.view(float)))):
        raise FloatingPointError(
            "non-finite wavefunction during propagation; reduce dt or "
            "enlarge the grid")
    state.psi1, state.psi2 = psi1, psi2
    return state


def energy_components(state: TwoComponentState, cfg: GpeConfig) -> dict:
    """Kinetic, potential and interaction energies in units of hbar*wbar."""
    grid = state.grid
    pot = cfg.potential(grid)
    g11, g12, g22 = cfg.couplings
    rl, rd, ru = grid.radial_operator_bands()
    zl, zd, zu = grid.axial_operator_bands()

    def kinetic(psi):
        lap = kernels.apply_tridiagonal(rl.astype(complex), rd.astype(complex),
                                        ru.astype(complex), psi)
        lap += kernels.apply_tridiagonal(zl.astype(complex), zd.astype(complex),
                                         zu.astype(complex), psi.T).T
        return -0.5 * np.real(grid.integrate(np.conj(psi) * lap))

    d1 = np.abs(state.psi1) ** 2
    d2 = np.abs(state.psi2) ** 2
    e_pot = float(np.real(grid.integrate(pot * (d1 + d2))))
    e_int = float(np.real(grid.integrate(0.5 * g11 * d1 ** 2 + 0.5 * g22 * d2 ** 2
                                         + g12 * d1 * d2)))
    e_kin = float(kinetic(state.psi1) + kinetic(state.psi2))
    return {"kinetic": e_kin, "potential": e_pot, "interaction": e_int,
            "total": e_kin + e_pot + e_int}


def energy(state: TwoComponentState, cfg: GpeConfig) -> float:
    """Total energy per hbar*wbar of the two-component state."""
    return energy_components(state, cfg)["total"]


def virial_residual(state: TwoComponentState, cfg: GpeConfig) -> float:
    """Relative residual of the virial identity 2E_kin - 2E_pot + 3E_int = 0.

    Holds for stationary states of the GPE in a harmonic trap; normalized by
    the potential energy.
    """
    e = energy_components(state, cfg)
    return float((2 * e["kinetic"] - 2 * e["potential"] + 3 * e["interaction"])
                 / e["potential"])


def chemical_potential(state: TwoComponentState, cfg: GpeConfig) -> float:
    """mu = (E_kin + E_pot + 2 E_int)/N of the (single-component) state."""
    e = energy_components(state, cfg)
    n = state.total_atoms()
    return float((e["kinetic"] + e["potential"] + 2 * e["interaction"]) / n)


def thomas_fermi_state(cfg: GpeConfig, grid: CylGrid | None = None) -> TwoComponentState:
    """Thomas-Fermi profile in component 1 (imaginary-time starting point)."""
    if grid is None:
        grid = cfg.make_grid()
    pot = cfg.potential(grid)
    g11 = cfg.couplings[0]
    dens = np.maximum(cfg.chemical_potential - pot, 0.0) / g11
    psi1 = np.sqrt(dens).astype(np.complex128)
    norm = grid.norm_squared(psi1)
    if norm <= 0.0:
        # weakly interacting cloud smaller than a cell: seed with the
        # oscillator Gaussian instead
        rho, z = grid.meshes()
        wb = cfg.omega_bar
        psi1 = np.exp(-0.5 * (cfg.omega_rho / wb) * rho ** 2
                      - 0.5 * (cfg.omega_z / wb) * z ** 2).astype(np.complex128)
        norm = grid.norm_squared(psi1)
    psi1 *= np.sqrt(cfg.n_atoms / norm)
    return TwoComponentState(psi1=psi1, psi2=np.zeros_like(psi1), grid=grid)


def ground_state(cfg: GpeConfig, grid: CylGrid | None = None,
                 schedule=((0.02, 400), (0.005, 400), (0.001, 300)),
                 tol: float = 1e-10) -> TwoComponentState:
    """Imaginary-time ground state of component 1.

    schedule lists (dtau, max_steps) stages from coarse to fine; iteration
    stops early when the relative energy change per step drops below tol.
    """
    state = thomas_fermi_state(cfg, grid)
    grid = state.grid
    pot = cfg.potential(grid)
    g11 = cfg.couplings[0]
    rl, rd, ru = grid.radial_operator_bands()
    zl, zd, zu = grid.axial_operator_bands()
    psi = state.psi1
    e_prev = energy(state, cfg)
    for dtau, max_steps in schedule:
        # imaginary-time Cayley factors: (1 + dtau H/2)^(-1) (1 - dtau H/2)
        shift = 0.5 * dtau * (-0.5)

        def factors(lo, di, up, s):
            n = di.shape[0]
            eye = np.ones(n, dtype=complex)
            return ((eye + s * di, s * lo.astype(complex), s * up.astype(complex)),
                    (eye - s * di, -s * lo.astype(complex), -s * up.astype(complex)))

        rho_b = factors(rl, rd, ru, shift)
        z_b = factors(zl, zd, zu, shift)
        for _ in range(max_steps):
            dens = np.abs(psi) ** 2
            psi = psi * np.exp(-0.5 * dtau * (pot + g11 * dens))
            (dp, lp, up_), (dm, lm, um) = rho_b
            psi = kernels.solve_tridiagonal(
                lp, dp, up_, kernels.apply_tridiagonal(lm, dm, um, psi))
            (dp, lp, up_), (dm, lm, um) = z_b
            psi = np.ascontiguousarray(kernels.solve_tridiagonal(
                lp, dp, up_, kernels.apply_tridiagonal(lm, dm, um, psi.T)).T)
            dens = np.abs(psi) ** 2
            psi = psi * np.exp(-0.5 * dtau * (pot + g11 * dens))
            psi *= np.sqrt(cfg.n_atoms / grid.norm_squared(psi))
            state.psi1 = psi
            e_now = energy(state, cfg)
            if abs(e_prev - e_now) < tol * abs(e_now):
                e_prev = e_now
                break
            e_prev = e_now
    state.psi1 = psi
    return state


# ---------------------------------------------------------------------------
# Pulses and Ramsey sequences


def apply_pi_half(state: TwoComponentState, phase: float = 0.0) -> TwoComponentState:
    """Instantaneous beamsplitter; phase offsets the second component."""
    f = np.exp(1j * phase)
    psi1 = (state.psi1 - 1j * f * state.psi2) / np.sqrt(2.0)
    psi2 = (state.psi2 - 1j * np.conj(f) * state.psi1) / np.sqrt(2.0)
    state.psi1, state.psi2 = psi1, psi2
    return state


def apply_pi(state: TwoComponentState) -> TwoComponentState:
    """Instantaneous population-swapping echo pulse."""
    state.psi1, state.psi2 = -1j * state.psi2, -1j * state.psi1
    return state


def simulate_ramsey(cfg: GpeConfig, interrogation_time: float,
                    echo: bool = False,
                    initial: TwoComponentState | None = None,
                    phase_samples: int = 0) -> dict:
    """Full Ramsey sequence; returns coherence, visibility and populations.

    The final beamsplitter phase is scanned analytically: populations follow
    N/2 + |O| sin(phi + arg O) with O the coherence integral, so the fringe
    visibility is read off without repeating the evolution. With
    phase_samples > 0 the final pulse is additionally applied explicitly at
    that many phases and the fringe amplitude fitted from the resulting
    populations as an independent cross-check.
    """
    state = (initial.copy() if initial is not None
             else ground_state(cfg))
    apply_pi_half(state)
    if echo:
        evolve(state, cfg, interrogation_time / 2.0)
        apply_pi(state)
        evolve(state, cfg, interrogation_time / 2.0)
    else:
        evolve(state, cfg, interrogation_time)
    o = state.overlap()
    n1, n2 = state.populations()
    result = {
        "interrogation_time": interrogation_time,
        "echo": echo,
        "overlap": o,
        "visibility": state.visibility(),
        "phase": float(np.angle(o)),
        "populations": (n1, n2),
        "state": state,
    }
    if phase_samples > 0:
        from ..analysis import fit_fringe

        phases = np.linspace(0.0, 2.0 * np.pi, phase_samples, endpoint=False)
        pops = np.empty(phase_samples)
        for i, phi in enumerate(phases):
            probe = state.copy()
            apply_pi_half(probe, phase=float(phi))
            pops[i] = probe.populations()[0]
        fit = fit_fringe(phases, pops)
        result["phase_scan"] = {
            "phases": phases,
            "populations": pops,
            "fitted_visibility": 2.0 * fit.amplitude / state.total_atoms(),
        }
    return result


def ramsey_visibility_curve(cfg: GpeConfig, times, echo: bool = False,
                            initial: TwoComponentState | None = None,
                            decoherence_tau: float | None = None) -> np.ndarray:
    """Visibility at each interrogation time (seconds, ascending).

    Without echo the evolution is shared incrementally between the requested
    times; echo sequences restart for every time because the pulse position
    moves with T. decoherence_tau applies a phenomenological exp(-T/tau)
    envelope on top of the mean-field dynamics.
    """
    t_arr = np.asarray(times, dtype=float)
    if np.any(np.diff(t_arr) < 0):
        raise ValueError("times must be ascending")
    base = initial if initial is not None else ground_state(cfg)
    out = np.empty(t_arr.size)
    if echo:
        for i, t in enumerate(t_arr):
            out[i] = simulate_ramsey(cfg, float(t), echo=True, initial=base)["visibility"]
    else:
        state = base.copy()
        apply_pi_half(state)
        t_prev = 0.0
        for i, t in enumerate(t_arr):
            evolve(state, cfg, float(t) - t_prev)
            t_prev = float(t)
            out[i] = state.visibility()
    if decoherence_tau is not None:
        if decoherence_tau <= 0:
            raise ValueError("decoherence_tau must be positive")
        out *= np.exp(-t_arr / decoherence_tau)
    return out


def write_snapshot(state: TwoComponentState, path, metadata: dict | None = None) -> None:
    """Write densities and relative phase as columnar text plus a JSON sidecar.

    Columns are rho, z (oscillator units), |psi1|^2, |psi2|^2 and
    arg(psi2 psi1*) on the full grid; the sidecar <path>.json records grid
    shape, populations and any extra metadata supplied by the caller.
    """
    import json
    from pathlib import Path

    path = Path(path)
    grid = state.grid
    rho, z = grid.meshes()
    d1 = np.abs(state.psi1) ** 2
    d2 = np.abs(state.psi2) ** 2
    rel = np.angle(state.psi2 * np.conj(state.psi1))
    cols = np.column_stack([a.ravel() for a in (rho + 0 * z, z + 0 * rho,
                                                d1, d2, rel)])
    header = "rho z density1 density2 relative_phase"
    np.savetxt(path, cols, header=header, fmt="%.10e")
    n1, n2 = state.populations()
    side = {
        "n_rho": grid.n_rho,
        "n_z": grid.n_z,
        "rho_max": grid.rho_max,
        "z_max": grid.z_max,
        "population1": n1,
        "population2": n2,
    }
    if metadata:
        side.update(metadata)
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(side, indent=2, sort_keys=True) + "\n")
