"""Command-line driver: configuration, experiment orchestration, plot emission.

Subcommands map one-to-one onto the library modules. Configuration is a flat
key = value text file with sections; every key can be overridden with
`--set section.key=value`. Reports are JSON with stable key order and embed
the fully resolved configuration, so a report can itself be passed back as
`--config` to reproduce the run. Numeric outputs are deterministic given the
seed: re-running a subcommand with the same config produces byte-identical
CSV and JSON files.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, bloch, imaging, squeezing, svgplot, twomode
from .atomphys import (
    BOHR_RADIUS,
    REFERENCE_TRAP,
    REFERENCE_TRAP_CYL,
    RB87,
    AtomSpecies,
    breit_rabi_frequency,
    gauss_to_tesla,
    load_species,
    miscibility_parameter,
    resonance_sensitivity_kappa,
)
from .gpe import GpeConfig, ground_state, simulate_ramsey, write_snapshot


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


DEFAULTS = {
    "run": {
        "seed": "0",
        "output_dir": "",
    },
    "species": {
        "file": "",
    },
    "pulse": {
        "rabi_hz": "833.0",
        "eps": "0.1",
    },
    "noise": {
        "power_fraction": "0.005",
        "detuning_hz": "10.0",
        "first_pulse_detuning_fraction": "0.0",
    },
    "field": {
        "bias_gauss": "4.0",
        "noise_gauss": "0.002",
        "table_gauss": "0.5,1,2,4,7,9",
    },
    "interferometer": {
        "free_time_ms": "5.0",
        "n_atoms": "1e6",
    },
    "gpe": {
        "n_atoms": "1e6",
        "omega_rho_hz": "55.0",
        "omega_z_hz": "30.0",
        "n_rho": "128",
        "n_z": "256",
        "dt": "2.5e-3",
        "margin": "1.6",
        "a12_scale": "1.0",
        "echo": "false",
        "times_ms": "0,5,10,15,20",
        "decoherence_tau_ms": "",
        "snapshots": "false",
        "phase_samples": "0",
    },
    "imaging": {
        "n_atoms": "1e6",
        "magnification": "8.0",
        "intensity_ratio": "15.0",
        "exposure_us": "100.0",
        "quantum_efficiency": "0.17",
        "pixel_um": "13.0",
        "full_well": "60000",
        "expansion_ms": "30.0",
        "pairing": "standard",
        "n_runs": "30",
        "noise": "on",
        "write_images": "false",
    },
    "imaging_optimize": {
        "intensity_ratios": "5,10,15,20,25,30",
        "exposures_us": "100",
        "magnifications": "8",
    },
    "squeezing": {
        "n_atoms": "1e6",
        "chi_per_atom": "",
        "prep_time_ms": "20.0",
        "n_phase": "201",
        "phase_max": "1.2",
    },
    "twomode": {
        "n_atoms": "1e6",
        "n_total_std_fraction": "0.05",
        "times_ms": "1,2,5,10,20,50",
        "survival_1": "1.0",
        "survival_2": "0.5",
        "drift_rate": "100.0",
        "drift_tau_ms": "500.0",
    },
    "fit": {
        "model": "drift",
        "input": "",
        "drift_rate_max": "2000.0",
    },
}


# ---------------------------------------------------------------------------
# Configuration handling


def _fresh_parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    for section, keys in DEFAULTS.items():
        cp[section] = dict(keys)
    return cp


def load_config(path: str | None) -> configparser.ConfigParser:
    """Defaults, optionally overlaid with an INI file or an emitted report."""
    cp = _fresh_parser()
    if not path:
        return cp
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    if p.suffix == ".json":
        try:
            embedded = json.loads(p.read_text())["config"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise ConfigError(f"no embedded config in {path}: {exc}") from exc
        for section, keys in embedded.items():
            if section not in cp:
                cp[section] = {}
            for key, value in keys.items():
                cp[section][key] = str(value)
        return cp
    try:
        read = cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not read:
        raise ConfigError(f"cannot read config file: {path}")
    for section in cp.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown config section [{section}]")
        for key in cp[section]:
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown config key {section}.{key}")
    return cp


def apply_overrides(cp: configparser.ConfigParser, pairs) -> None:
    for pair in pairs or ():
        if "=" not in pair or "." not in pair.split("=", 1)[0]:
            raise ConfigError(f"override must be section.key=value: {pair!r}")
        target, value = pair.split("=", 1)
        section, key = target.split(".", 1)
        section, key = section.strip(), key.strip()
        if section not in DEFAULTS or key not in DEFAULTS[section]:
            raise ConfigError(f"unknown config key {section}.{key}")
        cp[section][key] = value.strip()


def resolved_config(cp: configparser.ConfigParser) -> dict:
    return {section: dict(cp[section]) for section in cp.sections()}


def _getfloat(cp, section, key) -> float:
    try:
        return cp.getfloat(section, key)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key} must be a number: {exc}") from exc


def _getint(cp, section, key) -> int:
    try:
        return cp.getint(section, key)
    except ValueError as exc:
        try:
            f = cp.getfloat(section, key)
        except ValueError:
            raise ConfigError(f"{section}.{key} must be an integer") from exc
        if f != int(f):
            raise ConfigError(f"{section}.{key} must be an integer") from exc
        return int(f)


def _getbool(cp, section, key) -> bool:
    try:
        return cp.getboolean(section, key)
    except ValueError as exc:
        raise ConfigError(f"{section}.{key} must be a boolean") from exc


def _getlist(cp, section, key) -> list[float]:
    raw = cp.get(section, key).strip()
    if not raw:
        return []
    try:
        return [float(tok) for tok in raw.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"{section}.{key} must be a comma list of "
                          f"numbers: {exc}") from exc


def _species(cp) -> AtomSpecies:
    path = cp.get("species", "file").strip()
    if not path:
        return RB87
    try:
        return load_species(path)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load species file: {exc}") from exc


def _output_dir(cp, args) -> Path:
    if getattr(args, "output_dir", None):
        out = Path(args.output_dir)
    elif cp.get("run", "output_dir").strip():
        out = Path(cp.get("run", "output_dir"))
    elif os.environ.get("RAMSEY_LAB_OUTDIR"):
        out = Path(os.environ["RAMSEY_LAB_OUTDIR"])
    else:
        out = Path.cwd()
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# Output helpers


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def _cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _write_report(path: Path, payload: dict, cp) -> None:
    payload = dict(payload)
    payload["config"] = resolved_config(cp)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True)
                    + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


# ---------------------------------------------------------------------------
# Subcommands


def run_noise_budget(cp, args) -> int:
    out = _output_dir(cp, args)
    species = _species(cp)
    rabi = 2 * np.pi * _getfloat(cp, "pulse", "rabi_hz")
    eps = _getfloat(cp, "pulse", "eps")
    dp_over_p = _getfloat(cp, "noise", "power_fraction")
    ddelta = 2 * np.pi * _getfloat(cp, "noise", "detuning_hz")
    first_frac = _getfloat(cp, "noise", "first_pulse_detuning_fraction")
    free_time = _getfloat(cp, "interferometer", "free_time_ms") * 1e-3
    n_atoms = _getfloat(cp, "interferometer", "n_atoms")
    bias = gauss_to_tesla(_getfloat(cp, "field", "bias_gauss"))
    field_noise = gauss_to_tesla(_getfloat(cp, "field", "noise_gauss"))
    if rabi <= 0 or not 0 <= eps < 1:
        raise ConfigError("pulse block needs rabi_hz > 0 and 0 <= eps < 1")
    if free_time <= 0 or n_atoms < 1:
        raise ConfigError("interferometer block needs free_time_ms > 0 "
                          "and n_atoms >= 1")

    kappa = resonance_sensitivity_kappa(species, bias)
    field_detuning_noise = kappa * field_noise
    variance = float(bloch.pz_variance(eps, dp_over_p, ddelta / rabi)) \
        if eps > 0 else None
    have_noise = dp_over_p > 0 and ddelta > 0
    report = {
        "pulse": {
            "rabi_hz": rabi / (2 * np.pi),
            "eps": eps,
            "detuning_hz": eps * rabi / (2 * np.pi),
            "pi_half_duration_s": bloch.pi_half_duration(rabi, eps * rabi),
        },
        "sensitivities": {
            "f_eps": float(bloch.power_sensitivity(eps)) if eps > 0 else 0.0,
            "g_eps": float(bloch.detuning_sensitivity(eps)) if eps > 0 else None,
            "pz_variance": variance,
            "pz_std": np.sqrt(variance) if variance is not None else None,
        },
        "optimum": {
            "eps_opt": bloch.optimal_eps(dp_over_p, ddelta / rabi)
            if have_noise else None,
            "eps_opt_exact": bloch.optimal_eps_exact(dp_over_p, ddelta / rabi)
            if have_noise else None,
            "detuning_opt_hz": bloch.optimal_detuning(dp_over_p, ddelta, rabi)
            / (2 * np.pi) if have_noise else None,
        },
        "resonant": {
            "pz_variance": float(bloch.resonant_variance(
                dp_over_p, ddelta / rabi, first_frac)),
            "single_pulse_power_shift": float(
                bloch.single_beamsplitter_sensitivity(0.0, rabi, 0.0,
                                                      dp_over_p)),
            "single_pulse_detuning_shift_on_resonance": float(
                bloch.rabi_transition_probability(
                    rabi, ddelta, bloch.pi_half_duration(rabi, 0.0)) - 0.5),
        },
        "field": {
            "bias_gauss": bias / gauss_to_tesla(1.0),
            "kappa_hz_per_gauss": kappa * gauss_to_tesla(1.0) / (2 * np.pi),
            "detuning_noise_hz": field_detuning_noise / (2 * np.pi),
            "transition_frequency_hz": breit_rabi_frequency(species, bias),
        },
        "projection_limit": {
            "max_detuning_fluctuation_hz":
                bloch.max_detuning_fluctuation(free_time, n_atoms)
                / (2 * np.pi),
            "oscillator_stability": bloch.oscillator_stability_bound(
                free_time, n_atoms, species.hyperfine_splitting),
        },
    }
    _write_report(out / "noise_budget.json", report, cp)

    rows = []
    for b_gauss in _getlist(cp, "field", "table_gauss"):
        b = gauss_to_tesla(b_gauss)
        k = resonance_sensitivity_kappa(species, b)
        rows.append((b_gauss, breit_rabi_frequency(species, b),
                     k * gauss_to_tesla(1.0) / (2 * np.pi),
                     k * field_noise / (2 * np.pi)))
    _write_csv(out / "kappa_table.csv",
               ["field_gauss", "transition_hz", "kappa_hz_per_gauss",
                "detuning_noise_hz"], rows)

    if args.sweep:
        eps_grid = np.linspace(0.02, 0.9, 89)
        f = bloch.power_sensitivity(eps_grid)
        g = bloch.detuning_sensitivity(eps_grid)
        var = bloch.pz_variance(eps_grid, dp_over_p, ddelta / rabi)
        _write_csv(out / "noise_budget_sweep.csv",
                   ["eps", "f_eps", "g_eps", "pz_variance"],
                   zip(eps_grid, f, g, var))
        svgplot.write_polyline_svg(out / "noise_budget_sweep.svg",
                                   eps_grid, np.sqrt(var),
                                   xlabel="eps", ylabel="pz std",
                                   title="beamsplitter noise vs eps")
    print(f"noise-budget report written to {out / 'noise_budget.json'}")
    return 0


def _gpe_config(cp) -> GpeConfig:
    try:
        return GpeConfig(
            species=_species(cp),
            omega_rho=2 * np.pi * _getfloat(cp, "gpe", "omega_rho_hz"),
            omega_z=2 * np.pi * _getfloat(cp, "gpe", "omega_z_hz"),
            n_atoms=_getfloat(cp, "gpe", "n_atoms"),
            n_rho=_getint(cp, "gpe", "n_rho"),
            n_z=_getint(cp, "gpe", "n_z"),
            dt=_getfloat(cp, "gpe", "dt"),
            margin=_getfloat(cp, "gpe", "margin"),
            a12_scale=_getfloat(cp, "gpe", "a12_scale"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid gpe block: {exc}") from exc


def run_gpe_visibility(cp, args) -> int:
    out = _output_dir(cp, args)
    cfg = _gpe_config(cp)
    echo = _getbool(cp, "gpe", "echo")
    times = np.asarray(sorted(_getlist(cp, "gpe", "times_ms"))) * 1e-3
    if times.size == 0:
        raise ConfigError("gpe.times_ms must list at least one time")
    tau_raw = cp.get("gpe", "decoherence_tau_ms").strip()
    tau = float(tau_raw) * 1e-3 if tau_raw else None
    snapshots = _getbool(cp, "gpe", "snapshots")
    phase_samples = _getint(cp, "gpe", "phase_samples")

    t0 = time.perf_counter()
    base = ground_state(cfg)
    t_ground = time.perf_counter() - t0
    rows = []
    for t in times:
        res = simulate_ramsey(cfg, float(t), echo=echo, initial=base,
                              phase_samples=phase_samples)
        vis = res["visibility"]
        if tau is not None:
            vis *= np.exp(-t / tau)
        rows.append((t * 1e3, vis, res["phase"]))
        if snapshots:
            write_snapshot(res["state"], out / f"snapshot_{t * 1e3:07.2f}ms.dat",
                           metadata={
                               "interrogation_time_ms": t * 1e3,
                               "echo": echo,
                               "dt": cfg.dt,
                               "n_atoms": cfg.n_atoms,
                               "a11_bohr": cfg.species.a11 / BOHR_RADIUS,
                               "a12_scale": cfg.a12_scale,
                           })
        if phase_samples > 0:
            scan = res["phase_scan"]
            _write_csv(out / f"fringe_{t * 1e3:07.2f}ms.csv",
                       ["phase_rad", "population_1"],
                       zip(scan["phases"], scan["populations"]))
    wall = time.perf_counter() - t0
    _write_csv(out / "visibility.csv",
               ["interrogation_time_ms", "visibility", "phase_rad"], rows)
    svgplot.write_polyline_svg(out / "visibility.svg",
                               [r[0] for r in rows], [r[1] for r in rows],
                               xlabel="T (ms)", ylabel="visibility",
                               title="Ramsey fringe visibility")
    grid = base.grid
    report = {
        "echo": echo,
        "visibility": {f"{r[0]:.6g}": r[1] for r in rows},
        "convergence": {
            "grid": [cfg.n_rho, cfg.n_z],
            "dt": cfg.dt,
            "resolution": grid.resolution_report(cfg.healing_length),
        },
    }
    _write_report(out / "gpe_visibility.json", report, cp)
    print(f"gpe-visibility: {len(rows)} points, ground state "
          f"{t_ground:.1f} s, total {wall:.1f} s wall clock")
    return 0


def _imaging_setup(cp):
    species = _species(cp)
    try:
        cfg = imaging.ImagingConfig(
            species=species,
            pixel_size=_getfloat(cp, "imaging", "pixel_um") * 1e-6,
            magnification=_getfloat(cp, "imaging", "magnification"),
            exposure_time=_getfloat(cp, "imaging", "exposure_us") * 1e-6,
            quantum_efficiency=_getfloat(cp, "imaging", "quantum_efficiency"),
            intensity_ratio=_getfloat(cp, "imaging", "intensity_ratio"),
            full_well=_getfloat(cp, "imaging", "full_well"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid imaging block: {exc}") from exc
    cloud = imaging.CloudConfig.thomas_fermi(
        species, REFERENCE_TRAP.omega_x, REFERENCE_TRAP.omega_y, REFERENCE_TRAP.omega_z,
        _getfloat(cp, "imaging", "n_atoms"),
        expansion_time=_getfloat(cp, "imaging", "expansion_ms") * 1e-3)
    return cfg, cloud


def run_imaging_sim(cp, args) -> int:
    out = _output_dir(cp, args)
    cfg, cloud = _imaging_setup(cp)
    pairing = cp.get("imaging", "pairing")
    n_runs = _getint(cp, "imaging", "n_runs")
    noise_on = cp.get("imaging", "noise").lower() not in ("off", "false", "0")
    if args.noise is not None:
        noise_on = args.noise == "on"
    seed = args.seed if args.seed is not None else _getint(cp, "run", "seed")

    budget = imaging.detection_noise(cloud, cfg, pairing=pairing)
    totals = np.empty(n_runs)
    if noise_on:
        for i in range(n_runs):
            totals[i] = imaging.simulate_image_pair(
                cloud, cfg, seed=seed ^ (i + 1))["total_atoms"]
    else:
        atoms, roi = imaging.column_density_grid(cloud, cfg)
        totals[:] = atoms[roi].sum()
    cum_std = np.zeros(n_runs)
    for i in range(1, n_runs):
        cum_std[i] = np.std(totals[: i + 1], ddof=1)
    _write_csv(out / "imaging_ensemble.csv",
               ["run", "total_atoms", "cumulative_std"],
               zip(range(1, n_runs + 1), totals, cum_std))
    svgplot.write_polyline_svg(out / "imaging_ensemble.svg",
                               np.arange(2, n_runs + 1), cum_std[1:],
                               xlabel="runs", ylabel="cumulative std (atoms)",
                               title="detection noise convergence")
    if _getbool(cp, "imaging", "write_images"):
        pair = imaging.simulate_image_pair(cloud, cfg, seed=seed)
        imaging.write_pgm(out / "bright.pgm", pair["bright"])
        imaging.write_pgm(out / "shadow.pgm", pair["shadow"])
    report = {
        "closed_form": budget,
        "ensemble": {
            "n_runs": n_runs,
            "noise": noise_on,
            "seed": seed,
            "mean_atoms": float(totals.mean()),
            "std_atoms": float(totals.std(ddof=1)) if n_runs > 1 else 0.0,
        },
    }
    _write_report(out / "imaging_sim.json", report, cp)
    print(f"imaging-sim: sigma_det = {budget['sigma_det']:.1f} atoms "
          f"(ensemble std {report['ensemble']['std_atoms']:.1f})")
    return 0


def run_imaging_optimize(cp, args) -> int:
    out = _output_dir(cp, args)
    cfg, cloud = _imaging_setup(cp)
    ratios = _getlist(cp, "imaging_optimize", "intensity_ratios")
    taus = [t * 1e-6 for t in _getlist(cp, "imaging_optimize", "exposures_us")]
    mags = _getlist(cp, "imaging_optimize", "magnifications")
    if not ratios or not taus or not mags:
        raise ConfigError("imaging_optimize grids must be nonempty")
    try:
        best = imaging.optimize_parameters(cloud, cfg, intensity_ratios=ratios,
                                           exposure_times=taus,
                                           magnifications=mags,
                                           return_surface=True)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    surface = best.pop("surface")
    _write_csv(out / "imaging_optimize_surface.csv",
               ["intensity_ratio", "exposure_s", "magnification",
                "feasible", "sigma_det"],
               surface)
    report = {
        "grid": {
            "intensity_ratios": ratios,
            "exposures_s": taus,
            "magnifications": mags,
        },
        "argmin": best,
    }
    _write_report(out / "imaging_optimize.json", report, cp)
    print(f"imaging-optimize: sigma_det = {best['sigma_det']:.1f} at "
          f"s = {best['intensity_ratio']:g}, "
          f"M = {best['magnification']:g}, "
          f"tau = {best['exposure_time'] * 1e6:g} us")
    return 0


def run_squeeze_sensitivity(cp, args) -> int:
    out = _output_dir(cp, args)
    n_atoms = _getfloat(cp, "squeezing", "n_atoms")
    if args.n_atoms is not None:
        n_atoms = args.n_atoms
    if n_atoms < 1 or n_atoms != int(n_atoms):
        raise ConfigError("squeezing.n_atoms must be a positive integer")
    n_atoms = int(n_atoms)
    chi_raw = cp.get("squeezing", "chi_per_atom").strip()
    if args.chi is not None:
        chi = args.chi
    elif chi_raw:
        chi = float(chi_raw)
    else:
        chi = twomode.TwoModeConfig.from_species(
            _species(cp), REFERENCE_TRAP_CYL, n_atoms).chi
    prep_time = _getfloat(cp, "squeezing", "prep_time_ms") * 1e-3
    mu = chi * prep_time
    n_phase = _getint(cp, "squeezing", "n_phase")
    phase_max = _getfloat(cp, "squeezing", "phase_max")
    if n_phase < 3 or phase_max <= 0:
        raise ConfigError("need squeezing.n_phase >= 3 and phase_max > 0")

    sql = squeezing.standard_quantum_limit(n_atoms)
    phases = np.linspace(-phase_max, phase_max, n_phase)
    dphi = squeezing.phase_sensitivity(n_atoms, mu, phases)
    best, best_phi = squeezing.best_phase_sensitivity(n_atoms, mu)
    moments = squeezing.oat_moments(n_atoms, mu)
    norm = np.sqrt(n_atoms)
    _write_csv(out / "squeeze_sensitivity.csv",
               ["phase_rad", "dphi_sqrtN", "sql_sqrtN"],
               zip(phases, dphi * norm, np.full(n_phase, sql * norm)))
    finite = np.isfinite(dphi)
    svgplot.write_polyline_svg(out / "squeeze_sensitivity.svg",
                               phases[finite],
                               np.minimum(dphi[finite] * norm, 10.0),
                               xlabel="phase (rad)",
                               ylabel="dphi sqrt(N)",
                               title="normalized phase sensitivity")
    report = {
        "n_atoms": n_atoms,
        "chi_per_atom": chi,
        "prep_time_s": prep_time,
        "twist_angle": mu,
        "sql_rad": sql,
        "best_dphi_rad": best,
        "best_phase_rad": best_phi,
        "best_dphi_sqrtN": best * norm,
        "wineland_parameter": squeezing.wineland_parameter(moments),
    }
    _write_report(out / "squeeze_sensitivity.json", report, cp)
    print(f"squeeze-sensitivity: min dphi sqrt(N) = {best * norm:.4g} "
          f"at phase {best_phi:.4g} rad (SQL {sql:.3g} rad)")
    return 0


def run_two_mode(cp, args) -> int:
    out = _output_dir(cp, args)
    species = _species(cp)
    n_atoms = _getfloat(cp, "twomode", "n_atoms")
    trap = REFERENCE_TRAP if args.reference_defaults else REFERENCE_TRAP_CYL
    if args.reference_defaults:
        n_atoms = 1e6
    if n_atoms < 1:
        raise ConfigError("twomode.n_atoms must be >= 1")
    cfg = twomode.TwoModeConfig.from_species(species, trap, n_atoms)
    n_std = _getfloat(cp, "twomode", "n_total_std_fraction") * n_atoms
    times = np.asarray(sorted(_getlist(cp, "twomode", "times_ms"))) * 1e-3
    if times.size == 0:
        raise ConfigError("twomode.times_ms must list at least one time")
    k1 = _getfloat(cp, "twomode", "survival_1")
    k2 = _getfloat(cp, "twomode", "survival_2")
    drift_rate = _getfloat(cp, "twomode", "drift_rate")

    diffusion = twomode.phase_diffusion_std(cfg, n_atoms, times)
    number_noise = twomode.total_number_phase_std(cfg, n_std, times)
    number_echo = twomode.total_number_phase_std(cfg, n_std, times, echo=True)
    _write_csv(out / "two_mode.csv",
               ["time_ms", "diffusion_std_rad", "number_noise_std_rad",
                "number_noise_echo_std_rad"],
               zip(times * 1e3, diffusion, number_noise, number_echo))
    svgplot.write_polyline_svg(out / "two_mode.svg", times * 1e3, diffusion,
                               xlabel="T (ms)",
                               ylabel="phase diffusion std (rad)",
                               title="interaction phase diffusion")
    report = {
        "n_atoms": n_atoms,
        "chi_per_atom": cfg.chi,
        "scattering_ratio": (species.a11 - 2 * species.a12 + species.a22)
        / species.a11,
        "miscibility": miscibility_parameter(species.a11, species.a12,
                                             species.a22),
        "collisional_shift_hz":
            twomode.collisional_shift(cfg, n_atoms) / (2 * np.pi),
        "diffusion_rate_mrad_per_s":
            twomode.tf_phase_diffusion_rate(species, trap, n_atoms) / 2 * 1e3,
        "echo_cancels_number_noise": bool(np.all(number_echo == 0.0)),
        "loss_visibility": twomode.differential_loss_visibility(k1, k2),
        "drift_crossing_time_s": twomode.drift_crossing_time(drift_rate),
    }
    _write_report(out / "two_mode.json", report, cp)
    print(f"two-mode: diffusion rate "
          f"{report['diffusion_rate_mrad_per_s']:.1f} mrad/s, "
          f"loss visibility {report['loss_visibility']:.3f}")
    return 0


def _bundled_drift_dataset() -> Path:
    return Path(__file__).parent / "data" / "drift_synthetic.csv"


def _read_xy_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [row for row in reader if row]
    except (OSError, StopIteration) as exc:
        raise ConfigError(f"cannot read dataset {path}: {exc}") from exc
    if len(header) < 2:
        raise ConfigError(f"dataset {path} needs two columns")
    try:
        data = np.array([[float(row[0]), float(row[1])] for row in rows])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"malformed dataset {path}: {exc}") from exc
    if data.shape[0] < 3:
        raise ConfigError(f"dataset {path} needs at least 3 rows")
    return data[:, 0], data[:, 1]


def run_fit(cp, args) -> int:
    out = _output_dir(cp, args)
    model = args.model or cp.get("fit", "model")
    if model not in ("fringe", "decay", "drift"):
        raise ConfigError(f"unknown fit model: {model}")
    input_path = args.input or cp.get("fit", "input").strip()
    if not input_path:
        if model != "drift":
            raise ConfigError(f"fit.input is required for model {model}")
        input_path = _bundled_drift_dataset()
    x, y = _read_xy_csv(Path(input_path))

    if model == "fringe":
        fit = analysis.fit_fringe(x, y)
        params = {
            "offset": fit.offset,
            "amplitude": fit.amplitude,
            "amplitude_std": fit.amplitude_std,
            "phase_rad": fit.phase,
            "visibility": fit.visibility,
            "visibility_std": fit.visibility_std,
            "residual_std": fit.residual_std,
        }
        model_y = fit.offset + fit.amplitude * np.cos(x - fit.phase)
    elif model == "decay":
        fit = analysis.fit_exponential_decay(x, y)
        params = {
            "amplitude": fit.amplitude,
            "amplitude_std": fit.amplitude_std,
            "tau": fit.tau,
            "tau_std": fit.tau_std,
        }
        model_y = fit.amplitude * np.exp(-x / fit.tau)
    else:
        fit = analysis.fit_drift_envelope(
            x, y, drift_rate_max=_getfloat(cp, "fit", "drift_rate_max"))
        params = {
            "visibility0": fit.visibility0,
            "tau": fit.tau,
            "drift_rate": fit.drift_rate,
            "param_std": list(fit.param_std),
            "residual_std": fit.residual_std,
            "success": fit.success,
        }
        model_y = 0.5 * (1.0 + fit.visibility0 * np.exp(-x / fit.tau)
                         * np.cos(fit.drift_rate * x ** 2 / 4.0))
    _write_csv(out / f"fit_{model}_curve.csv",
               ["x", "data", "model"], zip(x, y, model_y))
    svgplot.write_polyline_svg(out / f"fit_{model}_curve.svg", x, model_y,
                               xlabel="x", ylabel="model",
                               title=f"{model} fit")
    report = {"model": model, "input": str(input_path), "n_points": x.size,
              "parameters": params}
    _write_report(out / f"fit_{model}.json", report, cp)
    print(f"fit ({model}): " + ", ".join(f"{k}={v}" for k, v in params.items()
                                         if not isinstance(v, list)))
    return 0


# ---------------------------------------------------------------------------
# Entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramsey-lab",
        description="Trapped-BEC Ramsey interferometer simulations")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="INI config file or an emitted "
                       "JSON report with an embedded config")
        p.add_argument("--set", dest="overrides", action="append",
                       metavar="SECTION.KEY=VALUE",
                       help="override a single config key (repeatable)")
        p.add_argument("--seed", type=int, default=None,
                       help="base RNG seed (overrides run.seed)")
        p.add_argument("--output-dir", default=None,
                       help="output directory (overrides run.output_dir and "
                       "RAMSEY_LAB_OUTDIR)")

    p = sub.add_parser("noise-budget",
                       help="beamsplitter and magnetic noise decomposition")
    common(p)
    p.add_argument("--sweep", action="store_true",
                   help="also emit f/g/variance over an eps grid")
    p.set_defaults(func=run_noise_budget)

    p = sub.add_parser("gpe-visibility",
                       help="mean-field Ramsey visibility from GPE dynamics")
    common(p)
    p.add_argument("--a12-scale", type=float, default=None,
                   help="rescale the interspecies scattering length")
    p.add_argument("--echo", action="store_true",
                   help="insert a spin-echo pulse at mid sequence")
    p.set_defaults(func=run_gpe_visibility)

    p = sub.add_parser("imaging-sim",
                       help="absorption imaging shot-noise ensemble")
    common(p)
    p.add_argument("--noise", choices=("on", "off"), default=None,
                   help="toggle photon shot noise")
    p.set_defaults(func=run_imaging_sim)

    p = sub.add_parser("imaging-optimize",
                       help="grid search for minimal detection noise")
    common(p)
    p.set_defaults(func=run_imaging_optimize)

    p = sub.add_parser("squeeze-sensitivity",
                       help="squeezing-enhanced phase sensitivity scan")
    common(p)
    p.add_argument("--chi", type=float, default=None,
                   help="twisting rate per atom (rad/s)")
    p.add_argument("--N", dest="n_atoms", type=float, default=None,
                   help="atom number")
    p.set_defaults(func=run_squeeze_sensitivity)

    p = sub.add_parser("two-mode",
                       help="two-mode phase evolution and diffusion report")
    common(p)
    p.add_argument("--reference-defaults", action="store_true",
                   help="use the reference trap and N = 1e6")
    p.set_defaults(func=run_two_mode)

    p = sub.add_parser("fit", help="fit fringe, decay or drift models")
    common(p)
    p.add_argument("--model", choices=("fringe", "decay", "drift"),
                   default=None)
    p.add_argument("--input", default=None, help="input CSV (x, y columns)")
    p.set_defaults(func=run_fit)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cp = load_config(args.config)
        apply_overrides(cp, args.overrides)
        if args.seed is not None:
            cp["run"]["seed"] = str(args.seed)
        if getattr(args, "a12_scale", None) is not None:
            cp["gpe"]["a12_scale"] = str(args.a12_scale)
        if getattr(args, "echo", False):
            cp["gpe"]["echo"] = "true"
        # the --output-dir flag stays out of the embedded config so that
        # re-running a report elsewhere produces byte-identical files
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return args.func(cp, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FloatingPointError, ZeroDivisionError, ArithmeticError,
            np.linalg.LinAlgError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
