"""Coupled Gross-Pitaevskii solver on a cylindrically symmetric grid."""

from .grid import CylGrid
from .solver import (
    GpeConfig,
    TwoComponentState,
    apply_pi,
    apply_pi_half,
    chemical_potential,
    energy,
    energy_components,
    evolve,
    ground_state,
    ramsey_visibility_curve,
    simulate_ramsey,
    thomas_fermi_state,
    virial_residual,
    write_snapshot,
)

__all__ = [
    "CylGrid",
    "GpeConfig",
    "TwoComponentState",
    "apply_pi",
    "apply_pi_half",
    "chemical_potential",
    "energy",
    "energy_components",
    "evolve",
    "ground_state",
    "ramsey_visibility_curve",
    "simulate_ramsey",
    "thomas_fermi_state",
    "virial_residual",
    "write_snapshot",
]
