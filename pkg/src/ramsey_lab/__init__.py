"""ramsey_lab: noise and dynamics analysis of a large-atom-number
Bose-Einstein-condensate Ramsey interferometer.

Subpackages and modules:

- atomphys: species constants, magnetic sensitivity, Thomas-Fermi properties
- bloch: two-level Ramsey sequence algebra and beamsplitter noise propagation
- twomode: interaction phase evolution, phase diffusion, spin echo, losses
- gpe: coupled Gross-Pitaevskii solver on a cylindrical grid
- imaging: absorption imaging shot-noise budget and synthetic images
- squeezing: one-axis-twisting moments and phase sensitivity
- analysis: fringe/decay/drift fitting and scatter statistics
- cli: command line entry point (console script ``ramsey-lab``)
"""

__version__ = "0.1.0"
