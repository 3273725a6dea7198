"""Fast spin-dependent-kick gates on two-dimensional trapped-ion lattices."""

from .constants import CODATA2018, IonSpecies, builtin_species, doppler_temperature, species_database
from .crosstalk import (build_block_schedule, crosstalk_map, parallel_crosstalk_per_gate,
                        power_law_slope)
from .design import GateDesign, solve_design
from .errors import (ConvergenceError, DivergenceError, DomainError, InstabilityError,
                     NumericalError, UnknownSpeciesError)
from .lattice import (LatticeGeometry, ModeSpectrum, build_square_lattice, crystal_modes,
                      dispersion, lattice_sum, normal_modes, potential_matrix, zeta)
from .propagation import evolve_disturbance, group_velocity, max_group_velocity, velocity_field
from .pulses import (FidelityReport, PulseSequence, build_pulse_sequence, gate_infidelity,
                     rotation_angle, trajectory)

__version__ = "0.1.0"

__all__ = [
    "CODATA2018",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "FidelityReport",
    "GateDesign",
    "InstabilityError",
    "IonSpecies",
    "LatticeGeometry",
    "ModeSpectrum",
    "NumericalError",
    "PulseSequence",
    "UnknownSpeciesError",
    "build_block_schedule",
    "build_pulse_sequence",
    "build_square_lattice",
    "builtin_species",
    "crosstalk_map",
    "crystal_modes",
    "dispersion",
    "doppler_temperature",
    "evolve_disturbance",
    "gate_infidelity",
    "group_velocity",
    "lattice_sum",
    "max_group_velocity",
    "normal_modes",
    "parallel_crosstalk_per_gate",
    "potential_matrix",
    "power_law_slope",
    "rotation_angle",
    "solve_design",
    "species_database",
    "trajectory",
    "velocity_field",
    "zeta",
]
