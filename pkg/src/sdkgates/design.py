"""Gate parameters for the (+M, -M) spin-dependent-kick sequence.

Given a species and the ion spacing ``d``, the trap frequency is first set
so that the phase difference between the centre-of-mass and relative modes
equals pi/4, then shifted slightly so that the number of kicks per arm,
``M = (1 + eps/2) * omega_rep / omega_z``, is an integer.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .constants import COULOMB, HBAR, IonSpecies
from .errors import ConvergenceError, DomainError

ROUNDING_MODES = ("nearest", "up", "down")
EPSILON_WARN = 0.01


def epsilon(species: IonSpecies, omega_z: float, d: float) -> float:
    """Coulomb-to-trap energy ratio e^2 / (4 pi eps0 m omega_z^2 d^3)."""
    if not omega_z > 0 or not d > 0:
        raise DomainError("omega_z and d must be positive")
    return COULOMB / (species.mass * omega_z**2 * d**3)


def initial_omega_z(species: IonSpecies, d: float) -> float:
    """Trap frequency giving a pi/4 mode phase difference, before M is made integer."""
    if not d > 0:
        raise DomainError(f"spacing must be positive, got {d!r}")
    num = 6 * COULOMB * HBAR * species.delta_k**2 * species.repetition_rate**2
    return (num / (math.pi**2 * species.mass**2 * d**3)) ** 0.2


def delta_phi(species: IonSpecies, omega_z: float, d: float) -> float:
    """Phase difference between relative and centre-of-mass loops (rad)."""
    eps = epsilon(species, omega_z, d)
    return (3 * eps * HBAR * species.delta_k**2 * species.repetition_rate**2
            / (2 * math.pi * species.mass * omega_z**3))


def kick_count(species: IonSpecies, omega_z: float, d: float) -> float:
    """Real-valued kicks per arm, (1 + eps/2) omega_rep / omega_z."""
    return (1 + epsilon(species, omega_z, d) / 2) * species.repetition_rate / omega_z


def roundoff_bound(M: int) -> float:
    """Upper bound (5 pi / 8 M)^2 on the infidelity from rounding M."""
    if M < 1:
        raise DomainError("M must be a positive integer")
    return (5 * math.pi / (8 * M)) ** 2


def _round(x, mode):
    if mode == "nearest":
        return math.floor(x + 0.5)
    if mode == "up":
        return math.ceil(x)
    if mode == "down":
        return math.floor(x)
    raise DomainError(f"rounding must be one of {ROUNDING_MODES}, got {mode!r}")


@dataclass(frozen=True)
class GateDesign:
    species: IonSpecies
    spacing: float
    omega_z: float
    kicks_per_arm: int
    epsilon: float
    gate_time: float
    delta_phi: float
    roundoff_bound: float
    omega_z_initial: float
    kick_count_real: float
    rounding: str = "nearest"

    def to_dict(self) -> dict:
        return {
            "species": self.species.to_dict(),
            "spacing_m": self.spacing,
            "omega_z_hz": self.omega_z / (2 * math.pi),
            "omega_z_initial_hz": self.omega_z_initial / (2 * math.pi),
            "kicks_per_arm": self.kicks_per_arm,
            "kick_count_real": self.kick_count_real,
            "rounding": self.rounding,
            "epsilon": self.epsilon,
            "gate_time_s": self.gate_time,
            "delta_phi_rad": self.delta_phi,
            "roundoff_bound": self.roundoff_bound,
        }


def solve_design(species: IonSpecies, d: float, rounding: str = "nearest",
                 max_iter: int = 100, rtol: float = 1e-14) -> GateDesign:
    """Solve for omega_z and the integer kick count M at spacing ``d``.

    The integer condition is transcendental in omega_z because epsilon
    depends on it; it is solved by fixed-point iteration, which contracts
    with a factor of order epsilon.
    """
    if rounding not in ROUNDING_MODES:
        raise DomainError(f"rounding must be one of {ROUNDING_MODES}, got {rounding!r}")
    w0 = initial_omega_z(species, d)
    m_real = kick_count(species, w0, d)
    M = max(int(_round(m_real, rounding)), 1)

    w = w0
    for _ in range(max_iter):
        w_new = (1 + epsilon(species, w, d) / 2) * species.repetition_rate / M
        if abs(w_new - w) <= rtol * w:
            w = w_new
            break
        w = w_new
    else:
        raise ConvergenceError(f"trap-frequency iteration did not converge in {max_iter} steps")

    eps = epsilon(species, w, d)
    if eps >= EPSILON_WARN:
        warnings.warn(f"epsilon = {eps:.3g} is not small; the gate model assumes epsilon << 1",
                      RuntimeWarning, stacklevel=2)
    return GateDesign(
        species=species,
        spacing=float(d),
        omega_z=w,
        kicks_per_arm=M,
        epsilon=eps,
        gate_time=2 * M / species.repetition_frequency,
        delta_phi=delta_phi(species, w, d),
        roundoff_bound=roundoff_bound(M),
        omega_z_initial=w0,
        kick_count_real=m_real,
        rounding=rounding,
    )


@dataclass(frozen=True)
class SensitivityReport:
    delta_omega_rel: float
    rotation_infidelity: float
    displacement_infidelity: float


def sensitivity(design: GateDesign, delta_omega: float) -> SensitivityReport:
    """Infidelity estimates for a trap-frequency error ``delta_omega`` (rad/s)."""
    if not abs(delta_omega) < design.omega_z:
        raise DomainError("|delta_omega| must be smaller than omega_z")
    rel = delta_omega / design.omega_z
    sp = design.species
    eta = sp.delta_k * math.sqrt(HBAR / (2 * sp.mass * design.omega_z))
    M = design.kicks_per_arm
    return SensitivityReport(
        delta_omega_rel=rel,
        rotation_infidelity=(5 * math.pi * rel / 4) ** 2,
        displacement_infidelity=8 * math.pi**2 * eta**2 * M**2 * rel**4,
    )
