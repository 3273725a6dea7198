"""Physical constants and the ion-species database.

All quantities are SI; angular frequencies are in rad/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, UnknownSpeciesError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values used throughout the package."""

    elementary_charge: float = 1.602176634e-19  # C
    vacuum_permittivity: float = 8.8541878128e-12  # F/m
    reduced_planck: float = 1.054571817e-34  # J s
    boltzmann: float = 1.380649e-23  # J/K
    atomic_mass_unit: float = 1.66053906660e-27  # kg

    def __post_init__(self):
        for name in ("elementary_charge", "vacuum_permittivity", "reduced_planck",
                     "boltzmann", "atomic_mass_unit"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    @property
    def coulomb(self) -> float:
        """e^2 / (4 pi eps0) in J m."""
        return self.elementary_charge**2 / (4 * math.pi * self.vacuum_permittivity)


CODATA2018 = PhysicalConstants()

HBAR = CODATA2018.reduced_planck
KB = CODATA2018.boltzmann
AMU = CODATA2018.atomic_mass_unit
COULOMB = CODATA2018.coulomb


@dataclass(frozen=True)
class IonSpecies:
    """Ion plus the pulsed-laser parameters that drive it.

    Parameters
    ----------
    name : str
        Identifier, e.g. ``"Yb171"``.
    mass : float
        Ion mass in kg.
    raman_wavelength : float
        Wavelength of the counter-propagating Raman beams in m.
    repetition_rate : float
        Pulse repetition rate as an angular frequency (rad/s).
    linewidth : float
        Cooling-transition linewidth (rad/s), sets the Doppler temperature.
    """

    name: str
    mass: float
    raman_wavelength: float
    repetition_rate: float
    linewidth: float
    delta_k: float = field(init=False)

    def __post_init__(self):
        for attr in ("mass", "raman_wavelength", "repetition_rate", "linewidth"):
            value = getattr(self, attr)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise DomainError(f"species {self.name!r}: {attr} must be positive, got {value!r}")
        # counter-propagating beams: two photon momenta per kick
        object.__setattr__(self, "delta_k", 4 * math.pi / self.raman_wavelength)

    @property
    def repetition_frequency(self) -> float:
        """Repetition rate in Hz."""
        return self.repetition_rate / (2 * math.pi)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "mass_u": self.mass / AMU,
            "raman_wavelength_m": self.raman_wavelength,
            "repetition_rate_hz": self.repetition_frequency,
            "linewidth_hz": self.linewidth / (2 * math.pi),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IonSpecies":
        """Build a species from the config-file representation (see ``to_dict``)."""
        try:
            return cls(
                name=str(data["name"]),
                mass=float(data["mass_u"]) * AMU,
                raman_wavelength=float(data["raman_wavelength_m"]),
                repetition_rate=2 * math.pi * float(data["repetition_rate_hz"]),
                linewidth=2 * math.pi * float(data["linewidth_hz"]),
            )
        except KeyError as exc:
            raise DomainError(f"species definition missing field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise DomainError(f"invalid species definition: {exc}") from None


_REP_RATE = 2 * math.pi * 80e6
_LINEWIDTH = 2 * math.pi * 20e6

# isotope mass (u), Raman wavelength (m)
_BUILTIN = {
    "Yb171": (170.936, 355e-9),
    "Be9": (9.012, 318e-9),
    "Ca40": (39.963, 400e-9),
}


def builtin_species(name: str) -> IonSpecies:
    """Return one of the built-in species (``Yb171``, ``Be9``, ``Ca40``)."""
    try:
        mass_u, wavelength = _BUILTIN[name]
    except KeyError:
        known = ", ".join(sorted(_BUILTIN))
        raise UnknownSpeciesError(f"unknown species {name!r} (known: {known})") from None
    return IonSpecies(name, mass_u * AMU, wavelength, _REP_RATE, _LINEWIDTH)


def builtin_names() -> list[str]:
    return sorted(_BUILTIN)


def species_database(overrides: dict | None = None) -> dict[str, IonSpecies]:
    """Builtins merged with config-file definitions keyed by name.

    Entries in ``overrides`` replace builtins of the same name.
    """
    db = {name: builtin_species(name) for name in _BUILTIN}
    for key, entry in (overrides or {}).items():
        entry = dict(entry)
        entry.setdefault("name", key)
        db[key] = IonSpecies.from_dict(entry)
    return db


def doppler_temperature(linewidth: float) -> float:
    """Doppler-limit temperature hbar*Gamma/(2 k_B) in kelvin for a linewidth in rad/s."""
    if not linewidth > 0:
        raise DomainError(f"linewidth must be positive, got {linewidth!r}")
    return HBAR * linewidth / (2 * KB)
