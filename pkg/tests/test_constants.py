import math

import mpmath as mp
import pytest

from sdkgates.constants import (AMU, CODATA2018, HBAR, KB, IonSpecies, builtin_names, builtin_species,
                                doppler_temperature, species_database)
from sdkgates.errors import DomainError, UnknownSpeciesError


def test_builtin_parameters():
    yb = builtin_species("Yb171")
    assert yb.raman_wavelength == 355e-9
    assert yb.repetition_rate == pytest.approx(2 * math.pi * 80e6, rel=1e-15)
    assert yb.linewidth == pytest.approx(2 * math.pi * 20e6, rel=1e-15)
    assert builtin_species("Be9").raman_wavelength == 318e-9
    assert builtin_species("Ca40").raman_wavelength == 400e-9
    assert builtin_names() == ["Be9", "Ca40", "Yb171"]


def test_delta_k_is_two_photon_momenta():
    yb = builtin_species("Yb171")
    assert yb.delta_k == pytest.approx(2 * (2 * math.pi / 355e-9), rel=1e-15)


def test_unknown_species():
    with pytest.raises(UnknownSpeciesError):
        builtin_species("Xe131")
    # also catchable as a lookup error
    with pytest.raises(KeyError):
        builtin_species("Xe131")


@pytest.mark.parametrize("field", ["mass", "raman_wavelength", "repetition_rate", "linewidth"])
def test_species_rejects_nonpositive(field):
    kwargs = dict(name="X", mass=1e-26, raman_wavelength=3e-7, repetition_rate=1e8, linewidth=1e8)
    kwargs[field] = 0.0
    with pytest.raises(DomainError):
        IonSpecies(**kwargs)


def test_species_dict_round_trip():
    for name in builtin_names():
        sp = builtin_species(name)
        again = IonSpecies.from_dict(sp.to_dict())
        assert again.name == sp.name
        assert again.mass == pytest.approx(sp.mass, rel=1e-15)
        assert again.repetition_rate == pytest.approx(sp.repetition_rate, rel=1e-15)


def test_species_database_override():
    db = species_database({"Sr88": {"mass_u": 87.906, "raman_wavelength_m": 4.2e-7,
                                    "repetition_rate_hz": 8e7, "linewidth_hz": 2e7}})
    assert db["Sr88"].mass == pytest.approx(87.906 * AMU)
    assert "Yb171" in db
    with pytest.raises(DomainError):
        species_database({"bad": {"mass_u": 1.0}})


def test_doppler_temperature_high_precision():
    mp.mp.dps = 30
    gamma = 2 * mp.pi * mp.mpf(20e6)
    expected = mp.mpf("1.054571817e-34") * gamma / (2 * mp.mpf("1.380649e-23"))
    assert doppler_temperature(2 * math.pi * 20e6) == pytest.approx(float(expected), rel=1e-14)
    assert doppler_temperature(2 * math.pi * 20e6) == pytest.approx(4.80e-4, rel=2e-3)


def test_doppler_temperature_limits():
    assert doppler_temperature(1e-300) < 1e-300
    assert doppler_temperature(2 * KB / HBAR) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(DomainError):
        doppler_temperature(0.0)
    with pytest.raises(DomainError):
        doppler_temperature(-1.0)


def test_codata_values():
    assert CODATA2018.reduced_planck == 1.054571817e-34
    assert CODATA2018.coulomb == pytest.approx(
        CODATA2018.elementary_charge**2 / (4 * math.pi * CODATA2018.vacuum_permittivity), rel=1e-15)
