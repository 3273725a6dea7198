import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdkgates.constants import IonSpecies, builtin_names, builtin_species
from sdkgates.design import (delta_phi, epsilon, initial_omega_z, kick_count, roundoff_bound,
                             sensitivity, solve_design)
from sdkgates.errors import DomainError

YB = builtin_species("Yb171")


def test_epsilon_reference_points():
    assert epsilon(YB, 2 * math.pi * 0.5444e6, 50e-6) == pytest.approx(0.00056, rel=0.01)
    assert epsilon(YB, 2 * math.pi * 0.2073e6, 250e-6) == pytest.approx(3.1e-5, rel=0.02)


def test_epsilon_cubic_law():
    w = 2 * math.pi * 1e6
    assert epsilon(YB, w, 2e-5) / epsilon(YB, w, 4e-5) == pytest.approx(8, rel=1e-14)


def test_epsilon_domain():
    with pytest.raises(DomainError):
        epsilon(YB, 0.0, 1e-5)
    with pytest.raises(DomainError):
        epsilon(YB, 1.0, -1e-5)


def test_initial_omega_scaling():
    assert initial_omega_z(YB, 80e-6) / initial_omega_z(YB, 10e-6) == pytest.approx(8 ** (-0.6), rel=1e-13)
    d = np.geomspace(20e-6, 400e-6, 9)
    w = [initial_omega_z(YB, x) for x in d]
    assert np.polyfit(np.log(d), np.log(w), 1)[0] == pytest.approx(-0.6, abs=1e-10)


def test_delta_phi_inverts_initial_omega():
    for name in builtin_names():
        sp = builtin_species(name)
        for d in (30e-6, 50e-6, 250e-6):
            assert delta_phi(sp, initial_omega_z(sp, d), d) == pytest.approx(math.pi / 4, rel=1e-12)


def test_delta_phi_power_law():
    w = 2 * math.pi * 5e5
    assert delta_phi(YB, 2 * w, 5e-5) / delta_phi(YB, w, 5e-5) == pytest.approx(2**-5, rel=1e-13)


def test_delta_phi_at_reported_frequency():
    M = 147
    dphi = delta_phi(YB, 2 * math.pi * 0.5444e6, 50e-6)
    assert abs(dphi / (math.pi / 4) - 1) <= 5 / (2 * M)


@pytest.mark.parametrize("M, expected", [(147, 1.78e-4), (386, 2.59e-5)])
def test_roundoff_bound_values(M, expected):
    mp.mp.dps = 30
    exact = (5 * mp.pi / (8 * M)) ** 2
    assert roundoff_bound(M) == pytest.approx(float(exact), rel=1e-15)
    assert roundoff_bound(M) == pytest.approx(expected, rel=5e-3)


def test_roundoff_bound_quadratic():
    assert roundoff_bound(200) == pytest.approx(roundoff_bound(100) / 4, rel=1e-15)
    with pytest.raises(DomainError):
        roundoff_bound(0)


def test_reference_design():
    des = solve_design(YB, 50e-6)
    assert des.kicks_per_arm == 147
    assert des.omega_z / (2 * math.pi) == pytest.approx(0.5444e6, rel=1e-3)
    assert des.gate_time == pytest.approx(3.675e-6, rel=1e-12)


def test_rounding_modes():
    up = solve_design(YB, 50e-6, "up")
    down = solve_design(YB, 50e-6, "down")
    assert up.kicks_per_arm == math.ceil(up.kick_count_real)
    assert down.kicks_per_arm == math.floor(down.kick_count_real)
    assert up.kicks_per_arm - down.kicks_per_arm == 1
    with pytest.raises(DomainError):
        solve_design(YB, 50e-6, "sideways")


@settings(max_examples=40, deadline=None)
@given(name=st.sampled_from(["Yb171", "Be9", "Ca40"]), d=st.floats(20e-6, 400e-6),
       rounding=st.sampled_from(["nearest", "up", "down"]))
def test_design_self_consistency(name, d, rounding):
    sp = builtin_species(name)
    des = solve_design(sp, d, rounding)
    assert des.kicks_per_arm >= 1
    assert kick_count(sp, des.omega_z, d) == pytest.approx(des.kicks_per_arm, rel=1e-12)
    assert des.gate_time == 2 * des.kicks_per_arm / sp.repetition_frequency
    assert des.epsilon == epsilon(sp, des.omega_z, d)
    assert des.roundoff_bound == roundoff_bound(des.kicks_per_arm)
    if rounding == "nearest":
        rel = abs(des.omega_z - des.omega_z_initial) / des.omega_z_initial
        assert rel <= 1 / (2 * des.kicks_per_arm) + 1e-6


@pytest.mark.parametrize("name", ["Yb171", "Be9", "Ca40"])
def test_design_monotone_in_spacing(name):
    sp = builtin_species(name)
    designs = [solve_design(sp, d) for d in np.arange(30e-6, 250.1e-6, 10e-6)]
    w = [x.omega_z for x in designs]
    M = [x.kicks_per_arm for x in designs]
    assert all(b < a for a, b in zip(w, w[1:]))
    assert all(b > a for a, b in zip(M, M[1:]))


def test_large_epsilon_warns():
    heavy = IonSpecies("light", 1e-27, 1e-7, 2 * math.pi * 80e6, 1e8)
    with pytest.warns(RuntimeWarning):
        solve_design(heavy, 1e-6)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve_design(YB, 50e-6)


def test_design_to_dict():
    data = solve_design(YB, 50e-6).to_dict()
    assert data["kicks_per_arm"] == 147
    assert data["species"]["name"] == "Yb171"


def test_sensitivity():
    des = solve_design(YB, 50e-6)
    zero = sensitivity(des, 0.0)
    assert zero.rotation_infidelity == 0 and zero.displacement_infidelity == 0
    rep = sensitivity(des, 1e-3 * des.omega_z)
    assert rep.rotation_infidelity == pytest.approx((5 * math.pi * 1e-3 / 4) ** 2, rel=1e-12)
    assert rep.rotation_infidelity == pytest.approx(1.54e-5, rel=3e-3)
    rep2 = sensitivity(des, 2e-3 * des.omega_z)
    assert rep2.displacement_infidelity / rep.displacement_infidelity == pytest.approx(16, rel=1e-12)
    assert rep2.rotation_infidelity / rep.rotation_infidelity == pytest.approx(4, rel=1e-12)
    with pytest.raises(DomainError):
        sensitivity(des, 2 * des.omega_z)
