import math

import numpy as np
import pytest

from sdkgates.errors import DomainError
from sdkgates.lattice import build_square_lattice, crystal_modes, dispersion, zone_axis
from sdkgates.propagation import (evolve_disturbance, exterior_response, group_velocity,
                                  light_cone_radius, max_group_velocity, radial_distances,
                                  radial_exponent, velocity_field)

D = 50e-6
WZ = 2 * math.pi * 0.5444e6
EPS = 5.558e-4


def test_velocity_vanishes_at_origin():
    np.testing.assert_array_equal(group_velocity(0.0, 0.0, EPS, WZ, D, radius=20), [0.0, 0.0])


def test_finite_difference_gradient():
    rng = np.random.default_rng(11)
    R = 60
    h = 1e-4
    for x, y in rng.uniform(-2.8, 2.8, size=(10, 2)):
        v = group_velocity(x / D, y / D, EPS, WZ, D, radius=R)
        fd = []
        for dx, dy in ((h, 0), (0, h)):
            plus = dispersion((x + dx) / D, (y + dy) / D, WZ, EPS, D, R).omega_first_order
            minus = dispersion((x - dx) / D, (y - dy) / D, WZ, EPS, D, R).omega_first_order
            fd.append((plus - minus) / (2 * h / D))
        assert np.linalg.norm(np.array(fd) - v) <= 1e-5 * np.linalg.norm(v)


def test_field_matches_direct_sum():
    f = velocity_field(EPS, WZ, D, grid=31, radius=15)
    kd = zone_axis(31)
    for a, b in [(0, 0), (4, 20), (15, 15), (30, 7)]:
        v = group_velocity(kd[a] / D, kd[b] / D, EPS, WZ, D, radius=15)
        assert f.vx[a, b] == pytest.approx(v[0], rel=1e-10, abs=1e-12 * f.unit)
        assert f.vy[a, b] == pytest.approx(v[1], rel=1e-10, abs=1e-12 * f.unit)


def test_grid_refinement():
    _, coarse = max_group_velocity(EPS, WZ, D, grid=201)
    _, fine = max_group_velocity(EPS, WZ, D, grid=401)
    assert abs(fine / coarse - 1) < 5e-3


def test_normalized_max_independent_of_epsilon():
    values = [max_group_velocity(eps, WZ, D, grid=101)[1] for eps in (1e-5, 1e-4, 1e-3)]
    assert max(values) - min(values) <= 1e-12 * values[0]


def test_field_validation():
    with pytest.raises(DomainError):
        velocity_field(EPS, WZ, D, grid=2)


# --- disturbance ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def response41():
    g = build_square_lattice(41, 41, D)
    modes = crystal_modes(g, 170.936 * 1.66053906660e-27, WZ)
    times = np.linspace(0, 2 * math.pi / WZ, 257)
    return g, modes, evolve_disturbance(modes, g.central_ion(), 1e-9, 0.0, times)


def test_initial_condition():
    g = build_square_lattice(5, 5, D)
    modes = crystal_modes(g, 1e-25, WZ)
    resp = evolve_disturbance(modes, 12, 2e-9, 0.0, [0.0])
    expected = np.zeros(25)
    expected[12] = 2e-9
    np.testing.assert_allclose(resp.displacements[:, 0], expected, atol=1e-24)


def test_single_ion_oscillator():
    modes = crystal_modes(build_square_lattice(1, 1, D), 1e-25, WZ)
    t = np.linspace(0, 5e-6, 50)
    resp = evolve_disturbance(modes, 0, 1e-9, 3e-3, t)
    expected = 1e-9 * np.cos(WZ * t) + 3e-3 / WZ * np.sin(WZ * t)
    np.testing.assert_allclose(resp.displacements[0], expected, rtol=1e-12, atol=1e-22)


def test_energy_conservation():
    g = build_square_lattice(7, 7, D)
    modes = crystal_modes(g, 1e-25, WZ)
    resp = evolve_disturbance(modes, 24, 1e-9, 2e-4, np.linspace(0, 2e-5, 400))
    e = resp.mode_energy()
    assert np.max(np.abs(e / e[0] - 1)) <= 1e-9


def test_radial_exponent(response41):
    g, _, resp = response41
    assert radial_exponent(resp, g, 3, 12) == pytest.approx(-3, abs=0.5)


def test_cone_exterior_small(response41):
    g, modes, resp = response41
    t = resp.times[-1]
    cone = light_cone_radius(3.5, modes.epsilon, WZ, t) + 3
    assert exterior_response(resp, g, cone) < modes.epsilon


def test_radial_distances():
    g = build_square_lattice(3, 3, D)
    np.testing.assert_allclose(radial_distances(g, 4), [math.sqrt(2), 1, math.sqrt(2), 1, 0, 1,
                                                        math.sqrt(2), 1, math.sqrt(2)])


def test_disturbance_validation():
    modes = crystal_modes(build_square_lattice(2, 2, D), 1e-25, WZ)
    with pytest.raises(DomainError):
        evolve_disturbance(modes, 4, 1e-9, 0.0, [0.0])
    with pytest.raises(DomainError):
        evolve_disturbance(modes, 0, 1e-9, 0.0, [-1.0])
