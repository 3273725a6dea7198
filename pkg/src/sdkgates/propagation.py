"""Speed of phonon propagation and the response to a local disturbance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .lattice import (LatticeGeometry, ModeSpectrum, _check_zone, evaluate_folded,
                      folded_coefficients, zone_axis)


def group_velocity(k1: float, k2: float, epsilon: float, omega_z: float, d: float,
                   radius: int = 200) -> np.ndarray:
    """Group velocity (m/s) from the first-order dispersion at wave vector (k1, k2)."""
    _check_zone(k1, k2, d)
    x, y = k1 * d, k2 * d
    b = np.arange(-radius, radius + 1, dtype=float)
    b2 = b * b
    vx = vy = 0.0
    for a in range(-radius, radius + 1):
        r2 = a * a + b2
        if a == 0:
            r2 = r2.copy()
            r2[radius] = np.inf
        s = np.sin(a * x + b * y) * r2**-1.5
        vx += a * float(np.sum(s))
        vy += float(np.sum(s * b))
    scale = -0.5 * epsilon * omega_z * d
    return np.array([scale * vx, scale * vy])


@dataclass(frozen=True, eq=False)
class GroupVelocityField:
    grid: int
    radius: int
    k_axis: np.ndarray  # rad/m
    vx: np.ndarray  # m/s, indexed [i1, i2]
    vy: np.ndarray
    epsilon: float
    omega_z: float
    spacing: float

    @property
    def speed(self) -> np.ndarray:
        return np.hypot(self.vx, self.vy)

    @property
    def max_speed(self) -> float:
        return float(self.speed.max())

    @property
    def unit(self) -> float:
        """epsilon * omega_z * d, the natural velocity scale."""
        return self.epsilon * self.omega_z * self.spacing

    @property
    def normalized_max(self) -> float:
        return self.max_speed / self.unit


def velocity_field(epsilon: float, omega_z: float, d: float, grid: int = 201,
                   radius: int | None = None) -> GroupVelocityField:
    """Group velocity on the k-points of a periodic ``grid`` x ``grid`` lattice.

    By default the lattice sum is cut at ``(grid - 1) // 2``, the minimum-image
    range of that periodic lattice; the whole field then costs one FFT.
    """
    if int(grid) != grid or grid < 3:
        raise DomainError("grid must be an integer >= 3")
    if radius is None:
        radius = (grid - 1) // 2
    cx, cy = folded_coefficients(grid, radius, lambda A, B, r2: (A * r2**-1.5, B * r2**-1.5))
    scale = -0.5 * epsilon * omega_z * d
    vx = scale * evaluate_folded(cx).imag
    vy = scale * evaluate_folded(cy).imag
    return GroupVelocityField(int(grid), int(radius), zone_axis(grid) / d, vx, vy,
                              float(epsilon), float(omega_z), float(d))


def max_group_velocity(epsilon: float, omega_z: float, d: float, grid: int = 201,
                       radius: int | None = None) -> tuple[float, float]:
    """(max |v_g| in m/s, max |v_g| / (epsilon omega_z d)) over the k-grid."""
    f = velocity_field(epsilon, omega_z, d, grid, radius)
    return f.max_speed, f.normalized_max


@dataclass(frozen=True, eq=False)
class DisturbanceResponse:
    source: int
    z0: float
    v0: float
    times: np.ndarray
    displacements: np.ndarray  # (ions, times), m
    mode_positions: np.ndarray  # (modes, times)
    mode_velocities: np.ndarray
    frequencies: np.ndarray

    @property
    def envelope(self) -> np.ndarray:
        """max_t |z_i(t)| per ion."""
        return np.abs(self.displacements).max(axis=1)

    def mode_energy(self) -> np.ndarray:
        """sum_k (qdot_k^2 + omega_k^2 q_k^2) at each time (twice the energy per mass)."""
        w = self.frequencies[:, None]
        return np.sum(self.mode_velocities**2 + (w * self.mode_positions) ** 2, axis=0)


def evolve_disturbance(modes: ModeSpectrum, source: int, z0: float, v0: float,
                       times) -> DisturbanceResponse:
    """Exact harmonic evolution after displacing/kicking one ion at t = 0."""
    n = modes.size
    if not 0 <= source < n:
        raise DomainError(f"source ion {source} out of range")
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0):
        raise DomainError("times must be a 1-D array of non-negative values")
    b = modes.modes
    w = modes.frequencies
    q0 = b[source] * z0
    p0 = b[source] * v0
    wt = np.outer(w, times)
    c, s = np.cos(wt), np.sin(wt)
    q = q0[:, None] * c + (p0 / w)[:, None] * s
    qdot = -(q0 * w)[:, None] * s + p0[:, None] * c
    return DisturbanceResponse(int(source), float(z0), float(v0), times, b @ q, q, qdot, w)


def radial_distances(geometry: LatticeGeometry, source: int) -> np.ndarray:
    """Distance of every ion from ``source`` in lattice units."""
    delta = geometry.positions - geometry.positions[source]
    return np.hypot(delta[:, 0], delta[:, 1]) / geometry.spacing


def radial_exponent(response: DisturbanceResponse, geometry: LatticeGeometry,
                    rmin: float, rmax: float) -> float:
    """Least-squares slope of log(envelope) against log(r) for rmin <= r <= rmax."""
    r = radial_distances(geometry, response.source)
    sel = (r >= rmin) & (r <= rmax)
    if sel.sum() < 2:
        raise DomainError("fewer than two ions in the fit range")
    return float(np.polyfit(np.log(r[sel]), np.log(response.envelope[sel]), 1)[0])


def light_cone_radius(speed_normalized: float, epsilon: float, omega_z: float, t: float) -> float:
    """Distance (lattice units) covered at ``speed_normalized * epsilon * omega_z * d`` in time t."""
    return speed_normalized * epsilon * omega_z * t


def exterior_response(response: DisturbanceResponse, geometry: LatticeGeometry,
                      radius: float) -> float:
    """sum over ions beyond ``radius`` of (envelope / source envelope)^2."""
    r = radial_distances(geometry, response.source)
    env = response.envelope
    return float(np.sum((env[r > radius] / env[response.source]) ** 2))
