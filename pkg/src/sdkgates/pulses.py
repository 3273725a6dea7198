"""Spin-dependent-kick sequences acting on the transverse phonon modes.

A kick at time t_l with sign s_l on ion j displaces mode k (in its
interaction picture) by ``i eta_k b_j^k s_l exp(i omega_k t_l)``.  After
the sequence each driven ion leaves a residual displacement

    alpha_j^k = i eta_k b_j^k sum_l s_l exp(i omega_k t_l)

and each pair of driven ions acquires a sigma_z sigma_z rotation angle

    Theta_ij = -2 sum_k eta_k^2 b_i^k b_j^k sum_{l>m} s_l s_m sin(omega_k (t_l - t_m)).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .constants import HBAR, KB
from .errors import DomainError
from .lattice import ModeSpectrum

FIDELITY_SCHEMA = "sdkgates.fidelity/1"
TARGET_ANGLE = math.pi / 4


@dataclass(frozen=True, eq=False)
class PulseSequence:
    times: np.ndarray  # s
    signs: np.ndarray  # +1 / -1
    delta_k: float
    pattern: str

    @property
    def length(self) -> int:
        return len(self.times)

    @property
    def duration(self) -> float:
        """Time from the first kick to one repetition period after the last."""
        if self.length < 2:
            return 0.0 if self.length == 0 else float("nan")
        return float(self.times[-1] + (self.times[1] - self.times[0]) - self.times[0])


def build_pulse_sequence(pattern, repetition_rate: float, delta_k: float) -> PulseSequence:
    """Concatenate signed arms of kicks at uniform spacing 2 pi / repetition_rate.

    ``pattern`` is a sequence of non-zero integers; ``(147, -147)`` is
    147 kicks with sign +1 followed by 147 with sign -1.
    """
    arms = [int(a) for a in pattern]
    if not arms:
        raise DomainError("pulse pattern is empty")
    if any(a == 0 for a in arms):
        raise DomainError("every arm of a pulse pattern needs at least one kick")
    if not repetition_rate > 0:
        raise DomainError("repetition rate must be positive")
    signs = np.concatenate([np.full(abs(a), 1.0 if a > 0 else -1.0) for a in arms])
    times = np.arange(len(signs)) * (2 * math.pi / repetition_rate)
    desc = "(" + ",".join(f"{a:+d}" for a in arms) + ")"
    signs.setflags(write=False)
    times.setflags(write=False)
    return PulseSequence(times, signs, float(delta_k), desc)


def custom_sequence(times, signs, delta_k: float, pattern: str = "custom") -> PulseSequence:
    """Sequence with explicit kick times (no uniform-spacing requirement)."""
    times = np.array(times, dtype=float)
    signs = np.array(signs, dtype=float)
    if times.shape != signs.shape or times.ndim != 1:
        raise DomainError("times and signs must be 1-D arrays of equal length")
    if np.any(np.diff(times) <= 0):
        raise DomainError("kick times must be strictly increasing")
    if not np.all(np.abs(signs) == 1):
        raise DomainError("kick signs must be +1 or -1")
    times.setflags(write=False)
    signs.setflags(write=False)
    return PulseSequence(times, signs, float(delta_k), pattern)


_TERM = re.compile(r"^([+-]?)(\d*)(M?)$")


def expand_pattern(text: str, M: int) -> list[int]:
    """Parse a pattern such as ``"+M,-M"``, ``"+M,-2M,+M"`` or ``"3,-3"``."""
    arms = []
    for term in text.replace(" ", "").strip("()").split(","):
        match = _TERM.match(term)
        if not term or not match or not (match.group(2) or match.group(3)):
            raise DomainError(f"cannot parse pattern term {term!r}")
        sign, mult, has_m = match.groups()
        n = int(mult) if mult else 1
        if has_m:
            n *= M
        arms.append(-n if sign == "-" else n)
    return arms


def lamb_dicke(delta_k: float, mass: float, omega) -> np.ndarray:
    """eta = delta_k sqrt(hbar / (2 m omega))."""
    return delta_k * np.sqrt(HBAR / (2 * mass * np.asarray(omega, dtype=float)))


def kick_phase_sum(omega, seq: PulseSequence) -> np.ndarray:
    """sum_l s_l exp(i omega t_l) for each frequency in ``omega``."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    return np.exp(1j * np.outer(omega, seq.times)) @ seq.signs


def loop_area_sum(omega, seq: PulseSequence) -> np.ndarray:
    """sum_{l>m} s_l s_m sin(omega (t_l - t_m)) for each frequency."""
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    # phases relative to the first kick keep the sum invariant under time shifts
    t = seq.times - seq.times[0] if seq.length else seq.times
    z = seq.signs * np.exp(1j * np.outer(omega, t))
    if seq.length < 2:
        return np.zeros(len(omega))
    partial = np.cumsum(z, axis=1)[:, :-1]
    return np.sum((z[:, 1:] * np.conj(partial)).imag, axis=1)


def mode_displacement(omega_k: float, b_jk: float, seq: PulseSequence, mass: float) -> complex:
    """Residual displacement alpha_j^k of one mode driven through one ion."""
    if not omega_k > 0:
        raise DomainError("mode frequency must be positive")
    eta = float(lamb_dicke(seq.delta_k, mass, omega_k))
    return complex(1j * eta * b_jk * kick_phase_sum(omega_k, seq)[0])


def displacements(modes: ModeSpectrum, seq: PulseSequence, ion: int) -> np.ndarray:
    """alpha_ion^k for every mode k."""
    eta = lamb_dicke(seq.delta_k, modes.mass, modes.frequencies)
    return 1j * eta * modes.modes[ion] * kick_phase_sum(modes.frequencies, seq)


def _check_pair(modes, i, j):
    n = modes.size
    if not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"ion pair ({i}, {j}) out of range for {n} ions")
    if i == j:
        raise DomainError("rotation angle needs two distinct ions")


def mode_weights(modes: ModeSpectrum, seq: PulseSequence) -> np.ndarray:
    """-2 eta_k^2 times the loop-area sum, per mode; Theta_ij = sum_k w_k b_i^k b_j^k."""
    eta2 = lamb_dicke(seq.delta_k, modes.mass, modes.frequencies) ** 2
    return -2.0 * eta2 * loop_area_sum(modes.frequencies, seq)


def rotation_angle(modes: ModeSpectrum, seq: PulseSequence, i: int, j: int,
                   weights: np.ndarray | None = None) -> float:
    """Two-qubit rotation angle Theta_ij produced by driving ions i and j."""
    _check_pair(modes, i, j)
    if weights is None:
        weights = mode_weights(modes, seq)
    b = modes.modes
    return float(np.sum((b[i] * b[j]) * weights))


def rotation_matrix(modes: ModeSpectrum, seq: PulseSequence) -> np.ndarray:
    """Theta_ij for all pairs (diagonal entries are not physical)."""
    b = modes.modes
    theta = (b * mode_weights(modes, seq)) @ b.T
    return 0.5 * (theta + theta.T)


def thermal_factor(omega, temperature: float) -> np.ndarray:
    """coth(hbar omega / 2 k_B T); equal to 1 at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if temperature < 0:
        raise DomainError("temperature must be non-negative")
    if temperature == 0:
        return np.ones_like(omega)
    x = HBAR * omega / (2 * KB * temperature)
    if np.any(x < 1e-8):
        raise DomainError("temperature too high: hbar omega / 2 k_B T < 1e-8")
    with np.errstate(over="ignore"):
        return 1.0 + 2.0 / np.expm1(2.0 * x)


@dataclass(frozen=True, eq=False)
class FidelityReport:
    pair: tuple[int, int]
    theta: float
    alphas_i: np.ndarray
    alphas_j: np.ndarray
    worst_case_infidelity: float
    average_infidelity: float
    temperature: float
    per_mode: np.ndarray  # thermal-weighted |alpha|^2 per mode

    @property
    def rotation_error(self) -> float:
        return (self.theta - TARGET_ANGLE) ** 2

    @property
    def displacement_error(self) -> float:
        return float(np.sum(self.per_mode))

    def to_dict(self, frequencies=None) -> dict:
        modes = []
        for k, contrib in enumerate(self.per_mode):
            row = {
                "mode": k,
                "alpha_i": [float(self.alphas_i[k].real), float(self.alphas_i[k].imag)],
                "alpha_j": [float(self.alphas_j[k].real), float(self.alphas_j[k].imag)],
                "contribution": float(contrib),
            }
            if frequencies is not None:
                row["frequency_hz"] = float(frequencies[k]) / (2 * math.pi)
            modes.append(row)
        return {
            "schema_version": FIDELITY_SCHEMA,
            "pair": list(self.pair),
            "theta_rad": self.theta,
            "rotation_error": self.rotation_error,
            "displacement_error": self.displacement_error,
            "worst_case_infidelity": self.worst_case_infidelity,
            "average_infidelity": self.average_infidelity,
            "temperature_k": self.temperature,
            "modes": modes,
        }


def gate_infidelity(modes: ModeSpectrum, seq: PulseSequence, i: int, j: int,
                    temperature: float) -> FidelityReport:
    """Worst-case (|+>|+> input) and state-averaged infidelity of the pi/4 ZZ gate."""
    _check_pair(modes, i, j)
    theta = rotation_angle(modes, seq, i, j)
    ai = displacements(modes, seq, i)
    aj = displacements(modes, seq, j)
    per_mode = (np.abs(ai) ** 2 + np.abs(aj) ** 2) * thermal_factor(modes.frequencies, temperature)
    dF = (theta - TARGET_ANGLE) ** 2 + float(np.sum(per_mode))
    return FidelityReport((int(i), int(j)), theta, ai, aj, dF, 0.8 * dF, float(temperature), per_mode)


@dataclass(frozen=True)
class TrajectorySample:
    time: float
    displacements: tuple[float, ...]  # delta_k * z per tracked ion
    quadratures: tuple[tuple[float, float], ...]  # (X, P) per tracked mode


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Mean-field motion under a kick sequence, sampled uniformly in time.

    ``displacements[t, n]`` is delta_k * z of ``ions[n]``; ``quadratures[t, q]``
    is the interaction-picture coherent amplitude of ``tracked_modes[q]``,
    which ends at the residual displacement of that mode.
    """

    times: np.ndarray
    ions: tuple[int, ...]
    displacements: np.ndarray
    tracked_modes: tuple[int, ...]
    quadratures: np.ndarray

    @property
    def samples(self) -> list[TrajectorySample]:
        return [
            TrajectorySample(
                float(t),
                tuple(float(x) for x in self.displacements[n]),
                tuple((float(q.real), float(q.imag)) for q in self.quadratures[n]),
            )
            for n, t in enumerate(self.times)
        ]


def trajectory(modes: ModeSpectrum, seq: PulseSequence, ions, samples_per_kick: int = 8,
               driven=None, tracked_modes=None) -> Trajectory:
    """Sample the mean-field trajectory of ``ions`` while ``driven`` ions are kicked.

    All driven ions feel the kick signs of the sequence (both qubits in |0>).
    ``driven`` defaults to ``ions``; ``tracked_modes`` defaults to every
    mode for crystals of up to four ions and to none otherwise.
    """
    if samples_per_kick < 1:
        raise DomainError("samples_per_kick must be >= 1")
    ions = tuple(int(i) for i in ions)
    driven = ions if driven is None else tuple(int(i) for i in driven)
    if tracked_modes is None:
        tracked_modes = tuple(range(modes.size)) if modes.size <= 4 else ()
    tracked_modes = tuple(int(k) for k in tracked_modes)

    b = modes.modes
    w = modes.frequencies
    eta = lamb_dicke(seq.delta_k, modes.mass, w)
    proj = b[list(driven)].sum(axis=0) if driven else np.zeros(modes.size)

    spacing = seq.times[1] - seq.times[0] if seq.length > 1 else 1.0
    if seq.length == 0:
        times = np.zeros(1)
    else:
        n_samples = seq.length * samples_per_kick + 1
        times = seq.times[0] + np.arange(n_samples) * (spacing / samples_per_kick)

    # interaction-picture amplitude after the kicks applied at or before each sample
    steps = eta * proj
    kicks = 1j * steps[:, None] * seq.signs[None, :] * np.exp(1j * np.outer(w, seq.times))
    cumulative = np.concatenate([np.zeros((modes.size, 1), complex), np.cumsum(kicks, axis=1)], axis=1)
    # a sample that coincides with a kick (up to rounding) sees it applied
    slack = 1e-9 * spacing
    applied = np.searchsorted(seq.times, times + slack, side="right")
    amp = cumulative[:, applied]  # (modes, samples)
    lab = amp * np.exp(-1j * np.outer(w, times))
    # delta_k z_i = sum_k 2 eta_k b_i^k Re(lab amplitude)
    disp = (b[list(ions)] * (2 * eta)) @ lab.real if ions else np.zeros((0, len(times)))
    quad = amp[list(tracked_modes)] if tracked_modes else np.zeros((0, len(times)), complex)
    return Trajectory(times, ions, disp.T.copy(), tracked_modes, quad.T.copy())
