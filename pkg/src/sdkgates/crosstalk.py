"""Crosstalk between simultaneously driven gates and the block schedule.

When several nearest-neighbour gates run at once, every pair of driven
ions (i, k) taken from two different gates picks up an unwanted rotation
Theta_ik.  Its infidelity contribution is Theta_ik^2.  Each of the four
inter-gate pairs is shared equally between the two gates involved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .lattice import LatticeGeometry, ModeSpectrum, lattice_sum
from .pulses import PulseSequence, TARGET_ANGLE, mode_weights, rotation_angle

HORIZONTAL, VERTICAL = 0, 1


@dataclass(frozen=True)
class CrosstalkEntry:
    pair: tuple[int, int]
    separation: float  # units of the lattice spacing
    theta: float
    infidelity: float


def crosstalk_angle(geometry: LatticeGeometry, modes: ModeSpectrum, seq: PulseSequence,
                    pair: tuple[int, int], weights=None) -> CrosstalkEntry:
    i, j = pair
    theta = rotation_angle(modes, seq, i, j, weights)
    r = float(np.linalg.norm(geometry.positions[i] - geometry.positions[j])) / geometry.spacing
    return CrosstalkEntry((int(i), int(j)), r, theta, theta * theta)


def crosstalk_map(geometry: LatticeGeometry, modes: ModeSpectrum, seq: PulseSequence,
                  source: int) -> list[CrosstalkEntry]:
    """Crosstalk of ``source`` with every other ion, sorted by (separation, index)."""
    w = mode_weights(modes, seq)
    entries = [crosstalk_angle(geometry, modes, seq, (source, k), w)
               for k in range(modes.size) if k != source]
    return sorted(entries, key=lambda e: (round(e.separation, 9), e.pair[1]))


def power_law_slope(entries, rmin: float, rmax: float) -> float:
    """Least-squares slope of log|Theta| against log r for rmin <= r <= rmax."""
    pts = [(e.separation, abs(e.theta)) for e in entries if rmin <= e.separation <= rmax]
    if len(pts) < 2:
        raise DomainError("fewer than two crosstalk entries in the fit range")
    r, th = np.array(pts).T
    return float(np.polyfit(np.log(r), np.log(th), 1)[0])


@dataclass(frozen=True)
class BlockSchedule:
    """Nearest-neighbour gates partitioned into groups that run in parallel.

    ``groups[g]`` lists the edges (i, j) with i < j executed together;
    ``labels[g]`` is ``(orientation, row offset, col offset)``.
    """

    n: int
    shape: tuple[int, int]
    groups: tuple[tuple[tuple[int, int], ...], ...]
    labels: tuple[tuple[int, int, int], ...]

    @property
    def serial_depth(self) -> int:
        return len(self.groups)

    def to_dict(self) -> dict:
        return {
            "block_size": self.n,
            "shape": list(self.shape),
            "serial_depth": self.serial_depth,
            "groups": [
                {"orientation": "horizontal" if lab[0] == HORIZONTAL else "vertical",
                 "offset": [lab[1], lab[2]],
                 "gates": [list(e) for e in grp]}
                for lab, grp in zip(self.labels, self.groups)
            ],
        }


def _periods(n, orientation):
    # translation period (rows, cols); along an edge it must exceed 1 so that
    # consecutive edges of a line never share an ion
    along = max(n, 2)
    return (n, along) if orientation == HORIZONTAL else (along, n)


def build_block_schedule(rows: int, cols: int, n: int) -> BlockSchedule:
    """Group nearest-neighbour edges of a rows x cols lattice into parallel sets.

    The lattice is tiled by (n+1) x (n+1) blocks sharing their boundary
    rows and columns.  Edges that are translates of each other by
    multiples of n (in lattice units) form one group.  For n = 1 the
    translation along an edge is 2 so that no ion appears twice.
    """
    if int(n) != n or n < 1:
        raise DomainError("block size n must be a positive integer")
    if rows < n + 1 or cols < n + 1:
        raise DomainError(f"a {rows}x{cols} lattice is smaller than one {n + 1}x{n + 1} block")
    classes: dict[tuple[int, int, int], list[tuple[int, int]]] = {}
    for orientation, (dr, dc) in ((HORIZONTAL, (0, 1)), (VERTICAL, (1, 0))):
        pr, pc = _periods(n, orientation)
        for r in range(rows - dr):
            for c in range(cols - dc):
                key = (orientation, r % pr, c % pc)
                classes.setdefault(key, []).append((r * cols + c, (r + dr) * cols + c + dc))
    labels = tuple(sorted(classes))
    groups = tuple(tuple(sorted(classes[k])) for k in labels)
    return BlockSchedule(int(n), (int(rows), int(cols)), groups, labels)


def analytic_crosstalk_per_gate(n: int, radius: int = 100) -> float:
    """(pi/4)^2 * 4 * (1/2) * S_3 / n^6, S_3 the p = 3 square-lattice sum."""
    return TARGET_ANGLE**2 * 4 * 0.5 * lattice_sum(3, radius) / n**6


@dataclass(frozen=True)
class ParallelCrosstalk:
    n: int
    numeric: float
    analytic: float
    gates_averaged: int
    per_gate: tuple[float, ...]

    @property
    def ratio(self) -> float:
        return self.numeric / self.analytic


def parallel_crosstalk_per_gate(n: int, geometry: LatticeGeometry, modes: ModeSpectrum,
                                seq: PulseSequence, include_boundary: bool = False,
                                radius: int = 100) -> ParallelCrosstalk:
    """Average crosstalk infidelity per gate when every schedule group runs in parallel.

    For each gate g the attributed error is half the sum of Theta^2 over
    the four ion pairs it forms with every other gate of its group.  By
    default only gates in blocks surrounded on all sides by other blocks
    are averaged.
    """
    if geometry.shape is None:
        raise DomainError("parallel crosstalk needs a square lattice")
    rows, cols = geometry.shape
    if n < 2:
        raise DomainError("block size must be at least 2")
    if rows < 3 * n + 1 or cols < 3 * n + 1:
        raise DomainError(f"a {rows}x{cols} lattice cannot host 3x3 blocks of size {n}")
    schedule = build_block_schedule(rows, cols, n)
    w = mode_weights(modes, seq)
    b = modes.modes
    nb_r, nb_c = (rows - 1) // n, (cols - 1) // n  # complete blocks per axis

    per_gate = []
    for grp in schedule.groups:
        ions = sorted({i for e in grp for i in e})
        pos = {ion: k for k, ion in enumerate(ions)}
        sub = b[ions]
        theta = (sub * w) @ sub.T
        theta = 0.5 * (theta + theta.T)
        for g, (i, j) in enumerate(grp):
            br, bc = (i // cols) // n, (i % cols) // n
            interior = 1 <= br < nb_r - 1 and 1 <= bc < nb_c - 1
            if not (interior or include_boundary):
                continue
            total = 0.0
            for h, (k, l) in enumerate(grp):
                if h == g:
                    continue
                pi, pj, pk, pl = pos[i], pos[j], pos[k], pos[l]
                total += 0.5 * (theta[pi, pk] ** 2 + theta[pi, pl] ** 2
                                + theta[pj, pk] ** 2 + theta[pj, pl] ** 2)
            per_gate.append(total)
    if not per_gate:
        raise DomainError("no gates selected for averaging")
    return ParallelCrosstalk(int(n), float(np.mean(per_gate)), analytic_crosstalk_per_gate(n, radius),
                             len(per_gate), tuple(per_gate))


def lattice_size_for_blocks(n: int, blocks: int = 3) -> int:
    """Side length of the smallest square lattice holding ``blocks`` x ``blocks`` blocks."""
    return blocks * n + 1


def threshold_block_size(limit: float = 1e-3, radius: int = 100) -> int:
    """Smallest n whose analytic per-gate crosstalk is below ``limit``."""
    if not limit > 0:
        raise DomainError("limit must be positive")
    n = 2
    while analytic_crosstalk_per_gate(n, radius) >= limit:
        n += 1
    return n
