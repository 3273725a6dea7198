"""Ion geometries, transverse potential matrix, normal modes and dispersion.

Only the motion perpendicular to the ion plane (z) is modelled.  Every ion
sits in an identical harmonic well of angular frequency ``omega_z``; the
Coulomb interaction couples the wells through the potential matrix

    V_ij = k_e / r_ij^3                   (i != j)
    V_ii = m omega_z^2 - sum_k k_e / r_ik^3

with k_e = e^2 / (4 pi eps0).  The rows of ``V`` sum to ``m omega_z^2``,
so the uniform displacement is always a mode at exactly ``omega_z``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import COULOMB
from .errors import DivergenceError, DomainError, InstabilityError

MODES_SCHEMA = "sdkgates.modes/1"


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LatticeGeometry:
    """Equilibrium positions of a planar crystal.

    ``positions`` has shape (N, 2) in metres.  ``shape`` is ``(rows, cols)``
    for square lattices built by :func:`build_square_lattice` and ``None``
    for arbitrary geometries.
    """

    positions: np.ndarray
    spacing: float
    shape: tuple[int, int] | None = None

    def __post_init__(self):
        pos = _readonly(self.positions)
        if pos.ndim != 2 or pos.shape[1] != 2 or len(pos) == 0:
            raise DomainError("positions must be a non-empty (N, 2) array")
        object.__setattr__(self, "positions", pos)
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")

    @classmethod
    def from_positions(cls, positions) -> "LatticeGeometry":
        """Arbitrary geometry; spacing is the minimum pairwise distance."""
        pos = np.asarray(positions, dtype=float)
        if len(pos) < 2:
            return cls(pos, 1.0)
        r = pairwise_distances(pos)
        np.fill_diagonal(r, np.inf)
        dmin = float(r.min())
        if not dmin > 0:
            raise DomainError("coincident ions in geometry")
        return cls(pos, dmin)

    @property
    def ion_count(self) -> int:
        return len(self.positions)

    def index(self, row: int, col: int) -> int:
        """Row-major ion index of lattice site (row, col)."""
        if self.shape is None:
            raise DomainError("geometry has no lattice shape")
        rows, cols = self.shape
        if not (0 <= row < rows and 0 <= col < cols):
            raise DomainError(f"site ({row}, {col}) outside {rows}x{cols} lattice")
        return row * cols + col

    def site(self, index: int) -> tuple[int, int]:
        if self.shape is None:
            raise DomainError("geometry has no lattice shape")
        return divmod(index, self.shape[1])

    def central_pair(self) -> tuple[int, int]:
        """A nearest-neighbour pair at the centre of a square lattice.

        For a 1x2 crystal this is ``(0, 1)``; for a 10x10 lattice it is the
        horizontal bond (4, 4)-(4, 5).
        """
        if self.shape is None:
            raise DomainError("geometry has no lattice shape")
        rows, cols = self.shape
        if cols >= 2:
            r, c = (rows - 1) // 2, (cols - 1) // 2
            return self.index(r, c), self.index(r, c + 1)
        if rows >= 2:
            r = (rows - 1) // 2
            return self.index(r, 0), self.index(r + 1, 0)
        raise DomainError("a single ion has no pair")

    def central_ion(self) -> int:
        if self.shape is None:
            raise DomainError("geometry has no lattice shape")
        rows, cols = self.shape
        return self.index(rows // 2, cols // 2)


def pairwise_distances(positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def build_square_lattice(rows: int, cols: int, d: float) -> LatticeGeometry:
    """Square lattice of ``rows`` x ``cols`` ions; site (a, b) sits at (a d, b d)."""
    if int(rows) != rows or int(cols) != cols or rows < 1 or cols < 1:
        raise DomainError(f"lattice dimensions must be positive integers, got {rows}x{cols}")
    if not d > 0:
        raise DomainError(f"spacing must be positive, got {d!r}")
    a, b = np.meshgrid(np.arange(rows), np.arange(cols), indexing="ij")
    pos = np.column_stack([a.ravel(), b.ravel()]) * float(d)
    return LatticeGeometry(pos, float(d), (int(rows), int(cols)))


@dataclass(frozen=True, eq=False)
class PotentialMatrix:
    entries: np.ndarray  # J/m^2
    mass: float
    trap_frequency: float
    spacing: float

    @property
    def size(self) -> int:
        return len(self.entries)


def potential_matrix(geometry: LatticeGeometry, mass: float, omega_z: float,
                     active=None) -> PotentialMatrix:
    """Transverse potential matrix of ``geometry``.

    ``active`` optionally restricts the Coulomb coupling to pairs in which
    both ions are flagged; all other pairs are treated as uncoupled.  This
    is used to embed an isolated sub-crystal in a larger geometry.
    """
    if not omega_z > 0:
        raise DomainError(f"omega_z must be positive, got {omega_z!r}")
    if not mass > 0:
        raise DomainError(f"mass must be positive, got {mass!r}")
    n = geometry.ion_count
    r = pairwise_distances(geometry.positions)
    np.fill_diagonal(r, np.inf)
    if n > 1 and not r.min() > 0:
        raise DomainError("coincident ions in geometry")
    coupling = COULOMB / r**3
    if active is not None:
        mask = np.asarray(active, dtype=bool)
        if mask.shape != (n,):
            raise DomainError("active mask must have one entry per ion")
        coupling = np.where(mask[:, None] & mask[None, :], coupling, 0.0)
    V = coupling.copy()
    np.fill_diagonal(V, mass * omega_z**2 - coupling.sum(axis=1))
    V.setflags(write=False)
    return PotentialMatrix(V, float(mass), float(omega_z), float(geometry.spacing))


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Transverse normal modes, ascending in frequency.

    Column ``k`` of ``modes`` is the (orthonormal) participation vector of
    mode ``k``; ``frequencies[k]`` is its angular frequency.
    """

    frequencies: np.ndarray
    modes: np.ndarray
    epsilon: float
    trap_frequency: float
    mass: float

    @property
    def size(self) -> int:
        return len(self.frequencies)

    def to_dict(self) -> dict:
        return {
            "schema_version": MODES_SCHEMA,
            "frequencies_hz": [float(w) / (2 * math.pi) for w in self.frequencies],
            "mode_matrix": [[float(x) for x in row] for row in self.modes],
            "epsilon": float(self.epsilon),
            "trap_frequency_hz": float(self.trap_frequency) / (2 * math.pi),
            "mass_kg": float(self.mass),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "ModeSpectrum":
        if data.get("schema_version") != MODES_SCHEMA:
            raise DomainError(f"unsupported mode-spectrum schema {data.get('schema_version')!r}")
        return cls(
            _readonly(np.asarray(data["frequencies_hz"]) * 2 * math.pi),
            _readonly(data["mode_matrix"]),
            float(data["epsilon"]),
            float(data["trap_frequency_hz"]) * 2 * math.pi,
            float(data["mass_kg"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModeSpectrum":
        return cls.from_dict(json.loads(text))


def _fix_signs(vecs):
    """Make the largest-magnitude entry of each column positive (lowest index on ties)."""
    mag = np.abs(vecs)
    lead = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-9), axis=0)
    signs = np.where(vecs[lead, np.arange(vecs.shape[1])] < 0, -1.0, 1.0)
    return vecs * signs


def _order_degenerate(evals, vecs, rtol=1e-11):
    scale = max(float(np.abs(evals).max()), np.finfo(float).tiny)
    order = list(range(len(evals)))
    start = 0
    for k in range(1, len(evals) + 1):
        if k == len(evals) or evals[k] - evals[k - 1] > rtol * scale:
            if k - start > 1:
                block = sorted(range(start, k), key=lambda c: tuple(vecs[:, c]))
                order[start:k] = block
            start = k
    return evals[order], vecs[:, order]


def normal_modes(V: PotentialMatrix) -> ModeSpectrum:
    """Diagonalise ``V / m`` and return the mode spectrum.

    Raises :class:`InstabilityError` if any squared frequency is not
    positive (the crystal is unstable along z).
    """
    K = np.asarray(V.entries) / V.mass
    if not np.array_equal(K, K.T):
        raise DomainError("potential matrix is not symmetric")
    evals, vecs = np.linalg.eigh(K)
    if evals[0] <= 0:
        raise InstabilityError(
            f"non-positive squared mode frequency {evals[0]:.6e} rad^2/s^2", eigenvalue=float(evals[0]))
    vecs = _fix_signs(vecs)
    evals, vecs = _order_degenerate(evals, vecs)
    eps = COULOMB / (V.mass * V.trap_frequency**2 * V.spacing**3)
    return ModeSpectrum(_readonly(np.sqrt(evals)), _readonly(vecs), eps, V.trap_frequency, V.mass)


def crystal_modes(geometry: LatticeGeometry, mass: float, omega_z: float, active=None) -> ModeSpectrum:
    """Shortcut for ``normal_modes(potential_matrix(...))``."""
    return normal_modes(potential_matrix(geometry, mass, omega_z, active))


# --- infinite square lattice -------------------------------------------------

def lattice_sum(p: float, radius: int) -> float:
    """Sum of (a^2 + b^2)^(-p) over integer pairs except the origin.

    The square |a|, |b| <= radius is summed exactly; the region outside is
    replaced by the continuum integral of r^(-2p) outside the square of
    half-side radius + 1/2.
    """
    if not p > 1:
        raise DivergenceError(f"lattice sum diverges for p <= 1 (got p={p})")
    if int(radius) != radius or radius < 1:
        raise DomainError(f"radius must be a positive integer, got {radius!r}")
    radius = int(radius)
    b = np.arange(-radius, radius + 1, dtype=float)
    b2 = b * b
    # a = 0 row excludes b = 0
    total = 2.0 * float(np.sum(np.arange(1, radius + 1, dtype=float) ** (-2 * p)))
    for a in range(1, radius + 1):
        total += 2.0 * float(np.sum((a * a + b2) ** (-p)))
    return total + _square_tail(p, radius + 0.5)


def _square_tail(p, half_side):
    # 8 * L^(2-2p) / (2p-2) * int_0^(pi/4) cos(t)^(2p-2) dt
    x, w = np.polynomial.legendre.leggauss(32)
    t = (x + 1) * math.pi / 8
    angular = float(np.sum(w * np.cos(t) ** (2 * p - 2))) * math.pi / 8
    return 8 * half_side ** (2 - 2 * p) / (2 * p - 2) * angular


@lru_cache(maxsize=None)
def zeta(radius: int = 1000) -> float:
    """The constant sum over (a^2+b^2)^(-3/2); sets the width of the phonon band."""
    return lattice_sum(1.5, radius)


@dataclass(frozen=True)
class DispersionPoint:
    k1: float
    k2: float
    omega: float
    omega_first_order: float


def _check_zone(k1, k2, d):
    lim = math.pi / d
    for k in (k1, k2):
        if not (-lim < k <= lim * (1 + 1e-15)):
            raise DomainError(f"wave vector component {k!r} outside (-pi/d, pi/d]")


def cosine_sum(x: float, y: float, radius: int) -> float:
    """Sum' (1 - cos(a x + b y)) / (a^2 + b^2)^(3/2) over |a|, |b| <= radius."""
    b = np.arange(-radius, radius + 1, dtype=float)
    b2 = b * b
    total = 0.0
    for a in range(-radius, radius + 1):
        r2 = a * a + b2
        if a == 0:
            r2 = r2.copy()
            r2[radius] = np.inf
        total += float(np.sum((1.0 - np.cos(a * x + b * y)) * r2**-1.5))
    return total


def dispersion(k1: float, k2: float, omega_z: float, epsilon: float, d: float,
               radius: int = 400) -> DispersionPoint:
    """Mode frequency of the infinite square lattice at wave vector (k1, k2).

    Returns both the square-root form and its first-order expansion in
    ``epsilon``.  The lattice sum is truncated at ``radius`` without a tail
    correction so that omega(0, 0) = omega_z exactly.
    """
    if not epsilon >= 0:
        raise DomainError("epsilon must be non-negative")
    _check_zone(k1, k2, d)
    s = cosine_sum(k1 * d, k2 * d, radius)
    radicand = 1.0 - epsilon * s
    if radicand <= 0:
        raise InstabilityError(f"dispersion radicand {radicand:.3e} <= 0", eigenvalue=radicand)
    return DispersionPoint(k1, k2, omega_z * math.sqrt(radicand), omega_z * (1.0 - 0.5 * epsilon * s))


def zone_axis(grid: int) -> np.ndarray:
    """Dimensionless wave numbers k d = 2 pi j / grid covering (-pi, pi]."""
    if int(grid) != grid or grid < 1:
        raise DomainError("grid must be a positive integer")
    j = np.arange(-((grid - 1) // 2), grid // 2 + 1)
    return 2 * math.pi * j / grid


def folded_coefficients(grid: int, radius: int, weight):
    """Fold ``weight(a, b)`` over |a|, |b| <= radius onto a grid x grid torus.

    Evaluating a lattice Fourier series on the periodic k-grid of
    :func:`zone_axis` then reduces to one 2-D FFT.  ``weight`` receives the
    integer offset arrays (origin excluded by the caller via ``r2``).
    """
    a = np.arange(-radius, radius + 1)
    A, B = np.meshgrid(a, a, indexing="ij")
    r2 = (A * A + B * B).astype(float)
    r2[radius, radius] = np.inf
    out = []
    for w in weight(A.astype(float), B.astype(float), r2):
        c = np.zeros((grid, grid))
        np.add.at(c, (A % grid, B % grid), w)
        out.append(c)
    return out


def evaluate_folded(c: np.ndarray) -> np.ndarray:
    """sum_ab c_ab exp(i (a x_j + b y_l)) on the :func:`zone_axis` grid."""
    grid = c.shape[0]
    f = np.fft.ifft2(c) * (grid * grid)
    j = np.arange(-((grid - 1) // 2), grid // 2 + 1) % grid
    return f[np.ix_(j, j)]


def dispersion_grid(omega_z: float, epsilon: float, grid: int = 101, radius: int | None = None):
    """Dispersion on the periodic ``grid`` x ``grid`` k-mesh.

    Returns ``(kd, omega, omega_first_order)`` where ``kd`` is the 1-D axis
    of k d values and the frequency arrays are indexed ``[i1, i2]``.
    """
    if radius is None:
        radius = max((grid - 1) // 2, 1)
    (c,) = folded_coefficients(grid, radius, lambda A, B, r2: (r2**-1.5,))
    total = float(c.sum())
    s = total - evaluate_folded(c).real
    radicand = 1.0 - epsilon * s
    if radicand.min() <= 0:
        raise InstabilityError("dispersion radicand <= 0 on grid", eigenvalue=float(radicand.min()))
    return zone_axis(grid), omega_z * np.sqrt(radicand), omega_z * (1.0 - 0.5 * epsilon * s)
