"""Spin-wave dispersion of a nearest-neighbour Heisenberg ferromagnet.

The linear spin-wave result is checked against brute-force diagonalization of
the spin Hamiltonian

    H = -g mu_B B_z sum_i S_i^z - 2 J sum_<ij> S_i . S_j

restricted to the sector with a single spin deviation, where linear spin-wave
theory is exact for a ferromagnet.
"""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .errors import ResourceLimitError
from .units import H, MU_B

ALLOWED_SPINS = (0.5, 1.0, 1.5, 2.0)
MAX_HILBERT_DIM = 2**20


@dataclass(frozen=True)
class SpinLattice:
    """Simple (hyper)cubic lattice with nearest-neighbour exchange.

    ``J`` is in joules (positive for a ferromagnet), ``B_z`` in tesla and
    ``a0`` in metres. ``periodic`` may be a single bool or one per axis.
    """

    extent: tuple
    J: float
    s: float = 0.5
    a0: float = 1.0
    g_factor: float = 2.0
    B_z: float = 0.0
    periodic: tuple = field(default=True)

    def __post_init__(self):
        extent = tuple(int(n) for n in np.atleast_1d(self.extent))
        if not 1 <= len(extent) <= 3:
            raise ValueError("dimensionality must be 1, 2 or 3")
        if any(n < 1 for n in extent):
            raise ValueError("extent must be positive on every axis")
        periodic = self.periodic
        if isinstance(periodic, (bool, np.bool_)):
            periodic = (bool(periodic),) * len(extent)
        periodic = tuple(bool(p) for p in periodic)
        if len(periodic) != len(extent):
            raise ValueError("one periodic flag per axis required")
        if not (math.isfinite(self.J) and self.J > 0):
            raise ValueError("only ferromagnetic exchange J > 0 is supported")
        if float(self.s) not in ALLOWED_SPINS:
            raise ValueError(f"spin must be one of {ALLOWED_SPINS}, got {self.s}")
        if not self.a0 > 0:
            raise ValueError("lattice constant must be positive")
        if not self.g_factor > 0:
            raise ValueError("g_factor must be positive")
        object.__setattr__(self, "extent", extent)
        object.__setattr__(self, "periodic", periodic)
        object.__setattr__(self, "s", float(self.s))

    @property
    def dimensionality(self):
        return len(self.extent)

    @property
    def coordination(self):
        return 2 * self.dimensionality

    @property
    def n_sites(self):
        return math.prod(self.extent)

    @property
    def zeeman_frequency(self):
        """g mu_B B_z / h in Hz."""
        return self.g_factor * MU_B * self.B_z / H


def _as_k(k, lat):
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if k.shape[-1] != lat.dimensionality:
        raise ValueError(
            f"wave vector needs {lat.dimensionality} components, got {k.shape[-1]}"
        )
    return k


def check_commensurate(k, lat, atol=1e-9):
    """Raise ValueError unless every periodic component is 2 pi n / (N a0)."""
    k = _as_k(k, lat)
    for axis, (n, per) in enumerate(zip(lat.extent, lat.periodic)):
        if not per:
            continue
        idx = k[..., axis] * n * lat.a0 / (2 * math.pi)
        if np.any(np.abs(idx - np.round(idx)) > atol):
            raise ValueError(f"k component on axis {axis} is not commensurate")


def brillouin_zone(lat):
    """All commensurate wave vectors of a periodic lattice, shape (N, d)."""
    if not all(lat.periodic):
        raise ValueError("Brillouin-zone grid is only defined for periodic lattices")
    axes = [2 * math.pi * np.arange(n) / (n * lat.a0) for n in lat.extent]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def structure_factor(k, lat):
    """Mean of cos(k_i a0) over the lattice axes."""
    k = _as_k(k, lat)
    return np.mean(np.cos(k * lat.a0), axis=-1)


def dispersion(k, lat):
    """Linear spin-wave frequency omega_k / 2 pi in Hz.

    hbar omega_k = 2 s Z J (1 - gamma_k) + g mu_B B_z.
    """
    gamma_k = structure_factor(k, lat)
    exchange = 2 * lat.s * lat.coordination * lat.J * (1 - gamma_k)
    return exchange / H + lat.zeeman_frequency


def long_wavelength_dispersion(k, lat):
    """Quadratic small-|k| form, hbar omega = 2 s J a0^2 |k|^2 + g mu_B B_z (in Hz).

    The coordination number Z = 2d cancels the 1/d of the structure factor,
    so the stiffness is the same on chains, square and cubic lattices.
    """
    k = _as_k(k, lat)
    k2 = np.sum(k**2, axis=-1)
    stiffness = 2 * lat.s * lat.J * lat.a0**2
    return stiffness * k2 / H + lat.zeeman_frequency


def magnon_number_to_spin_deficit(n_magnons, lat):
    """Total S_z after removing ``n_magnons`` quanta from the polarized state."""
    n_sites = lat.n_sites
    n_max = int(round(2 * lat.s * n_sites))
    if int(n_magnons) != n_magnons or not 0 <= n_magnons <= n_max:
        raise ValueError(f"magnon number must be an integer in [0, {n_max}]")
    return n_sites * lat.s - n_magnons


def _bonds(lat):
    """Nearest-neighbour bonds, one per site per axis in the positive direction."""
    shape = lat.extent
    bonds = []
    for site in itertools.product(*(range(n) for n in shape)):
        i = np.ravel_multi_index(site, shape)
        for axis, n in enumerate(shape):
            nb = list(site)
            nb[axis] += 1
            if nb[axis] == n:
                if not lat.periodic[axis]:
                    continue
                nb[axis] = 0
            bonds.append((int(i), int(np.ravel_multi_index(nb, shape))))
    return bonds


def _sector_basis(lat, total_m):
    """Product states (local m values) with a fixed total S_z, via masking."""
    n_sites = lat.n_sites
    d_local = int(round(2 * lat.s)) + 1
    dim = d_local**n_sites
    if dim > MAX_HILBERT_DIM:
        raise ResourceLimitError(
            f"Hilbert space dimension {d_local}^{n_sites} exceeds cap {MAX_HILBERT_DIM}"
        )
    # digit q on a site encodes m = s - q (q spin deviations)
    codes = np.arange(dim, dtype=np.int64)
    digits = np.empty((dim, n_sites), dtype=np.int8)
    for site in range(n_sites - 1, -1, -1):
        digits[:, site] = codes % d_local
        codes //= d_local
    deviations = digits.sum(axis=1)
    n_dev = int(round(n_sites * lat.s - total_m))
    return digits[deviations == n_dev]


def _sector_hamiltonian(lat, basis):
    s = lat.s
    m = s - basis.astype(float)
    index = {state.tobytes(): row for row, state in enumerate(basis)}
    n_states = len(basis)
    ham = np.zeros((n_states, n_states))
    zeeman = -lat.g_factor * MU_B * lat.B_z
    for row, state in enumerate(basis):
        ham[row, row] += zeeman * m[row].sum()
    for i, j in _bonds(lat):
        ham[np.arange(n_states), np.arange(n_states)] += -2 * lat.J * m[:, i] * m[:, j]
        # -2J * (S+_i S-_j + S-_i S+_j) / 2
        for row, state in enumerate(basis):
            mi, mj = m[row, i], m[row, j]
            for a, b, ma, mb in ((i, j, mi, mj), (j, i, mj, mi)):
                # raise a, lower b
                if ma >= s or mb <= -s:
                    continue
                amp = math.sqrt(s * (s + 1) - ma * (ma + 1)) * math.sqrt(
                    s * (s + 1) - mb * (mb - 1)
                )
                new = state.copy()
                new[a] -= 1
                new[b] += 1
                col = index[new.tobytes()]
                ham[col, row] += -lat.J * amp
    return ham


def exact_single_magnon_energies(lat):
    """Exact one-magnon excitation energies (J), sorted, by diagonalization.

    Builds the spin Hamiltonian in the total-S_z = N s - 1 sector and subtracts
    the energy of the fully polarized state.
    """
    if not all(lat.periodic):
        raise ValueError("the exact oracle requires periodic boundaries")
    top = lat.n_sites * lat.s
    ground_basis = _sector_basis(lat, top)
    e_ground = _sector_hamiltonian(lat, ground_basis)[0, 0]
    basis = _sector_basis(lat, top - 1)
    ham = _sector_hamiltonian(lat, basis)
    energies = np.linalg.eigvalsh(ham)
    return np.sort(energies - e_ground)
