"""Reference solvers for the Hubbard sector: exact and mean field.

Exact diagonalization works in the product basis of fixed-number
spin-up and spin-down configurations (row index = up_index *
down_blocks + down_index), which keeps the dimension at the product of
two binomial coefficients instead of 4**sites.  The mean-field solver
is a standard self-consistent Hartree treatment with equal fractional
occupation of degenerate Fermi-level orbitals, so it does not break
lattice symmetries an artifact of integer filling would.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .classical_sector import sector_hopping_matrix
from .fock import Configuration, enumerate_configs
from .model import HubbardParams

DENSE_LIMIT = 512
DIMENSION_LIMIT = 4_000_000


@dataclass
class ExactResult:
    """Ground state of one (n_up, n_down) sector."""

    energy: float
    amplitudes: np.ndarray
    up_configs: list[Configuration]
    down_configs: list[Configuration]


def _sector_pieces(params: HubbardParams):
    up = enumerate_configs(params.sites, params.n_up)
    down = enumerate_configs(params.sites, params.n_down)
    occ_up = np.array([c.occupations() for c in up], dtype=float)
    occ_down = np.array([c.occupations() for c in down], dtype=float)
    diagonal = params.chem_potential * (params.n_up + params.n_down) * np.ones(
        len(up) * len(down)
    )
    if params.onsite != 0.0:
        for i in range(params.sites):
            diagonal += params.onsite * np.outer(
                occ_up[:, i], occ_down[:, i]
            ).ravel()
    t_up = sector_hopping_matrix(params.sites, params.n_up, params.periodic)
    t_down = sector_hopping_matrix(params.sites, params.n_down, params.periodic)
    return up, down, t_up, t_down, diagonal


def sector_dimension(params: HubbardParams) -> int:
    return math.comb(params.sites, params.n_up) * math.comb(
        params.sites, params.n_down
    )


def exact_ground(params: HubbardParams) -> ExactResult:
    """Lowest eigenpair of the Hamiltonian restricted to the particle sector.

    Dense below DENSE_LIMIT, Lanczos above it; beyond DIMENSION_LIMIT
    the sector is refused rather than silently thrashing memory.
    """
    dim = sector_dimension(params)
    if dim > DIMENSION_LIMIT:
        raise ValueError(
            f"sector dimension {dim} exceeds the supported limit {DIMENSION_LIMIT}"
        )
    up, down, t_up, t_down, diagonal = _sector_pieces(params)
    blocks_down = len(down)
    if dim <= DENSE_LIMIT:
        mat = params.hopping * (
            np.kron(t_up, np.eye(blocks_down))
            + np.kron(np.eye(len(up)), t_down)
        )
        mat[np.arange(dim), np.arange(dim)] += diagonal
        values, vectors = np.linalg.eigh(mat)
        energy = float(values[0])
        ground = vectors[:, 0]
    else:
        mat = params.hopping * (
            scipy.sparse.kron(
                scipy.sparse.csr_matrix(t_up), scipy.sparse.eye(blocks_down)
            )
            + scipy.sparse.kron(
                scipy.sparse.eye(len(up)), scipy.sparse.csr_matrix(t_down)
            )
        ) + scipy.sparse.diags(diagonal)
        v0 = np.random.default_rng(0).normal(size=dim)
        values, vectors = scipy.sparse.linalg.eigsh(
            mat.tocsr(), k=1, which="SA", v0=v0
        )
        energy = float(values[0])
        ground = vectors[:, 0]
    return ExactResult(energy, ground.reshape(len(up), blocks_down), up, down)


def minimum_over_down_sectors(
    params: HubbardParams, parity: int | None = None
) -> tuple[float, int]:
    """Lowest sector energy over all spin-down fillings with fixed n_up.

    ``parity`` of +1/-1 keeps only even/odd fillings; that is the part
    of Fock space reachable by a register that fixes the down parity
    but not the down particle number.
    """
    best = None
    for n_down in range(params.sites + 1):
        if parity is not None and (-1 if n_down & 1 else 1) != parity:
            continue
        sector = HubbardParams(
            sites=params.sites,
            hopping=params.hopping,
            onsite=params.onsite,
            chem_potential=params.chem_potential,
            n_up=params.n_up,
            n_down=n_down,
            periodic=params.periodic,
        )
        energy = exact_ground(sector).energy
        if best is None or energy < best[0]:
            best = (energy, n_down)
    return best


@dataclass
class MeanFieldResult:
    energy: float
    occupations: np.ndarray
    converged: bool
    iterations: int


def _fill_orbitals(values: np.ndarray, count: int, degeneracy_tol: float = 1e-9):
    """Occupation fractions filling ``count`` particles bottom up.

    A partially filled degenerate shell is occupied evenly so that the
    density keeps the lattice symmetry of the Hamiltonian.
    """
    fills = np.zeros(len(values))
    remaining = float(count)
    k = 0
    while remaining > 1e-12 and k < len(values):
        shell = np.nonzero(np.abs(values - values[k]) <= degeneracy_tol)[0]
        take = min(remaining, float(len(shell)))
        fills[shell] = take / len(shell)
        remaining -= take
        k = int(shell[-1]) + 1
    return fills


def mean_field(
    params: HubbardParams,
    flavor: str = "restricted",
    mixing: float = 0.5,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> MeanFieldResult:
    """Self-consistent Hartree energy of the sector.

    restricted: both spins share one density (requires n_up == n_down).
    unrestricted: independent spin densities from a staggered seed.
    """
    if flavor not in ("restricted", "unrestricted"):
        raise ValueError(f"unknown mean-field flavor {flavor!r}")
    if flavor == "restricted" and params.n_up != params.n_down:
        raise ValueError("restricted mean field needs n_up == n_down")
    sites = params.sites
    adjacency = np.zeros((sites, sites))
    for i, j in params.bonds():
        adjacency[i, j] += 1.0
        adjacency[j, i] += 1.0
    counts = (params.n_up, params.n_down)
    densities = [
        np.full(sites, counts[0] / sites),
        np.full(sites, counts[1] / sites),
    ]
    if flavor == "unrestricted" and sites > 1:
        stagger = 0.1 * np.array([(-1.0) ** i for i in range(sites)])
        densities[0] = np.clip(densities[0] + stagger, 0.0, 1.0)
        densities[1] = np.clip(densities[1] - stagger, 0.0, 1.0)
    def single_pass(current):
        """One diagonalize-and-fill sweep; returns new densities and sum(f*eps)."""
        new_densities = []
        orbital_sum = 0.0
        for spin in (0, 1):
            h = (
                params.chem_potential * np.eye(sites)
                + params.hopping * adjacency
                + params.onsite * np.diag(current[1 - spin])
            )
            values, vectors = np.linalg.eigh(h)
            fills = _fill_orbitals(values, counts[spin])
            orbital_sum += float(np.dot(fills, values))
            new_densities.append(np.abs(vectors) ** 2 @ fills)
        if flavor == "restricted":
            shared = new_densities[0]
            new_densities = [shared, shared.copy()]
        return new_densities, orbital_sum

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new_densities, _ = single_pass(densities)
        delta = max(
            float(np.max(np.abs(new_densities[s] - densities[s]))) for s in (0, 1)
        )
        densities = [
            mixing * new_densities[s] + (1.0 - mixing) * densities[s]
            for s in (0, 1)
        ]
        if delta < tol:
            converged = True
            break
    _, orbital_sum = single_pass(densities)
    energy = orbital_sum - params.onsite * float(
        np.dot(densities[0], densities[1])
    )
    return MeanFieldResult(energy, np.array(densities), converged, iterations)
