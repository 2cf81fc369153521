"""Classically precomputed factors for the enumerated block modes.

For the spin partition of a Hubbard ring the spin-up modes are handled
classically: the fixed-number configurations are enumerated and every
spin-up bracket (particle number, site occupations, bare hopping matrix
elements between configurations) is tabulated once.  The energy
assembly then only needs quantum brackets for the spin-down register.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .fock import Configuration, OperatorString, enumerate_configs, matrix_element
from .model import HubbardParams


@dataclass
class ClassicalFactors:
    """Tabulated spin-up brackets for every block configuration.

    Attributes
    ----------
    configs : list[Configuration]
        Fixed-number spin-up configurations in ascending bit order;
        their position is the block index used everywhere else.
    n_total : ndarray, shape (blocks,)
        Particle number of each configuration.
    occupations : ndarray, shape (blocks, sites)
        Site occupations n_i of each configuration.
    t_matrix : ndarray, shape (blocks, blocks)
        Bare nearest-neighbour hopping brackets
        <config_r| sum_bonds (c^dag_i c_j + c^dag_j c_i) |config_c>,
        without the hopping amplitude.
    """

    configs: list[Configuration]
    n_total: np.ndarray
    occupations: np.ndarray
    t_matrix: np.ndarray

    @property
    def block_count(self) -> int:
        return len(self.configs)


def hopping_strings(sites: int, periodic: bool) -> list[OperatorString]:
    """Bare hopping operator as strings, both directions of every bond."""
    params = HubbardParams(sites=sites, hopping=1.0, onsite=0.0, periodic=periodic)
    strings = []
    for i, j in params.bonds():
        strings.append(OperatorString(((True, i), (False, j))))
        strings.append(OperatorString(((True, j), (False, i))))
    return strings


def sector_hopping_matrix(sites: int, count: int, periodic: bool) -> np.ndarray:
    """Bare hopping brackets between all fixed-number configurations."""
    configs = enumerate_configs(sites, count)
    strings = hopping_strings(sites, periodic)
    t_matrix = np.zeros((len(configs), len(configs)))
    for r, bra in enumerate(configs):
        for c, ket in enumerate(configs):
            t_matrix[r, c] = sum(
                matrix_element(bra, s, ket) for s in strings
            ).real
    return t_matrix


def compute_factors(params: HubbardParams) -> ClassicalFactors:
    """Enumerate the spin-up sector of ``params`` and tabulate its factors."""
    configs = enumerate_configs(params.sites, params.n_up)
    n_total = np.array([c.count for c in configs])
    occupations = np.array([c.occupations() for c in configs])
    t_matrix = sector_hopping_matrix(params.sites, params.n_up, params.periodic)
    return ClassicalFactors(configs, n_total, occupations, t_matrix)


def nonzero_blocks(factors: ClassicalFactors) -> list[tuple[int, int]]:
    """Upper-triangle block pairs coupled by the hopping matrix.

    Only these pairs need an off-diagonal overlap bracket on the
    quantum register; everything else assembles from diagonal brackets.
    """
    rows, cols = np.nonzero(factors.t_matrix)
    return [(int(r), int(c)) for r, c in zip(rows, cols) if r < c]


def dump_factors(factors: ClassicalFactors, stream: TextIO) -> None:
    """Write the factors as a structured text table for inspection."""
    sites = factors.configs[0].mode_count if factors.configs else 0
    stream.write(f"blocks {factors.block_count} sites {sites}\n")
    stream.write("config bits particle_count\n")
    for index, config in enumerate(factors.configs):
        stream.write(f"{index} {config.bits:0{sites}b} {config.count}\n")
    stream.write("occupations block site value\n")
    for index in range(factors.block_count):
        for site in range(sites):
            stream.write(f"{index} {site} {factors.occupations[index, site]}\n")
    stream.write("t_matrix row col value\n")
    for r, c in zip(*np.nonzero(factors.t_matrix)):
        stream.write(f"{r} {c} {factors.t_matrix[r, c]:+.1f}\n")
