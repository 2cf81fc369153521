"""Occupation-number configurations stored as integer bit patterns.

Mode ``mu`` of a register with ``mode_count`` modes is bit ``mu`` of a
Python int, so a configuration with modes 0 and 2 occupied has
``bits == 0b101``.  Creation and annihilation operators follow the
standard ordering convention: acting on mode ``mu`` picks up a sign
``(-1)**k`` where ``k`` is the number of occupied modes strictly below
``mu``.  A basis state is the ascending-mode product of creation
operators applied to the vacuum.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations


@dataclass(frozen=True)
class Configuration:
    """A single occupation-number basis state.

    Parameters
    ----------
    bits : int
        Occupation bit pattern; bit ``mu`` is the occupation of mode ``mu``.
    mode_count : int
        Number of modes in the register.  At most 63 so that ``bits``
        stays a cheap machine-word-sized integer.
    """

    bits: int
    mode_count: int

    def __post_init__(self) -> None:
        if not 0 < self.mode_count <= 63:
            raise ValueError(f"mode_count must be in 1..63, got {self.mode_count}")
        if not 0 <= self.bits < (1 << self.mode_count):
            raise ValueError(
                f"bits {self.bits:#b} out of range for {self.mode_count} modes"
            )

    @property
    def count(self) -> int:
        """Total particle number of the configuration."""
        return self.bits.bit_count()

    def occupied(self, mode: int) -> int:
        """Occupation (0 or 1) of a single mode."""
        return (self.bits >> mode) & 1

    def occupations(self) -> tuple[int, ...]:
        """Occupations of all modes, lowest mode first."""
        return tuple((self.bits >> mu) & 1 for mu in range(self.mode_count))


@dataclass(frozen=True)
class OperatorString:
    """A product of creation/annihilation operators with a coefficient.

    ``ops`` is read left to right as written, e.g.
    ``((True, 0), (False, 1))`` is ``c^dag_0 c_1``.  Application to a
    ket therefore starts from the rightmost factor.  Strings are at
    most four operators long (one- and two-body terms).
    """

    ops: tuple[tuple[bool, int], ...]
    coefficient: complex = 1.0

    def __post_init__(self) -> None:
        if len(self.ops) > 4:
            raise ValueError(f"operator strings are at most 4 long, got {len(self.ops)}")
        for dagger, mode in self.ops:
            if not isinstance(dagger, bool) or mode < 0:
                raise ValueError(f"bad operator factor ({dagger}, {mode})")

    def dagger(self) -> "OperatorString":
        """Hermitian conjugate: reversed order, flipped daggers, conjugated coefficient."""
        flipped = tuple((not d, mu) for d, mu in reversed(self.ops))
        return OperatorString(flipped, complex(self.coefficient).conjugate())


def apply_op(
    config: Configuration, dagger: bool, mode: int
) -> tuple[Configuration, int] | None:
    """Apply a single creation (``dagger=True``) or annihilation operator.

    Returns the resulting configuration together with the fermionic
    sign, or None when the operator annihilates the state (creating on
    an occupied mode or destroying on an empty one).
    """
    if mode >= config.mode_count:
        raise ValueError(f"mode {mode} out of range for {config.mode_count} modes")
    bit = 1 << mode
    occupied = bool(config.bits & bit)
    if dagger == occupied:
        return None
    sign = -1 if (config.bits & (bit - 1)).bit_count() & 1 else 1
    return Configuration(config.bits ^ bit, config.mode_count), sign


def apply_string(
    string: OperatorString, config: Configuration
) -> tuple[Configuration, complex] | None:
    """Apply an operator string to a ket, rightmost factor first.

    Returns ``(config, amplitude)`` with the string coefficient and all
    fermionic signs folded into the amplitude, or None if any factor
    annihilates the state.
    """
    bits = config.bits
    sign = 1
    for dagger, mode in reversed(string.ops):
        if mode >= config.mode_count:
            raise ValueError(f"mode {mode} out of range for {config.mode_count} modes")
        bit = 1 << mode
        if dagger == bool(bits & bit):
            return None
        if (bits & (bit - 1)).bit_count() & 1:
            sign = -sign
        bits ^= bit
    return Configuration(bits, config.mode_count), sign * string.coefficient


def matrix_element(
    bra: Configuration, string: OperatorString, ket: Configuration
) -> complex:
    """Matrix element ``<bra| string |ket>`` between two configurations."""
    if bra.mode_count != ket.mode_count:
        raise ValueError("bra and ket mode counts differ")
    result = apply_string(string, ket)
    if result is None:
        return 0.0
    out, amplitude = result
    return amplitude if out.bits == bra.bits else 0.0


def enumerate_configs(mode_count: int, particle_count: int) -> list[Configuration]:
    """All configurations with a fixed particle number, ascending bit patterns."""
    if particle_count < 0 or particle_count > mode_count:
        raise ValueError(
            f"particle_count {particle_count} out of range for {mode_count} modes"
        )
    patterns = sorted(
        sum(1 << mu for mu in combo)
        for combo in combinations(range(mode_count), particle_count)
    )
    return [Configuration(bits, mode_count) for bits in patterns]


def mode_index(site: int, spin: int, sites: int) -> int:
    """Flattened mode label for a lattice site and spin (0 = up, 1 = down).

    Up modes occupy 0..sites-1 and down modes sites..2*sites-1, so any
    up operator stands to the left of any down operator in canonical
    mode order.
    """
    if not 0 <= site < sites:
        raise ValueError(f"site {site} out of range for {sites} sites")
    if spin not in (0, 1):
        raise ValueError(f"spin must be 0 (up) or 1 (down), got {spin}")
    return site + spin * sites


def site_spin(mode: int, sites: int) -> tuple[int, int]:
    """Inverse of mode_index: lattice site and spin of a flattened mode."""
    if not 0 <= mode < 2 * sites:
        raise ValueError(f"mode {mode} out of range for {sites} sites")
    return mode % sites, mode // sites
