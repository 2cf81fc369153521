"""Encodings of fermionic operators onto qubit registers.

Three occupation-based encodings share one interface: Jordan-Wigner
(qubit j stores the occupation of mode j), parity (qubit j stores the
running occupation parity of modes 0..j) and Bravyi-Kitaev (qubit j
stores the parity of the modes covered by node j+1 of a Fenwick tree).
In the parity and Bravyi-Kitaev registers the top qubit carries the
total particle parity (for Bravyi-Kitaev only when the mode count is a
power of two), so in a fixed-parity sector it can be removed by
substituting its Z eigenvalue.

The compact encoding is different in kind: it takes an operator matrix
already written in a fixed-particle-number configuration basis, embeds
it into the smallest power-of-two dimension, and Pauli-decomposes the
result.  Unused embedding rows can be given a penalty diagonal so that
leakage out of the physical span only raises the energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import OperatorString
from .paulis import PauliSum, pauli_decompose, remove_qubit

OCCUPATION_KINDS = ("jw", "parity", "bk")
KINDS = OCCUPATION_KINDS + ("compact",)


@dataclass(frozen=True)
class EncodingScheme:
    """How a fermionic register is laid out on data qubits.

    ``qubit_count`` is the data register width; one more qubit (the
    ancilla used for off-diagonal brackets) sits on top of it, at index
    ``qubit_count``.  ``fixed_parity`` is the Z eigenvalue substituted
    for the removed parity qubit, or None when nothing was removed.
    """

    kind: str
    modes: int
    qubit_count: int
    fixed_parity: int | None = None

    @property
    def circuit_qubits(self) -> int:
        return self.qubit_count + 1


def scheme_for(kind: str, modes: int, particle_count: int | None = None) -> EncodingScheme:
    """Register layout for a given encoding of ``modes`` fermionic modes.

    With a known particle number the parity and Bravyi-Kitaev top qubit
    is removed and the compact register is sized to the configuration
    count; otherwise the full occupation register is kept.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown encoding kind {kind!r}")
    if kind == "compact":
        if particle_count is None:
            raise ValueError("compact encoding requires a particle number")
        dim = math.comb(modes, particle_count)
        return EncodingScheme(kind, modes, compact_qubit_count(dim), None)
    if kind == "jw" or particle_count is None:
        return EncodingScheme(kind, modes, modes, None)
    if kind == "bk" and modes & (modes - 1):
        raise ValueError(
            f"the top Bravyi-Kitaev qubit only carries total parity when the "
            f"mode count is a power of two, got {modes}"
        )
    parity = -1 if particle_count & 1 else 1
    return EncodingScheme(kind, modes, modes - 1, parity)


def compact_qubit_count(dim: int) -> int:
    """Smallest register width whose basis holds ``dim`` configurations."""
    if dim < 1:
        raise ValueError(f"dimension must be positive, got {dim}")
    return max(1, (dim - 1).bit_length())


def _fenwick_sets(modes: int):
    """Update/parity/remainder qubit sets of the Fenwick tree, per mode."""
    update, parity, remainder = [], [], []
    for j in range(modes):
        node = j + 1
        up = set()
        k = node + (node & -node)
        while k <= modes:
            up.add(k - 1)
            k += k & -k
        par = set()
        k = j
        while k > 0:
            par.add(k - 1)
            k -= k & -k
        flip = set()
        step = 1
        while step < (node & -node):
            flip.add(node - step - 1)
            step <<= 1
        update.append(up)
        parity.append(par)
        remainder.append(par - flip)
    return update, parity, remainder


def _letters(modes: int, assignment: dict[int, str]) -> str:
    return "".join(assignment.get(k, "I") for k in range(modes))


def _mode_term(kind: str, dagger: bool, mode: int, modes: int, fenwick) -> PauliSum:
    """Single creation/annihilation operator as a two-term PauliSum."""
    # both branches are (X_part -+ i Y_part) / 2, dagger taking the minus
    y_coeff = -0.5j if dagger else 0.5j
    if kind == "jw":
        zs = {k: "Z" for k in range(mode)}
        x_term = _letters(modes, {**zs, mode: "X"})
        y_term = _letters(modes, {**zs, mode: "Y"})
    elif kind == "parity":
        xs = {k: "X" for k in range(mode + 1, modes)}
        prev = {mode - 1: "Z"} if mode > 0 else {}
        x_term = _letters(modes, {**xs, **prev, mode: "X"})
        y_term = _letters(modes, {**xs, mode: "Y"})
    elif kind == "bk":
        update, parity, remainder = fenwick
        xs = {k: "X" for k in update[mode]}
        x_term = _letters(
            modes, {**xs, **{k: "Z" for k in parity[mode]}, mode: "X"}
        )
        y_term = _letters(
            modes, {**xs, **{k: "Z" for k in remainder[mode]}, mode: "Y"}
        )
    else:
        raise ValueError(f"unknown occupation encoding {kind!r}")
    return PauliSum({x_term: 0.5, y_term: y_coeff}, modes)


def encode_strings(
    strings, modes: int, kind: str, fixed_parity: int | None = None
) -> PauliSum:
    """Encode a sum of operator strings into a PauliSum on the register.

    ``fixed_parity`` removes the top parity qubit of the parity and
    Bravyi-Kitaev registers by substituting the given Z eigenvalue; the
    operator must preserve particle parity for that to be possible.
    """
    if kind not in OCCUPATION_KINDS:
        raise ValueError(f"unknown occupation encoding {kind!r}")
    if isinstance(strings, OperatorString):
        strings = [strings]
    fenwick = _fenwick_sets(modes) if kind == "bk" else None
    total = PauliSum.zero(modes)
    for string in strings:
        term = PauliSum.identity(modes, string.coefficient)
        for dagger, mode in string.ops:
            if not 0 <= mode < modes:
                raise ValueError(f"mode {mode} out of range for {modes} modes")
            term = term * _mode_term(kind, dagger, mode, modes, fenwick)
        total = total + term
    total = total.prune()
    if fixed_parity is not None:
        if kind == "jw":
            raise ValueError("the Jordan-Wigner register has no parity qubit")
        if kind == "bk" and modes & (modes - 1):
            raise ValueError(
                "Bravyi-Kitaev parity removal needs a power-of-two mode count"
            )
        total = remove_qubit(total, modes - 1, fixed_parity)
    return total


def encode_with_scheme(strings, scheme: EncodingScheme) -> PauliSum:
    """Encode strings according to a register layout from ``scheme_for``."""
    return encode_strings(strings, scheme.modes, scheme.kind, scheme.fixed_parity)


def occupation_register_index(kind: str, bits: int, modes: int) -> int:
    """Register basis index that represents occupation pattern ``bits``."""
    if kind == "jw":
        return bits
    if kind == "parity":
        out = 0
        acc = 0
        for j in range(modes):
            acc ^= (bits >> j) & 1
            out |= acc << j
        return out
    if kind == "bk":
        out = 0
        for j in range(modes):
            node = j + 1
            low = node & -node
            acc = 0
            for k in range(node - low, node):
                acc ^= (bits >> k) & 1
            out |= acc << j
        return out
    raise ValueError(f"unknown occupation encoding {kind!r}")


def compact_operator(matrix: np.ndarray, pad_diagonal: float = 0.0) -> PauliSum:
    """Embed a configuration-basis matrix into qubit space and decompose it.

    The matrix row/column order must match the enumeration order of the
    configurations.  Rows beyond the physical dimension get
    ``pad_diagonal`` on the diagonal.
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if matrix.shape != (dim, dim):
        raise ValueError(f"matrix shape {matrix.shape} is not square")
    width = 1 << compact_qubit_count(dim)
    big = np.zeros((width, width), dtype=complex)
    big[:dim, :dim] = matrix
    for k in range(dim, width):
        big[k, k] = pad_diagonal
    return pauli_decompose(big)
