"""Pauli string sums on a fixed-width qubit register.

A term is a string over "IXYZ" whose position k is the letter acting on
qubit k, with qubit 0 the least significant bit of a basis index.  A
PauliSum maps term strings to complex coefficients and supports the
algebra needed by the fermionic encodings: addition, products with the
single-qubit multiplication table, dense conversion, and the inverse
trace decomposition of an arbitrary matrix.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as iter_product

import numpy as np

_MUL = {
    ("I", "I"): (1.0, "I"), ("I", "X"): (1.0, "X"),
    ("I", "Y"): (1.0, "Y"), ("I", "Z"): (1.0, "Z"),
    ("X", "I"): (1.0, "X"), ("Y", "I"): (1.0, "Y"), ("Z", "I"): (1.0, "Z"),
    ("X", "X"): (1.0, "I"), ("Y", "Y"): (1.0, "I"), ("Z", "Z"): (1.0, "I"),
    ("X", "Y"): (1j, "Z"), ("Y", "X"): (-1j, "Z"),
    ("Y", "Z"): (1j, "X"), ("Z", "Y"): (-1j, "X"),
    ("Z", "X"): (1j, "Y"), ("X", "Z"): (-1j, "Y"),
}


def _parity(values: np.ndarray) -> np.ndarray:
    """Bit parity of each entry of an integer array."""
    v = values.astype(np.uint64)
    for shift in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(shift)
    return (v & np.uint64(1)).astype(np.int64)


def term_masks(letters: str) -> tuple[int, int, int]:
    """Bit masks (x-like, y, z-like) of a term; x-like flips, y/z sign."""
    xmask = ymask = zmask = 0
    for k, letter in enumerate(letters):
        if letter in "XY":
            xmask |= 1 << k
        if letter == "Y":
            ymask |= 1 << k
        if letter == "Z":
            zmask |= 1 << k
    return xmask, ymask, zmask


@lru_cache(maxsize=None)
def term_action(letters: str) -> tuple[int, np.ndarray]:
    """Column action of one term: row = col ^ xmask, amplitude values[col]."""
    xmask, ymask, zmask = term_masks(letters)
    dim = 1 << len(letters)
    cols = np.arange(dim)
    signs = 1.0 - 2.0 * _parity(cols & (ymask | zmask))
    values = (1j ** bin(ymask).count("1")) * signs
    values.flags.writeable = False
    return xmask, values


class PauliSum:
    """Weighted sum of Pauli strings on ``qubit_count`` qubits."""

    def __init__(self, terms: dict[str, complex] | None = None, qubit_count: int | None = None):
        terms = dict(terms or {})
        if qubit_count is None:
            if not terms:
                raise ValueError("qubit_count required for an empty sum")
            qubit_count = len(next(iter(terms)))
        for letters in terms:
            if len(letters) != qubit_count or any(c not in "IXYZ" for c in letters):
                raise ValueError(f"bad Pauli term {letters!r} for {qubit_count} qubits")
        self.terms = {k: complex(v) for k, v in terms.items()}
        self.qubit_count = qubit_count

    @classmethod
    def identity(cls, qubit_count: int, coefficient: complex = 1.0) -> "PauliSum":
        return cls({"I" * qubit_count: coefficient}, qubit_count)

    @classmethod
    def zero(cls, qubit_count: int) -> "PauliSum":
        return cls({}, qubit_count)

    @classmethod
    def from_term(cls, letters: str, coefficient: complex = 1.0) -> "PauliSum":
        return cls({letters: coefficient}, len(letters))

    def _check_width(self, other: "PauliSum") -> None:
        if self.qubit_count != other.qubit_count:
            raise ValueError("qubit counts differ")

    def __add__(self, other: "PauliSum") -> "PauliSum":
        self._check_width(other)
        terms = dict(self.terms)
        for letters, coeff in other.terms.items():
            terms[letters] = terms.get(letters, 0.0) + coeff
        return PauliSum(terms, self.qubit_count)

    def __sub__(self, other: "PauliSum") -> "PauliSum":
        return self + (-1.0) * other

    def __mul__(self, other):
        if not isinstance(other, PauliSum):
            return PauliSum(
                {k: v * other for k, v in self.terms.items()}, self.qubit_count
            )
        self._check_width(other)
        terms: dict[str, complex] = {}
        for left, cl in self.terms.items():
            for right, cr in other.terms.items():
                phase = cl * cr
                letters = []
                for a, b in zip(left, right):
                    p, c = _MUL[(a, b)]
                    phase *= p
                    letters.append(c)
                key = "".join(letters)
                terms[key] = terms.get(key, 0.0) + phase
        return PauliSum(terms, self.qubit_count)

    def __rmul__(self, scalar) -> "PauliSum":
        return self * scalar

    def __neg__(self) -> "PauliSum":
        return self * -1.0

    def dagger(self) -> "PauliSum":
        return PauliSum(
            {k: v.conjugate() for k, v in self.terms.items()}, self.qubit_count
        )

    def prune(self, tol: float = 1e-12) -> "PauliSum":
        return PauliSum(
            {k: v for k, v in self.terms.items() if abs(v) > tol}, self.qubit_count
        )

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(v.imag) <= tol for v in self.terms.values())

    def allclose(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        self._check_width(other)
        keys = set(self.terms) | set(other.terms)
        return all(
            abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= tol for k in keys
        )

    def with_ancilla(self, letter: str) -> "PauliSum":
        """Extend by one qubit at the top of the register carrying ``letter``."""
        if letter not in "IXYZ":
            raise ValueError(f"bad letter {letter!r}")
        return PauliSum(
            {k + letter: v for k, v in self.terms.items()}, self.qubit_count + 1
        )

    def column_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Column action of all terms stacked: (coeffs, row indices, values).

        Rows ``indices[t]`` and amplitudes ``coeffs[t] * values[t]`` give
        the image of every basis column under term ``t``, in sorted term
        order.  Cached on the instance; sums are never mutated in place.
        """
        cached = getattr(self, "_tables", None)
        if cached is not None:
            return cached
        order = sorted(self.terms)
        dim = 1 << self.qubit_count
        cols = np.arange(dim)
        coeffs = np.array([self.terms[t] for t in order], dtype=complex)
        indices = np.empty((len(order), dim), dtype=np.intp)
        values = np.empty((len(order), dim), dtype=complex)
        for t, letters in enumerate(order):
            xmask, vals = term_action(letters)
            indices[t] = cols ^ xmask
            values[t] = vals
        self._tables = (coeffs, indices, values)
        return self._tables

    def to_dense(self) -> np.ndarray:
        dim = 1 << self.qubit_count
        mat = np.zeros((dim, dim), dtype=complex)
        cols = np.arange(dim)
        for letters, coeff in self.terms.items():
            xmask, values = term_action(letters)
            mat[cols ^ xmask, cols] += coeff * values
        return mat

    def __repr__(self) -> str:
        return f"PauliSum({len(self.terms)} terms, {self.qubit_count} qubits)"


def pauli_decompose(matrix: np.ndarray, tol: float = 1e-12) -> PauliSum:
    """Expand a square matrix over Pauli strings via normalized traces.

    Works for any complex matrix whose dimension is a power of two; the
    coefficients of non-Hermitian inputs come out complex.
    """
    matrix = np.asarray(matrix, dtype=complex)
    dim = matrix.shape[0]
    if matrix.shape != (dim, dim) or dim < 2 or dim & (dim - 1):
        raise ValueError(f"matrix shape {matrix.shape} is not a square power of two")
    qubit_count = dim.bit_length() - 1
    cols = np.arange(dim)
    terms: dict[str, complex] = {}
    for combo in iter_product("IXYZ", repeat=qubit_count):
        # position k acts on qubit k, so the tuple is already qubit order
        letters = "".join(combo)
        xmask, values = term_action(letters)
        trace = np.sum(values * matrix[cols, cols ^ xmask])
        coeff = trace / dim
        if abs(coeff) > tol:
            terms[letters] = coeff
    return PauliSum(terms, qubit_count)


def remove_qubit(op: PauliSum, qubit: int, eigenvalue: int) -> PauliSum:
    """Drop a qubit on which every term acts as I or Z, substituting ±1 for Z.

    Used to peel off a register qubit that holds a conserved parity: in
    a fixed-parity sector Z on that qubit is a constant ``eigenvalue``.
    """
    if eigenvalue not in (1, -1):
        raise ValueError("eigenvalue must be +1 or -1")
    if not 0 <= qubit < op.qubit_count:
        raise ValueError(f"qubit {qubit} out of range")
    terms: dict[str, complex] = {}
    for letters, coeff in op.terms.items():
        letter = letters[qubit]
        if letter not in "IZ":
            raise ValueError(
                f"term {letters} acts as {letter} on qubit {qubit}; not removable"
            )
        if letter == "Z":
            coeff = coeff * eigenvalue
        reduced = letters[:qubit] + letters[qubit + 1:]
        terms[reduced] = terms.get(reduced, 0.0) + coeff
    return PauliSum(terms, op.qubit_count - 1)


def format_pauli_sum(op: PauliSum) -> str:
    """One term per line, ``±c.ccccc LETTERS``, sorted by string."""
    lines = []
    for letters in sorted(op.terms):
        coeff = op.terms[letters]
        text = f"{coeff.real:+.5f}"
        if abs(coeff.imag) > 1e-9:
            text += f"{coeff.imag:+.5f}j"
        lines.append(f"{text} {letters}")
    return "\n".join(lines)
