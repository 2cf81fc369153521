"""Statevector simulation of the block-state circuits.

Basis index bit k is qubit k, so qubit 0 is the least significant bit.
The hardware-efficient ansatz acts on ``data_qubits`` qubits; circuits
that estimate off-diagonal brackets add one ancilla qubit on top of the
register, at index ``data_qubits``.  All gate kernels are functional:
they take and return amplitude arrays, and broadcast over a leading
batch axis so that many block states can be advanced at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .paulis import PauliSum, term_action

_INV_SQRT2 = 1.0 / np.sqrt(2.0)


@dataclass
class Statevector:
    """Complex amplitudes over a qubit register, index bit k = qubit k."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        dim = self.amplitudes.shape[0]
        if self.amplitudes.ndim != 1 or dim < 2 or dim & (dim - 1):
            raise ValueError(f"amplitude length {self.amplitudes.shape} is not 2**n")

    @classmethod
    def zero(cls, qubit_count: int) -> "Statevector":
        amps = np.zeros(1 << qubit_count, dtype=complex)
        amps[0] = 1.0
        return cls(amps)

    @property
    def qubit_count(self) -> int:
        return self.amplitudes.shape[0].bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy())


@lru_cache(maxsize=None)
def _low_indices(dim: int, qubit: int) -> np.ndarray:
    """Basis indices with the given qubit bit clear."""
    idx = np.arange(dim)
    out = idx[(idx >> qubit) & 1 == 0]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _cnot_perm(dim: int, control: int, target: int) -> np.ndarray:
    idx = np.arange(dim)
    perm = idx ^ (((idx >> control) & 1) << target)
    perm.setflags(write=False)
    return perm


def _single(amps: np.ndarray, qubit: int, u00, u01, u10, u11) -> np.ndarray:
    """Apply a single-qubit gate; entries may carry a leading batch axis."""
    dim = amps.shape[-1]
    low = _low_indices(dim, qubit)
    high = low | (1 << qubit)
    out = amps.copy()
    if amps.ndim == 2 and np.ndim(u00) == 1:
        u00, u01, u10, u11 = (u[:, None] for u in (u00, u01, u10, u11))
    out[..., low] = u00 * amps[..., low] + u01 * amps[..., high]
    out[..., high] = u10 * amps[..., low] + u11 * amps[..., high]
    return out


def _ry(amps: np.ndarray, qubit: int, angle) -> np.ndarray:
    half = np.asarray(angle) / 2.0
    return _single(amps, qubit, np.cos(half), -np.sin(half), np.sin(half), np.cos(half))


def _rz(amps: np.ndarray, qubit: int, angle) -> np.ndarray:
    half = np.asarray(angle) / 2.0
    phase = np.exp(-1j * half)
    return _single(amps, qubit, phase, 0.0, 0.0, np.conj(phase))


def _hadamard(amps: np.ndarray, qubit: int) -> np.ndarray:
    return _single(amps, qubit, _INV_SQRT2, _INV_SQRT2, _INV_SQRT2, -_INV_SQRT2)


def _sdg(amps: np.ndarray, qubit: int) -> np.ndarray:
    return _single(amps, qubit, 1.0, 0.0, 0.0, -1j)


def _cnot(amps: np.ndarray, control: int, target: int) -> np.ndarray:
    return amps[..., _cnot_perm(amps.shape[-1], control, target)]


def _cry(amps: np.ndarray, control: int, target: int, angle) -> np.ndarray:
    """Ry on the target within the control=1 subspace."""
    dim = amps.shape[-1]
    idx = np.arange(dim)
    sel = idx[((idx >> control) & 1 == 1) & ((idx >> target) & 1 == 0)]
    flip = sel | (1 << target)
    half = np.asarray(angle) / 2.0
    cos, sin = np.cos(half), np.sin(half)
    if amps.ndim == 2 and np.ndim(cos) == 1:
        cos, sin = cos[:, None], sin[:, None]
    out = amps.copy()
    out[..., sel] = cos * amps[..., sel] - sin * amps[..., flip]
    out[..., flip] = sin * amps[..., sel] + cos * amps[..., flip]
    return out


def apply_gate(state: Statevector, gate: str, qubits, angle: float | None = None) -> Statevector:
    """Apply one named gate and return the new state.

    ``qubits`` is an int for single-qubit gates or a (control, target)
    pair for cnot/cry.  Rotation gates need ``angle``.
    """
    if isinstance(qubits, int):
        qubits = (qubits,)
    dim = state.amplitudes.shape[0]
    for q in qubits:
        if not 0 <= q < dim.bit_length() - 1:
            raise ValueError(f"qubit {q} out of range")
    name = gate.lower()
    needs_angle = name in ("ry", "rz", "cry")
    if needs_angle and angle is None:
        raise ValueError(f"gate {name} needs an angle")
    if name == "h":
        out = _hadamard(state.amplitudes, qubits[0])
    elif name == "x":
        out = _single(state.amplitudes, qubits[0], 0.0, 1.0, 1.0, 0.0)
    elif name == "ry":
        out = _ry(state.amplitudes, qubits[0], angle)
    elif name == "rz":
        out = _rz(state.amplitudes, qubits[0], angle)
    elif name == "cnot":
        control, target = qubits
        if control == target:
            raise ValueError("cnot control equals target")
        out = _cnot(state.amplitudes, control, target)
    elif name == "cry":
        control, target = qubits
        if control == target:
            raise ValueError("cry control equals target")
        out = _cry(state.amplitudes, control, target, angle)
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return Statevector(out)


@dataclass(frozen=True)
class AnsatzSpec:
    """Hardware-efficient ansatz: repeated Ry layers plus an entangler.

    Each of the ``depth`` iterations applies one Ry rotation per data
    qubit followed by the entangler CNOT pairs (a nearest-neighbour
    chain when none are given).  ``final_rotations`` appends one more
    rotation layer with its own parameters after the last iteration, so
    the rotations are sandwiched between entanglers on both sides.
    """

    data_qubits: int
    depth: int
    entangler: tuple[tuple[int, int], ...] | None = None
    final_rotations: bool = False

    def __post_init__(self) -> None:
        if self.data_qubits < 1:
            raise ValueError(f"data_qubits must be positive, got {self.data_qubits}")
        if self.depth < 0:
            raise ValueError(f"depth must be non-negative, got {self.depth}")
        for control, target in self.pairs:
            if control == target or not (
                0 <= control < self.data_qubits and 0 <= target < self.data_qubits
            ):
                raise ValueError(f"bad entangler pair ({control}, {target})")

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        if self.entangler is not None:
            return tuple(tuple(pair) for pair in self.entangler)
        return tuple((k, k + 1) for k in range(self.data_qubits - 1))

    @property
    def param_count(self) -> int:
        return (self.depth + (1 if self.final_rotations else 0)) * self.data_qubits


def _check_params(spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if thetas.shape[-1] != spec.param_count:
        raise ValueError(
            f"expected {spec.param_count} parameters, got {thetas.shape[-1]}"
        )
    return thetas


def ansatz_batch(spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    """Amplitudes (batch, 2**data_qubits) of the ansatz at each parameter row."""
    thetas = _check_params(spec, thetas)
    batch = thetas.shape[0]
    amps = np.zeros((batch, 1 << spec.data_qubits), dtype=complex)
    amps[:, 0] = 1.0
    layers = spec.depth + (1 if spec.final_rotations else 0)
    next_param = 0
    for layer in range(layers):
        for qubit in range(spec.data_qubits):
            amps = _ry(amps, qubit, thetas[:, next_param])
            next_param += 1
        if layer == spec.depth and spec.final_rotations:
            continue
        for control, target in spec.pairs:
            amps = _cnot(amps, control, target)
    return amps


def ansatz_state(spec: AnsatzSpec, theta: np.ndarray) -> Statevector:
    """Prepared block state U(theta)|0...0>."""
    return Statevector(ansatz_batch(spec, theta)[0])


def controlled_ansatz_batch(
    spec: AnsatzSpec, theta_a: np.ndarray, theta_b: np.ndarray
) -> np.ndarray:
    """Ancilla-labelled superposition (|0>U(a)|0> + |1>U(b)|0>)/sqrt(2).

    Built as a circuit: Hadamard on the ancilla, then each rotation
    layer applies Ry(a) followed by an ancilla-controlled Ry(b - a), so
    the two branches accumulate U(a) and U(b) respectively while the
    entangler acts identically on both.
    """
    theta_a = _check_params(spec, theta_a)
    theta_b = _check_params(spec, theta_b)
    if theta_a.shape != theta_b.shape:
        raise ValueError("parameter batches differ in shape")
    batch = theta_a.shape[0]
    ancilla = spec.data_qubits
    amps = np.zeros((batch, 1 << (spec.data_qubits + 1)), dtype=complex)
    amps[:, 0] = 1.0
    amps = _hadamard(amps, ancilla)
    layers = spec.depth + (1 if spec.final_rotations else 0)
    next_param = 0
    for layer in range(layers):
        for qubit in range(spec.data_qubits):
            amps = _ry(amps, qubit, theta_a[:, next_param])
            amps = _cry(
                amps, ancilla, qubit, theta_b[:, next_param] - theta_a[:, next_param]
            )
            next_param += 1
        if layer == spec.depth and spec.final_rotations:
            continue
        for control, target in spec.pairs:
            amps = _cnot(amps, control, target)
    return amps


def controlled_ansatz_state(
    spec: AnsatzSpec, theta_a: np.ndarray, theta_b: np.ndarray
) -> Statevector:
    return Statevector(controlled_ansatz_batch(spec, theta_a, theta_b)[0])


def stack_states(phi_a: np.ndarray, phi_b: np.ndarray) -> np.ndarray:
    """(|0;phi_a> + |1;phi_b>)/sqrt(2) with the ancilla as the top qubit."""
    phi_a = np.asarray(phi_a, dtype=complex)
    phi_b = np.asarray(phi_b, dtype=complex)
    if phi_a.shape != phi_b.shape:
        raise ValueError("branch shapes differ")
    return np.concatenate([phi_a, phi_b], axis=-1) * _INV_SQRT2


def expect_array(amps: np.ndarray, op: PauliSum):
    """<s|op|s> for amplitude rows, returned complex (no Hermiticity check)."""
    dim = amps.shape[-1]
    if dim != 1 << op.qubit_count:
        raise ValueError("state and operator widths differ")
    if not op.terms:
        return np.zeros(amps.shape[:-1], dtype=complex)
    coeffs, indices, values = op.column_tables()
    per_term = np.sum(
        np.conj(amps[..., indices]) * values * amps[..., None, :], axis=-1
    )
    return per_term @ coeffs


def expect(state: Statevector, op: PauliSum) -> float:
    """Real expectation value of a Hermitian PauliSum."""
    if not op.is_hermitian():
        raise ValueError("operator is not Hermitian")
    return float(expect_array(state.amplitudes, op).real)


def apply_pauli_sum(state: Statevector, op: PauliSum) -> Statevector:
    dim = state.amplitudes.shape[0]
    if dim != 1 << op.qubit_count:
        raise ValueError("state and operator widths differ")
    cols = np.arange(dim)
    out = np.zeros_like(state.amplitudes)
    for letters, coeff in op.terms.items():
        xmask, values = term_action(letters)
        out[cols ^ xmask] += coeff * values * state.amplitudes
    return Statevector(out)


def offdiag_bracket_states(
    phi_a: np.ndarray, phi_b: np.ndarray, op: PauliSum
) -> complex:
    """<phi_b| op |phi_a> measured on the stacked ancilla state.

    The estimator only uses expectation values available on hardware:
    with |Phi> = (|0;phi_a> + |1;phi_b>)/sqrt(2), the X (x) and Y (y)
    ancilla brackets combine as x - i y = <phi_b|op|phi_a>.
    """
    stacked = stack_states(phi_a, phi_b)
    x_val = expect_array(stacked, op.with_ancilla("X")).real
    y_val = expect_array(stacked, op.with_ancilla("Y")).real
    return complex(x_val - 1j * y_val)


def offdiag_bracket(
    spec: AnsatzSpec, theta_a: np.ndarray, theta_b: np.ndarray, op: PauliSum
) -> complex:
    """<U(theta_b)0| op |U(theta_a)0> via the ancilla circuit."""
    if not op.is_hermitian():
        raise ValueError("operator is not Hermitian")
    stacked = controlled_ansatz_batch(spec, theta_a, theta_b)[0]
    x_val = expect_array(stacked, op.with_ancilla("X")).real
    y_val = expect_array(stacked, op.with_ancilla("Y")).real
    return complex(x_val - 1j * y_val)


@lru_cache(maxsize=None)
def _term_signs(dim: int, support_mask: int) -> np.ndarray:
    idx = np.arange(dim)
    masked = (idx & support_mask).astype(np.uint64)
    for shift in (32, 16, 8, 4, 2, 1):
        masked ^= masked >> np.uint64(shift)
    signs = 1.0 - 2.0 * (masked & np.uint64(1)).astype(float)
    signs.setflags(write=False)
    return signs


def sample_expect_with_variance(
    state: Statevector, op: PauliSum, shots: int, seed
) -> tuple[float, float]:
    """Sampled expectation and its estimated variance.

    Each term is rotated into its measurement basis, bitstrings are
    drawn from the amplitude-squared distribution, and the term mean is
    the signed outcome average.  The variance estimate sums the
    per-term binomial variances coeff**2 (1 - mean**2) / shots.
    """
    if not op.is_hermitian():
        raise ValueError("operator is not Hermitian")
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    dim = state.amplitudes.shape[0]
    value = 0.0
    variance = 0.0
    for letters in sorted(op.terms):
        coeff = op.terms[letters].real
        support = 0
        amps = state.amplitudes
        for qubit, letter in enumerate(letters):
            if letter == "I":
                continue
            support |= 1 << qubit
            if letter == "X":
                amps = _hadamard(amps, qubit)
            elif letter == "Y":
                amps = _hadamard(_sdg(amps, qubit), qubit)
        if support == 0:
            value += coeff
            continue
        probs = np.abs(amps) ** 2
        probs = np.clip(probs, 0.0, None)
        probs /= probs.sum()
        counts = rng.multinomial(shots, probs)
        mean = float(np.dot(counts, _term_signs(dim, support))) / shots
        mean = min(1.0, max(-1.0, mean))
        value += coeff * mean
        variance += coeff * coeff * (1.0 - mean * mean) / shots
    return value, variance


def sample_expect(state: Statevector, op: PauliSum, shots: int, seed) -> float:
    """Sampled expectation value of a Hermitian PauliSum."""
    return sample_expect_with_variance(state, op, shots, seed)[0]
