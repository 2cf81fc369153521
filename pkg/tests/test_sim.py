"""Gate kernels, ansatz circuits, brackets and sampled expectations."""

import numpy as np
import pytest

from blockvqe import sim
from blockvqe.paulis import PauliSum, pauli_decompose
from dense_reference import dense_pauli_sum

RNG_SEED = 82634099123


def dense_single(gate: np.ndarray, qubit: int, qubit_count: int) -> np.ndarray:
    mat = np.eye(1, dtype=complex)
    for k in range(qubit_count):
        mat = np.kron(gate if k == qubit else np.eye(2), mat)
    return mat


def dense_cnot(control: int, target: int, qubit_count: int) -> np.ndarray:
    dim = 1 << qubit_count
    mat = np.zeros((dim, dim))
    for b in range(dim):
        out = b ^ (1 << target) if (b >> control) & 1 else b
        mat[out, b] = 1.0
    return mat


def dense_cry(control: int, target: int, angle: float, qubit_count: int) -> np.ndarray:
    dim = 1 << qubit_count
    mat = np.eye(dim, dtype=complex)
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    for b in range(dim):
        if (b >> control) & 1 and not (b >> target) & 1:
            flip = b | (1 << target)
            mat[b, b] = c
            mat[flip, b] = s
            mat[b, flip] = -s
            mat[flip, flip] = c
    return mat


def ry_matrix(angle):
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def random_state(rng, qubit_count):
    amps = rng.normal(size=1 << qubit_count) + 1j * rng.normal(size=1 << qubit_count)
    return sim.Statevector(amps / np.linalg.norm(amps))


def test_single_qubit_gates_match_dense():
    rng = np.random.default_rng(RNG_SEED)
    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    for qubit_count in (1, 2, 3):
        for qubit in range(qubit_count):
            state = random_state(rng, qubit_count)
            angle = float(rng.uniform(-np.pi, np.pi))
            rz = np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
            for name, gate, need_angle in (
                ("h", h, False), ("x", x, False),
                ("ry", ry_matrix(angle), True), ("rz", rz, True),
            ):
                out = sim.apply_gate(state, name, qubit, angle if need_angle else None)
                expected = dense_single(gate, qubit, qubit_count) @ state.amplitudes
                np.testing.assert_allclose(out.amplitudes, expected, atol=1e-13)


def test_two_qubit_gates_match_dense():
    rng = np.random.default_rng(RNG_SEED + 1)
    for qubit_count in (2, 3, 4):
        for _ in range(6):
            control, target = rng.choice(qubit_count, size=2, replace=False)
            control, target = int(control), int(target)
            state = random_state(rng, qubit_count)
            out = sim.apply_gate(state, "cnot", (control, target))
            np.testing.assert_allclose(
                out.amplitudes,
                dense_cnot(control, target, qubit_count) @ state.amplitudes,
                atol=1e-13,
            )
            angle = float(rng.uniform(-np.pi, np.pi))
            out = sim.apply_gate(state, "cry", (control, target), angle)
            np.testing.assert_allclose(
                out.amplitudes,
                dense_cry(control, target, angle, qubit_count) @ state.amplitudes,
                atol=1e-13,
            )


def test_gate_validation():
    state = sim.Statevector.zero(2)
    with pytest.raises(ValueError):
        sim.apply_gate(state, "ry", 0)
    with pytest.raises(ValueError):
        sim.apply_gate(state, "cnot", (1, 1))
    with pytest.raises(ValueError):
        sim.apply_gate(state, "swap", (0, 1))
    with pytest.raises(ValueError):
        sim.apply_gate(state, "x", 5)


def test_ansatz_single_qubit_rotation():
    spec = sim.AnsatzSpec(data_qubits=1, depth=1)
    theta = np.array([0.73])
    state = sim.ansatz_state(spec, theta)
    np.testing.assert_allclose(
        state.amplitudes, [np.cos(0.365), np.sin(0.365)], atol=1e-14
    )


def test_ansatz_two_qubits_hand_built():
    spec = sim.AnsatzSpec(data_qubits=2, depth=1)
    t0, t1 = 0.4, -1.1
    state = sim.ansatz_state(spec, np.array([t0, t1]))
    kron = np.kron(ry_matrix(t1)[:, 0], ry_matrix(t0)[:, 0]).reshape(4)
    expected = dense_cnot(0, 1, 2) @ kron
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-14)


def test_ansatz_batch_matches_sequential_gates():
    rng = np.random.default_rng(RNG_SEED + 2)
    spec = sim.AnsatzSpec(data_qubits=3, depth=2, final_rotations=True)
    assert spec.param_count == 9
    thetas = rng.uniform(-np.pi, np.pi, size=(5, 9))
    batch = sim.ansatz_batch(spec, thetas)
    for row, theta in zip(batch, thetas):
        state = sim.Statevector.zero(3)
        next_param = 0
        for layer in range(3):
            for qubit in range(3):
                state = sim.apply_gate(state, "ry", qubit, theta[next_param])
                next_param += 1
            if layer == 2:
                continue
            for control, target in ((0, 1), (1, 2)):
                state = sim.apply_gate(state, "cnot", (control, target))
        np.testing.assert_allclose(row, state.amplitudes, atol=1e-13)
        assert abs(np.linalg.norm(row) - 1.0) < 1e-12


def test_ansatz_param_count_enforced():
    spec = sim.AnsatzSpec(data_qubits=2, depth=2)
    with pytest.raises(ValueError):
        sim.ansatz_state(spec, np.zeros(3))
    with pytest.raises(ValueError):
        sim.AnsatzSpec(data_qubits=0, depth=1)
    with pytest.raises(ValueError):
        sim.AnsatzSpec(data_qubits=2, depth=1, entangler=((0, 2),))


def test_controlled_ansatz_equals_stacked_branches():
    rng = np.random.default_rng(RNG_SEED + 3)
    spec = sim.AnsatzSpec(data_qubits=3, depth=2)
    for _ in range(10):
        theta_a = rng.uniform(-np.pi, np.pi, size=spec.param_count)
        theta_b = rng.uniform(-np.pi, np.pi, size=spec.param_count)
        controlled = sim.controlled_ansatz_state(spec, theta_a, theta_b)
        stacked = sim.stack_states(
            sim.ansatz_state(spec, theta_a).amplitudes,
            sim.ansatz_state(spec, theta_b).amplitudes,
        )
        np.testing.assert_allclose(controlled.amplitudes, stacked, atol=1e-13)
        assert abs(controlled.norm() - 1.0) < 1e-12


def test_expect_matches_dense():
    rng = np.random.default_rng(RNG_SEED + 4)
    for qubit_count in (1, 2, 3, 4):
        state = random_state(rng, qubit_count)
        mat = rng.normal(size=(1 << qubit_count,) * 2)
        mat = mat + mat.T
        op = pauli_decompose(mat)
        value = sim.expect(state, op)
        expected = np.vdot(state.amplitudes, mat @ state.amplitudes).real
        assert value == pytest.approx(expected, abs=1e-12)


def test_expect_rejects_non_hermitian():
    with pytest.raises(ValueError):
        sim.expect(sim.Statevector.zero(1), PauliSum({"X": 1.0j}))


def test_apply_pauli_sum_matches_dense():
    rng = np.random.default_rng(RNG_SEED + 5)
    state = random_state(rng, 3)
    mat = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    op = pauli_decompose(mat)
    np.testing.assert_allclose(
        sim.apply_pauli_sum(state, op).amplitudes, mat @ state.amplitudes, atol=1e-12
    )


def test_offdiag_bracket_matches_dense():
    """x - i y from the ancilla circuit equals <U(b)0|O|U(a)0> directly."""
    rng = np.random.default_rng(RNG_SEED + 6)
    spec = sim.AnsatzSpec(data_qubits=3, depth=2)
    for _ in range(40):
        theta_a = rng.uniform(-np.pi, np.pi, size=spec.param_count)
        theta_b = rng.uniform(-np.pi, np.pi, size=spec.param_count)
        mat = rng.normal(size=(8, 8))
        mat = mat + mat.T
        op = pauli_decompose(mat)
        value = sim.offdiag_bracket(spec, theta_a, theta_b, op)
        phi_a = sim.ansatz_state(spec, theta_a).amplitudes
        phi_b = sim.ansatz_state(spec, theta_b).amplitudes
        expected = np.vdot(phi_b, mat @ phi_a)
        assert abs(value - expected) < 1e-10
        np.testing.assert_allclose(
            complex(sim.offdiag_bracket_states(phi_a, phi_b, op)), expected,
            atol=1e-10,
        )


def test_sample_expect_exact_on_eigenstates():
    state = sim.Statevector.zero(2)
    value, variance = sim.sample_expect_with_variance(
        state, PauliSum({"ZI": 0.5, "II": 0.25}), shots=100, seed=7
    )
    assert value == pytest.approx(0.75)
    assert variance == pytest.approx(0.0)


def test_sample_expect_converges_and_is_seeded():
    rng = np.random.default_rng(RNG_SEED + 7)
    state = random_state(rng, 3)
    mat = rng.normal(size=(8, 8))
    mat = mat + mat.T
    op = pauli_decompose(mat)
    exact = sim.expect(state, op)
    value, variance = sim.sample_expect_with_variance(state, op, shots=40000, seed=11)
    assert abs(value - exact) < 5.0 * np.sqrt(variance)
    assert sim.sample_expect(state, op, 5000, seed=3) == sim.sample_expect(
        state, op, 5000, seed=3
    )
    assert sim.sample_expect(state, op, 5000, seed=3) != sim.sample_expect(
        state, op, 5000, seed=4
    )


def test_sample_expect_y_basis_rotation():
    """The +1 eigenstate of Y gives a deterministic sampled mean."""
    amps = np.array([1.0, 1.0j]) / np.sqrt(2)
    state = sim.Statevector(amps)
    value = sim.sample_expect(state, PauliSum({"Y": 2.0}), shots=500, seed=0)
    assert value == pytest.approx(2.0)


def test_statevector_validation():
    with pytest.raises(ValueError):
        sim.Statevector(np.zeros(3))
    with pytest.raises(ValueError):
        sim.expect(sim.Statevector.zero(2), PauliSum({"Z": 1.0}))
