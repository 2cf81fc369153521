"""Configuration bit patterns and fermionic operator application."""

import math

import numpy as np
import pytest

from blockvqe import fock
from dense_reference import basis_vector, dense_string

RNG_SEED = 617423987152

ALL_MODES_CASES = [(m, n) for m in range(1, 7) for n in range(m + 1)]


def random_config(rng, mode_count):
    return fock.Configuration(int(rng.integers(0, 1 << mode_count)), mode_count)


def test_apply_op_matches_dense_kron():
    rng = np.random.default_rng(RNG_SEED)
    for mode_count in range(1, 7):
        for _ in range(20):
            config = random_config(rng, mode_count)
            ket = basis_vector(config.bits, mode_count)
            for mode in range(mode_count):
                for dagger in (False, True):
                    dense = dense_string([(dagger, mode)], mode_count) @ ket
                    result = fock.apply_op(config, dagger, mode)
                    if result is None:
                        np.testing.assert_allclose(dense, 0.0, atol=1e-15)
                    else:
                        out, sign = result
                        expected = sign * basis_vector(out.bits, mode_count)
                        np.testing.assert_allclose(dense, expected, atol=1e-15)


def test_apply_string_matches_dense_product():
    rng = np.random.default_rng(RNG_SEED + 1)
    for _ in range(300):
        mode_count = int(rng.integers(1, 7))
        length = int(rng.integers(0, 5))
        ops = tuple(
            (bool(rng.integers(0, 2)), int(rng.integers(0, mode_count)))
            for _ in range(length)
        )
        coeff = complex(rng.normal(), rng.normal())
        string = fock.OperatorString(ops, coeff)
        config = random_config(rng, mode_count)
        dense = dense_string(ops, mode_count, coeff) @ basis_vector(
            config.bits, mode_count
        )
        result = fock.apply_string(string, config)
        if result is None:
            np.testing.assert_allclose(dense, 0.0, atol=1e-14)
        else:
            out, amp = result
            np.testing.assert_allclose(
                dense, amp * basis_vector(out.bits, mode_count).astype(complex),
                atol=1e-14,
            )


def test_matrix_element_matches_dense():
    rng = np.random.default_rng(RNG_SEED + 2)
    for _ in range(300):
        mode_count = int(rng.integers(1, 6))
        length = int(rng.integers(1, 5))
        ops = tuple(
            (bool(rng.integers(0, 2)), int(rng.integers(0, mode_count)))
            for _ in range(length)
        )
        string = fock.OperatorString(ops, 1.0)
        bra = random_config(rng, mode_count)
        ket = random_config(rng, mode_count)
        dense = dense_string(ops, mode_count)
        value = fock.matrix_element(bra, string, ket)
        assert value == pytest.approx(dense[bra.bits, ket.bits], abs=1e-15)


def test_anticommutation_relations():
    """{c_i, c^dag_j} = delta_ij and {c_i, c_j} = 0, assembled from apply_op."""
    mode_count = 5
    dim = 1 << mode_count

    def dense_from_apply(dagger, mode):
        mat = np.zeros((dim, dim))
        for bits in range(dim):
            result = fock.apply_op(
                fock.Configuration(bits, mode_count), dagger, mode
            )
            if result is not None:
                out, sign = result
                mat[out.bits, bits] = sign
        return mat

    lowering = [dense_from_apply(False, mu) for mu in range(mode_count)]
    raising = [dense_from_apply(True, mu) for mu in range(mode_count)]
    for i in range(mode_count):
        for j in range(mode_count):
            anti = lowering[i] @ raising[j] + raising[j] @ lowering[i]
            np.testing.assert_allclose(anti, np.eye(dim) * (i == j), atol=1e-15)
            anti = lowering[i] @ lowering[j] + lowering[j] @ lowering[i]
            np.testing.assert_allclose(anti, 0.0, atol=1e-15)


def test_apply_op_sign_hand_values():
    config = fock.Configuration(0b001, 3)
    out, sign = fock.apply_op(config, True, 1)
    assert (out.bits, sign) == (0b011, -1)
    out, sign = fock.apply_op(config, True, 2)
    assert (out.bits, sign) == (0b101, -1)
    out, sign = fock.apply_op(fock.Configuration(0b011, 3), False, 1)
    assert (out.bits, sign) == (0b001, -1)
    out, sign = fock.apply_op(fock.Configuration(0b011, 3), False, 0)
    assert (out.bits, sign) == (0b010, 1)


def test_apply_op_annihilates():
    config = fock.Configuration(0b101, 3)
    assert fock.apply_op(config, True, 0) is None
    assert fock.apply_op(config, False, 1) is None
    assert fock.apply_string(
        fock.OperatorString(((False, 0), (False, 0))), config
    ) is None


@pytest.mark.parametrize("mode_count,particle_count", ALL_MODES_CASES)
def test_enumerate_configs_complete_and_sorted(mode_count, particle_count):
    configs = enumerate_result = fock.enumerate_configs(mode_count, particle_count)
    assert len(configs) == math.comb(mode_count, particle_count)
    bits = [c.bits for c in enumerate_result]
    assert bits == sorted(bits)
    assert len(set(bits)) == len(bits)
    assert all(c.count == particle_count for c in configs)


def test_enumerate_configs_half_filled_four_modes():
    configs = fock.enumerate_configs(4, 2)
    assert [c.bits for c in configs] == [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]


def test_mode_flattening():
    sites = 4
    assert [fock.mode_index(i, 0, sites) for i in range(sites)] == [0, 1, 2, 3]
    assert [fock.mode_index(i, 1, sites) for i in range(sites)] == [4, 5, 6, 7]
    for mode in range(2 * sites):
        site, spin = fock.site_spin(mode, sites)
        assert fock.mode_index(site, spin, sites) == mode


def test_configuration_validation():
    with pytest.raises(ValueError):
        fock.Configuration(4, 2)
    with pytest.raises(ValueError):
        fock.Configuration(-1, 3)
    with pytest.raises(ValueError):
        fock.Configuration(0, 0)
    with pytest.raises(ValueError):
        fock.OperatorString(((True, 0),) * 5)
    with pytest.raises(ValueError):
        fock.apply_op(fock.Configuration(0, 2), True, 2)
    with pytest.raises(ValueError):
        fock.enumerate_configs(3, 4)


def test_dagger_roundtrip():
    string = fock.OperatorString(((True, 0), (False, 2), (True, 1)), 2.0 - 1.0j)
    assert string.dagger().dagger() == string
    dense = dense_string(string.ops, 3, string.coefficient)
    dagger = string.dagger()
    np.testing.assert_allclose(
        dense.conj().T, dense_string(dagger.ops, 3, dagger.coefficient), atol=1e-15
    )
