"""Hubbard Hamiltonian construction and mode-partition splitting."""

import numpy as np
import pytest

from blockvqe import model
from dense_reference import (
    dense_hamiltonian,
    dense_hubbard_formula,
    dense_string,
    random_hermitian_hamiltonian,
)

RNG_SEED = 90217340981


def dense_from_hamiltonian(h):
    return dense_hamiltonian(h.one_body, h.two_body, h.mode_count)


def dense_from_split(sp):
    dim = 1 << sp.mode_count
    mat = np.zeros((dim, dim), dtype=complex)
    for term in sp.all_terms():
        mat += dense_string(term.a_ops + term.b_ops, sp.mode_count, term.coefficient)
    return mat


@pytest.mark.parametrize("periodic", [False, True])
def test_build_hubbard_matches_formula(periodic):
    params = model.HubbardParams(
        sites=3, hopping=-0.7, onsite=2.3, chem_potential=0.4,
        n_up=1, n_down=2, periodic=periodic,
    )
    h = build = model.build_hubbard(params)
    assert build.is_hermitian()
    np.testing.assert_allclose(
        dense_from_hamiltonian(h), dense_hubbard_formula(params), atol=1e-13
    )


def test_two_site_ring_doubles_hopping():
    ring = model.build_hubbard(
        model.HubbardParams(sites=2, hopping=-1.0, onsite=0.0, periodic=True)
    )
    chain = model.build_hubbard(
        model.HubbardParams(sites=2, hopping=-1.0, onsite=0.0, periodic=False)
    )
    assert ring.one_body[(0, 1)] == pytest.approx(-2.0)
    assert chain.one_body[(0, 1)] == pytest.approx(-1.0)


def test_split_group_census_spin_partition():
    params = model.HubbardParams(
        sites=4, hopping=-1.0, onsite=4.0, chem_potential=0.1, n_up=2, n_down=2
    )
    h = model.build_hubbard(params)
    sp = model.split(h, set_a=range(4))
    counts = {key: len(terms) for key, terms in sp.groups.items()}
    # 4 chemical-potential terms + 8 hopping strings per spin species
    assert counts == {"a": 12, "b": 12, "t": 0, "v1": 0, "v2": 4, "v3": 0}
    assert sp.set_a == (0, 1, 2, 3)
    assert sp.set_b == (4, 5, 6, 7)
    for term in sp.groups["v2"]:
        assert not term.parity_sign
        assert term.coefficient == pytest.approx(4.0)


def test_split_one_body_mixed_sign():
    """c^dag_1 c_0 with A={0}: one swap, so the coefficient flips sign."""
    h = model.FermionHamiltonian(2)
    h.add_one_body(0, 1, -1.0)
    h.add_one_body(1, 0, -1.0)
    sp = model.split(h, {0})
    terms = {term.a_ops: term for term in sp.groups["t"]}
    forward = terms[((True, 0),)]
    assert forward.b_ops == ((False, 1),)
    assert forward.coefficient == pytest.approx(-1.0)
    assert forward.parity_sign
    backward = terms[((False, 0),)]
    assert backward.b_ops == ((True, 1),)
    assert backward.coefficient == pytest.approx(1.0)
    assert backward.parity_sign


@pytest.mark.parametrize("mode_count", [4, 6])
def test_split_reassembles_random_hamiltonians(mode_count):
    rng = np.random.default_rng(RNG_SEED + mode_count)
    for _ in range(6):
        one_body, two_body = random_hermitian_hamiltonian(rng, mode_count, 6, 6)
        h = model.FermionHamiltonian(mode_count, dict(one_body), dict(two_body))
        assert h.is_hermitian()
        size_a = int(rng.integers(1, mode_count))
        set_a = rng.choice(mode_count, size=size_a, replace=False)
        sp = model.split(h, {int(mu) for mu in set_a})
        np.testing.assert_allclose(
            dense_from_split(sp), dense_from_hamiltonian(h), atol=1e-12
        )


def test_split_reassembles_hubbard_spin_partition():
    params = model.HubbardParams(
        sites=3, hopping=-1.0, onsite=3.0, chem_potential=-0.2, n_up=1, n_down=1
    )
    h = model.build_hubbard(params)
    sp = model.split(h, set_a=range(3))
    np.testing.assert_allclose(
        dense_from_split(sp), dense_hubbard_formula(params), atol=1e-12
    )


def test_split_rejects_bad_modes():
    h = model.build_hubbard(model.HubbardParams(sites=2, hopping=-1.0, onsite=1.0))
    with pytest.raises(ValueError):
        model.split(h, {0, 9})


def test_params_validation():
    with pytest.raises(ValueError):
        model.HubbardParams(sites=0, hopping=-1.0, onsite=0.0)
    with pytest.raises(ValueError):
        model.HubbardParams(sites=2, hopping=-1.0, onsite=0.0, n_up=3)
    with pytest.raises(ValueError):
        model.HubbardParams(sites=40, hopping=-1.0, onsite=0.0)
