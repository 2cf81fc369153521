"""Enumerated block factors for the classical side of the partition."""

import io

import numpy as np
import pytest

from blockvqe import classical_sector, model
from dense_reference import dense_string

RNG_SEED = 55512893401


def dense_hopping_restricted(params):
    """Bare hopping matrix in the fixed-number basis via dense Kronecker ops."""
    m = params.sites
    dim = 1 << m
    dense = np.zeros((dim, dim), dtype=complex)
    for s in classical_sector.hopping_strings(params.sites, params.periodic):
        dense += dense_string(s.ops, m, s.coefficient)
    factors = classical_sector.compute_factors(params)
    index = [c.bits for c in factors.configs]
    return dense[np.ix_(index, index)].real


@pytest.mark.parametrize("sites,n_up,periodic", [
    (2, 1, True), (3, 2, True), (4, 2, True), (4, 2, False), (5, 3, True),
])
def test_t_matrix_matches_dense_restriction(sites, n_up, periodic):
    params = model.HubbardParams(
        sites=sites, hopping=-1.0, onsite=0.0, n_up=n_up, n_down=n_up,
        periodic=periodic,
    )
    factors = classical_sector.compute_factors(params)
    np.testing.assert_allclose(
        factors.t_matrix, dense_hopping_restricted(params), atol=1e-13
    )


def test_half_filled_four_site_factors():
    params = model.HubbardParams(sites=4, hopping=-1.0, onsite=4.0, n_up=2, n_down=2)
    factors = classical_sector.compute_factors(params)
    assert factors.block_count == 6
    assert [c.bits for c in factors.configs] == [3, 5, 6, 9, 10, 12]
    np.testing.assert_array_equal(factors.n_total, 2)
    np.testing.assert_array_equal(
        factors.occupations[0], [1, 1, 0, 0]
    )
    np.testing.assert_array_equal(
        factors.occupations[5], [0, 0, 1, 1]
    )
    # spot values derived by hand from the sign convention
    assert factors.t_matrix[0, 1] == pytest.approx(1.0)
    assert factors.t_matrix[5, 1] == pytest.approx(-1.0)
    np.testing.assert_allclose(np.diag(factors.t_matrix), 0.0)
    np.testing.assert_allclose(factors.t_matrix, factors.t_matrix.T)


def test_two_site_ring_t_matrix_doubled():
    params = model.HubbardParams(sites=2, hopping=-1.0, onsite=0.0, n_up=1, n_down=1)
    factors = classical_sector.compute_factors(params)
    np.testing.assert_allclose(factors.t_matrix, [[0.0, 2.0], [2.0, 0.0]])


def test_nonzero_blocks_matches_t_matrix():
    params = model.HubbardParams(sites=4, hopping=-1.0, onsite=4.0, n_up=2, n_down=2)
    factors = classical_sector.compute_factors(params)
    pairs = classical_sector.nonzero_blocks(factors)
    assert pairs == sorted(set(pairs))
    for r, c in pairs:
        assert r < c
        assert factors.t_matrix[r, c] != 0.0
    listed = set(pairs)
    for r in range(factors.block_count):
        for c in range(r + 1, factors.block_count):
            if factors.t_matrix[r, c] != 0.0:
                assert (r, c) in listed


def test_empty_and_full_sectors():
    for n_up in (0, 3):
        params = model.HubbardParams(
            sites=3, hopping=-1.0, onsite=1.0, n_up=n_up, n_down=1
        )
        factors = classical_sector.compute_factors(params)
        assert factors.block_count == 1
        np.testing.assert_allclose(factors.t_matrix, 0.0)
        assert classical_sector.nonzero_blocks(factors) == []


def test_dump_factors_triplets():
    params = model.HubbardParams(sites=4, hopping=-1.0, onsite=4.0, n_up=2, n_down=2)
    factors = classical_sector.compute_factors(params)
    stream = io.StringIO()
    classical_sector.dump_factors(factors, stream)
    lines = stream.getvalue().splitlines()
    assert lines[0] == "blocks 6 sites 4"
    assert "0 0011 2" in lines
    triplets = lines[lines.index("t_matrix row col value") + 1:]
    assert len(triplets) == np.count_nonzero(factors.t_matrix)
    row, col, value = triplets[0].split()
    assert factors.t_matrix[int(row), int(col)] == pytest.approx(float(value))
