"""The estimator facade."""

import numpy as np
import pytest
from sklearn.base import clone

from blockvqe.model import HubbardParams
from blockvqe.oracle import exact_ground
from blockvqe.solver import BlockVqeSolver

RNG_SEED = 337315589021


def dimer(onsite):
    return HubbardParams(
        sites=2, hopping=-1.0, onsite=onsite, n_up=1, n_down=1, periodic=False
    )


def test_fit_reaches_dimer_ground_state():
    params = dimer(4.0)
    solver = BlockVqeSolver(restarts=2, seed=11)
    fitted = solver.fit(params)
    assert fitted is solver
    expected = (4.0 - np.sqrt(32.0)) / 2.0
    assert abs(solver.energy_ - expected) < 1e-7
    assert solver.converged_
    assert solver.alpha_.shape == (2,)
    assert solver.angles_.shape[0] == 2
    assert solver.iterations_ == len(solver.trace_)
    assert solver.scheme_.kind == "compact"
    assert abs(solver.score(params) + solver.energy_) < 1e-15


def test_get_params_set_params_and_clone():
    solver = BlockVqeSolver(encoding="jw", restarts=3, seed=5)
    params = solver.get_params()
    assert params["encoding"] == "jw"
    assert params["restarts"] == 3
    solver.set_params(encoding="compact", shots=500)
    assert solver.encoding == "compact"
    assert solver.shots == 500
    copy = clone(solver)
    assert copy.get_params() == solver.get_params()
    with pytest.raises(ValueError):
        solver.set_params(unknown_option=1)


def test_fit_rejects_non_model_input():
    solver = BlockVqeSolver()
    with pytest.raises(TypeError):
        solver.fit(np.zeros((3, 2)))


def test_score_requires_fit():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        BlockVqeSolver().score(dimer(1.0))


def test_warm_start_chains_a_coupling_sweep():
    solver = BlockVqeSolver(restarts=2, seed=2, warm_start=True)
    solver.fit(dimer(0.0))
    # with one restart every later fit starts from the carried solution
    solver.set_params(restarts=1)
    for onsite in (0.5, 1.0):
        solver.fit(dimer(onsite))
        expected = exact_ground(dimer(onsite)).energy
        assert abs(solver.energy_ - expected) < 1e-7
        assert solver.converged_


def test_warm_start_falls_back_when_the_shape_changes():
    solver = BlockVqeSolver(restarts=1, seed=8, warm_start=True)
    solver.fit(dimer(1.0))
    bigger = HubbardParams(
        sites=4, hopping=-1.0, onsite=1.0, n_up=2, n_down=2, periodic=True
    )
    solver.fit(bigger)
    assert solver.alpha_.shape == (6,)
    expected = exact_ground(bigger).energy
    assert abs(solver.energy_ - expected) < 1e-6


def test_shot_mode_fit_is_seeded():
    params = dimer(2.0)
    common = dict(
        restarts=1, seed=21, shots=2000, max_iter=200, optimizer="spsa"
    )
    first = BlockVqeSolver(**common).fit(params)
    second = BlockVqeSolver(**common).fit(params)
    assert first.energy_ == second.energy_
    assert first.breakdown_.stderr is not None and first.breakdown_.stderr > 0.0


def test_custom_partition_fit_spans_all_sectors():
    params = dimer(3.0)
    candidates = [
        exact_ground(
            HubbardParams(
                sites=2, hopping=-1.0, onsite=3.0,
                n_up=n_up, n_down=n_down, periodic=False,
            )
        ).energy
        for n_up in range(3)
        for n_down in range(3)
    ]
    solver = BlockVqeSolver(set_a=(0, 2), restarts=2, seed=13)
    solver.fit(params)
    assert abs(solver.energy_ - min(candidates)) < 1e-7
    assert solver.scheme_.kind == "jw"
