"""Estimator-style front end wrapping the functional solver."""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .model import HubbardParams
from .vqe import EXACT, OptimizerOptions, SimMode, solve_hubbard, solve_hubbard_custom


class BlockVqeSolver(BaseEstimator):
    """Hubbard ground-state solver with a scikit-learn estimator API.

    The estimator holds the method configuration; ``fit`` takes the
    physical model as a HubbardParams instance and exposes the outcome
    through fitted attributes.  ``get_params``/``set_params`` and
    ``sklearn.base.clone`` behave as usual, which makes the solver easy
    to drop into parameter scans and model-selection tooling.

    Parameters
    ----------
    encoding:
        Register encoding for the spin-down modes: "compact", "jw",
        "parity", or "bk".  Ignored when ``set_a`` is given.
    set_a:
        Optional tuple of mode indices to enumerate classically instead
        of the spin-up set.  The remaining modes go on the register
        under Jordan-Wigner and the search spans all particle sectors.
    ansatz_depth:
        Number of rotation-plus-entangler iterations per block circuit.
    final_rotations:
        Append a trailing rotation layer after the last entangler.  On
        by default; without it the circuit family is too stiff to reach
        the sector ground state at depth 2.
    entangler:
        Optional CNOT layout as (control, target) pairs; defaults to
        the nearest-neighbour chain.
    pad_energy:
        Penalty assigned to unphysical register amplitudes under the
        compact encoding.  Defaults to a rigorous spectral bound.
    optimizer:
        "bfgs", "nelder-mead", or "spsa".  None picks BFGS for exact
        simulation and SPSA when sampling shots.
    max_iter:
        Energy evaluation budget per optimizer round; a start may run
        several rounds until its value stalls.
    tol:
        Convergence tolerance on the energy.
    restarts:
        Number of optimizer starts (the first is the warm start when
        one is available).
    shots:
        None runs exact statevector averages; an integer samples every
        bracket from that many measurement shots.
    seed:
        Seed for start generation and shot sampling.
    warm_start:
        When True, a repeated ``fit`` reuses the previous solution as
        the first optimizer start, which is the natural way to chain a
        coupling sweep.  Ignored when the problem shape changed.

    Attributes
    ----------
    energy_ : float
        Minimized variational energy.
    alpha_ : ndarray
        Optimal block amplitudes.
    angles_ : ndarray
        Optimal circuit angles, one row per block.
    breakdown_ : EnergyBreakdown
        Assembled energy pieces at the optimum.
    iterations_ : int
        Total energy evaluations spent.
    converged_ : bool
        Whether the winning start reported convergence.
    trace_ : list of float
        Running best energy per evaluation.
    scheme_ : EncodingScheme
        Register encoding actually used.
    result_ : SolveResult
        The full functional-core result.

    Examples
    --------
    >>> from blockvqe import BlockVqeSolver, HubbardParams
    >>> params = HubbardParams(sites=2, hopping=-1.0, onsite=4.0,
    ...                        n_up=1, n_down=1, periodic=False)
    >>> solver = BlockVqeSolver(restarts=2, seed=7).fit(params)
    >>> round(solver.energy_, 6)
    -0.828427
    """

    def __init__(
        self,
        encoding: str = "compact",
        set_a: tuple[int, ...] | None = None,
        ansatz_depth: int = 2,
        final_rotations: bool = True,
        entangler: tuple[tuple[int, int], ...] | None = None,
        pad_energy: float | None = None,
        optimizer: str | None = None,
        max_iter: int = 6000,
        tol: float = 1e-9,
        restarts: int = 4,
        shots: int | None = None,
        seed: int | None = None,
        warm_start: bool = False,
    ):
        self.encoding = encoding
        self.set_a = set_a
        self.ansatz_depth = ansatz_depth
        self.final_rotations = final_rotations
        self.entangler = entangler
        self.pad_energy = pad_energy
        self.optimizer = optimizer
        self.max_iter = max_iter
        self.tol = tol
        self.restarts = restarts
        self.shots = shots
        self.seed = seed
        self.warm_start = warm_start

    def fit(self, params: HubbardParams, y=None):
        """Minimize the energy of the given model.

        ``y`` is accepted for interface compatibility and ignored.
        """
        if not isinstance(params, HubbardParams):
            raise TypeError(
                "fit expects a HubbardParams instance, got "
                f"{type(params).__name__}"
            )
        if self.shots is None:
            mode = EXACT
        else:
            mode = SimMode("shots", shots=int(self.shots), seed=self.seed)
        method = self.optimizer
        if method is None:
            method = "spsa" if self.shots else "bfgs"
        options = OptimizerOptions(
            method=method,
            max_iter=self.max_iter,
            tol=self.tol,
            restarts=self.restarts,
            seed=self.seed,
        )
        warm = None
        if self.warm_start and hasattr(self, "result_"):
            warm = self.result_.state
        try:
            result = self._solve(params, mode, options, warm)
        except ValueError as err:
            if warm is None or "warm start" not in str(err):
                raise
            result = self._solve(params, mode, options, None)
        self.result_ = result
        self.energy_ = result.energy
        self.alpha_ = result.state.alpha
        self.angles_ = result.state.angles
        self.breakdown_ = result.breakdown
        self.iterations_ = result.iterations
        self.converged_ = result.converged
        self.trace_ = result.trace
        self.scheme_ = result.scheme
        return self

    def _solve(self, params, mode, options, warm):
        if self.set_a is not None:
            return solve_hubbard_custom(
                params,
                set_a=tuple(self.set_a),
                ansatz_depth=self.ansatz_depth,
                final_rotations=self.final_rotations,
                entangler=self.entangler,
                mode=mode,
                options=options,
                warm_start=warm,
            )
        return solve_hubbard(
            params,
            encoding=self.encoding,
            ansatz_depth=self.ansatz_depth,
            final_rotations=self.final_rotations,
            entangler=self.entangler,
            pad_energy=self.pad_energy,
            mode=mode,
            options=options,
            warm_start=warm,
        )

    def score(self, params: HubbardParams, y=None) -> float:
        """Return the negative fitted energy (higher is better)."""
        check_is_fitted(self, "energy_")
        return -self.energy_
