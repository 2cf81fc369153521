"""Energy assembly and minimization for the block-split eigensolver.

The variational state is a real amplitude per enumerated block plus one
circuit parameter vector per block.  For the Hubbard spin partition the
energy assembles from classically tabulated spin-up factors and quantum
brackets of encoded spin-down operators:

    E = sum_r a_r^2 [ eps (N_up + <N_down>_r) + t <T_down>_r
                      + U sum_i occ_ri <n_i>_r ]
        + t sum_{r<c} a_r a_c T_rc 2 Re <Phi_r|P|Phi_c>
        + pad sum_r a_r^2 (1 - <P>_r)

where P projects onto the physical span of the register (the identity
for occupation encodings) and the last term charges any amplitude the
compact register leaks outside the encoded sector, keeping the assembly
variational.  Off-diagonal brackets come from the ancilla circuit, so
nothing here needs amplitudes that hardware could not estimate.

``energy_general`` assembles an arbitrary split Hamiltonian instead:
for every block pair the A-side bracket of each term is a classical
number, signs from commuting B factors past the A configuration are
(-1)**N_A for odd B counts, and the B-side strings are encoded onto the
register and evaluated in one bracket per pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import sim
from .classical_sector import (
    ClassicalFactors,
    hopping_strings,
    nonzero_blocks,
    sector_hopping_matrix,
)
from .encoding import (
    EncodingScheme,
    compact_operator,
    encode_with_scheme,
    scheme_for,
)
from .fock import Configuration, OperatorString, enumerate_configs, matrix_element
from .model import HubbardParams, SplitHamiltonian
from .paulis import PauliSum
from .sim import AnsatzSpec


@dataclass
class VariationalState:
    """Block amplitudes and per-block circuit parameters."""

    alpha: np.ndarray
    angles: np.ndarray

    def __post_init__(self) -> None:
        self.alpha = np.asarray(self.alpha, dtype=float)
        self.angles = np.asarray(self.angles, dtype=float)
        if self.alpha.ndim != 1:
            raise ValueError("alpha must be a vector")
        if self.angles.ndim != 2 or self.angles.shape[0] != self.alpha.shape[0]:
            raise ValueError("angles must be (blocks, params)")

    @property
    def blocks(self) -> int:
        return self.alpha.shape[0]

    def normalized(self) -> "VariationalState":
        norm = float(np.linalg.norm(self.alpha))
        if norm < 1e-12:
            alpha = np.full(self.blocks, 1.0 / math.sqrt(self.blocks))
        else:
            alpha = self.alpha / norm
        return VariationalState(alpha, self.angles.copy())

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.alpha, self.angles.ravel()])

    def with_flat(self, vector: np.ndarray) -> "VariationalState":
        blocks, params = self.angles.shape
        vector = np.asarray(vector, dtype=float)
        if vector.shape != (blocks + blocks * params,):
            raise ValueError("flat vector length mismatch")
        return VariationalState(
            vector[:blocks], vector[blocks:].reshape(blocks, params)
        )


@dataclass(frozen=True)
class SimMode:
    """How register brackets are evaluated: exact statevector or sampled."""

    kind: str = "exact"
    shots: int = 0
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exact", "shots"):
            raise ValueError(f"unknown simulation mode {self.kind!r}")
        if self.kind == "shots" and self.shots < 1:
            raise ValueError("shot mode needs a positive shot count")


EXACT = SimMode("exact")


def default_pad_energy(params: HubbardParams) -> float:
    """Penalty safely above the sector spectrum for compact-register leakage."""
    return (
        abs(params.chem_potential) + 4.0 * abs(params.hopping) + abs(params.onsite)
    ) * params.sites


@dataclass
class HubbardOperators:
    """Encoded spin-down operators plus the ansatz acting on the register."""

    params: HubbardParams
    scheme: EncodingScheme
    ansatz: AnsatzSpec
    t_down: PauliSum
    site_numbers: list[PauliSum]
    overlap: PauliSum
    fixed_n_down: int | None
    pad_energy: float

    @property
    def block_pair_ops(self) -> tuple[PauliSum, PauliSum]:
        return self.overlap.with_ancilla("X"), self.overlap.with_ancilla("Y")


def hubbard_operators(
    params: HubbardParams,
    encoding: str = "compact",
    ansatz_depth: int = 2,
    final_rotations: bool = False,
    entangler: tuple[tuple[int, int], ...] | None = None,
    pad_energy: float | None = None,
) -> HubbardOperators:
    """Encode the spin-down part of the Hubbard Hamiltonian for a register."""
    sites = params.sites
    scheme = scheme_for(encoding, sites, params.n_down)
    if pad_energy is None:
        pad_energy = default_pad_energy(params)
    number_strings = [
        OperatorString(((True, i), (False, i))) for i in range(sites)
    ]
    if encoding == "compact":
        configs = enumerate_configs(sites, params.n_down)
        occupations = np.array([c.occupations() for c in configs], dtype=float)
        t_down = compact_operator(
            sector_hopping_matrix(sites, params.n_down, params.periodic)
        )
        site_numbers = [
            compact_operator(np.diag(occupations[:, i])) for i in range(sites)
        ]
        overlap = compact_operator(np.eye(len(configs)))
        fixed_n_down = params.n_down
    else:
        t_down = encode_with_scheme(hopping_strings(sites, params.periodic), scheme)
        site_numbers = [encode_with_scheme([s], scheme) for s in number_strings]
        overlap = PauliSum.identity(scheme.qubit_count)
        # occupation registers wander across down sectors (jw) or within a
        # parity class (parity, bk), so the down count must be measured
        fixed_n_down = None
    ansatz = AnsatzSpec(scheme.qubit_count, ansatz_depth, entangler, final_rotations)
    return HubbardOperators(
        params, scheme, ansatz, t_down, site_numbers, overlap, fixed_n_down,
        float(pad_energy),
    )


@dataclass
class EnergyBreakdown:
    """Assembled energy with its contributions by Hamiltonian piece."""

    total: float
    pieces: dict[str, float]
    stderr: float | None = None


def _block_states(
    ops: HubbardOperators, state: VariationalState, block_states
) -> np.ndarray:
    if block_states is not None:
        block_states = np.asarray(block_states, dtype=complex)
        expected = (state.blocks, 1 << ops.scheme.qubit_count)
        if block_states.shape != expected:
            raise ValueError(f"block states must have shape {expected}")
        return block_states
    return sim.ansatz_batch(ops.ansatz, state.angles)


def _pair_brackets_exact(
    ops: HubbardOperators,
    state: VariationalState,
    states: np.ndarray,
    pairs: list[tuple[int, int]],
    injected: bool,
) -> np.ndarray:
    """Re <Phi_r|P|Phi_c> for each block pair via the ancilla circuit."""
    if not pairs:
        return np.zeros(0)
    op_x = ops.overlap.with_ancilla("X")
    if injected:
        stacked = np.stack(
            [sim.stack_states(states[c], states[r]) for r, c in pairs]
        )
    else:
        rows = np.array([r for r, _ in pairs])
        cols = np.array([c for _, c in pairs])
        stacked = sim.controlled_ansatz_batch(
            ops.ansatz, state.angles[cols], state.angles[rows]
        )
    return sim.expect_array(stacked, op_x).real


def energy(
    state: VariationalState,
    factors: ClassicalFactors,
    ops: HubbardOperators,
    mode: SimMode = EXACT,
    block_states: np.ndarray | None = None,
) -> EnergyBreakdown:
    """Assembled Hubbard energy of a (normalized) variational state.

    ``block_states`` bypasses the ansatz and evaluates the same
    assembly on explicitly given register amplitudes, one row per
    block; the off-diagonal brackets then use stacked ancilla states.
    """
    state = state.normalized()
    _check_shapes(state, factors, ops, block_states)
    states = _block_states(ops, state, block_states)
    pairs = nonzero_blocks(factors)
    if mode.kind == "exact":
        return _energy_exact(state, factors, ops, states, pairs, block_states is not None)
    return _energy_shots(state, factors, ops, states, pairs, mode, block_states is not None)


def _check_shapes(state, factors, ops, block_states) -> None:
    if state.blocks != factors.block_count:
        raise ValueError("variational state and factors disagree on block count")
    if block_states is None and state.angles.shape[1] != ops.ansatz.param_count:
        raise ValueError(
            f"expected {ops.ansatz.param_count} angles per block, "
            f"got {state.angles.shape[1]}"
        )


def block_matrix(
    state: VariationalState,
    factors: ClassicalFactors,
    ops: HubbardOperators,
    mode: SimMode = EXACT,
    block_states: np.ndarray | None = None,
) -> np.ndarray:
    """Symmetric block-coupling matrix M with E(alpha) = alpha^T M alpha.

    Every entry is a measurable register bracket times classical
    factors, so the amplitudes can be eigensolved classically from one
    set of measurements instead of descended upon jointly.
    """
    _check_shapes(state, factors, ops, block_states)
    states = _block_states(ops, state, block_states)
    pairs = nonzero_blocks(factors)
    if mode.kind == "exact":
        t_vals = sim.expect_array(states, ops.t_down).real
        n_vals = np.stack(
            [sim.expect_array(states, op).real for op in ops.site_numbers], axis=1
        )
        ovl_diag = sim.expect_array(states, ops.overlap).real
        pair_re = _pair_brackets_exact(
            ops, state, states, pairs, block_states is not None
        )
    else:
        (t_vals, n_vals, ovl_diag, pair_re), _ = _sampled_brackets(
            state, ops, states, pairs, mode, block_states is not None
        )
    params = ops.params
    if ops.fixed_n_down is None:
        down_counts = n_vals.sum(axis=1)
    else:
        down_counts = np.full(state.blocks, float(ops.fixed_n_down))
    diag = (
        params.chem_potential * (factors.n_total + down_counts)
        + params.hopping * t_vals
        + params.onsite * np.sum(factors.occupations * n_vals, axis=1)
        + ops.pad_energy * (1.0 - ovl_diag)
        + params.hopping * np.diag(factors.t_matrix) * ovl_diag
    )
    matrix = np.diag(diag)
    for (r, c), value in zip(pairs, pair_re):
        coupling = params.hopping * factors.t_matrix[r, c] * value
        matrix[r, c] = coupling
        matrix[c, r] = coupling
    return matrix


def optimal_amplitudes(matrix: np.ndarray) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of the block matrix: best energy and amplitudes."""
    eigvals, eigvecs = np.linalg.eigh(matrix)
    return float(eigvals[0]), eigvecs[:, 0]


def _assemble(
    state: VariationalState,
    factors: ClassicalFactors,
    ops: HubbardOperators,
    t_vals: np.ndarray,
    n_vals: np.ndarray,
    ovl_diag: np.ndarray,
    pair_re: np.ndarray,
    pairs: list[tuple[int, int]],
) -> dict[str, float]:
    params = ops.params
    weight = state.alpha**2
    if ops.fixed_n_down is None:
        down_counts = n_vals.sum(axis=1)
    else:
        down_counts = np.full(state.blocks, float(ops.fixed_n_down))
    pieces = {
        "chem": params.chem_potential
        * float(np.dot(weight, factors.n_total + down_counts)),
        "down_hopping": params.hopping * float(np.dot(weight, t_vals)),
        "onsite": params.onsite
        * float(np.dot(weight, np.sum(factors.occupations * n_vals, axis=1))),
        "padding": ops.pad_energy * float(np.dot(weight, 1.0 - ovl_diag)),
    }
    diag_t = float(np.dot(weight, np.diag(factors.t_matrix) * ovl_diag))
    cross = 0.0
    for (r, c), value in zip(pairs, pair_re):
        cross += state.alpha[r] * state.alpha[c] * factors.t_matrix[r, c] * value
    pieces["up_hopping"] = params.hopping * (diag_t + 2.0 * cross)
    return pieces


def _energy_exact(state, factors, ops, states, pairs, injected) -> EnergyBreakdown:
    t_vals = sim.expect_array(states, ops.t_down).real
    n_vals = np.stack(
        [sim.expect_array(states, op).real for op in ops.site_numbers], axis=1
    )
    ovl_diag = sim.expect_array(states, ops.overlap).real
    pair_re = _pair_brackets_exact(ops, state, states, pairs, injected)
    pieces = _assemble(state, factors, ops, t_vals, n_vals, ovl_diag, pair_re, pairs)
    return EnergyBreakdown(float(sum(pieces.values())), pieces, None)


def _sampled_brackets(state, ops, states, pairs, mode, injected):
    """Every register bracket estimated from shots, with its variance."""
    rng = np.random.default_rng(mode.seed)
    blocks = state.blocks
    sites = ops.params.sites
    t_vals = np.zeros(blocks)
    t_vars = np.zeros(blocks)
    n_vals = np.zeros((blocks, sites))
    n_vars = np.zeros((blocks, sites))
    ovl_diag = np.zeros(blocks)
    ovl_vars = np.zeros(blocks)
    for r in range(blocks):
        register = sim.Statevector(states[r])
        t_vals[r], t_vars[r] = sim.sample_expect_with_variance(
            register, ops.t_down, mode.shots, rng
        )
        for i, op in enumerate(ops.site_numbers):
            n_vals[r, i], n_vars[r, i] = sim.sample_expect_with_variance(
                register, op, mode.shots, rng
            )
        ovl_diag[r], ovl_vars[r] = sim.sample_expect_with_variance(
            register, ops.overlap, mode.shots, rng
        )
    op_x = ops.overlap.with_ancilla("X")
    pair_re = np.zeros(len(pairs))
    pair_vars = np.zeros(len(pairs))
    for k, (r, c) in enumerate(pairs):
        if injected:
            stacked = sim.stack_states(states[c], states[r])
        else:
            stacked = sim.controlled_ansatz_batch(
                ops.ansatz, state.angles[c], state.angles[r]
            )[0]
        pair_re[k], pair_vars[k] = sim.sample_expect_with_variance(
            sim.Statevector(stacked), op_x, mode.shots, rng
        )
    values = (t_vals, n_vals, ovl_diag, pair_re)
    variances = (t_vars, n_vars, ovl_vars, pair_vars)
    return values, variances


def _energy_shots(state, factors, ops, states, pairs, mode, injected) -> EnergyBreakdown:
    params = ops.params
    weight = state.alpha**2
    values, variances = _sampled_brackets(state, ops, states, pairs, mode, injected)
    t_vals, n_vals, ovl_diag, pair_re = values
    t_vars, n_vars, ovl_vars, pair_vars = variances
    pieces = _assemble(state, factors, ops, t_vals, n_vals, ovl_diag, pair_re, pairs)
    # binomial variance of every sampled bracket, scaled by its multiplier
    variance = 0.0
    n_mult = params.onsite * factors.occupations + (
        params.chem_potential if ops.fixed_n_down is None else 0.0
    )
    variance += float(np.dot(weight**2, t_vars)) * params.hopping**2
    variance += float(np.sum((weight[:, None] * n_mult) ** 2 * n_vars))
    ovl_mult = weight * (
        ops.pad_energy - params.hopping * np.diag(factors.t_matrix)
    )
    variance += float(np.dot(ovl_mult**2, ovl_vars))
    for k, (r, c) in enumerate(pairs):
        mult = (
            2.0
            * params.hopping
            * state.alpha[r]
            * state.alpha[c]
            * factors.t_matrix[r, c]
        )
        variance += mult**2 * pair_vars[k]
    total = float(sum(pieces.values()))
    return EnergyBreakdown(total, pieces, math.sqrt(variance))


@dataclass
class GeneralOperators:
    """Per-block-pair encoded operators for an arbitrary split Hamiltonian."""

    split: SplitHamiltonian
    a_configs: list[Configuration]
    scheme: EncodingScheme
    ansatz: AnsatzSpec
    diag_ops: list[PauliSum]
    pair_ops: list[tuple[int, int, PauliSum]]


def prepare_general(
    split: SplitHamiltonian,
    a_configs: list[Configuration],
    ansatz_depth: int = 2,
    final_rotations: bool = False,
    entangler: tuple[tuple[int, int], ...] | None = None,
) -> GeneralOperators:
    """Reduce every block pair of a split Hamiltonian to a register operator.

    A-side brackets are evaluated classically in the local ordering of
    the A modes; B-side strings are Jordan-Wigner encoded in the local
    ordering of the B modes (the full occupation register, since an
    arbitrary split need not conserve any register symmetry).  Terms
    with an odd number of B factors pick up (-1)**N_A of the ket block.
    """
    a_rank = {mode: k for k, mode in enumerate(split.set_a)}
    b_rank = {mode: k for k, mode in enumerate(split.set_b)}
    modes_b = len(split.set_b)
    if modes_b == 0:
        raise ValueError("the register side of the split is empty")
    for config in a_configs:
        if config.mode_count != len(split.set_a):
            raise ValueError("a_configs must live on the A modes of the split")
    scheme = scheme_for("jw", modes_b, None)
    blocks = len(a_configs)
    zero = PauliSum.zero(modes_b)
    table = [[zero for _ in range(blocks)] for _ in range(blocks)]
    for term in split.all_terms():
        a_local = OperatorString(
            tuple((d, a_rank[mu]) for d, mu in term.a_ops), 1.0
        )
        b_local = [(d, b_rank[mu]) for d, mu in term.b_ops]
        encoded = encode_with_scheme(
            [OperatorString(tuple(b_local), 1.0)], scheme
        )
        for c, ket in enumerate(a_configs):
            sign = -1.0 if term.parity_sign and ket.count & 1 else 1.0
            for r, bra in enumerate(a_configs):
                amp = matrix_element(bra, a_local, ket)
                if amp == 0.0:
                    continue
                table[r][c] = table[r][c] + (term.coefficient * sign * amp) * encoded
    diag_ops = [table[r][r].prune() for r in range(blocks)]
    pair_ops = []
    for r in range(blocks):
        for c in range(r + 1, blocks):
            forward = table[r][c].prune()
            backward = table[c][r].prune()
            if not forward.allclose(backward.dagger(), tol=1e-10):
                raise ValueError(
                    f"block pair ({r}, {c}) operators are not Hermitian conjugates"
                )
            if forward.terms:
                pair_ops.append((r, c, forward))
    ansatz = AnsatzSpec(scheme.qubit_count, ansatz_depth, entangler, final_rotations)
    return GeneralOperators(split, a_configs, scheme, ansatz, diag_ops, pair_ops)


def _stacked_bracket(stacked: np.ndarray, op: PauliSum) -> complex:
    """<phi_b|op|phi_a> from the stacked state, term-linear in op."""
    x_val = sim.expect_array(stacked, op.with_ancilla("X"))
    y_val = sim.expect_array(stacked, op.with_ancilla("Y"))
    return complex(x_val - 1j * y_val)


def _general_entries(
    state: VariationalState,
    ops: GeneralOperators,
    mode: SimMode,
    block_states: np.ndarray | None,
) -> tuple[np.ndarray, list[tuple[int, int, float]]]:
    """Diagonal brackets and real pair brackets of the prepared operators."""
    if state.blocks != len(ops.a_configs):
        raise ValueError("variational state and prepared operators disagree")
    if mode.kind == "shots":
        raise NotImplementedError(
            "sampled evaluation is only wired up for the Hubbard assembly"
        )
    if block_states is not None:
        states = np.asarray(block_states, dtype=complex)
    else:
        states = sim.ansatz_batch(ops.ansatz, state.angles)
    diag = np.zeros(state.blocks)
    for r, op in enumerate(ops.diag_ops):
        if op.terms:
            diag[r] = float(sim.expect_array(states[r], op).real)
    couplings = []
    for r, c, op in ops.pair_ops:
        if block_states is not None:
            stacked = sim.stack_states(states[c], states[r])
        else:
            stacked = sim.controlled_ansatz_batch(
                ops.ansatz, state.angles[c], state.angles[r]
            )[0]
        couplings.append((r, c, _stacked_bracket(stacked, op).real))
    return diag, couplings


def energy_general(
    state: VariationalState,
    ops: GeneralOperators,
    mode: SimMode = EXACT,
    block_states: np.ndarray | None = None,
) -> EnergyBreakdown:
    """Assembled energy of an arbitrary split Hamiltonian."""
    state = state.normalized()
    diag, couplings = _general_entries(state, ops, mode, block_states)
    diagonal = float(np.dot(state.alpha**2, diag))
    cross = 0.0
    for r, c, value in couplings:
        cross += 2.0 * state.alpha[r] * state.alpha[c] * value
    total = diagonal + cross
    return EnergyBreakdown(
        float(total), {"diagonal": float(diagonal), "cross": float(cross)}, None
    )


def block_matrix_general(
    state: VariationalState,
    ops: GeneralOperators,
    mode: SimMode = EXACT,
    block_states: np.ndarray | None = None,
) -> np.ndarray:
    """Block-coupling matrix of a prepared split, as block_matrix does."""
    diag, couplings = _general_entries(state, ops, mode, block_states)
    matrix = np.diag(diag)
    for r, c, value in couplings:
        matrix[r, c] = value
        matrix[c, r] = value
    return matrix


@dataclass
class OptimizerOptions:
    """Optimizer protocol shared by the available methods.

    ``nelder-mead`` (simplex) and ``spsa`` (stochastic approximation,
    the noise-tolerant choice for sampled energies) are derivative
    free; ``bfgs`` uses finite-difference gradients and is the most
    reliable on noiseless objectives.  ``max_iter`` caps objective
    evaluations per optimizer round; a start reruns rounds from its own
    optimum until the value stalls.  ``restarts`` counts every start,
    the provided initial state included; later starts draw angles
    uniformly from (-init_scale, init_scale) and amplitudes uniformly
    before normalization.
    """

    method: str = "nelder-mead"
    max_iter: int = 6000
    tol: float = 1e-9
    restarts: int = 4
    seed: int | None = None
    init_scale: float = 0.1
    spsa_a: float = 0.2
    spsa_c: float = 0.15

    def __post_init__(self) -> None:
        if self.method not in ("nelder-mead", "spsa", "bfgs"):
            raise ValueError(f"unknown optimizer {self.method!r}")
        if self.restarts < 1:
            raise ValueError("at least one start is required")


@dataclass
class MinimizeResult:
    energy: float
    state: VariationalState
    trace: list[float]
    iterations: int
    converged: bool


def _random_start(template: VariationalState, rng) -> VariationalState:
    alpha = rng.uniform(-1.0, 1.0, size=template.blocks)
    angles = rng.uniform(-1.0, 1.0, size=template.angles.shape)
    return VariationalState(alpha, angles)


def _optimize_flat(objective_flat, starts, options, rng):
    """Run the chosen method from every start, polishing until it stalls.

    Deterministic methods restart from their own optimum until they
    report convergence, the value stops moving, or a round cap; the
    stochastic method runs its schedule twice instead.  Returns the
    best (value, point, success) triple together with the total
    evaluation count and the running-best trace.
    """
    trace: list[float] = []
    evaluations = 0

    def counted(x: np.ndarray) -> float:
        nonlocal evaluations
        value = float(objective_flat(x))
        evaluations += 1
        trace.append(min(value, trace[-1]) if trace else value)
        return value

    best: tuple[float, np.ndarray, bool] | None = None
    for x0 in starts:
        x0 = np.asarray(x0, dtype=float)
        if options.method == "spsa":
            for _ in range(2):
                x0, _ = _spsa(counted, x0, options, rng)
            value = counted(x0)
            success = True
        else:
            runner = _nelder_mead if options.method == "nelder-mead" else _bfgs
            success = False
            previous = None
            value = np.inf
            for _ in range(6):
                x0, flag = runner(counted, x0, options)
                value = counted(x0)
                if flag:
                    success = True
                    break
                if previous is not None and abs(previous - value) <= max(
                    options.tol, 1e-8
                ) * (1.0 + abs(value)):
                    # a full extra round failed to move the value, which
                    # is as converged as any optimizer flag can certify
                    success = True
                    break
                previous = value
        if best is None or value < best[0]:
            best = (value, x0, success)
    assert best is not None
    return best, evaluations, trace


def minimize(
    initial: VariationalState,
    objective,
    options: OptimizerOptions | None = None,
) -> MinimizeResult:
    """Minimize a scalar objective over block amplitudes and angles.

    The objective receives a VariationalState with normalized
    amplitudes.  Each start reruns the chosen method from its own
    optimum until the value stalls; the best start wins.
    """
    options = options or OptimizerOptions()
    rng = np.random.default_rng(options.seed)

    def objective_flat(x: np.ndarray) -> float:
        return float(objective(initial.with_flat(x).normalized()))

    starts = [initial.normalized().flatten()]
    for _ in range(options.restarts - 1):
        draw = _random_start(initial, rng).normalized().flatten()
        draw[initial.blocks:] *= options.init_scale
        starts.append(draw)
    best, evaluations, trace = _optimize_flat(objective_flat, starts, options, rng)
    state = initial.with_flat(best[1]).normalized()
    return MinimizeResult(best[0], state, trace, evaluations, best[2])


def _nelder_mead(objective_flat, x0, options):
    result = scipy.optimize.minimize(
        objective_flat,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": options.max_iter,
            "fatol": options.tol,
            "xatol": 1e-6,
            "adaptive": True,
        },
    )
    return result.x, bool(result.success)


def _bfgs(objective_flat, x0, options):
    # each gradient costs dim+1 evaluations, so convert the eval budget
    iterations = max(40, options.max_iter // (x0.size + 1))
    result = scipy.optimize.minimize(
        objective_flat,
        x0,
        method="BFGS",
        options={"maxiter": iterations, "gtol": max(options.tol, 1e-10)},
    )
    # a precision-loss stop at a tiny gradient is a converged run
    flat_gradient = result.jac is not None and np.linalg.norm(result.jac) < 1e-5
    return result.x, bool(result.success or flat_gradient)


def _spsa(objective_flat, x0, options, rng):
    """Simultaneous perturbation stochastic approximation descent."""
    x = np.array(x0, dtype=float)
    best_x = x.copy()
    best_val = objective_flat(x)
    stability = 0.1 * options.max_iter
    for k in range(options.max_iter):
        ck = options.spsa_c / (k + 1) ** 0.101
        ak = options.spsa_a / (k + 1 + stability) ** 0.602
        delta = rng.choice([-1.0, 1.0], size=x.shape)
        plus = objective_flat(x + ck * delta)
        minus = objective_flat(x - ck * delta)
        gradient = (plus - minus) / (2.0 * ck) * delta
        x = x - ak * gradient
        if k % 20 == 19:
            value = objective_flat(x)
            if value < best_val:
                best_val = value
                best_x = x.copy()
    value = objective_flat(x)
    if value < best_val:
        best_x = x
    return best_x, True


@dataclass
class SolveResult:
    """Outcome of one complete eigensolver run."""

    params: HubbardParams
    energy: float
    state: VariationalState
    breakdown: EnergyBreakdown
    iterations: int
    converged: bool
    trace: list[float] = field(repr=False, default_factory=list)
    scheme: EncodingScheme | None = None


def solve_hubbard(
    params: HubbardParams,
    encoding: str = "compact",
    ansatz_depth: int = 2,
    final_rotations: bool = False,
    entangler: tuple[tuple[int, int], ...] | None = None,
    pad_energy: float | None = None,
    mode: SimMode = EXACT,
    options: OptimizerOptions | None = None,
    warm_start: VariationalState | None = None,
) -> SolveResult:
    """Minimize the assembled Hubbard energy end to end.

    The outer optimizer walks the circuit angles only; at every step
    the block amplitudes are eigensolved from the measured block
    matrix, which is free given the same brackets the energy needs.
    A warm start replaces the first randomized start.  Without
    explicit options the method is bfgs for exact brackets and spsa
    for sampled ones; random starts cover the full angle range since
    rotations are 2*pi periodic.
    """
    from .classical_sector import compute_factors

    if options is None:
        method = "bfgs" if mode.kind == "exact" else "spsa"
        options = OptimizerOptions(method=method)
    factors = compute_factors(params)
    ops = hubbard_operators(
        params, encoding, ansatz_depth, final_rotations, entangler, pad_energy
    )
    blocks = factors.block_count

    def matrix_at(angles: np.ndarray) -> np.ndarray:
        probe = VariationalState(np.ones(blocks), angles)
        return block_matrix(probe, factors, ops, mode)

    best, state, evaluations, success, trace = _drive_angles(
        matrix_at, blocks, ops.ansatz.param_count, options, warm_start
    )
    breakdown = energy(state, factors, ops, mode)
    return SolveResult(
        params, best, state, breakdown, evaluations, success, trace, ops.scheme
    )


def solve_hubbard_custom(
    params: HubbardParams,
    set_a: tuple[int, ...],
    ansatz_depth: int = 2,
    final_rotations: bool = False,
    entangler: tuple[tuple[int, int], ...] | None = None,
    mode: SimMode = EXACT,
    options: OptimizerOptions | None = None,
    warm_start: VariationalState | None = None,
) -> SolveResult:
    """Minimize the Hubbard energy under an arbitrary mode partition.

    The blocks enumerate every configuration of the chosen A modes and
    the register holds the remaining modes under Jordan-Wigner, so the
    variational family spans all particle sectors; the comparable exact
    energy is the global ground energy over sectors.
    """
    from .model import build_hubbard, split as split_hamiltonian

    if options is None:
        method = "bfgs" if mode.kind == "exact" else "spsa"
        options = OptimizerOptions(method=method)
    prepared = prepare_general(
        split_hamiltonian(build_hubbard(params), tuple(set_a)),
        [Configuration(bits, len(set_a)) for bits in range(1 << len(set_a))],
        ansatz_depth,
        final_rotations,
        entangler,
    )
    blocks = len(prepared.a_configs)

    def matrix_at(angles: np.ndarray) -> np.ndarray:
        probe = VariationalState(np.ones(blocks), angles)
        return block_matrix_general(probe, prepared, mode)

    best, state, evaluations, success, trace = _drive_angles(
        matrix_at, blocks, prepared.ansatz.param_count, options, warm_start
    )
    breakdown = energy_general(state, prepared, mode)
    return SolveResult(
        params, best, state, breakdown, evaluations, success, trace, prepared.scheme
    )


def _drive_angles(matrix_at, blocks, param_count, options, warm_start):
    """Optimize angles under the eigensolved-amplitude objective."""
    shape = (blocks, param_count)
    rng = np.random.default_rng(options.seed)

    def objective_flat(flat: np.ndarray) -> float:
        return optimal_amplitudes(matrix_at(flat.reshape(shape)))[0]

    starts = []
    if warm_start is not None:
        if warm_start.angles.shape != shape:
            raise ValueError("warm start shape does not match the problem")
        starts.append(warm_start.angles.ravel().copy())
    while len(starts) < options.restarts:
        starts.append(rng.uniform(-np.pi, np.pi, blocks * param_count))
    best, evaluations, trace = _optimize_flat(objective_flat, starts, options, rng)
    angles = best[1].reshape(shape)
    _, alpha = optimal_amplitudes(matrix_at(angles))
    state = VariationalState(alpha, angles)
    return best[0], state, evaluations, best[2], trace
