"""Config-driven experiment driver with built-in self checks.

``blockvqe run sweep.cfg`` executes a coupling sweep of the block
eigensolver next to exact-diagonalization and mean-field baselines and
writes one CSV row per sweep point.  ``blockvqe verify sweep.cfg``
replays the identities the solver relies on (encoding spectra, the
ancilla bracket estimator, split reassembly, eigenvector embedding) for
the configured model and reports pass/fail per check.
"""

from __future__ import annotations

import argparse
import configparser
import contextlib
import json
import re
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .classical_sector import compute_factors, hopping_strings, sector_hopping_matrix
from .encoding import (
    compact_operator,
    encode_with_scheme,
    occupation_register_index,
    scheme_for,
)
from .fock import Configuration, OperatorString, enumerate_configs
from .model import HubbardParams, build_hubbard, split
from .oracle import exact_ground, mean_field, minimum_over_down_sectors
from .paulis import PauliSum
from .sim import ansatz_batch, offdiag_bracket
from .vqe import (
    EXACT,
    OptimizerOptions,
    SimMode,
    VariationalState,
    energy,
    energy_general,
    hubbard_operators,
    prepare_general,
    solve_hubbard,
    solve_hubbard_custom,
)

CSV_HEADER = "U,E_vqe,E_exact,E_meanfield,iterations,wall_time,converged"

ENCODINGS = ("compact", "jw", "parity", "bk")
OPTIMIZERS = ("nelder-mead", "spsa", "bfgs")

_MODEL_KEYS = ("sites", "hopping", "chem_potential", "n_up", "n_down", "periodic")
_SWEEP_KEYS = ("onsite",)
_METHOD_KEYS = (
    "split",
    "encoding",
    "fix_n_down",
    "ansatz_depth",
    "final_rotations",
    "optimizer",
    "max_iter",
    "restarts",
    "tol",
    "sim_mode",
    "seed",
    "mean_field",
    "record_timing",
    "run_log",
)

_BOOL_WORDS = {
    "true": True, "yes": True, "on": True, "1": True,
    "false": False, "no": False, "off": False, "0": False,
}


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class MethodConfig:
    """Solver settings from the ``[method]`` config section."""

    split: str = "spin"
    set_a: tuple[int, ...] | None = None
    encoding: str = "compact"
    fix_n_down: bool = True
    ansatz_depth: int = 2
    final_rotations: bool = True
    optimizer: str | None = None
    max_iter: int = 6000
    restarts: int = 4
    tol: float = 1e-9
    sim_kind: str = "exact"
    shots: int = 0
    seed: int | None = None
    mean_field: str = "restricted"
    record_timing: bool = False
    run_log: str | None = None


@dataclass(frozen=True)
class RunConfig:
    """A parsed and validated experiment description."""

    model: HubbardParams
    sweep: tuple[float, ...]
    method: MethodConfig


@dataclass(frozen=True)
class SweepRow:
    """One results line: energies and bookkeeping at a single U."""

    onsite: float
    e_vqe: float
    e_exact: float
    e_meanfield: float
    iterations: int
    wall_time: float
    converged: bool


def _to_int(field: str, raw: str) -> int:
    try:
        return int(raw.strip())
    except ValueError:
        raise ConfigError(field, f"expected an integer, got {raw!r}") from None


def _to_float(field: str, raw: str) -> float:
    try:
        return float(raw.strip())
    except ValueError:
        raise ConfigError(field, f"expected a number, got {raw!r}") from None


def _to_bool(field: str, raw: str) -> bool:
    word = raw.strip().lower()
    if word not in _BOOL_WORDS:
        raise ConfigError(field, f"expected a boolean, got {raw!r}")
    return _BOOL_WORDS[word]


def _section(parser: configparser.ConfigParser, name: str, known) -> dict[str, str]:
    if not parser.has_section(name):
        return {}
    values = dict(parser.items(name))
    for key in values:
        if key not in known:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return values


def _parse_model(raw: dict[str, str]) -> HubbardParams:
    for key in ("sites", "hopping", "n_up", "n_down"):
        if key not in raw:
            raise ConfigError(f"model.{key}", "missing required key")
    try:
        return HubbardParams(
            sites=_to_int("model.sites", raw["sites"]),
            hopping=_to_float("model.hopping", raw["hopping"]),
            onsite=0.0,
            chem_potential=_to_float(
                "model.chem_potential", raw.get("chem_potential", "0")
            ),
            n_up=_to_int("model.n_up", raw["n_up"]),
            n_down=_to_int("model.n_down", raw["n_down"]),
            periodic=_to_bool("model.periodic", raw.get("periodic", "true")),
        )
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError("model", str(err)) from None


def _parse_sweep(raw: dict[str, str]) -> tuple[float, ...]:
    words = [w for w in re.split(r"[,\s]+", raw.get("onsite", "").strip()) if w]
    if not words:
        raise ConfigError("sweep", "must list at least one onsite value")
    return tuple(_to_float("sweep.onsite", word) for word in words)


def _parse_split(raw: str, model: HubbardParams):
    word = raw.strip().lower()
    if word == "spin":
        return "spin", None
    if not word.startswith("custom"):
        raise ConfigError("method.split", f"expected spin or custom:<modes>, got {raw!r}")
    _, _, tail = word.partition(":")
    modes = tuple(
        _to_int("method.split", part) for part in re.split(r"[,\s]+", tail.strip()) if part
    )
    if not modes:
        raise ConfigError("method.split", "custom partition lists no modes")
    if len(set(modes)) != len(modes):
        raise ConfigError("method.split", "custom partition repeats a mode")
    if not all(0 <= m < model.mode_count for m in modes):
        raise ConfigError(
            "method.split",
            f"modes must lie in 0..{model.mode_count - 1}",
        )
    if len(modes) >= model.mode_count:
        raise ConfigError("method.split", "must leave at least one register mode")
    return "custom", tuple(sorted(modes))


def _parse_method(raw: dict[str, str], model: HubbardParams) -> MethodConfig:
    split_kind, set_a = _parse_split(raw.get("split", "spin"), model)
    encoding = raw.get("encoding", "jw" if set_a is not None else "compact").strip().lower()
    if encoding not in ENCODINGS:
        raise ConfigError("method.encoding", f"expected one of {ENCODINGS}, got {raw.get('encoding')!r}")
    if set_a is not None and encoding != "jw":
        raise ConfigError(
            "method.encoding",
            "a custom partition places the register modes under jw",
        )
    default_fix = encoding == "compact" and set_a is None
    fix_n_down = (
        _to_bool("method.fix_n_down", raw["fix_n_down"])
        if "fix_n_down" in raw
        else default_fix
    )
    if set_a is not None and fix_n_down:
        raise ConfigError(
            "method.fix_n_down",
            "a custom partition spans all particle sectors; set fix_n_down = false",
        )
    if set_a is None and encoding == "compact" and not fix_n_down:
        raise ConfigError(
            "method.fix_n_down",
            "the compact register encodes one fixed-number sector; set fix_n_down = true",
        )
    if encoding != "compact" and fix_n_down:
        raise ConfigError(
            "method.fix_n_down",
            "occupation registers measure the down count instead of fixing it; "
            "set fix_n_down = false",
        )
    if set_a is None:
        try:
            scheme_for(encoding, model.sites, model.n_down)
        except ValueError as err:
            raise ConfigError("method.encoding", str(err)) from None
    depth = _to_int("method.ansatz_depth", raw.get("ansatz_depth", "2"))
    if depth < 1:
        raise ConfigError("method.ansatz_depth", "must be at least 1")
    optimizer = raw.get("optimizer", "").strip().lower() or None
    if optimizer is not None and optimizer not in OPTIMIZERS:
        raise ConfigError(
            "method.optimizer", f"expected one of {OPTIMIZERS}, got {raw['optimizer']!r}"
        )
    max_iter = _to_int("method.max_iter", raw.get("max_iter", "6000"))
    if max_iter < 1:
        raise ConfigError("method.max_iter", "must be at least 1")
    restarts = _to_int("method.restarts", raw.get("restarts", "4"))
    if restarts < 1:
        raise ConfigError("method.restarts", "must be at least 1")
    tol = _to_float("method.tol", raw.get("tol", "1e-9"))
    if tol <= 0.0:
        raise ConfigError("method.tol", "must be positive")
    sim_word = raw.get("sim_mode", "exact").strip().lower()
    if sim_word == "exact":
        sim_kind, shots = "exact", 0
    else:
        match = re.fullmatch(r"shots\((\d+)\)", sim_word)
        if match is None:
            raise ConfigError(
                "method.sim_mode", f"expected exact or shots(<n>), got {raw.get('sim_mode')!r}"
            )
        sim_kind, shots = "shots", int(match.group(1))
        if shots < 1:
            raise ConfigError("method.sim_mode", "shot count must be positive")
    seed = _to_int("method.seed", raw["seed"]) if "seed" in raw else None
    flavor_default = "restricted" if model.n_up == model.n_down else "unrestricted"
    flavor = raw.get("mean_field", flavor_default).strip().lower()
    if flavor not in ("restricted", "unrestricted"):
        raise ConfigError(
            "method.mean_field",
            f"expected restricted or unrestricted, got {raw.get('mean_field')!r}",
        )
    if flavor == "restricted" and model.n_up != model.n_down:
        raise ConfigError(
            "method.mean_field", "restricted mean field needs n_up == n_down"
        )
    return MethodConfig(
        split=split_kind,
        set_a=set_a,
        encoding=encoding,
        fix_n_down=fix_n_down,
        ansatz_depth=depth,
        final_rotations=_to_bool(
            "method.final_rotations", raw.get("final_rotations", "true")
        ),
        optimizer=optimizer,
        max_iter=max_iter,
        restarts=restarts,
        tol=tol,
        sim_kind=sim_kind,
        shots=shots,
        seed=seed,
        mean_field=flavor,
        record_timing=_to_bool(
            "method.record_timing", raw.get("record_timing", "false")
        ),
        run_log=raw.get("run_log", "").strip() or None,
    )


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a run configuration file."""
    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        text = Path(path).read_text()
    except OSError as err:
        raise ConfigError("config", f"cannot read {path}: {err}") from None
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as err:
        raise ConfigError("config", str(err)) from None
    if parser.defaults():
        raise ConfigError("DEFAULT", "unknown section")
    for name in parser.sections():
        if name not in ("model", "sweep", "method"):
            raise ConfigError(name, "unknown section")
    for name in ("model", "sweep"):
        if not parser.has_section(name):
            raise ConfigError(name, "missing required section")
    model = _parse_model(_section(parser, "model", _MODEL_KEYS))
    sweep = _parse_sweep(_section(parser, "sweep", _SWEEP_KEYS))
    method = _parse_method(_section(parser, "method", _METHOD_KEYS), model)
    return RunConfig(model=model, sweep=sweep, method=method)


def format_row(row: SweepRow) -> str:
    """Render one CSV line with floats at 10 significant digits."""
    return ",".join(
        (
            f"{row.onsite:.10g}",
            f"{row.e_vqe:.10g}",
            f"{row.e_exact:.10g}",
            f"{row.e_meanfield:.10g}",
            str(row.iterations),
            f"{row.wall_time:.10g}",
            "true" if row.converged else "false",
        )
    )


def parse_row(line: str) -> SweepRow:
    parts = line.strip().split(",")
    if len(parts) != 7:
        raise ValueError(f"expected 7 fields, got {len(parts)}: {line!r}")
    if parts[6] not in ("true", "false"):
        raise ValueError(f"converged must be true or false, got {parts[6]!r}")
    return SweepRow(
        onsite=float(parts[0]),
        e_vqe=float(parts[1]),
        e_exact=float(parts[2]),
        e_meanfield=float(parts[3]),
        iterations=int(parts[4]),
        wall_time=float(parts[5]),
        converged=parts[6] == "true",
    )


def write_results(path: Path, rows) -> None:
    text = "\n".join([CSV_HEADER, *(format_row(row) for row in rows)]) + "\n"
    Path(path).write_text(text)


def read_results(path: Path) -> list[SweepRow]:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"missing results header in {path}")
    return [parse_row(line) for line in lines[1:] if line.strip()]


def comparable_exact(config: RunConfig, params: HubbardParams) -> float:
    """Exact energy of the part of Fock space the method can reach.

    The compact register is confined to one (n_up, n_down) sector; the
    jw register wanders over every down filling, parity and bk over the
    fillings of matching parity, and a custom partition spans all
    particle sectors, so each compares against its own exact minimum.
    """
    method = config.method
    if method.set_a is not None:
        return min(
            exact_ground(replace(params, n_up=up, n_down=down)).energy
            for up in range(params.sites + 1)
            for down in range(params.sites + 1)
        )
    if method.encoding == "compact":
        return exact_ground(params).energy
    if method.encoding == "jw":
        return minimum_over_down_sectors(params)[0]
    parity = -1 if params.n_down & 1 else 1
    return minimum_over_down_sectors(params, parity=parity)[0]


def execute_sweep(config: RunConfig, seed_override: int | None = None, progress=None):
    """Solve every sweep point, chaining warm starts between them.

    Returns the result rows together with the optimizer trace of each
    point.  After the first point the restart count halves (the warm
    start carries most of the information forward).
    """
    method = config.method
    seed = method.seed if seed_override is None else int(seed_override)
    rows: list[SweepRow] = []
    traces: list[list[float]] = []
    warm = None
    for index, onsite in enumerate(config.sweep):
        params = replace(config.model, onsite=onsite)
        point_seed = None if seed is None else seed + 7919 * index
        restarts = method.restarts if index == 0 else max(1, method.restarts // 2)
        options = OptimizerOptions(
            method=method.optimizer
            or ("spsa" if method.sim_kind == "shots" else "bfgs"),
            max_iter=method.max_iter,
            tol=method.tol,
            restarts=restarts,
            seed=point_seed,
        )
        mode = (
            EXACT
            if method.sim_kind == "exact"
            else SimMode("shots", shots=method.shots, seed=point_seed)
        )
        started = time.perf_counter()
        if method.set_a is not None:
            result = solve_hubbard_custom(
                params,
                set_a=method.set_a,
                ansatz_depth=method.ansatz_depth,
                final_rotations=method.final_rotations,
                mode=mode,
                options=options,
                warm_start=warm,
            )
        else:
            result = solve_hubbard(
                params,
                encoding=method.encoding,
                ansatz_depth=method.ansatz_depth,
                final_rotations=method.final_rotations,
                mode=mode,
                options=options,
                warm_start=warm,
            )
        wall = time.perf_counter() - started if method.record_timing else 0.0
        warm = result.state
        baseline = mean_field(params, method.mean_field)
        row = SweepRow(
            onsite=onsite,
            e_vqe=result.energy,
            e_exact=comparable_exact(config, params),
            e_meanfield=baseline.energy,
            iterations=result.iterations,
            wall_time=wall,
            converged=result.converged,
        )
        rows.append(row)
        traces.append(list(result.trace))
        if progress is not None:
            progress(row)
    return rows, traces


def run(
    config_path: str | Path,
    output_dir: str | Path | None = None,
    seed: int | None = None,
    threads: int | None = None,
    stream=None,
) -> Path:
    """Execute the configured sweep and write ``<config stem>.csv``."""
    stream = stream or sys.stdout
    config = load_config(config_path)
    out_dir = Path(output_dir) if output_dir is not None else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)

    def progress(row: SweepRow) -> None:
        print(
            f"  U = {row.onsite:g}: E_vqe = {row.e_vqe:.10g}, "
            f"E_exact = {row.e_exact:.10g}, E_mf = {row.e_meanfield:.10g} "
            f"({row.iterations} evaluations)",
            file=stream,
        )

    with _thread_limit(threads):
        rows, traces = execute_sweep(config, seed, progress)
    csv_path = out_dir / (Path(config_path).stem + ".csv")
    write_results(csv_path, rows)
    if config.method.run_log:
        log_path = out_dir / config.method.run_log
        payload = {
            "config": Path(config_path).name,
            "seed": seed if seed is not None else config.method.seed,
            "points": [
                {
                    "onsite": row.onsite,
                    "e_vqe": row.e_vqe,
                    "e_exact": row.e_exact,
                    "e_meanfield": row.e_meanfield,
                    "iterations": row.iterations,
                    "converged": row.converged,
                    "trace": trace,
                }
                for row, trace in zip(rows, traces)
            ],
        }
        log_path.write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote optimizer log to {log_path}", file=stream)
    print(f"wrote {len(rows)} rows to {csv_path}", file=stream)
    return csv_path


def _thread_limit(threads: int | None):
    if threads is None:
        return contextlib.nullcontext()
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return contextlib.nullcontext()
    return threadpool_limits(limits=int(threads))


# dense Fock-space helpers for the self checks, built from Kronecker
# products so they share no code with the production operators

_CREATE = np.array([[0.0, 0.0], [1.0, 0.0]])
_ANNIHILATE = _CREATE.T.copy()
_PARITY_MAT = np.diag([1.0, -1.0])


def _dense_mode_op(mode: int, modes: int, dagger: bool) -> np.ndarray:
    mat = np.eye(1)
    for k in range(modes):
        if k < mode:
            factor = _PARITY_MAT
        elif k == mode:
            factor = _CREATE if dagger else _ANNIHILATE
        else:
            factor = np.eye(2)
        mat = np.kron(factor, mat)
    return mat


def _dense_string(ops, modes: int, coefficient: complex) -> np.ndarray:
    mat = np.eye(1 << modes, dtype=complex) * coefficient
    for dagger, mode in ops:
        mat = mat @ _dense_mode_op(mode, modes, dagger)
    return mat


def _embedded_exact_state(exact, params: HubbardParams, kind: str, scheme):
    """ED amplitudes arranged as per-block register rows."""
    psi = exact.amplitudes
    alpha = np.linalg.norm(psi, axis=1)
    dim = 1 << scheme.qubit_count
    states = np.zeros((len(exact.up_configs), dim), dtype=complex)
    for r in range(len(exact.up_configs)):
        if alpha[r] <= 1e-14:
            states[r, 0] = 1.0
            continue
        row = psi[r] / alpha[r]
        for c, config in enumerate(exact.down_configs):
            if kind == "compact":
                index = c
            else:
                index = occupation_register_index(kind, config.bits, params.sites)
                index &= dim - 1
            states[r, index] = row[c]
    return alpha, states


def _check_encoding_spectra(params: HubbardParams):
    """Occupation encodings must agree on every sector spectrum."""
    sites, count = params.sites, params.n_down
    configs = enumerate_configs(sites, count)
    operators = [("T_down", hopping_strings(sites, params.periodic),
                  np.linalg.eigvalsh(sector_hopping_matrix(sites, count, params.periodic)))]
    for i in range(sites):
        string = OperatorString(((True, i), (False, i)))
        reference = np.sort([1.0 if c.occupied(i) else 0.0 for c in configs])
        operators.append((f"n_{i}", [string], reference))
    kinds = ["jw", "parity"]
    if sites & (sites - 1) == 0:
        kinds.append("bk")
    worst = 0.0
    for _, strings, reference in operators:
        for kind in kinds:
            scheme = scheme_for(kind, sites, count)
            dense = encode_with_scheme(strings, scheme).to_dense()
            dim = dense.shape[0]
            idx = [
                occupation_register_index(kind, c.bits, sites) & (dim - 1)
                for c in configs
            ]
            spectrum = np.linalg.eigvalsh(dense[np.ix_(idx, idx)])
            worst = max(worst, float(np.max(np.abs(spectrum - reference))))
    detail = f"{'/'.join(kinds)} sector spectra agree to {worst:.2e}"
    return worst < 1e-10, detail


def _check_compact_block(params: HubbardParams):
    """Compact operator must embed the sector matrix verbatim."""
    matrix = sector_hopping_matrix(params.sites, params.n_down, params.periodic)
    dense = compact_operator(matrix).to_dense()
    expected = np.zeros_like(dense)
    expected[: len(matrix), : len(matrix)] = matrix
    worst = float(np.max(np.abs(dense - expected)))
    return worst < 1e-12, f"sector block reproduced to {worst:.2e}"


def _random_pauli_sum(rng: np.random.Generator, qubits: int, terms: int) -> PauliSum:
    out: dict[str, complex] = {}
    for _ in range(terms):
        letters = "".join(rng.choice(list("IXYZ"), size=qubits))
        out[letters] = out.get(letters, 0.0) + complex(rng.normal())
    return PauliSum(out, qubits)


def _check_bracket_identity(ansatz, rng: np.random.Generator, triples: int = 60):
    """Ancilla estimator versus the direct statevector inner product."""
    worst = 0.0
    count = ansatz.param_count
    for _ in range(triples):
        theta_a = rng.uniform(-np.pi, np.pi, count)
        theta_b = rng.uniform(-np.pi, np.pi, count)
        op = _random_pauli_sum(rng, ansatz.data_qubits, 3)
        estimated = offdiag_bracket(ansatz, theta_a, theta_b, op)
        phi_a = ansatz_batch(ansatz, theta_a[None])[0]
        phi_b = ansatz_batch(ansatz, theta_b[None])[0]
        direct = complex(phi_b.conj() @ (op.to_dense() @ phi_a))
        worst = max(worst, abs(estimated - direct))
    return worst < 1e-10, f"{triples} random brackets agree to {worst:.2e}"


def _check_reassembly(params: HubbardParams, set_a):
    """The six split term groups must sum back to the Hamiltonian."""
    ham = build_hubbard(params)
    modes = ham.mode_count
    total = np.zeros((1 << modes, 1 << modes), dtype=complex)
    for term in split(ham, set_a).all_terms():
        total += _dense_string(term.a_ops + term.b_ops, modes, term.coefficient)
    reference = np.zeros_like(total)
    for string in ham.strings():
        reference += _dense_string(string.ops, modes, string.coefficient)
    worst = float(np.max(np.abs(total - reference)))
    return worst < 1e-12, f"term groups rebuild the Hamiltonian to {worst:.2e}"


def _check_truth_embedding(config: RunConfig, params: HubbardParams):
    """Injecting the ED eigenvector must reproduce the ED energy."""
    method = config.method
    exact = exact_ground(params)
    factors = compute_factors(params)
    ops = hubbard_operators(
        params, method.encoding, method.ansatz_depth, method.final_rotations
    )
    alpha, states = _embedded_exact_state(exact, params, method.encoding, ops.scheme)
    state = VariationalState(alpha, np.zeros((len(alpha), ops.ansatz.param_count)))
    value = energy(state, factors, ops, EXACT, block_states=states).total
    deviation = abs(value - exact.energy)
    return deviation < 1e-8, f"assembled energy off by {deviation:.2e}"


def _check_general_quotient(config: RunConfig, params: HubbardParams, rng):
    """Assembled split energy versus the dense Rayleigh quotient."""
    method = config.method
    ham = build_hubbard(params)
    set_a = method.set_a
    blocks = 1 << len(set_a)
    prepared = prepare_general(
        split(ham, set_a),
        [Configuration(bits, len(set_a)) for bits in range(blocks)],
        method.ansatz_depth,
        method.final_rotations,
    )
    dense = np.zeros((1 << ham.mode_count,) * 2, dtype=complex)
    for string in ham.strings():
        dense += _dense_string(string.ops, ham.mode_count, string.coefficient)
    worst = 0.0
    for _ in range(3):
        state = VariationalState(
            rng.uniform(-1, 1, blocks),
            rng.uniform(-2, 2, (blocks, prepared.ansatz.param_count)),
        )
        assembled = energy_general(state, prepared, EXACT).total
        normalized = state.normalized()
        registers = ansatz_batch(prepared.ansatz, normalized.angles)
        psi = np.zeros(1 << ham.mode_count, dtype=complex)
        for r, config_a in enumerate(prepared.a_configs):
            block = np.zeros_like(psi)
            for bits in range(registers.shape[1]):
                if registers[r, bits] == 0.0:
                    continue
                spread = 0
                for k, mode in enumerate(prepared.split.set_b):
                    if bits >> k & 1:
                        spread |= 1 << mode
                block[spread] += registers[r, bits]
            creations = tuple(
                (True, mode)
                for k, mode in enumerate(set_a)
                if config_a.occupied(k)
            )
            psi += normalized.alpha[r] * (
                _dense_string(creations, ham.mode_count, 1.0) @ block
            )
        quotient = float((psi.conj() @ dense @ psi).real)
        worst = max(worst, abs(assembled - quotient))
    return worst < 1e-10, f"split assembly matches the dense quotient to {worst:.2e}"


def verify(
    config_path: str | Path,
    seed: int | None = None,
    threads: int | None = None,
    stream=None,
) -> bool:
    """Replay the solver's supporting identities for one configuration."""
    stream = stream or sys.stdout
    config = load_config(config_path)
    method = config.method
    params = replace(config.model, onsite=config.sweep[0])
    rng_seed = seed if seed is not None else (method.seed or 0)
    rng = np.random.default_rng(rng_seed)

    if method.set_a is not None:
        prepared = prepare_general(
            split(build_hubbard(params), method.set_a),
            [
                Configuration(bits, len(method.set_a))
                for bits in range(1 << len(method.set_a))
            ],
            method.ansatz_depth,
            method.final_rotations,
        )
        scheme, ansatz = prepared.scheme, prepared.ansatz
        set_a = method.set_a
    else:
        ops = hubbard_operators(
            params, method.encoding, method.ansatz_depth, method.final_rotations
        )
        scheme, ansatz = ops.scheme, ops.ansatz
        set_a = tuple(range(params.sites))
    print(
        f"qubit budget: Q = {scheme.circuit_qubits} "
        f"({scheme.qubit_count} data + 1 ancilla)",
        file=stream,
    )

    checks = [("encoding spectra", *_check_encoding_spectra(params))]
    if method.encoding == "compact":
        checks.append(("compact block", *_check_compact_block(params)))
    checks.append(("bracket identity", *_check_bracket_identity(ansatz, rng)))
    checks.append(("split reassembly", *_check_reassembly(params, set_a)))
    if method.set_a is None:
        checks.append(("eigenvector embedding", *_check_truth_embedding(config, params)))
    else:
        checks.append(
            ("split energy quotient", *_check_general_quotient(config, params, rng))
        )

    all_passed = True
    for name, passed, detail in checks:
        print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", file=stream)
        all_passed = all_passed and passed
    print(
        f"{sum(p for _, p, _ in checks)}/{len(checks)} checks passed", file=stream
    )
    return all_passed


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="blockvqe",
        description="Block-split variational eigensolver for Hubbard rings",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    run_parser = commands.add_parser(
        "run", help="execute the configured sweep and write a results CSV"
    )
    verify_parser = commands.add_parser(
        "verify", help="replay the solver's supporting identities"
    )
    for sub in (run_parser, verify_parser):
        sub.add_argument("config", help="path to the run configuration file")
        sub.add_argument(
            "--seed", type=int, default=None, help="override the configured seed"
        )
        sub.add_argument(
            "--threads", type=int, default=None, help="cap BLAS thread pools"
        )
    run_parser.add_argument(
        "--output",
        default=None,
        metavar="DIR",
        help="directory for the results file (default: current directory)",
    )
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            run(args.config, args.output, args.seed, args.threads)
            return 0
        with _thread_limit(args.threads):
            return 0 if verify(args.config, args.seed) else 1
    except ConfigError as err:
        print(f"config error in {err}", file=sys.stderr)
        return 2
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
