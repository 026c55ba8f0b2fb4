"""Experiment orchestration: seeded grids, incremental persistence, resumable runs.

A run grid is the cross product of graphs, depths, optimizers, backends and
trials.  Every cell derives its own seed from the master seed and its
coordinates, so cells are independent, order-free, and reproducible.  Records
append to a JSONL journal as cells finish; the final CSV is written in grid
order once the grid is complete, which makes the CSV a pure function of the
config (the journal also lets interrupted runs resume without recompute).

The CSV wall_ms column is a deterministic placeholder (always 0) so double
runs are byte-identical; measured per-cell timings go to the metadata sidecar.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

from .errors import ConfigError, ContractViolation
from .gradients import NOISY, SHOTS, STATEVECTOR, Objective, make_parameter_shift
from .graphs import Graph, bits_to_index, enumerate_connected_graphs, load_graph, min_vertex_covers
from .hamiltonian import PenaltyWeights
from .noise import NoiseModel, load_calibration
from .optimizers import GRADIENT_BASED, METHODS, OptimizerConfig, minimize, normalize_method

OPTIMIZER_COMPARISON = "optimizer_comparison"
DEPTH_SWEEP = "depth_sweep"
SUCCESS_PROBABILITY = "success_probability"
EXPERIMENT_KINDS = (OPTIMIZER_COMPARISON, DEPTH_SWEEP, SUCCESS_PROBABILITY)

BACKEND_NAMES = (STATEVECTOR, SHOTS, NOISY)

CSV_HEADER = "graph_id,depth,optimizer,backend,trial,seed,final_expectation,success_prob,evals_used,wall_ms"


def stable_seed(*parts) -> int:
    """Platform-independent 63-bit seed derived from the joined parts."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


# ---------------------------------------------------------------------------
# Default problem instances.
#
# The depth-sweep trio are the first three connected 5-vertex 5-edge classes
# in enumeration order; the verification trio are the remaining two 5-edge
# classes plus the first 6-edge class (only five 5-edge classes exist).
# ---------------------------------------------------------------------------


def enumerated_graph_ids(n: int) -> list[tuple[str, Graph]]:
    """All connected classes on n vertices with ids n{n}e{m}-{index within edge count}."""
    out = []
    per_count: dict[int, int] = {}
    for g in enumerate_connected_graphs(n):
        m = len(g.edges)
        k = per_count.get(m, 0)
        per_count[m] = k + 1
        out.append((f"n{n}e{m}-{k}", g))
    return out


def depth_sweep_graphs() -> list[tuple[str, Graph]]:
    pool = [(gid, g) for gid, g in enumerated_graph_ids(5) if len(g.edges) == 5]
    return pool[:3]


def verification_graphs() -> list[tuple[str, Graph]]:
    five = [(gid, g) for gid, g in enumerated_graph_ids(5) if len(g.edges) == 5]
    six = [(gid, g) for gid, g in enumerated_graph_ids(5) if len(g.edges) == 6]
    return five[3:5] + six[:1]


# ---------------------------------------------------------------------------
# Single runs.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RunRecord:
    """One optimization outcome; the CSV row plus in-memory extras."""

    graph_id: str
    depth: int
    optimizer: str
    backend: str
    trial: int
    seed: int
    final_expectation: float
    success_prob: float | None
    evals_used: int
    wall_ms: int
    best_params: tuple[float, ...] = ()
    channel_expectation: float | None = None
    aborted: bool = False


def run_single(graph: Graph, graph_id: str, depth: int, optimizer: str, backend: str, *,
               seed: int, shots: int = 10000, weights: PenaltyWeights | None = None,
               noise: NoiseModel | None = None, eval_budget: int = 600,
               optimizer_options: dict | None = None, compute_success: bool = True,
               trial: int = 0) -> RunRecord:
    """One seeded optimization of one instance on one backend."""
    method = normalize_method(optimizer)
    if method not in METHODS:
        raise ContractViolation(
            f"unknown optimizer {optimizer!r}; valid methods: {', '.join(METHODS)}"
        )
    if backend not in BACKEND_NAMES:
        raise ContractViolation(f"unknown backend {backend!r}; valid backends: {', '.join(BACKEND_NAMES)}")
    weights = weights or PenaltyWeights()
    if backend == NOISY and noise is None:
        noise = NoiseModel.default()

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(stable_seed(seed, "init"))))
    x0 = rng.uniform(0.0, 2.0 * math.pi, size=2 * depth)
    obj = Objective(graph, weights, depth, backend, shots=shots,
                    seed=stable_seed(seed, "objective"), noise=noise)
    grad = make_parameter_shift(obj) if method in GRADIENT_BASED else None
    # On shot backends noise would trip the convergence tests, so disable them
    # and let every method spend its full budget.
    exact = backend == STATEVECTOR
    cfg = OptimizerConfig(
        method=method,
        eval_budget=eval_budget,
        seed=stable_seed(seed, "optimizer"),
        gtol=1e-8 if exact else 0.0,
        ftol=1e-10 if exact else 0.0,
        options=dict(optimizer_options or {}),
    )
    start = time.perf_counter()
    trace = minimize(obj, x0, cfg, grad)
    wall_ms = int(round((time.perf_counter() - start) * 1000))

    success = None
    if compute_success:
        success = success_probability(obj, trace.best_params, shots, stable_seed(seed, "success"))
    channel_expectation = obj.exact_expectation(trace.best_params) if backend == NOISY else None
    return RunRecord(
        graph_id=graph_id,
        depth=depth,
        optimizer=method,
        backend=backend,
        trial=trial,
        seed=seed,
        final_expectation=float(trace.best_value),
        success_prob=success,
        evals_used=trace.evaluations_used,
        wall_ms=wall_ms,
        best_params=tuple(float(v) for v in trace.best_params),
        channel_expectation=channel_expectation,
        aborted=trace.aborted,
    )


def success_probability(obj: Objective, params, shots: int, seed: int) -> float:
    """Probability mass the final state puts on the optimal covers.

    Exact diagonal on the statevector backend; relative frequency over `shots`
    samples on the shot backends (with readout errors on the noisy one).
    """
    solution = min_vertex_covers(obj.graph)
    cover_idx = np.array(sorted(bits_to_index(z) for z in solution.covers), dtype=np.int64)
    if obj.backend == STATEVECTOR:
        probs = obj.state_probs(params)
        return float(probs[cover_idx].sum())
    outcomes = obj.sample_outcomes(params, shots, seed)
    return float(np.isin(outcomes, cover_idx).mean())


# ---------------------------------------------------------------------------
# Experiment configuration.
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    kind: str
    master_seed: int
    graphs: list[tuple[str, Graph]]
    depths: list[int]
    optimizers: list[str]
    backends: list[str]
    shots: int = 10000
    trials: int = 1
    eval_budget: int = 600
    penalty_a: float = 2.0
    penalty_b: float = 1.0
    calibration: str | None = None
    noisy_optimizer: str = "spsa"
    exact_optimizer: str = "bfgs"
    optimizer_options: dict[str, dict] = field(default_factory=dict)

    def weights(self) -> PenaltyWeights:
        return PenaltyWeights(self.penalty_a, self.penalty_b)

    def noise(self) -> NoiseModel:
        if self.calibration:
            return load_calibration(self.calibration)
        return NoiseModel.default()


_CONFIG_KEYS = {
    "kind", "master_seed", "graphs", "depths", "optimizers", "backends", "shots",
    "trials", "eval_budget", "penalty_a", "penalty_b", "calibration",
    "noisy_optimizer", "exact_optimizer", "optimizer_options",
}

_DEFAULT_DEPTHS = {
    OPTIMIZER_COMPARISON: [1, 2, 3, 4, 5],
    DEPTH_SWEEP: list(range(1, 11)),
    SUCCESS_PROBABILITY: list(range(1, 11)),
}


def _resolve_graphs(spec, kind: str, base_dir: str, errors: list[str]) -> list[tuple[str, Graph]]:
    if spec is None:
        if kind == OPTIMIZER_COMPARISON:
            return enumerated_graph_ids(5)
        if kind == DEPTH_SWEEP:
            return depth_sweep_graphs()
        return verification_graphs()
    if not isinstance(spec, dict) or "source" not in spec:
        errors.append("graphs: must be a mapping with a 'source' key")
        return []
    source = spec["source"]
    if source == "files":
        unknown = set(spec) - {"source", "files"}
        if unknown:
            errors.append(f"graphs: unknown keys {sorted(unknown)}")
        files = spec.get("files") or []
        out = []
        for name in files:
            path = name if os.path.isabs(name) else os.path.join(base_dir, name)
            if not os.path.exists(path):
                errors.append(f"graphs.files: {name!r} does not exist")
                continue
            out.append((os.path.splitext(os.path.basename(name))[0], load_graph(path)))
        if not out and not errors:
            errors.append("graphs.files: list is empty")
        return out
    if source == "enumerated":
        unknown = set(spec) - {"source", "n", "edge_count", "indices"}
        if unknown:
            errors.append(f"graphs: unknown keys {sorted(unknown)}")
        n = int(spec.get("n", 5))
        pool = enumerated_graph_ids(n)
        if "edge_count" in spec:
            pool = [(gid, g) for gid, g in pool if len(g.edges) == int(spec["edge_count"])]
        if "indices" in spec:
            indices = list(spec["indices"])
            bad = [i for i in indices if not 0 <= int(i) < len(pool)]
            if bad:
                errors.append(f"graphs.indices: out of range {bad} (pool has {len(pool)} graphs)")
                return []
            pool = [pool[int(i)] for i in indices]
        if not pool:
            errors.append("graphs: selection is empty")
        return pool
    errors.append(f"graphs.source: must be 'enumerated' or 'files', got {source!r}")
    return []


def parse_experiment_config(raw: dict, base_dir: str = ".") -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    errors = [f"unknown key {key!r}" for key in sorted(set(raw) - _CONFIG_KEYS)]

    kind = raw.get("kind")
    if kind not in EXPERIMENT_KINDS:
        errors.append(f"kind: must be one of {EXPERIMENT_KINDS}, got {kind!r}")
        kind = OPTIMIZER_COMPARISON
    if "master_seed" not in raw:
        errors.append("master_seed: required (experiments must be seeded)")
    master_seed = int(raw.get("master_seed", 0))

    depths = raw.get("depths", _DEFAULT_DEPTHS[kind])
    if not isinstance(depths, list) or not depths or any(int(d) < 1 for d in depths):
        errors.append("depths: must be a nonempty list of integers >= 1")
        depths = [1]
    depths = [int(d) for d in depths]

    optimizers = [normalize_method(m) for m in raw.get("optimizers", list(METHODS))]
    for m in optimizers:
        if m not in METHODS:
            errors.append(f"optimizers: unknown method {m!r}; valid: {', '.join(METHODS)}")
    backends = list(raw.get("backends", [STATEVECTOR, SHOTS, NOISY] if kind == OPTIMIZER_COMPARISON
                    else [STATEVECTOR, NOISY]))
    for b in backends:
        if b not in BACKEND_NAMES:
            errors.append(f"backends: unknown backend {b!r}; valid: {', '.join(BACKEND_NAMES)}")

    trials = int(raw.get("trials", 1))
    if trials < 1:
        errors.append("trials: must be >= 1")
    shots = int(raw.get("shots", 10000))
    if shots < 1:
        errors.append("shots: must be >= 1")
    eval_budget = int(raw.get("eval_budget", 600))
    penalty_a = float(raw.get("penalty_a", 2.0))
    penalty_b = float(raw.get("penalty_b", 1.0))
    if not penalty_a > penalty_b > 0:
        errors.append("penalty weights: require penalty_a > penalty_b > 0")

    calibration = raw.get("calibration")
    if calibration is not None:
        calibration = calibration if os.path.isabs(calibration) else os.path.join(base_dir, calibration)
        if not os.path.exists(calibration):
            errors.append(f"calibration: file {raw.get('calibration')!r} does not exist")

    noisy_optimizer = normalize_method(raw.get("noisy_optimizer", "spsa"))
    exact_optimizer = normalize_method(raw.get("exact_optimizer", "bfgs"))
    for label, m in (("noisy_optimizer", noisy_optimizer), ("exact_optimizer", exact_optimizer)):
        if m not in METHODS:
            errors.append(f"{label}: unknown method {m!r}")

    optimizer_options = raw.get("optimizer_options", {}) or {}
    if not isinstance(optimizer_options, dict):
        errors.append("optimizer_options: must map method name to option mapping")
        optimizer_options = {}
    else:
        for key, value in optimizer_options.items():
            if normalize_method(key) not in METHODS:
                errors.append(f"optimizer_options: unknown method {key!r}")
            elif not isinstance(value, dict):
                errors.append(f"optimizer_options.{key}: must be a mapping")
        optimizer_options = {normalize_method(k): dict(v) for k, v in optimizer_options.items()
                             if isinstance(v, dict)}

    graphs = _resolve_graphs(raw.get("graphs"), kind, base_dir, errors)
    if errors:
        raise ConfigError("; ".join(errors))
    return ExperimentConfig(
        kind=kind, master_seed=master_seed, graphs=graphs, depths=depths,
        optimizers=optimizers, backends=backends, shots=shots, trials=trials,
        eval_budget=eval_budget, penalty_a=penalty_a, penalty_b=penalty_b,
        calibration=calibration, noisy_optimizer=noisy_optimizer,
        exact_optimizer=exact_optimizer, optimizer_options=optimizer_options,
    )


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML: {exc}") from None
    try:
        return parse_experiment_config(raw, base_dir=os.path.dirname(os.path.abspath(path)))
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# ---------------------------------------------------------------------------
# Grid execution.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    graph_id: str
    graph: Graph
    depth: int
    optimizer: str
    backend: str
    trial: int

    def key(self) -> str:
        return f"{self.graph_id}/{self.depth}/{self.optimizer}/{self.backend}/{self.trial}"


def enumerate_cells(cfg: ExperimentConfig) -> list[Cell]:
    cells = []
    for graph_id, graph in cfg.graphs:
        for depth in cfg.depths:
            for backend in cfg.backends:
                if cfg.kind == OPTIMIZER_COMPARISON:
                    methods = cfg.optimizers
                else:
                    methods = [cfg.noisy_optimizer if backend == NOISY else cfg.exact_optimizer]
                for method in methods:
                    for trial in range(cfg.trials):
                        cells.append(Cell(graph_id, graph, depth, method, backend, trial))
    return cells


def run_cell(cfg: ExperimentConfig, cell: Cell, noise: NoiseModel | None = None) -> RunRecord:
    seed = stable_seed(cfg.master_seed, cell.graph_id, cell.depth, cell.optimizer,
                       cell.backend, cell.trial)
    return run_single(
        cell.graph, cell.graph_id, cell.depth, cell.optimizer, cell.backend,
        seed=seed, shots=cfg.shots, weights=cfg.weights(),
        noise=noise if noise is not None else (cfg.noise() if cell.backend == NOISY else None),
        eval_budget=cfg.eval_budget,
        optimizer_options=cfg.optimizer_options.get(cell.optimizer),
        compute_success=cfg.kind == SUCCESS_PROBABILITY,
        trial=cell.trial,
    )


def _cell_worker(args) -> dict:
    cfg, cell = args
    return _record_to_json(run_cell(cfg, cell))


def _record_to_json(record: RunRecord) -> dict:
    return asdict(record)


def _record_from_json(data: dict) -> RunRecord:
    data = dict(data)
    data["best_params"] = tuple(data.get("best_params", ()))
    return RunRecord(**data)


def _format_float(x: float) -> str:
    return repr(float(x))


def record_csv_row(r: RunRecord) -> str:
    success = "" if r.success_prob is None else _format_float(r.success_prob)
    # wall_ms is written as 0: the CSV must be a pure function of the config
    # (byte-identical on reruns); measured timings live in the sidecar.
    return (
        f"{r.graph_id},{r.depth},{r.optimizer},{r.backend},{r.trial},{r.seed},"
        f"{_format_float(r.final_expectation)},{success},{r.evals_used},0"
    )


def write_records_csv(records: list[RunRecord], path) -> None:
    lines = [CSV_HEADER]
    lines.extend(record_csv_row(r) for r in records)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_records_csv(path) -> list[dict]:
    """Rows as dicts with numeric fields typed; success_prob is None when blank."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ContractViolation(f"{path}: missing or unexpected results header")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        out.append({
            "graph_id": parts[0],
            "depth": int(parts[1]),
            "optimizer": parts[2],
            "backend": parts[3],
            "trial": int(parts[4]),
            "seed": int(parts[5]),
            "final_expectation": float(parts[6]),
            "success_prob": float(parts[7]) if parts[7] else None,
            "evals_used": int(parts[8]),
            "wall_ms": int(parts[9]),
        })
    return out


def _sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def config_digest(cfg: ExperimentConfig) -> str:
    """Canonical hash of the fully resolved configuration (defaults included)."""
    payload = {
        "kind": cfg.kind,
        "master_seed": cfg.master_seed,
        "graphs": [(gid, g.n_vertices, list(g.edges)) for gid, g in cfg.graphs],
        "depths": cfg.depths,
        "optimizers": cfg.optimizers,
        "backends": cfg.backends,
        "shots": cfg.shots,
        "trials": cfg.trials,
        "eval_budget": cfg.eval_budget,
        "penalty_a": cfg.penalty_a,
        "penalty_b": cfg.penalty_b,
        "calibration": os.path.basename(cfg.calibration) if cfg.calibration else None,
        "noisy_optimizer": cfg.noisy_optimizer,
        "exact_optimizer": cfg.exact_optimizer,
        "optimizer_options": cfg.optimizer_options,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def run_experiment(cfg: ExperimentConfig, out_csv, jobs: int = 1, resume: bool = False,
                   max_cells: int | None = None, progress=None) -> list[RunRecord]:
    """Execute the grid, journaling each cell; write the CSV when complete.

    `max_cells` bounds how many pending cells run (used to test resume);
    `progress` is an optional callback(done, total).
    """
    from . import __version__

    out_csv = str(out_csv)
    journal_path = out_csv + ".journal.jsonl"
    cells = enumerate_cells(cfg)
    done: dict[str, dict] = {}
    if resume and os.path.exists(journal_path):
        with open(journal_path, "r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    data = json.loads(line)
                    done[data.pop("_key")] = data
    elif os.path.exists(journal_path):
        os.remove(journal_path)  # fresh run discards any stale journal
    pending = [c for c in cells if c.key() not in done]
    if max_cells is not None:
        pending = pending[:max_cells]

    total = len(cells)
    noise = cfg.noise() if any(c.backend == NOISY for c in cells) else None
    with open(journal_path, "a", encoding="utf-8") as journal:
        def commit(cell, data):
            entry = dict(data)
            entry["_key"] = cell.key()
            journal.write(json.dumps(entry) + "\n")
            journal.flush()
            done[cell.key()] = data
            if progress:
                progress(len(done), total)

        if jobs <= 1:
            for cell in pending:
                commit(cell, _record_to_json(run_cell(cfg, cell, noise)))
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                for cell, data in zip(pending, pool.map(_cell_worker, ((cfg, c) for c in pending))):
                    commit(cell, data)

    if len(done) < total:
        # interrupted (max_cells); leave the journal for resume
        return [_record_from_json(done[c.key()]) for c in cells if c.key() in done]

    records = [_record_from_json(done[c.key()]) for c in cells]
    write_records_csv(records, out_csv)
    meta = {
        "code_version": __version__,
        "kind": cfg.kind,
        "master_seed": cfg.master_seed,
        "records": len(records),
        "config_sha256": config_digest(cfg),
        "calibration_sha256": _sha256_file(cfg.calibration) if cfg.calibration else "builtin-default",
        "timings_ms": {c.key(): done[c.key()]["wall_ms"] for c in cells},
        "total_wall_ms": sum(done[c.key()]["wall_ms"] for c in cells),
    }
    with open(out_csv + ".meta.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.remove(journal_path)
    return records


def _run_kind(kind: str, cfg: ExperimentConfig, out_csv, **kwargs) -> list[RunRecord]:
    if cfg.kind != kind:
        raise ContractViolation(f"config kind is {cfg.kind!r}, expected {kind!r}")
    return run_experiment(cfg, out_csv, **kwargs)


def run_optimizer_comparison(cfg: ExperimentConfig, out_csv, **kwargs) -> list[RunRecord]:
    """Full {graphs} x {depths} x {optimizers} x {backends} x {trials} grid."""
    return _run_kind(OPTIMIZER_COMPARISON, cfg, out_csv, **kwargs)


def run_depth_sweep(cfg: ExperimentConfig, out_csv, **kwargs) -> list[RunRecord]:
    """Per graph and depth: repeated optimizations, one method per backend."""
    return _run_kind(DEPTH_SWEEP, cfg, out_csv, **kwargs)


def run_success_probability(cfg: ExperimentConfig, out_csv, **kwargs) -> list[RunRecord]:
    """Depth sweep that also records the probability mass on optimal covers."""
    return _run_kind(SUCCESS_PROBABILITY, cfg, out_csv, **kwargs)


# ---------------------------------------------------------------------------
# Aggregation (box-plot statistics).
# ---------------------------------------------------------------------------

SUMMARY_FIELDS = ("count", "mean", "std", "min", "q1", "median", "q3", "max")


def _summary(values: np.ndarray) -> dict:
    q1, median, q3 = np.percentile(values, [25, 50, 75])
    return {
        "count": int(values.size),
        "mean": float(values.mean()),
        "std": float(values.std()),
        "min": float(values.min()),
        "q1": float(q1),
        "median": float(median),
        "q3": float(q3),
        "max": float(values.max()),
    }


def aggregate(records, group_by: tuple[str, ...]) -> list[dict]:
    """Per-group box statistics of final_expectation (and success_prob when present).

    `records` may be RunRecord objects or dicts from `read_records_csv`.
    """
    rows = [asdict(r) if isinstance(r, RunRecord) else dict(r) for r in records]
    if not rows:
        raise ContractViolation("aggregate needs at least one record")
    for key in group_by:
        if key not in rows[0]:
            raise ContractViolation(f"unknown group-by key {key!r}")
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in group_by), []).append(row)
    out = []
    for key in sorted(groups, key=lambda k: tuple(str(v) for v in k)):
        members = groups[key]
        entry = dict(zip(group_by, key))
        entry.update(_summary(np.array([m["final_expectation"] for m in members], dtype=float)))
        success = [m["success_prob"] for m in members if m.get("success_prob") is not None]
        if success:
            sp = _summary(np.array(success, dtype=float))
            entry.update({f"success_{k}": v for k, v in sp.items()})
        out.append(entry)
    return out
