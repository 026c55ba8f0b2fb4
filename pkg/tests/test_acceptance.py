"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`.  Every test is deterministic
(fixed seeds); the statistical criteria report their margins.  The depth-sweep
criteria use the fast shot mode (2000 shots); the full 10000-shot mode runs
the same code path and is exercised by the default experiment configs.
"""

import itertools
import math
import time

import numpy as np

from qaoa_mvc.circuits import QaoaParams, build_qaoa_circuit
from qaoa_mvc.gradients import Objective, finite_difference_grad, parameter_shift_grad
from qaoa_mvc.graphs import (
    Graph,
    bits_to_index,
    enumerate_connected_graphs,
    index_to_bits,
    min_vertex_covers,
)
from qaoa_mvc.hamiltonian import PenaltyWeights, build_ising, classical_cost, diagonal
from qaoa_mvc.harness import (
    ExperimentConfig,
    depth_sweep_graphs,
    enumerate_cells,
    run_cell,
    run_experiment,
    verification_graphs,
)
from qaoa_mvc.noise import NoiseModel
from qaoa_mvc.optimizers import GRADIENT_BASED, METHODS, OptimizerConfig, minimize
from qaoa_mvc.simulator import (
    expectation_exact,
    expectation_from_counts,
    run_density_matrix,
    run_statevector,
    sample,
)

W = PenaltyWeights(2.0, 1.0)


def report(criterion, label, detail=""):
    print(f"\n[acceptance] criterion {criterion} ({label}): PASS {detail}".rstrip())


def pooled_se(a, b):
    return math.sqrt(np.var(a, ddof=1) / len(a) + np.var(b, ddof=1) / len(b))


# -- 1 ------------------------------------------------------------------------


def brute_force_connected_classes(n):
    vertices = list(range(n))
    all_edges = list(itertools.combinations(vertices, 2))
    perms = list(itertools.permutations(vertices))
    seen = set()
    for r in range(len(all_edges) + 1):
        for chosen in itertools.combinations(all_edges, r):
            adj = {v: set() for v in vertices}
            for u, v in chosen:
                adj[u].add(v)
                adj[v].add(u)
            reached, stack = {0}, [0]
            while stack:
                for w in adj[stack.pop()]:
                    if w not in reached:
                        reached.add(w)
                        stack.append(w)
            if len(reached) != n:
                continue
            seen.add(min(tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in chosen))
                         for p in perms))
    return len(seen)


def test_c01_graph_census():
    start = time.perf_counter()
    counts = [len(enumerate_connected_graphs(n)) for n in range(1, 6)]
    elapsed = time.perf_counter() - start
    assert counts == [1, 1, 2, 6, 21]
    oracle = [brute_force_connected_classes(n) for n in range(1, 5)]
    assert oracle == [1, 1, 2, 6]
    assert elapsed < 1.0
    report(1, "graph census", f"counts={counts} in {elapsed:.2f}s")


# -- 2 ------------------------------------------------------------------------


def test_c02_hamiltonian_oracle_equivalence():
    start = time.perf_counter()
    for g in enumerate_connected_graphs(5):
        diag = diagonal(build_ising(g, W))
        for z in range(32):
            assert abs(diag[z] - classical_cost(g, W, index_to_bits(z, 5))) <= 1e-12
        argmin = {int(i) for i in np.flatnonzero(np.abs(diag - diag.min()) <= 1e-12)}
        assert argmin == {bits_to_index(c) for c in min_vertex_covers(g).covers}
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    report(2, "hamiltonian oracle equivalence", f"21 graphs x 32 states in {elapsed:.2f}s")


# -- 3 ------------------------------------------------------------------------


def test_c03_backend_agreement():
    start = time.perf_counter()
    gen = np.random.Generator(np.random.PCG64(303))
    pool = enumerate_connected_graphs(5)
    worst = 0.0
    for _ in range(50):
        g = pool[int(gen.integers(len(pool)))]
        p = int(gen.integers(1, 4))
        params = QaoaParams(tuple(gen.uniform(0, 2 * np.pi, p)),
                            tuple(gen.uniform(0, 2 * np.pi, p)))
        h = build_ising(g, W)
        c = build_qaoa_circuit(h, params)
        gap = abs(expectation_exact(run_statevector(c), h)
                  - expectation_exact(run_density_matrix(c, NoiseModel.zero()), h))
        worst = max(worst, gap)
        assert gap < 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    report(3, "backend agreement", f"max gap {worst:.2e} over 50 cases in {elapsed:.1f}s")


# -- 4 ------------------------------------------------------------------------


def test_c04_gradient_correctness():
    start = time.perf_counter()
    gen = np.random.Generator(np.random.PCG64(404))
    pool = enumerate_connected_graphs(5)
    worst = 0.0
    for _ in range(20):
        g = pool[int(gen.integers(len(pool)))]
        depth = int(gen.integers(1, 4))
        obj = Objective(g, W, depth, "statevector")
        x = gen.uniform(0, 2 * np.pi, 2 * depth)
        gap = float(np.max(np.abs(parameter_shift_grad(obj, x)
                                  - finite_difference_grad(obj, x, 1e-5))))
        worst = max(worst, gap)
        assert gap < 1e-5
    obj = Objective(pool[0], W, 2, "statevector")
    beta_grad = parameter_shift_grad(obj, np.array([0.0, 0.0, 0.9, 1.7]))[2:]
    assert np.max(np.abs(beta_grad)) < 1e-10
    elapsed = time.perf_counter() - start
    assert elapsed < 30.0
    report(4, "gradient correctness", f"max PS-FD gap {worst:.2e} in {elapsed:.1f}s")


# -- 5 ------------------------------------------------------------------------


def test_c05_shot_noise_scaling():
    start = time.perf_counter()
    cycle5 = Graph(5, ((0, 1), (0, 4), (1, 2), (2, 3), (3, 4)))
    h = build_ising(cycle5, W)
    state = run_statevector(build_qaoa_circuit(h, QaoaParams((0.5, 1.1), (0.8, 0.3))))
    shot_grid = [100, 1000, 10000, 100000]
    errors = []
    for shots in shot_grid:
        estimates = [
            expectation_from_counts(sample(state, shots, seed=1000 * shots + k), cycle5, W)
            for k in range(100)
        ]
        errors.append(float(np.std(estimates, ddof=1)))
    slope = float(np.polyfit(np.log(shot_grid), np.log(errors), 1)[0])
    elapsed = time.perf_counter() - start
    assert -0.6 <= slope <= -0.4
    assert elapsed < 60.0
    report(5, "shot-noise scaling", f"slope {slope:.3f} in {elapsed:.1f}s")


# -- 6 ------------------------------------------------------------------------


def test_c06_statevector_depth_trend():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        kind="depth_sweep", master_seed=2025, graphs=depth_sweep_graphs(),
        depths=list(range(1, 11)), optimizers=[], backends=["statevector"],
        trials=20, eval_budget=50000, exact_optimizer="bfgs",
    )
    by_depth = {}
    for cell in enumerate_cells(cfg):
        by_depth.setdefault(cell.depth, []).append(run_cell(cfg, cell).final_expectation)
    means = [float(np.mean(by_depth[p])) for p in range(1, 11)]
    for p in range(9):
        slack = pooled_se(by_depth[p + 1], by_depth[p + 2])
        assert means[p + 1] <= means[p] + slack, (
            f"mean rose from depth {p + 1} ({means[p]:.3f}) to {p + 2} "
            f"({means[p + 1]:.3f}) beyond one pooled SE ({slack:.3f})"
        )
    elapsed = time.perf_counter() - start
    report(6, "statevector depth trend",
           f"means {' '.join(f'{m:.2f}' for m in means)} in {elapsed:.0f}s")


# -- 7 ------------------------------------------------------------------------


def test_c07_noisy_depth_non_monotonicity():
    start = time.perf_counter()
    cfg = ExperimentConfig(
        kind="depth_sweep", master_seed=411, graphs=depth_sweep_graphs()[:1],
        depths=list(range(1, 11)), optimizers=[], backends=["noisy"],
        trials=30, eval_budget=600, shots=2000, noisy_optimizer="spsa",
    )
    by_depth = {}
    for cell in enumerate_cells(cfg):
        by_depth.setdefault(cell.depth, []).append(run_cell(cfg, cell).final_expectation)
    means = [float(np.mean(by_depth[p])) for p in range(1, 11)]
    p_star = int(np.argmin(means)) + 1
    assert 2 <= p_star <= 9, f"noisy minimum sits at depth {p_star}"
    slack = pooled_se(by_depth[10], by_depth[p_star])
    assert means[9] >= means[p_star - 1] + slack, (
        f"depth-10 mean {means[9]:.3f} does not exceed the depth-{p_star} mean "
        f"{means[p_star - 1]:.3f} by one pooled SE ({slack:.3f})"
    )
    elapsed = time.perf_counter() - start
    report(7, "noisy depth non-monotonicity",
           f"p*={p_star}, depth-10 excess {means[9] - means[p_star - 1]:.3f} "
           f"(SE {slack:.3f}), 2000-shot fast mode, in {elapsed:.0f}s")


# -- 8 ------------------------------------------------------------------------


def test_c08_success_probability_peak():
    start = time.perf_counter()
    noisy_cfg = ExperimentConfig(
        kind="success_probability", master_seed=606, graphs=verification_graphs(),
        depths=list(range(1, 11)), optimizers=[], backends=["noisy"],
        trials=12, eval_budget=600, shots=2000, noisy_optimizer="spsa",
    )
    noisy = {}
    for cell in enumerate_cells(noisy_cfg):
        noisy.setdefault(cell.depth, []).append(run_cell(noisy_cfg, cell).success_prob)
    curve = [float(np.mean(noisy[p])) for p in range(1, 11)]
    peak = int(np.argmax(curve)) + 1
    assert 2 <= peak <= 9, f"noisy success peaks at depth {peak}"
    assert curve[9] < curve[peak - 1], (
        f"success at depth 10 ({curve[9]:.3f}) does not decline from the "
        f"peak at depth {peak} ({curve[peak - 1]:.3f})"
    )

    sv_cfg = ExperimentConfig(
        kind="success_probability", master_seed=606, graphs=verification_graphs(),
        depths=[1, 10], optimizers=[], backends=["statevector"],
        trials=8, eval_budget=50000, exact_optimizer="bfgs",
    )
    sv = {}
    for cell in enumerate_cells(sv_cfg):
        sv.setdefault((cell.graph_id, cell.depth), []).append(run_cell(sv_cfg, cell).success_prob)
    gains = {}
    for gid, _ in verification_graphs():
        s1 = float(np.mean(sv[(gid, 1)]))
        s10 = float(np.mean(sv[(gid, 10)]))
        gains[gid] = (s1, s10)
        assert s10 > s1, f"{gid}: statevector success at depth 10 ({s10:.3f}) <= depth 1 ({s1:.3f})"
    elapsed = time.perf_counter() - start
    detail = ", ".join(f"{gid}:{a:.2f}->{b:.2f}" for gid, (a, b) in gains.items())
    report(8, "success-probability peak",
           f"noisy peak p={peak} ({curve[peak - 1]:.3f} vs {curve[9]:.3f} at p=10); sv {detail}; {elapsed:.0f}s")


# -- 9 ------------------------------------------------------------------------


def test_c09_optimizer_sanity_suite():
    start = time.perf_counter()
    target = np.arange(1.0, 7.0)

    def quadratic(x):
        return float(np.sum((np.asarray(x) - target) ** 2))

    def quadratic_grad(x):
        return 2.0 * (np.asarray(x) - target)

    quadratic_grad.cost_per_call = 1  # analytic gradient: one evaluation of work
    thresholds = {m: 1e-6 for m in GRADIENT_BASED}
    thresholds.update({"nelder-mead": 1e-4, "powell": 1e-4, "spsa": 1e-2})
    reached = {}
    for method in METHODS:
        grad = quadratic_grad if method in GRADIENT_BASED else None
        trace = minimize(quadratic, np.zeros(6), OptimizerConfig(method, 3000, seed=9), grad)
        reached[method] = trace.best_value
        assert trace.best_value < thresholds[method], (method, trace.best_value)
        assert trace.evaluations_used <= 3000

    def noisy_sphere(seed):
        gen = np.random.Generator(np.random.PCG64(seed))
        return lambda x: float(np.sum(np.asarray(x) ** 2) + gen.normal(0.0, 0.01))

    x0 = np.ones(10)
    spsa_final, nm_final = [], []
    for s in range(20):
        spsa_final.append(minimize(noisy_sphere(1000 + s), x0,
                                   OptimizerConfig("spsa", 5000, seed=s)).best_value)
        nm_final.append(minimize(noisy_sphere(2000 + s), x0,
                                 OptimizerConfig("nelder-mead", 5000, seed=s)).best_value)
    assert float(np.mean(spsa_final)) < 0.05
    assert float(np.mean(spsa_final)) < float(np.mean(nm_final)), (
        f"SPSA mean {np.mean(spsa_final):.4f} vs Nelder-Mead mean {np.mean(nm_final):.4f}"
    )
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    report(9, "optimizer sanity suite",
           f"quadratic worst {max(reached.values()):.1e}; noisy sphere spsa "
           f"{np.mean(spsa_final):.4f} < nm {np.mean(nm_final):.4f}; {elapsed:.0f}s")


# -- 10 -----------------------------------------------------------------------


def test_c10_determinism(tmp_path):
    start = time.perf_counter()
    cfg = ExperimentConfig(
        kind="optimizer_comparison", master_seed=1010,
        graphs=[("tri", Graph(3, ((0, 1), (0, 2), (1, 2))))],
        depths=[1], optimizers=["spsa"], backends=["shots"],
        shots=500, trials=2, eval_budget=80,
    )
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_experiment(cfg, a, jobs=1)
    run_experiment(cfg, b, jobs=1)
    elapsed = time.perf_counter() - start
    assert a.read_bytes() == b.read_bytes()
    assert elapsed < 10.0
    report(10, "determinism", f"byte-identical CSVs in {elapsed:.1f}s")
