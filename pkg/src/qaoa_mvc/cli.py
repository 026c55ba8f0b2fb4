"""Command-line interface.

Subcommands: `graphs enumerate|solve`, `run`, `experiment`, `report`.
All randomness flows from explicit seeds: `run` defaults to a fixed demo seed,
while experiment configs must carry master_seed.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, ContractViolation, GraphParseError
from .graphs import enumerate_connected_graphs, load_graph, min_vertex_covers, save_graph
from .hamiltonian import PenaltyWeights
from .harness import (
    CSV_HEADER,
    load_experiment_config,
    read_records_csv,
    record_csv_row,
    run_experiment,
    run_single,
)
from .noise import load_calibration
from .optimizers import METHODS, normalize_method
from . import reports

DEMO_SEED = 12345


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaoa-mvc",
        description="QAOA benchmarking for minimum vertex cover",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    graphs = sub.add_parser("graphs", help="graph utilities")
    gsub = graphs.add_subparsers(dest="graphs_command", required=True)
    enum = gsub.add_parser("enumerate", help="write one file per connected isomorphism class")
    enum.add_argument("--n", type=int, required=True, help="vertex count (1..7)")
    enum.add_argument("--out", default=".", help="output directory")
    solve = gsub.add_parser("solve", help="print the minimum vertex cover of a graph file")
    solve.add_argument("graph", help="graph file")

    run = sub.add_parser("run", help="one seeded optimization of one instance")
    run.add_argument("graph", help="graph file")
    run.add_argument("--depth", type=int, required=True)
    run.add_argument("--optimizer", required=True)
    run.add_argument("--backend", required=True, choices=["statevector", "shots", "noisy"])
    run.add_argument("--seed", type=int, default=None,
                     help=f"run seed (defaults to the demo constant {DEMO_SEED})")
    run.add_argument("--shots", type=int, default=10000)
    run.add_argument("--budget", type=int, default=600, help="objective evaluation budget")
    run.add_argument("--penalty-a", type=float, default=2.0)
    run.add_argument("--penalty-b", type=float, default=1.0)
    run.add_argument("--calibration", default=None, help="noise calibration file (noisy backend)")
    run.add_argument("--out", default="runs.csv", help="CSV file the record is appended to")

    exp = sub.add_parser("experiment", help="run a configured experiment grid")
    exp.add_argument("config", help="experiment config file (YAML)")
    exp.add_argument("--out", default=None, help="results CSV path (default: <config>.results.csv)")
    exp.add_argument("--resume", action="store_true", help="skip cells already journaled")
    exp.add_argument("--jobs", type=int, default=0,
                     help="parallel worker processes (default: all cores)")

    rep = sub.add_parser("report", help="tables and SVG figures from a results CSV")
    rep.add_argument("--records", required=True, help="results CSV")
    rep.add_argument("--kind", required=True,
                     help="boxplot_table | depth_curve | success_curve")
    rep.add_argument("--group-by", default="optimizer,depth,backend",
                     help="boxplot grouping keys (comma separated)")
    rep.add_argument("--format", default="csv", choices=["csv", "svg"])
    rep.add_argument("--out", required=True, help="output file")
    return parser


def _cmd_graphs(args) -> int:
    if args.graphs_command == "enumerate":
        graphs = enumerate_connected_graphs(args.n)
        os.makedirs(args.out, exist_ok=True)
        for i, g in enumerate(graphs):
            save_graph(g, os.path.join(args.out, f"g{args.n}_{i:03d}.txt"))
        print(f"wrote {len(graphs)} graphs to {args.out}")
        return 0
    g = load_graph(args.graph)
    solution = min_vertex_covers(g)
    print(f"size={solution.size}, covers={','.join(solution.covers)}")
    return 0


def _cmd_run(args) -> int:
    method = normalize_method(args.optimizer)
    if method not in METHODS:
        raise ContractViolation(
            f"unknown optimizer {args.optimizer!r}; valid methods: {', '.join(METHODS)}"
        )
    g = load_graph(args.graph)
    noise = load_calibration(args.calibration) if args.calibration else None
    seed = DEMO_SEED if args.seed is None else args.seed
    graph_id = os.path.splitext(os.path.basename(args.graph))[0]
    record = run_single(
        g, graph_id, args.depth, method, args.backend,
        seed=seed, shots=args.shots,
        weights=PenaltyWeights(args.penalty_a, args.penalty_b),
        noise=noise, eval_budget=args.budget,
    )
    print(f"graph={record.graph_id} depth={record.depth} optimizer={record.optimizer} "
          f"backend={record.backend} seed={record.seed}")
    print(f"final_expectation={record.final_expectation!r}")
    if record.channel_expectation is not None:
        print(f"channel_expectation={record.channel_expectation!r}")
    print(f"success_prob={record.success_prob!r}")
    print(f"evals_used={record.evals_used}")
    new_file = not os.path.exists(args.out)
    with open(args.out, "a", encoding="utf-8", newline="\n") as fh:
        if new_file:
            fh.write(CSV_HEADER + "\n")
        fh.write(record_csv_row(record) + "\n")
    return 0


def _cmd_experiment(args) -> int:
    cfg = load_experiment_config(args.config)
    out = args.out or (os.path.splitext(args.config)[0] + ".results.csv")
    jobs = args.jobs if args.jobs and args.jobs > 0 else (os.cpu_count() or 1)
    records = run_experiment(cfg, out, jobs=jobs, resume=args.resume)
    print(f"wrote {len(records)} records to {out}")
    return 0


def _cmd_report(args) -> int:
    kind = args.kind.strip().lower()
    if kind not in reports.REPORT_KINDS:
        raise ContractViolation(
            f"unknown report kind {args.kind!r}; valid kinds: {', '.join(reports.REPORT_KINDS)}"
        )
    records = read_records_csv(args.records)
    if kind == reports.BOXPLOT_TABLE:
        group_by = tuple(k.strip() for k in args.group_by.split(",") if k.strip())
        payload = (reports.boxplot_svg(records, group_by) if args.format == "svg"
                   else reports.boxplot_table_csv(records, group_by))
    elif kind == reports.DEPTH_CURVE:
        points = reports.depth_curve(records)
        payload = reports.curve_svg(points, "final expectation") if args.format == "svg" \
            else reports.curve_csv(points)
    else:
        points = reports.success_curve(records)
        payload = reports.curve_svg(points, "success probability") if args.format == "svg" \
            else reports.curve_csv(points)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(payload)
    print(f"wrote {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "graphs":
            return _cmd_graphs(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_report(args)
    except (ConfigError, ContractViolation, GraphParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
