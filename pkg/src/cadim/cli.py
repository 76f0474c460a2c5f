"""Command-line interface.

Subcommands: ``generate`` (draw or assemble a mixture model), ``run`` (the
interventional learner), ``baseline`` (observational inseparable pairs),
``analyze`` (sufficient sets and cyclic complexity), ``necessity``
(worst-case instances with their exhaustive verification) and ``experiment``
(grid sweeps with CSV plus figure reports). All outputs are CSV/JSON files
under ``--out``; ``--check`` turns guarantee violations into a nonzero exit.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algorithm import run_cadim
from .experiments import ExperimentConfig, precision_recall, run_experiment
from .independence import CiBackend, OracleBackend, SampleBackend
from .io import (
    format_edge_list,
    load_model,
    parse_edge_list,
    save_model,
    write_csv,
)
from .mixture import MixtureModel
from .observational import classify_pairs, learn_inseparable_pairs
from .sem import GeneratorConfig, parameterize_mixture, random_mixture, sample
from .theory import (
    cyclic_complexity,
    decide_parent,
    necessity_general,
    necessity_trees,
    sufficient_sets,
    verify_necessity,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.handler(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cadim",
        description="Interventional causal discovery over mixtures of DAGs.",
    )
    parser.add_argument("--version", action="version", version=f"cadim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw or assemble a mixture model file")
    p.add_argument("--n", type=int, help="node count (random generation)")
    p.add_argument("--k", type=int, help="component count (random generation)")
    p.add_argument("--density", type=float, default=None, help="edge density, default 2/n")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--redraw-weights", action="store_true",
                   help="redraw shared true-edge weights per component")
    p.add_argument("--redraw-prob", type=float, default=0.5)
    p.add_argument("--graphs-in", nargs="+", type=Path, default=None,
                   help="edge-list files to use as component DAGs")
    p.add_argument("--out", type=Path, required=True, help="model JSON path")
    p.add_argument("--graphs-out", type=Path, default=None,
                   help="directory for component edge-list exports")
    p.add_argument("--samples", type=int, default=None,
                   help="also export this many observational samples")
    p.add_argument("--samples-out", type=Path, default=None)
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("run", help="run the interventional learner on a model")
    _backend_options(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--exact-fvs-limit", type=int, default=20,
                   help="largest cyclic component solved exactly")
    p.add_argument("--check", action="store_true",
                   help="nonzero exit on recovery/bound violations")
    p.set_defaults(handler=cmd_run)

    p = sub.add_parser("baseline", help="observational inseparable-pairs learner")
    _backend_options(p)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--force", action="store_true",
                   help="override the exhaustive-search node guard")
    p.set_defaults(handler=cmd_baseline)

    p = sub.add_parser("analyze", help="sufficient sets and cyclic complexity")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("necessity", help="worst-case instances and verification")
    p.add_argument("--mode", choices=("general", "trees"), required=True)
    p.add_argument("--k", type=int, required=True, help="component count")
    p.add_argument("--pa", type=int, default=1,
                   help="parent count of the target (general mode)")
    p.add_argument("--randomize-extras", action="store_true",
                   help="add random unconstrained edges (general mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_necessity)

    p = sub.add_parser("experiment", help="grid sweep with CSV and figure report")
    p.add_argument("--config", type=Path, default=None, help="experiment config JSON")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--trials", type=int, default=None, help="override config trials")
    p.add_argument("--backend", choices=("oracle", "sample"), default=None)
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.add_argument("--check", action="store_true",
                   help="nonzero exit on any bound violation")
    p.set_defaults(handler=cmd_experiment)

    return parser


def _backend_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", type=Path, required=True, help="model JSON file")
    p.add_argument("--backend", choices=("oracle", "sample"), default="oracle")
    p.add_argument("--samples", type=int, default=5000,
                   help="samples per component (sample backend)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)


def _make_backend(model: MixtureModel, args) -> CiBackend:
    if args.backend == "oracle":
        return OracleBackend(model)
    return SampleBackend(
        model, samples=args.samples * model.k, alpha=args.alpha, seed=args.seed
    )


def _write_query_log(backend: CiBackend, path: Path) -> None:
    write_csv(
        path,
        ["query", "i", "j", "conditioning_size", "intervention", "dependent", "backend"],
        (
            [r.index, r.i, r.j, len(r.conditioning), r.intervention, r.dependent, r.backend]
            for r in backend.query_log
        ),
    )


# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.graphs_in:
        from .graphs import Dag

        graphs = [parse_edge_list(path.read_text()) for path in args.graphs_in]
        if len({g.n for g in graphs}) != 1:
            print("error: component graphs disagree on the node count", file=sys.stderr)
            return 2
        dags = tuple(Dag(g.n, g.edges) for g in graphs)
        config = GeneratorConfig(
            n=dags[0].n,
            k=len(dags),
            redraw_shared_weights=args.redraw_weights,
            redraw_prob=args.redraw_prob,
            seed=args.seed,
        )
        model = parameterize_mixture(dags, config, np.random.default_rng(args.seed))
    else:
        if args.n is None or args.k is None:
            print("error: --n and --k are required without --graphs-in", file=sys.stderr)
            return 2
        model = random_mixture(
            GeneratorConfig(
                n=args.n,
                k=args.k,
                density=args.density,
                redraw_shared_weights=args.redraw_weights,
                redraw_prob=args.redraw_prob,
                seed=args.seed,
            )
        )
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_model(model, args.out)
    print(f"wrote model with n={model.n}, k={model.k} to {args.out}")
    if args.graphs_out is not None:
        args.graphs_out.mkdir(parents=True, exist_ok=True)
        for c, dag in enumerate(model.dags):
            (args.graphs_out / f"component_{c}.txt").write_text(format_edge_list(dag))
        print(f"wrote {model.k} component edge lists to {args.graphs_out}")
    if args.samples is not None:
        target = args.samples_out or args.out.with_suffix(".samples.csv")
        data = sample(model, (), args.samples, np.random.default_rng(args.seed))
        write_csv(
            target,
            [f"x{v}" for v in range(model.n)],
            ([float(x) for x in row] for row in data),
        )
        print(f"wrote {args.samples} observational samples to {target}")
    return 0


def cmd_run(args) -> int:
    model = load_model(args.model)
    backend = _make_backend(model, args)
    result = run_cadim(backend, model.n, exact_fvs_limit=args.exact_fvs_limit)
    relations = model.relations()
    complexity = cyclic_complexity(model)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "edges.csv", ["source", "target"], sorted(result.edges))
    write_csv(
        out / "interventions.csv",
        ["index", "step", "target", "size", "nodes"],
        (
            [idx, rec.step, rec.target, rec.size, rec.nodes]
            for idx, rec in enumerate(result.interventions)
        ),
    )
    write_csv(
        out / "pernode.csv",
        [
            "node", "tau_true", "tau_estimated", "breaking_set",
            "true_parents", "estimated_parents", "interventions",
            "max_intervention_size", "forced_layers", "fvs_exact",
        ],
        (
            [
                i,
                complexity.per_node[i],
                ws.cyclic_complexity,
                ws.breaking_set,
                relations.parents[i],
                ws.parents,
                len(result.records_for(i)),
                result.max_intervention_size(i),
                ws.forced_layers,
                ws.fvs_exact,
            ]
            for i, ws in enumerate(result.workspaces)
        ),
    )
    _write_query_log(backend, out / "queries.csv")

    precision, recall = precision_recall(result.edges, model.true_edges())
    size_violations = 0
    for rec in result.interventions:
        budget = len(relations.parents[rec.target]) + 1
        if result.workspaces[rec.target].cycles:
            budget += complexity.per_node[rec.target]
        size_violations += rec.size > budget
    count_bound = 2 * model.n * model.n - model.n
    count_ok = result.total_interventions <= count_bound
    print(f"edges: {len(result.edges)} estimated, {len(model.true_edges())} true")
    print(f"precision={precision:.3f} recall={recall:.3f}")
    print(
        f"interventions: {result.total_interventions} "
        f"(bound {count_bound}), max size {result.max_intervention_size()}"
    )
    if args.check:
        failures = []
        if not count_ok:
            failures.append("intervention count exceeds bound")
        if size_violations:
            failures.append(f"{size_violations} intervention size violations")
        if args.backend == "oracle" and (precision != 1.0 or recall != 1.0):
            failures.append("oracle run did not recover the true edges exactly")
        for failure in failures:
            print(f"CHECK FAIL: {failure}", file=sys.stderr)
        if failures:
            return 1
        print("CHECK PASS")
    return 0


def cmd_baseline(args) -> int:
    model = load_model(args.model)
    backend = _make_backend(model, args)
    result = learn_inseparable_pairs(backend, model.n, force=args.force)
    classified = classify_pairs(result, model.true_edges())
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    pair_rows = []
    for i in range(model.n):
        for j in range(i + 1, model.n):
            separable = (i, j) not in result.pairs
            pair_rows.append(
                [i, j, separable, result.separating_sets.get((i, j), frozenset())]
            )
    write_csv(out / "pairs.csv", ["i", "j", "separable", "separating_set"], pair_rows)
    write_csv(
        out / "classification.csv",
        ["i", "j", "category"],
        sorted(
            [[i, j, "edge-backed"] for i, j in classified.edge_backed]
            + [[i, j, "emergent"] for i, j in classified.emergent]
        ),
    )
    _write_query_log(backend, out / "queries.csv")
    print(
        f"inseparable pairs: {len(result.pairs)} "
        f"({len(classified.emergent)} emergent, "
        f"{len(classified.edge_backed)} edge-backed)"
    )
    return 0


def cmd_analyze(args) -> int:
    model = load_model(args.model)
    relations = model.relations()
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(model.n):
        for j in range(model.n):
            if i == j:
                continue
            sets = sufficient_sets(model, i, j)
            rows.append(
                [
                    j,
                    i,
                    j in relations.parents[i],
                    sets.parents_reached,
                    sets.children_reaching,
                    sets.changed_between,
                    min(len(s) for s in sets.all()),
                    decide_parent(model, i, j, sets.parents_reached),
                ]
            )
    write_csv(
        out / "sufficient_sets.csv",
        [
            "candidate", "target", "true_edge", "set_parents_reached",
            "set_children_reaching", "set_changed_between",
            "smallest_size", "decision_under_parents_set",
        ],
        rows,
    )
    complexity = cyclic_complexity(model)
    write_csv(
        out / "tau.csv",
        ["node", "tau", "breaking_set", "cycles"],
        (
            [i, complexity.per_node[i], complexity.breaking_sets[i], complexity.cycle_counts[i]]
            for i in range(model.n)
        ),
    )
    print(
        f"mean cyclic complexity {complexity.mean:.3f}, "
        f"largest {complexity.largest}"
    )
    return 0


def cmd_necessity(args) -> int:
    if args.mode == "general":
        rng = np.random.default_rng(args.seed) if args.randomize_extras else None
        instance = necessity_general(args.pa, args.k, extra_edge_rng=rng)
    else:
        instance = necessity_trees(args.k)
    report = verify_necessity(instance)
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    save_model(instance.absent, out / "absent.json")
    save_model(instance.present, out / "present.json")
    doc = {
        "mode": args.mode,
        "i": instance.i,
        "j": instance.j,
        "bound": report.bound,
        "scope": report.scope,
        "interventions_checked": report.interventions_checked,
        "queries_checked": report.queries_checked,
        "indistinguishable": report.indistinguishable,
        "mismatches": len(report.mismatches),
        "distinguishing_intervention": sorted(report.distinguishing_intervention),
        "distinguished_above_bound": report.distinguished_above_bound,
    }
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True))
    print(
        f"bound {report.bound} ({report.scope} scope): "
        f"{report.interventions_checked} interventions, "
        f"{report.queries_checked} queries, "
        f"indistinguishable={report.indistinguishable}, "
        f"distinguished at size {len(report.distinguishing_intervention)}="
        f"{report.distinguished_above_bound}"
    )
    return 0 if (report.indistinguishable and report.distinguished_above_bound) else 1


def cmd_experiment(args) -> int:
    if args.config is not None:
        config = ExperimentConfig.load(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.backend is not None:
        overrides["backend"] = args.backend
    if overrides:
        config = ExperimentConfig.from_dict({**config.to_dict(), **overrides})
    result = run_experiment(config, out_dir=args.out)
    for row in result.points:
        label = f"n={row.n} k={row.k}" + (f" s={row.samples}" if row.samples else "")
        print(
            f"{label}: precision={row.precision_mean:.3f} "
            f"recall={row.recall_mean:.3f} tau={row.tau_true_mean:.2f} "
            f"interventions={row.interventions_mean:.1f}"
        )
    if not args.no_plot:
        from .plotting import render_experiment_figures

        for path in render_experiment_figures(result, args.out):
            print(f"wrote {path}")
    if args.check:
        size_violations = sum(row.size_violations for row in result.points)
        count_violations = sum(row.count_violations for row in result.points)
        failures = []
        if size_violations and config.backend == "oracle":
            failures.append(f"{size_violations} size-bound violations")
        if count_violations:
            failures.append(f"{count_violations} count-bound violations")
        if config.backend == "oracle":
            bad = [
                row for row in result.points
                if row.precision_mean != 1.0 or row.recall_mean != 1.0
            ]
            if bad:
                failures.append(f"{len(bad)} grid points below exact recovery")
        for failure in failures:
            print(f"CHECK FAIL: {failure}", file=sys.stderr)
        if failures:
            return 1
        print("CHECK PASS")
    return 0


if __name__ == "__main__":
    sys.exit(main())
