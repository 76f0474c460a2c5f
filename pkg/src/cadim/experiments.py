"""Experiment orchestration: grids of mixture recoveries with full accounting.

A run sweeps (node count, component count, samples per component), draws
``trials`` fresh mixtures per point with per-trial derived seeds, runs the
learner against the chosen backend and aggregates precision/recall, cyclic
complexity and the intervention log checks into CSV-ready rows. Reruns with
the same config and seed produce byte-identical CSVs; wall times go to the
metadata document only.
"""

from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from . import __version__
from .algorithm import run_cadim
from .independence import OracleBackend, SampleBackend
from .io import write_csv
from .observational import classify_pairs, learn_inseparable_pairs, skeleton
from .sem import GeneratorConfig, random_mixture
from .theory import cyclic_complexity

__all__ = [
    "ExperimentConfig",
    "TrialRecord",
    "TauRecord",
    "BaselineRecord",
    "MetricsRow",
    "ExperimentResult",
    "precision_recall",
    "derive_seed",
    "run_trial",
    "run_experiment",
]

BACKENDS = ("oracle", "sample")


def derive_seed(*parts: int) -> int:
    """Deterministic child seed from a tuple of nonnegative integers."""
    entropy = tuple(int(p) for p in parts)
    return int(np.random.SeedSequence(entropy=entropy).generate_state(1)[0])


def precision_recall(
    estimated: Iterable[tuple[int, int]], truth: Iterable[tuple[int, int]]
) -> tuple[float, float]:
    """Directed-edge precision and recall; empty sets count as perfect."""
    est, tru = frozenset(estimated), frozenset(truth)
    correct = len(est & tru)
    precision = 1.0 if not est else correct / len(est)
    recall = 1.0 if not tru else correct / len(tru)
    return precision, recall


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...] = (5, 8, 10)
    k_values: tuple[int, ...] = (2, 3)
    samples_per_component: tuple[int, ...] = ()
    backend: str = "oracle"
    trials: int = 20
    alpha: float = 0.05
    density: float | None = None
    redraw_shared_weights: bool = False
    redraw_prob: float = 0.5
    include_baseline: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        object.__setattr__(self, "k_values", tuple(int(k) for k in self.k_values))
        object.__setattr__(
            self,
            "samples_per_component",
            tuple(int(s) for s in self.samples_per_component),
        )
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not self.n_values or not self.k_values:
            raise ValueError("n_values and k_values must be nonempty")
        if any(n < 2 for n in self.n_values) or any(k < 1 for k in self.k_values):
            raise ValueError("grid values must be positive (n >= 2)")
        if self.backend == "sample" and not self.samples_per_component:
            raise ValueError("sample backend needs samples_per_component")
        if any(s < 1 for s in self.samples_per_component):
            raise ValueError("sample sizes must be positive")
        if not (0 < self.alpha < 1):
            raise ValueError("alpha must lie in (0, 1)")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def grid(self) -> Iterator[tuple[int, int, int | None]]:
        sizes: tuple[int | None, ...] = self.samples_per_component or (None,)
        if self.backend == "oracle":
            sizes = (None,)
        for n in self.n_values:
            for k in self.k_values:
                for s in sizes:
                    yield n, k, s

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in doc.items()})

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True))


@dataclass(frozen=True)
class TrialRecord:
    n: int
    k: int
    samples: int | None
    backend: str
    trial: int
    precision: float
    recall: float
    true_edge_count: int
    estimated_edge_count: int
    total_interventions: int
    count_bound: int
    count_ok: bool
    cycle_free_mixture: bool
    exact_count_expected: int | None
    exact_count_ok: bool | None
    max_intervention_size: int
    size_violations: int
    forced_layers: int
    fvs_exact: bool


@dataclass(frozen=True)
class TauRecord:
    n: int
    k: int
    samples: int | None
    backend: str
    trial: int
    node: int
    tau_true: int
    tau_estimated: int


@dataclass(frozen=True)
class BaselineRecord:
    n: int
    k: int
    samples: int | None
    backend: str
    trial: int
    skeleton_edges: int
    inseparable_pairs: int
    emergent_pairs: int
    contains_skeleton: bool
    strict_superset: bool


@dataclass(frozen=True)
class MetricsRow:
    n: int
    k: int
    samples: int | None
    backend: str
    trials: int
    precision_mean: float
    precision_std: float
    recall_mean: float
    recall_std: float
    tau_true_mean: float
    tau_estimated_mean: float
    interventions_mean: float
    max_intervention_size: int
    size_violations: int
    count_violations: int
    wall_time_s: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    points: list[MetricsRow]
    trials: list[TrialRecord]
    tau: list[TauRecord]
    baseline: list[BaselineRecord]


def _size_violations(result, relations, tau_true) -> int:
    """Count logged interventions larger than parents + complexity + 1 for
    their target (parents + 1 where the target's ancestors are cycle-free)."""
    violations = 0
    for rec in result.interventions:
        budget = len(relations.parents[rec.target]) + 1
        if result.workspaces[rec.target].cycles:
            budget += tau_true[rec.target]
        if rec.size > budget:
            violations += 1
    return violations


def run_trial(
    config: ExperimentConfig,
    point_index: int,
    n: int,
    k: int,
    samples: int | None,
    trial: int,
) -> tuple[TrialRecord, list[TauRecord], BaselineRecord | None]:
    """One mixture draw plus one full learner run, with bound bookkeeping."""
    model_seed = derive_seed(config.seed, point_index, trial, 0)
    backend_seed = derive_seed(config.seed, point_index, trial, 1)
    model = random_mixture(
        GeneratorConfig(
            n=n,
            k=k,
            density=config.density,
            redraw_shared_weights=config.redraw_shared_weights,
            redraw_prob=config.redraw_prob,
            seed=model_seed,
        )
    )
    if config.backend == "oracle":
        backend = OracleBackend(model)
    else:
        backend = SampleBackend(
            model, samples=samples * k, alpha=config.alpha, seed=backend_seed
        )
    result = run_cadim(backend, n)

    relations = model.relations()
    truth = model.true_edges()
    precision, recall = precision_recall(result.edges, truth)
    complexity = cyclic_complexity(model)
    cycle_free = all(t == 0 for t in complexity.per_node)
    count_bound = 2 * n * n - n
    exact_expected = (
        n + sum(len(a) for a in relations.ancestors) if cycle_free else None
    )
    record = TrialRecord(
        n=n,
        k=k,
        samples=samples,
        backend=config.backend,
        trial=trial,
        precision=precision,
        recall=recall,
        true_edge_count=len(truth),
        estimated_edge_count=len(result.edges),
        total_interventions=result.total_interventions,
        count_bound=count_bound,
        count_ok=result.total_interventions <= count_bound,
        cycle_free_mixture=cycle_free,
        exact_count_expected=exact_expected,
        exact_count_ok=(
            result.total_interventions == exact_expected if cycle_free else None
        ),
        max_intervention_size=result.max_intervention_size(),
        size_violations=_size_violations(result, relations, complexity.per_node),
        forced_layers=sum(ws.forced_layers for ws in result.workspaces),
        fvs_exact=all(ws.fvs_exact for ws in result.workspaces),
    )
    tau_records = [
        TauRecord(
            n=n,
            k=k,
            samples=samples,
            backend=config.backend,
            trial=trial,
            node=v,
            tau_true=complexity.per_node[v],
            tau_estimated=result.cyclic_complexities[v],
        )
        for v in range(n)
    ]
    baseline_record = None
    if config.include_baseline and config.backend == "oracle":
        pairs = learn_inseparable_pairs(OracleBackend(model), n)
        classified = classify_pairs(pairs, truth)
        true_skeleton = skeleton(truth)
        baseline_record = BaselineRecord(
            n=n,
            k=k,
            samples=samples,
            backend=config.backend,
            trial=trial,
            skeleton_edges=len(true_skeleton),
            inseparable_pairs=len(pairs.pairs),
            emergent_pairs=len(classified.emergent),
            contains_skeleton=true_skeleton <= pairs.pairs,
            strict_superset=true_skeleton < pairs.pairs,
        )
    return record, tau_records, baseline_record


def run_experiment(
    config: ExperimentConfig, out_dir: str | Path | None = None
) -> ExperimentResult:
    """Sweep the grid, aggregate per-point metrics, optionally write CSVs."""
    points: list[MetricsRow] = []
    trial_rows: list[TrialRecord] = []
    tau_rows: list[TauRecord] = []
    baseline_rows: list[BaselineRecord] = []
    for point_index, (n, k, samples) in enumerate(config.grid()):
        started = time.perf_counter()
        records = []
        for trial in range(config.trials):
            record, taus, base = run_trial(config, point_index, n, k, samples, trial)
            records.append(record)
            trial_rows.append(record)
            tau_rows.extend(taus)
            if base is not None:
                baseline_rows.append(base)
        elapsed = time.perf_counter() - started
        precisions = np.array([r.precision for r in records])
        recalls = np.array([r.recall for r in records])
        taus_true = [t.tau_true for t in tau_rows if _at_point(t, n, k, samples)]
        taus_est = [t.tau_estimated for t in tau_rows if _at_point(t, n, k, samples)]
        points.append(
            MetricsRow(
                n=n,
                k=k,
                samples=samples,
                backend=config.backend,
                trials=config.trials,
                precision_mean=float(precisions.mean()),
                precision_std=float(precisions.std()),
                recall_mean=float(recalls.mean()),
                recall_std=float(recalls.std()),
                tau_true_mean=float(np.mean(taus_true)),
                tau_estimated_mean=float(np.mean(taus_est)),
                interventions_mean=float(
                    np.mean([r.total_interventions for r in records])
                ),
                max_intervention_size=max(r.max_intervention_size for r in records),
                size_violations=sum(r.size_violations for r in records),
                count_violations=sum(not r.count_ok for r in records),
                wall_time_s=elapsed,
            )
        )
    result = ExperimentResult(
        config=config,
        points=points,
        trials=trial_rows,
        tau=tau_rows,
        baseline=baseline_rows,
    )
    if out_dir is not None:
        write_experiment_csvs(result, Path(out_dir))
    return result


def _at_point(record: TauRecord, n: int, k: int, samples: int | None) -> bool:
    return record.n == n and record.k == k and record.samples == samples


RESULTS_COLUMNS = [
    "n", "k", "samples", "backend", "trials",
    "precision_mean", "precision_std", "recall_mean", "recall_std",
    "tau_true_mean", "tau_estimated_mean", "interventions_mean",
    "max_intervention_size", "size_violations", "count_violations",
]

TRIAL_COLUMNS = [
    "n", "k", "samples", "backend", "trial", "precision", "recall",
    "true_edge_count", "estimated_edge_count", "total_interventions",
    "count_bound", "count_ok", "cycle_free_mixture", "exact_count_expected",
    "exact_count_ok", "max_intervention_size", "size_violations",
    "forced_layers", "fvs_exact",
]

TAU_COLUMNS = ["n", "k", "samples", "backend", "trial", "node", "tau_true", "tau_estimated"]

BASELINE_COLUMNS = [
    "n", "k", "samples", "backend", "trial", "skeleton_edges",
    "inseparable_pairs", "emergent_pairs", "contains_skeleton", "strict_superset",
]


def write_experiment_csvs(result: ExperimentResult, out_dir: Path) -> list[Path]:
    """Write results/interventions/tau (and baseline) CSVs plus metadata.

    Wall times and provenance live in metadata.json so the CSVs stay
    byte-identical across reruns of the same config and seed.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, columns: list[str], rows: list) -> None:
        path = out_dir / name
        write_csv(
            path,
            columns,
            ([getattr(r, c) for c in columns] for r in rows),
        )
        written.append(path)

    emit("results.csv", RESULTS_COLUMNS, result.points)
    emit("interventions.csv", TRIAL_COLUMNS, result.trials)
    emit("tau.csv", TAU_COLUMNS, result.tau)
    if result.baseline:
        emit("baseline.csv", BASELINE_COLUMNS, result.baseline)
    metadata = {
        "tool": f"cadim {__version__}",
        "config": result.config.to_dict(),
        "wall_time_s": {
            f"n={row.n},k={row.k},s={row.samples}": row.wall_time_s
            for row in result.points
        },
    }
    meta_path = out_dir / "metadata.json"
    meta_path.write_text(json.dumps(metadata, indent=2, sort_keys=True))
    written.append(meta_path)
    return written
