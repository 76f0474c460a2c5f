"""Random mixture generation and sampling.

Component DAGs are drawn from an Erdos-Renyi model over a random topological
order. Mechanisms are linear with Gaussian noise: per-node noise means are
uniform on [-1, 1], noise variances uniform on [0.5, 1.5], and edge weights
uniform on +/-[0.25, 2]. By default an edge shared by several components
carries one weight everywhere and noise parameters are per-node, so a node's
conditional changes across components only when its parent sets (or shared
weights, in redraw mode) do. Exogenous intervention mechanisms are drawn once
per model from the same noise ranges and frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .graphs import Dag
from .mixture import MixtureModel, NodeMechanism

__all__ = [
    "GeneratorConfig",
    "random_dag",
    "random_mixture",
    "parameterize_mixture",
    "sample",
    "sample_with_labels",
]


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`random_mixture`. ``density=None`` means ``2/n``."""

    n: int
    k: int
    density: float | None = None
    weight_range: tuple[float, float] = (0.25, 2.0)
    noise_mean_range: tuple[float, float] = (-1.0, 1.0)
    noise_var_range: tuple[float, float] = (0.5, 1.5)
    redraw_shared_weights: bool = False
    redraw_prob: float = 0.5
    seed: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be positive")
        if self.density is not None and not (0 < self.density <= 1):
            raise ValueError(f"density must lie in (0, 1], got {self.density}")
        for name in ("weight_range", "noise_mean_range", "noise_var_range"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} is not ordered: ({lo}, {hi})")
        if self.noise_var_range[0] <= 0:
            raise ValueError("noise variances must be positive")
        if self.weight_range[0] <= 0:
            raise ValueError("weight magnitudes must be positive")
        if not (0 <= self.redraw_prob <= 1):
            raise ValueError("redraw_prob must lie in [0, 1]")

    @property
    def effective_density(self) -> float:
        return self.density if self.density is not None else 2.0 / self.n


def random_dag(n: int, density: float, rng: np.random.Generator) -> Dag:
    """Erdos-Renyi DAG: draw a random topological order, then include each
    forward pair independently with probability ``density``."""
    if n < 1:
        raise ValueError("n must be positive")
    if not (0 < density <= 1):
        raise ValueError(f"density must lie in (0, 1], got {density}")
    order = [int(v) for v in rng.permutation(n)]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < density:
                edges.append((order[a], order[b]))
    return Dag(n, edges)


def random_mixture(
    config: GeneratorConfig, rng: np.random.Generator | None = None
) -> MixtureModel:
    """Draw a mixture model according to ``config``.

    With ``redraw_shared_weights`` each edge present in several components is,
    with probability ``redraw_prob``, given an independent weight in every
    component it belongs to (instead of one shared weight).
    """
    if rng is None:
        rng = np.random.default_rng(config.seed)
    density = config.effective_density
    dags = tuple(random_dag(config.n, density, rng) for _ in range(config.k))
    return parameterize_mixture(dags, config, rng)


def parameterize_mixture(
    dags: tuple[Dag, ...],
    config: GeneratorConfig,
    rng: np.random.Generator,
) -> MixtureModel:
    """Attach mechanisms to fixed component structures using the config's
    parameter scheme (shared per-node noise, shared or redrawn edge weights,
    frozen exogenous intervention mechanisms)."""
    n, k = config.n, config.k
    if len(dags) != k or any(dag.n != n for dag in dags):
        raise ValueError("component structures do not match the config dimensions")

    mean_lo, mean_hi = config.noise_mean_range
    var_lo, var_hi = config.noise_var_range
    noise_means = [float(rng.uniform(mean_lo, mean_hi)) for _ in range(n)]
    noise_vars = [float(rng.uniform(var_lo, var_hi)) for _ in range(n)]

    def draw_weight() -> float:
        magnitude = rng.uniform(*config.weight_range)
        sign = -1.0 if rng.random() < 0.5 else 1.0
        return float(sign * magnitude)

    all_edges = sorted({edge for dag in dags for edge in dag.edges})
    shared_weight = {edge: draw_weight() for edge in all_edges}
    per_component: list[dict[tuple[int, int], float]] = [
        {edge: shared_weight[edge] for edge in dag.edges} for dag in dags
    ]
    if config.redraw_shared_weights:
        for edge in all_edges:
            owners = [c for c in range(k) if edge in dags[c].edges]
            if len(owners) < 2:
                continue
            if rng.random() < config.redraw_prob:
                for c in owners:
                    per_component[c][edge] = draw_weight()

    mechanisms = []
    for c in range(k):
        row = []
        for v in range(n):
            parents = tuple(sorted(dags[c].parents(v)))
            row.append(
                NodeMechanism(
                    parents=parents,
                    weights=tuple(per_component[c][(p, v)] for p in parents),
                    noise_mean=noise_means[v],
                    noise_var=noise_vars[v],
                )
            )
        mechanisms.append(tuple(row))

    intervention_means = [float(rng.uniform(mean_lo, mean_hi)) for _ in range(n)]
    intervention_vars = [float(rng.uniform(var_lo, var_hi)) for _ in range(n)]
    return MixtureModel(
        dags=dags,
        mechanisms=tuple(mechanisms),
        intervention_means=tuple(intervention_means),
        intervention_vars=tuple(intervention_vars),
        generator_seed=config.seed,
    )


def sample_with_labels(
    model: MixtureModel,
    targets: Iterable[int],
    count: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Ancestral sampling from the interventional mixture.

    Returns ``(data, labels)`` where ``labels`` records the latent component
    of each row. Labels are diagnostics only and must never reach a learner.
    """
    if count < 1:
        raise ValueError("count must be positive")
    intervened = model.intervene(targets)
    n, k = intervened.n, intervened.k
    labels = rng.choice(k, size=count, p=np.asarray(intervened.mixing))
    data = np.zeros((count, n))
    for c in range(k):
        rows = np.flatnonzero(labels == c)
        if rows.size == 0:
            continue
        for v in intervened.dags[c].topological_order():
            mech = intervened.mechanisms[c][v]
            column = rng.normal(mech.noise_mean, math.sqrt(mech.noise_var), rows.size)
            for parent, weight in zip(mech.parents, mech.weights):
                column = column + weight * data[rows, parent]
            data[rows, v] = column
    return data, labels


def sample(
    model: MixtureModel,
    targets: Iterable[int],
    count: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Like :func:`sample_with_labels` but without the label column."""
    data, _ = sample_with_labels(model, targets, count, rng)
    return data
