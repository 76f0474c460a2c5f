"""Mixtures of linear-Gaussian DAG models and their interventional graphs.

A mixture holds several component DAGs over the same nodes, one linear
mechanism per node per component, a mixing distribution over components, and
one shared exogenous mechanism per node used whenever that node is
intervened. Hard interventions cut the incoming edges of every target in
every component and swap the target's mechanism for the shared one.

All values here are immutable; interventions return new models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import Dag, ancestor_masks

__all__ = [
    "NodeMechanism",
    "MixtureModel",
    "MixtureRelations",
    "MixtureGraph",
    "mixture_graph",
    "CHANGE_TOLERANCE",
]

# Generated models carry exact parameter copies for shared mechanisms, so a
# tight tolerance suffices; models estimated from data would need a looser one.
CHANGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class NodeMechanism:
    """Linear-Gaussian conditional: X = sum(weights * X[parents]) + noise."""

    parents: tuple[int, ...]
    weights: tuple[float, ...]
    noise_mean: float
    noise_var: float

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(int(p) for p in self.parents))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.parents) != len(self.weights):
            raise ValueError("one weight per parent is required")
        if list(self.parents) != sorted(set(self.parents)):
            raise ValueError("parents must be strictly increasing")
        if not self.noise_var > 0:
            raise ValueError(f"noise variance must be positive, got {self.noise_var}")

    def differs_from(self, other: "NodeMechanism", tolerance: float) -> bool:
        if self.parents != other.parents:
            return True
        if any(abs(a - b) > tolerance for a, b in zip(self.weights, other.weights)):
            return True
        return (
            abs(self.noise_mean - other.noise_mean) > tolerance
            or abs(self.noise_var - other.noise_var) > tolerance
        )


@dataclass(frozen=True)
class MixtureRelations:
    """Unions over components of per-node parent/child/ancestor/descendant sets."""

    parents: tuple[frozenset[int], ...]
    children: tuple[frozenset[int], ...]
    ancestors: tuple[frozenset[int], ...]
    descendants: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class MixtureModel:
    """K component DAGs with mechanisms, a mixing pmf and shared intervention
    mechanisms.

    ``mechanisms[component][node]`` must agree with the parent sets of
    ``dags[component]``. ``mixing=None`` means uniform. ``generator_seed`` is
    provenance metadata carried through serialization.
    """

    dags: tuple[Dag, ...]
    mechanisms: tuple[tuple[NodeMechanism, ...], ...]
    intervention_means: tuple[float, ...]
    intervention_vars: tuple[float, ...]
    mixing: tuple[float, ...] | None = None
    generator_seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dags", tuple(self.dags))
        object.__setattr__(self, "mechanisms", tuple(tuple(ms) for ms in self.mechanisms))
        object.__setattr__(
            self, "intervention_means", tuple(float(x) for x in self.intervention_means)
        )
        object.__setattr__(
            self, "intervention_vars", tuple(float(x) for x in self.intervention_vars)
        )
        if not self.dags:
            raise ValueError("at least one component is required")
        n = self.dags[0].n
        if any(not isinstance(d, Dag) for d in self.dags):
            raise ValueError("components must be Dag instances")
        if any(d.n != n for d in self.dags):
            raise ValueError("all components must share the node set")
        if len(self.mechanisms) != self.k:
            raise ValueError("one mechanism set per component is required")
        for dag, mechs in zip(self.dags, self.mechanisms):
            if len(mechs) != n:
                raise ValueError("one mechanism per node is required")
            for node, mech in enumerate(mechs):
                if mech.parents != tuple(sorted(dag.parents(node))):
                    raise ValueError(
                        f"mechanism parents {mech.parents} do not match the "
                        f"component parents of node {node}"
                    )
        if self.mixing is None:
            object.__setattr__(self, "mixing", tuple(1.0 / self.k for _ in self.dags))
        else:
            object.__setattr__(self, "mixing", tuple(float(p) for p in self.mixing))
        if len(self.mixing) != self.k:
            raise ValueError("mixing pmf must have one entry per component")
        if any(p <= 0 for p in self.mixing):
            raise ValueError("mixing probabilities must be positive")
        if not math.isclose(sum(self.mixing), 1.0, abs_tol=1e-9):
            raise ValueError(f"mixing pmf must sum to 1, got {sum(self.mixing)}")
        if len(self.intervention_means) != n or len(self.intervention_vars) != n:
            raise ValueError("intervention mechanisms must cover every node")
        if any(v <= 0 for v in self.intervention_vars):
            raise ValueError("intervention variances must be positive")

    @property
    def n(self) -> int:
        return self.dags[0].n

    @property
    def k(self) -> int:
        return len(self.dags)

    # -- structure ----------------------------------------------------------

    def changed_nodes(self, tolerance: float = CHANGE_TOLERANCE) -> frozenset[int]:
        """Nodes whose conditional mechanism differs between some pair of
        components (parent set, weights, or noise parameters beyond
        ``tolerance``)."""
        changed = set()
        for node in range(self.n):
            reference = self.mechanisms[0][node]
            for component in range(1, self.k):
                if self.mechanisms[component][node].differs_from(reference, tolerance):
                    changed.add(node)
                    break
        return frozenset(changed)

    def true_edges(self) -> frozenset[tuple[int, int]]:
        """Directed edges present in at least one component."""
        return frozenset(edge for dag in self.dags for edge in dag.edges)

    def relations(self) -> MixtureRelations:
        n = self.n
        parents = [set() for _ in range(n)]
        children = [set() for _ in range(n)]
        ancestors = [set() for _ in range(n)]
        descendants = [set() for _ in range(n)]
        for dag in self.dags:
            for v in range(n):
                parents[v] |= dag.parents(v)
                children[v] |= dag.children(v)
                ancestors[v] |= dag.ancestors(v)
                descendants[v] |= dag.descendants(v)
        return MixtureRelations(
            parents=tuple(frozenset(s) for s in parents),
            children=tuple(frozenset(s) for s in children),
            ancestors=tuple(frozenset(s) for s in ancestors),
            descendants=tuple(frozenset(s) for s in descendants),
        )

    # -- interventions ------------------------------------------------------

    def intervene(self, targets: Iterable[int]) -> "MixtureModel":
        """Hard intervention: cut edges into each target in every component
        and replace the targets' mechanisms by the shared exogenous ones."""
        targets = _node_set(targets, self.n)
        if not targets:
            return self
        new_dags = []
        new_mechs = []
        for dag, mechs in zip(self.dags, self.mechanisms):
            new_dags.append(
                Dag(self.n, ((u, v) for u, v in dag.edges if v not in targets))
            )
            row = list(mechs)
            for t in targets:
                row[t] = NodeMechanism(
                    (), (), self.intervention_means[t], self.intervention_vars[t]
                )
            new_mechs.append(tuple(row))
        return MixtureModel(
            dags=tuple(new_dags),
            mechanisms=tuple(new_mechs),
            intervention_means=self.intervention_means,
            intervention_vars=self.intervention_vars,
            mixing=self.mixing,
            generator_seed=self.generator_seed,
        )

    def component_dag(self, component: int, targets: Iterable[int] = ()) -> Dag:
        """One component's DAG after cutting the edges into ``targets``."""
        targets = _node_set(targets, self.n)
        dag = self.dags[component]
        if not targets:
            return dag
        return Dag(self.n, ((u, v) for u, v in dag.edges if v not in targets))

    def has_path_through_changed(
        self,
        component: int,
        src: int,
        dst: int,
        targets: Iterable[int] = (),
        child_only: bool = False,
    ) -> bool:
        """Whether the post-intervention component has a directed path from
        ``src`` to ``dst`` through an intermediate changed-mechanism node.

        With ``child_only`` the intermediate node must additionally be a
        direct child of ``src``.
        """
        if src == dst:
            raise ValueError("src and dst must differ")
        targets = _node_set(targets, self.n)
        dag = self.component_dag(component, targets)
        candidates = (self.changed_nodes() - targets) - {src, dst}
        if child_only:
            candidates &= dag.children(src)
        else:
            candidates &= dag.descendants(src)
        return any(dst in dag.descendants(u) for u in candidates)


@dataclass(frozen=True)
class MixtureGraph:
    """Pooled interventional graph over node copies plus a selector node.

    Component ``c``'s copy of node ``v`` sits at index ``c*n + v``; the extra
    selector node (index ``n*k``) points at every copy of every node whose
    mechanism still differs across components after the intervention. Exact
    conditional-independence statements about the interventional mixture
    distribution are d-separation statements between copy sets in this graph.
    """

    graph: Dag
    n: int
    k: int
    changed: frozenset[int]
    _masks: tuple[int, ...] = field(repr=False, default=())

    @property
    def selector(self) -> int:
        return self.n * self.k

    def copy_index(self, node: int, component: int) -> int:
        if not (0 <= node < self.n and 0 <= component < self.k):
            raise ValueError(f"no copy of node {node} in component {component}")
        return component * self.n + node

    def copies(self, nodes: Iterable[int]) -> frozenset[int]:
        """All component copies of the given original nodes."""
        return frozenset(
            self.copy_index(v, c) for v in nodes for c in range(self.k)
        )

    def marginally_connected(self, i: int, j: int) -> bool:
        """Fast conditioning-free d-connection test between copy sets of two
        original nodes (true iff some pair of copies shares an ancestor)."""
        mask_i = mask_j = 0
        for c in range(self.k):
            mask_i |= self._masks[self.copy_index(i, c)]
            mask_j |= self._masks[self.copy_index(j, c)]
        return bool(mask_i & mask_j)


def mixture_graph(model: MixtureModel, targets: Iterable[int] = ()) -> MixtureGraph:
    """Build the pooled interventional graph for a model and intervention."""
    targets = _node_set(targets, model.n)
    n, k = model.n, model.k
    changed = model.changed_nodes() - targets
    edges: list[tuple[int, int]] = []
    selector = n * k
    for c in range(k):
        base = c * n
        for u, v in model.component_dag(c, targets).edges:
            edges.append((base + u, base + v))
        for v in changed:
            edges.append((selector, base + v))
    graph = Dag(n * k + 1, edges)
    return MixtureGraph(
        graph=graph,
        n=n,
        k=k,
        changed=changed,
        _masks=tuple(ancestor_masks(graph)),
    )


def _node_set(nodes: Iterable[int], n: int) -> frozenset[int]:
    out = frozenset(int(v) for v in nodes)
    for v in out:
        if not (0 <= v < n):
            raise ValueError(f"node {v} out of range for n={n}")
    return out
