"""The CADIM learner: adaptive interventions that recover every true edge.

The procedure runs in four steps against a CI backend:

1. intervene on each single node and read off mixture descendants, hence
   mixture ancestors, from marginal dependence;
2. per target node, break the cycles that the ancestor relation forms among
   its ancestors (minimum feedback vertex set of the ancestral digraph) and,
   intervening on breaking-set-plus-one-node, collect cycle-free descendant
   sets;
3. peel the refined ancestors into topological layers using those sets;
4. walk the layers in order, intervening on estimated-parents plus breaking
   set plus candidate, and keep each candidate whose dependence with the
   target survives.

Every query the learner issues is marginal (empty conditioning set). Each
issued intervention is recorded with its step, target and node set, which is
what the intervention-size and intervention-count guarantees are checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .graphs import Digraph, minimum_feedback_vertex_set, simple_cycles, strongly_connected_components
from .independence import CiBackend

__all__ = [
    "AncestorEstimate",
    "NodeWorkspace",
    "InterventionRecord",
    "CadimResult",
    "LayeringStallError",
    "ancestral_digraph",
    "identify_ancestors",
    "cycle_free_descendants",
    "topological_layers",
    "identify_parents",
    "run_cadim",
]

STEP_ANCESTORS = 1
STEP_CYCLE_FREE = 2
STEP_PARENTS = 4

DEFAULT_EXACT_FVS_LIMIT = 20


class LayeringStallError(RuntimeError):
    """Layering found no placeable node while candidates remain, which the
    cycle-breaking construction rules out for exact answers."""


@dataclass(frozen=True)
class InterventionRecord:
    """One issued intervention: which step, for which target, on which set."""

    step: int
    target: int
    nodes: frozenset[int]

    @property
    def size(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class AncestorEstimate:
    """Step-1 output: estimated mixture descendants/ancestors per node."""

    descendants: tuple[frozenset[int], ...]
    ancestors: tuple[frozenset[int], ...]

    @property
    def n(self) -> int:
        return len(self.descendants)


@dataclass
class NodeWorkspace:
    """Per-target state accumulated across steps 2-4."""

    target: int
    ancestors: frozenset[int]
    cycles: tuple[tuple[int, ...], ...] = ()
    breaking_set: frozenset[int] = frozenset()
    fvs_exact: bool = True
    cycle_free_descendants: dict[int, frozenset[int]] = field(default_factory=dict)
    refined: frozenset[int] = frozenset()
    layers: tuple[frozenset[int], ...] = ()
    forced_layers: int = 0
    parents: frozenset[int] = frozenset()

    @property
    def cyclic_complexity(self) -> int:
        return len(self.breaking_set)


@dataclass
class CadimResult:
    """Learned parent sets plus the full intervention accounting."""

    n: int
    parent_sets: tuple[frozenset[int], ...]
    workspaces: tuple[NodeWorkspace, ...]
    interventions: tuple[InterventionRecord, ...]

    @property
    def edges(self) -> frozenset[tuple[int, int]]:
        return frozenset(
            (j, i) for i, parents in enumerate(self.parent_sets) for j in parents
        )

    @property
    def total_interventions(self) -> int:
        return len(self.interventions)

    @property
    def cyclic_complexities(self) -> tuple[int, ...]:
        return tuple(ws.cyclic_complexity for ws in self.workspaces)

    def records_for(self, target: int) -> list[InterventionRecord]:
        return [rec for rec in self.interventions if rec.target == target]

    def max_intervention_size(self, target: int | None = None) -> int:
        records = self.interventions if target is None else self.records_for(target)
        return max((rec.size for rec in records), default=0)


def ancestral_digraph(
    n: int, ancestor_sets: Sequence[frozenset[int]], members: Iterable[int]
) -> Digraph:
    """Digraph on ``members`` with an edge u -> v whenever u is an ancestor
    of v; the cycles of this graph are what step 2 has to break."""
    members = frozenset(members)
    return Digraph(
        n,
        (
            (u, v)
            for v in members
            for u in ancestor_sets[v] & members
            if u != v
        ),
    )


def identify_ancestors(
    backend: CiBackend, n: int, log: list[InterventionRecord] | None = None
) -> AncestorEstimate:
    """Step 1: one single-node intervention per node; everything still
    marginally dependent on the intervened node is one of its descendants."""
    descendants = []
    for i in range(n):
        intervention = frozenset({i})
        if log is not None:
            log.append(InterventionRecord(STEP_ANCESTORS, i, intervention))
        descendants.append(
            frozenset(
                j
                for j in range(n)
                if j != i and backend.dependent(j, i, intervention=intervention)
            )
        )
    ancestors = [
        frozenset(j for j in range(n) if i in descendants[j]) for i in range(n)
    ]
    return AncestorEstimate(descendants=tuple(descendants), ancestors=tuple(ancestors))


def cycle_free_descendants(
    backend: CiBackend,
    target: int,
    estimate: AncestorEstimate,
    *,
    exact_fvs_limit: int | None = DEFAULT_EXACT_FVS_LIMIT,
    log: list[InterventionRecord] | None = None,
) -> NodeWorkspace:
    """Step 2: break ancestral cycles and refine each ancestor's descendant
    set to one that respects a topological order.

    Without cycles this costs no interventions; otherwise one intervention of
    size at most |breaking set| + 1 per ancestor.
    """
    anc = estimate.ancestors[target]
    ws = NodeWorkspace(target=target, ancestors=anc)
    graph = ancestral_digraph(estimate.n, estimate.ancestors, anc)
    ws.cycles = tuple(simple_cycles(graph))
    if not ws.cycles:
        ws.breaking_set = frozenset()
        for j in sorted(anc):
            ws.cycle_free_descendants[j] = (estimate.descendants[j] & anc) | {target}
    else:
        if exact_fvs_limit is not None:
            largest = max(
                (len(c) for c in strongly_connected_components(graph)), default=0
            )
            ws.fvs_exact = largest <= exact_fvs_limit
        ws.breaking_set = minimum_feedback_vertex_set(
            graph, exact_node_limit=exact_fvs_limit
        )
        scope = anc | {target}
        for j in sorted(anc):
            intervention = ws.breaking_set | {j}
            if log is not None:
                log.append(InterventionRecord(STEP_CYCLE_FREE, target, intervention))
            ws.cycle_free_descendants[j] = frozenset(
                k
                for k in scope
                if k != j and backend.dependent(j, k, intervention=intervention)
            )
    ws.refined = frozenset(
        j for j in anc if target in ws.cycle_free_descendants[j]
    )
    return ws


def topological_layers(ws: NodeWorkspace, *, recover_stalls: bool = False) -> NodeWorkspace:
    """Step 3: repeatedly peel off the nodes with no remaining cycle-free
    descendant among the candidates.

    With exact answers every round places at least one node. Noisy answers can
    produce a cyclic descendant relation and stall; ``recover_stalls`` then
    force-places the node with the fewest remaining descendants (smallest
    index on ties) instead of raising :class:`LayeringStallError`.
    """
    remaining = set(ws.refined)
    layers: list[frozenset[int]] = []
    forced = 0
    while remaining:
        layer = frozenset(
            j for j in remaining if not (ws.cycle_free_descendants[j] & remaining)
        )
        if not layer:
            if not recover_stalls:
                raise LayeringStallError(
                    f"no placeable node among {sorted(remaining)} for target {ws.target}"
                )
            pick = min(
                sorted(remaining),
                key=lambda j: len(ws.cycle_free_descendants[j] & remaining),
            )
            layer = frozenset({pick})
            forced += 1
        layers.append(layer)
        remaining -= layer
    ws.layers = tuple(layers)
    ws.forced_layers = forced
    return ws


def identify_parents(
    backend: CiBackend,
    ws: NodeWorkspace,
    log: list[InterventionRecord] | None = None,
) -> NodeWorkspace:
    """Step 4: process layers in order; a candidate is a parent iff it stays
    dependent on the target once the already-found parents, the breaking set
    and the candidate itself are all intervened."""
    parents: set[int] = set()
    for layer in ws.layers:
        for j in sorted(layer):
            intervention = frozenset(parents) | ws.breaking_set | {j}
            if log is not None:
                log.append(InterventionRecord(STEP_PARENTS, ws.target, intervention))
            if backend.dependent(j, ws.target, intervention=intervention):
                parents.add(j)
    ws.parents = frozenset(parents)
    return ws


def run_cadim(
    backend: CiBackend,
    n: int,
    *,
    exact_fvs_limit: int | None = DEFAULT_EXACT_FVS_LIMIT,
    recover_stalls: bool = True,
) -> CadimResult:
    """Run all four steps for every target node and collect the results."""
    log: list[InterventionRecord] = []
    estimate = identify_ancestors(backend, n, log)
    workspaces = []
    for target in range(n):
        ws = cycle_free_descendants(
            backend, target, estimate, exact_fvs_limit=exact_fvs_limit, log=log
        )
        topological_layers(ws, recover_stalls=recover_stalls)
        identify_parents(backend, ws, log)
        workspaces.append(ws)
    return CadimResult(
        n=n,
        parent_sets=tuple(ws.parents for ws in workspaces),
        workspaces=tuple(workspaces),
        interventions=tuple(log),
    )
