"""Executable intervention-size theory.

Ground-truth-aware utilities that make the identifiability guarantees
checkable: a per-pair identifiability predicate, the three intervention sets
that always suffice to decide an edge (plus the tighter tree variant), paired
worst-case constructions that are provably indistinguishable up to a declared
intervention size, and cyclic-complexity statistics.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .algorithm import ancestral_digraph
from .graphs import Dag, Digraph, d_separated, minimum_feedback_vertex_set, simple_cycles
from .mixture import MixtureModel, NodeMechanism, mixture_graph

__all__ = [
    "IDENTIFIABLE",
    "NON_IDENTIFIABLE",
    "INCONCLUSIVE",
    "edge_identifiability",
    "SufficientSets",
    "sufficient_sets",
    "tree_sufficient_set",
    "decide_parent",
    "NecessityInstance",
    "necessity_general",
    "necessity_trees",
    "NecessityReport",
    "verify_necessity",
    "CyclicComplexity",
    "cyclic_complexity",
]

IDENTIFIABLE = "identifiable"
NON_IDENTIFIABLE = "non-identifiable"
INCONCLUSIVE = "inconclusive"


def edge_identifiability(
    model: MixtureModel, targets: Iterable[int], i: int, j: int
) -> str:
    """Can CI tests under this intervention decide whether j is a mixture
    parent of i?

    Identifiable when j is intervened and no post-intervention component has
    a path from j to i through a changed node. Non-identifiable when j's
    mechanism still differs across components, when i itself is intervened,
    or when some component keeps a changed-child path from j to i while i's
    mechanism still differs. The two conditions are not exhaustive, so the
    remaining cases report inconclusive rather than guessing.
    """
    if i == j:
        raise ValueError("nodes must differ")
    targets = frozenset(targets)
    changed_after = model.changed_nodes() - targets
    if j in changed_after or i in targets:
        return NON_IDENTIFIABLE
    if i in changed_after and any(
        model.has_path_through_changed(c, j, i, targets, child_only=True)
        for c in range(model.k)
    ):
        return NON_IDENTIFIABLE
    if j in targets and not any(
        model.has_path_through_changed(c, j, i, targets) for c in range(model.k)
    ):
        return IDENTIFIABLE
    return INCONCLUSIVE


@dataclass(frozen=True)
class SufficientSets:
    """Three intervention sets, each of which decides whether j -> i is a
    true edge via an inseparability test.

    Every set contains j. ``parents_reached`` additionally stays inside
    parents-of-i plus j, which is what caps the worst-case sufficient
    intervention size at |parents(i)| + 1; the children-based sets can
    contain non-parents (several children of j can funnel into one parent)
    but are often much smaller in practice.
    """

    parents_reached: frozenset[int]
    children_reaching: frozenset[int]
    changed_between: frozenset[int]

    def all(self) -> tuple[frozenset[int], ...]:
        return (self.parents_reached, self.children_reaching, self.changed_between)


def sufficient_sets(model: MixtureModel, i: int, j: int) -> SufficientSets:
    """The three always-sufficient intervention sets for deciding whether j
    is a mixture parent of i; requires ground truth, so this is an analysis
    utility rather than a learner step."""
    if i == j:
        raise ValueError("nodes must differ")
    changed = model.changed_nodes()
    parents_reached: set[int] = {j}
    children_reaching: set[int] = {j}
    changed_between: set[int] = {j}
    for c in range(model.k):
        dag = model.dags[c]
        descendants_j = dag.descendants(j)
        ancestors_i = dag.ancestors(i)
        parents_reached |= dag.parents(i) & descendants_j
        children_reaching |= ancestors_i & dag.children(j)
        changed_between |= ancestors_i & descendants_j & changed
    return SufficientSets(
        parents_reached=frozenset(parents_reached),
        children_reaching=frozenset(children_reaching),
        changed_between=frozenset(changed_between),
    )


def tree_sufficient_set(model: MixtureModel, i: int, j: int) -> frozenset[int]:
    """For mixtures of directed forests: j plus, per component, the unique
    changed child of j on the path to i (at most one each), so the size never
    exceeds the number of components plus one."""
    if i == j:
        raise ValueError("nodes must differ")
    for c, dag in enumerate(model.dags):
        if any(len(dag.parents(v)) > 1 for v in range(model.n)):
            raise ValueError(f"component {c} is not a directed forest")
    changed = model.changed_nodes()
    out: set[int] = {j}
    for dag in model.dags:
        out |= dag.ancestors(i) & dag.children(j) & changed
    return frozenset(out)


def decide_parent(model: MixtureModel, i: int, j: int, targets: Iterable[int]) -> bool:
    """Decision procedure a sufficient set enables: intervene, then call the
    edge present iff i and j are inseparable (dependent under every
    conditioning set) in the interventional mixture.

    Exhausts conditioning sets, so this is an analysis tool for small n.
    """
    g = mixture_graph(model, targets)
    if not g.marginally_connected(i, j):
        return False
    bar_i, bar_j = g.copies({i}), g.copies({j})
    rest = [v for v in range(model.n) if v not in (i, j)]
    for size in range(1, len(rest) + 1):
        for cond in itertools.combinations(rest, size):
            if d_separated(g.graph, bar_i, bar_j, g.copies(cond)):
                return False
    return True


# ---------------------------------------------------------------------------
# worst-case necessity constructions


@dataclass(frozen=True)
class NecessityInstance:
    """A hypothesis pair that no admissible small intervention can tell apart.

    ``absent`` and ``present`` differ exactly in the candidate edge j -> i.
    Under every intervention of size at most ``bound`` over nodes other than
    i, their oracle answers agree on all queries in ``scope``: the general
    construction sustains scope ``"full"`` (every pair, every conditioning
    set), while for mixtures of directed trees only scope ``"pair"`` (every
    conditioning set for the pair (i, j), which is what an edge-decision test
    consumes) is achievable: the absent construction keeps a hard child ->
    target edge alive under interventions that the present one has no room to
    imitate. ``distinguishing`` is an intervention of size bound + 1 whose
    marginal (i, j) answer separates the two.
    """

    absent: MixtureModel
    present: MixtureModel
    i: int
    j: int
    bound: int
    scope: str = "full"
    distinguishing: frozenset[int] = frozenset()


@dataclass
class NecessityReport:
    bound: int
    scope: str
    interventions_checked: int
    queries_checked: int
    indistinguishable: bool
    mismatches: list[tuple[frozenset[int], int, int, frozenset[int]]]
    distinguishing_intervention: frozenset[int] | None
    distinguished_above_bound: bool


def _uniform_model(n: int, edge_sets: list[list[tuple[int, int]]]) -> MixtureModel:
    """Unit-weight, unit-noise parameterization; mechanism differences then
    come from the graph structure alone."""
    dags = tuple(Dag(n, edges) for edges in edge_sets)
    mechanisms = []
    for dag in dags:
        row = []
        for v in range(n):
            parents = tuple(sorted(dag.parents(v)))
            row.append(NodeMechanism(parents, tuple(1.0 for _ in parents), 0.0, 1.0))
        mechanisms.append(tuple(row))
    return MixtureModel(
        dags=dags,
        mechanisms=tuple(mechanisms),
        intervention_means=tuple(0.0 for _ in range(n)),
        intervention_vars=tuple(1.0 for _ in range(n)),
    )


def necessity_general(
    pa_size: int,
    k: int,
    extra_edge_rng=None,
    verify: bool = True,
) -> NecessityInstance:
    """Worst-case pair for general mixtures, declared bound = pa_size.

    Node 0 is the target i, node 1 the candidate parent j, nodes 2..pa_size+1
    the true parents of i. One component carries only i -> j; another carries
    k -> i together with j -> k for every true parent k, which places i, j
    and all parents in the changed set. The present hypothesis adds j -> i to
    the parent-bearing component. ``extra_edge_rng`` optionally sprinkles
    additional edges (never into i, never j -> i) over the remaining
    components before verification.
    """
    if pa_size < 1:
        raise ValueError("pa_size must be at least 1")
    if k < 2:
        raise ValueError("at least two components are required")
    i, j = 0, 1
    parents = list(range(2, 2 + pa_size))
    n = 2 + pa_size
    first = [(i, j)]
    second = [(p, i) for p in parents] + [(j, p) for p in parents]
    rest: list[list[tuple[int, int]]] = [[] for _ in range(k - 2)]
    if extra_edge_rng is not None:
        for edges in rest:
            for u, v in itertools.permutations(range(n), 2):
                if v == i or (u, v) == (j, i):
                    continue
                if extra_edge_rng.random() < 0.25:
                    if Digraph(n, edges + [(u, v)]).is_acyclic():
                        edges.append((u, v))
    absent = _uniform_model(n, [first, second, *rest])
    present = _uniform_model(n, [first, second + [(j, i)], *rest])
    instance = NecessityInstance(
        absent=absent,
        present=present,
        i=i,
        j=j,
        bound=pa_size,
        scope="full",
        distinguishing=frozenset({j, *parents}),
    )
    if verify:
        report = verify_necessity(instance)
        if not (report.indistinguishable and report.distinguished_above_bound):
            raise ValueError("constructed instance failed exhaustive verification")
    return instance


def necessity_trees(k: int, verify: bool = True) -> NecessityInstance:
    """Worst-case pair for mixtures of k directed trees, declared bound = k.

    Node 0 is i, node 1 is j, node 2 a parent of j in the first tree only,
    and nodes 3..k+2 per-component children of j on a changed-child path to
    i, so the candidate decision set has size k + 1 in the absent hypothesis.
    The present hypothesis makes the last component's path the direct edge
    j -> i. Verified at scope ``"pair"``; see :class:`NecessityInstance`.
    """
    if k < 2:
        raise ValueError("at least two components are required")
    i, j, extra_parent = 0, 1, 2
    children = list(range(3, 3 + k))
    n = 3 + k

    def tree(component: int, direct: bool) -> list[tuple[int, int]]:
        child = children[component]
        edges = [(extra_parent, j)] if component == 0 else []
        if direct:
            edges += [(j, i)]
        else:
            edges += [(j, child), (child, i)]
        return edges

    absent_sets = [tree(c, direct=False) for c in range(k)]
    present_sets = [tree(c, direct=(c == k - 1)) for c in range(k)]
    absent = _uniform_model(n, absent_sets)
    present = _uniform_model(n, present_sets)
    instance = NecessityInstance(
        absent=absent,
        present=present,
        i=i,
        j=j,
        bound=k,
        scope="pair",
        distinguishing=frozenset({j, *children}),
    )
    if verify:
        report = verify_necessity(instance)
        if not (report.indistinguishable and report.distinguished_above_bound):
            raise ValueError("constructed instance failed exhaustive verification")
    return instance


def _oracle_dependent(model, i, j, cond, targets) -> bool:
    g = mixture_graph(model, targets)
    if not cond:
        return g.marginally_connected(i, j)
    return not d_separated(g.graph, g.copies({i}), g.copies({j}), g.copies(cond))


def verify_necessity(
    instance: NecessityInstance,
    distinguishing_intervention: Iterable[int] | None = None,
) -> NecessityReport:
    """Exhaustively compare the two hypotheses' oracle answers.

    Enumerates every intervention of size at most ``bound`` over nodes other
    than i. Under each one, scope ``"full"`` compares every unordered pair
    with every conditioning set, while scope ``"pair"`` compares the pair
    (i, j) with every conditioning set. Then confirms that the instance's
    distinguishing intervention (size bound + 1) separates the hypotheses on
    the marginal (i, j) query.
    """
    absent, present = instance.absent, instance.present
    n, i, j = absent.n, instance.i, instance.j
    others = [v for v in range(n) if v != i]
    if instance.scope == "full":
        pairs = list(itertools.combinations(range(n), 2))
    elif instance.scope == "pair":
        pairs = [(min(i, j), max(i, j))]
    else:
        raise ValueError(f"unknown scope {instance.scope!r}")
    mismatches = []
    interventions = 0
    queries = 0
    for size in range(instance.bound + 1):
        for targets in itertools.combinations(others, size):
            interventions += 1
            tset = frozenset(targets)
            for a, b in pairs:
                rest = [v for v in range(n) if v not in (a, b)]
                for csize in range(len(rest) + 1):
                    for cond in itertools.combinations(rest, csize):
                        queries += 1
                        if _oracle_dependent(absent, a, b, cond, tset) != \
                                _oracle_dependent(present, a, b, cond, tset):
                            mismatches.append((tset, a, b, frozenset(cond)))

    if distinguishing_intervention is not None:
        distinguishing = frozenset(distinguishing_intervention)
    elif instance.distinguishing:
        distinguishing = instance.distinguishing
    else:
        distinguishing = frozenset(absent.relations().parents[i]) | {j}
    separated = _oracle_dependent(absent, i, j, (), distinguishing) != \
        _oracle_dependent(present, i, j, (), distinguishing)
    return NecessityReport(
        bound=instance.bound,
        scope=instance.scope,
        interventions_checked=interventions,
        queries_checked=queries,
        indistinguishable=not mismatches,
        mismatches=mismatches,
        distinguishing_intervention=distinguishing,
        distinguished_above_bound=separated,
    )


# ---------------------------------------------------------------------------
# cyclic complexity


@dataclass(frozen=True)
class CyclicComplexity:
    per_node: tuple[int, ...]
    breaking_sets: tuple[frozenset[int], ...]
    cycle_counts: tuple[int, ...]

    @property
    def mean(self) -> float:
        return sum(self.per_node) / len(self.per_node)

    @property
    def largest(self) -> int:
        return max(self.per_node)


def cyclic_complexity(model: MixtureModel) -> CyclicComplexity:
    """Ground-truth cyclic complexity per node: the minimum number of
    interventions needed to break all cycles among that node's mixture
    ancestors."""
    rel = model.relations()
    sizes = []
    sets = []
    counts = []
    for i in range(model.n):
        graph = ancestral_digraph(model.n, rel.ancestors, rel.ancestors[i])
        breaking = minimum_feedback_vertex_set(graph)
        sizes.append(len(breaking))
        sets.append(breaking)
        counts.append(len(simple_cycles(graph)))
    return CyclicComplexity(
        per_node=tuple(sizes),
        breaking_sets=tuple(sets),
        cycle_counts=tuple(counts),
    )
