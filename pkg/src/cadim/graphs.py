"""Directed-graph primitives.

Small immutable graphs over integer nodes ``0..n-1`` with the operations the
rest of the package is built on: reachability, d-separation, simple-cycle
enumeration (Johnson's algorithm) and exact minimum feedback vertex sets.
Everything here is a pure function of its inputs, so graph values can be
shared freely across threads.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from typing import Iterable, Iterator

__all__ = [
    "CyclicGraphError",
    "Digraph",
    "Dag",
    "is_acyclic",
    "topological_order",
    "d_separated",
    "simple_cycles",
    "strongly_connected_components",
    "minimum_feedback_vertex_set",
    "ancestor_masks",
]


class CyclicGraphError(ValueError):
    """An operation that requires acyclicity was given a cyclic digraph."""


class Digraph:
    """Immutable directed graph on nodes ``0..n-1``. Self-loops are rejected."""

    __slots__ = ("n", "edges", "_parents", "_children")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError(f"node count must be nonnegative, got {n}")
        edge_set = frozenset((int(u), int(v)) for u, v in edges)
        parents: list[set[int]] = [set() for _ in range(n)]
        children: list[set[int]] = [set() for _ in range(n)]
        for u, v in edge_set:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u} is not allowed")
            children[u].add(v)
            parents[v].add(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "_parents", tuple(frozenset(s) for s in parents))
        object.__setattr__(self, "_children", tuple(frozenset(s) for s in children))

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((type(self).__name__, self.n, self.edges))

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, edges={sorted(self.edges)})"

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.edges

    def parents(self, i: int) -> frozenset[int]:
        self._check_node(i)
        return self._parents[i]

    def children(self, i: int) -> frozenset[int]:
        self._check_node(i)
        return self._children[i]

    def descendants(self, i: int) -> frozenset[int]:
        """Nodes reachable from ``i`` by a directed path, excluding ``i``."""
        return self._reach(i, self._children)

    def ancestors(self, i: int) -> frozenset[int]:
        """Nodes from which ``i`` is reachable, excluding ``i``."""
        return self._reach(i, self._parents)

    def _reach(self, i: int, adjacency) -> frozenset[int]:
        self._check_node(i)
        seen: set[int] = set()
        stack = list(adjacency[i])
        while stack:
            v = stack.pop()
            if v not in seen:
                seen.add(v)
                stack.extend(adjacency[v] - seen)
        seen.discard(i)
        return frozenset(seen)

    def induced_subgraph(self, nodes: Iterable[int]) -> "Digraph":
        """Same node range, keeping only edges with both endpoints in ``nodes``."""
        keep = frozenset(nodes)
        return type(self)(self.n, ((u, v) for u, v in self.edges if u in keep and v in keep))

    def is_acyclic(self) -> bool:
        try:
            self.topological_order()
        except CyclicGraphError:
            return False
        return True

    def topological_order(self) -> list[int]:
        """Kahn's algorithm; smallest-index-first for determinism."""
        indegree = [len(self._parents[v]) for v in range(self.n)]
        ready = [v for v in range(self.n) if indegree[v] == 0]
        order: list[int] = []
        heapq.heapify(ready)
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for w in self._children[v]:
                indegree[w] -= 1
                if indegree[w] == 0:
                    heapq.heappush(ready, w)
        if len(order) != self.n:
            raise CyclicGraphError("digraph contains a directed cycle")
        return order

    def _check_node(self, i: int) -> None:
        if not (0 <= i < self.n):
            raise ValueError(f"node {i} out of range for n={self.n}")


class Dag(Digraph):
    """A :class:`Digraph` that is verified acyclic at construction."""

    __slots__ = ()

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        super().__init__(n, edges)
        super().topological_order()  # raises CyclicGraphError on a cycle


def is_acyclic(g: Digraph) -> bool:
    return g.is_acyclic()


def topological_order(g: Digraph) -> list[int]:
    return g.topological_order()


def d_separated(
    g: Digraph,
    a: Iterable[int],
    b: Iterable[int],
    conditioning: Iterable[int] = (),
) -> bool:
    """Whether node sets ``a`` and ``b`` are d-separated given ``conditioning``.

    Uses the linear-time reachability formulation: breadth-first search over
    (node, approach-direction) states, where a chain or fork is traversable
    iff its middle node is unconditioned and a collider is traversable iff it
    or one of its descendants is conditioned on.

    Raises ``ValueError`` if the three sets overlap and ``CyclicGraphError``
    if ``g`` has a directed cycle.
    """
    a, b, cond = frozenset(a), frozenset(b), frozenset(conditioning)
    if (a & b) or (a & cond) or (b & cond):
        raise ValueError("query node sets must be pairwise disjoint")
    for x in itertools.chain(a, b, cond):
        g._check_node(x)
    if not isinstance(g, Dag) and not g.is_acyclic():
        raise CyclicGraphError("d-separation requires an acyclic digraph")
    if not a or not b:
        return True

    # conditioning set plus its ancestors; opens colliders
    opened = set(cond)
    stack = list(cond)
    while stack:
        v = stack.pop()
        for p in g.parents(v):
            if p not in opened:
                opened.add(p)
                stack.append(p)

    UP, DOWN = True, False
    queue: deque[tuple[int, bool]] = deque((x, UP) for x in a)
    visited: set[tuple[int, bool]] = set()
    while queue:
        v, direction = queue.popleft()
        if (v, direction) in visited:
            continue
        visited.add((v, direction))
        if v in b:
            return False
        if direction == UP and v not in cond:
            for p in g.parents(v):
                queue.append((p, UP))
            for c in g.children(v):
                queue.append((c, DOWN))
        elif direction == DOWN:
            if v not in cond:
                for c in g.children(v):
                    queue.append((c, DOWN))
            if v in opened:
                for p in g.parents(v):
                    queue.append((p, UP))
    return True


def ancestor_masks(g: Digraph) -> list[int]:
    """Per-node bitmask of the node itself plus all its ancestors.

    Two nodes are marginally d-connected in a DAG iff their masks intersect
    (they share a common ancestor or one is an ancestor of the other), which
    makes this the fast path for conditioning-free queries.
    """
    masks = [0] * g.n
    for v in g.topological_order():
        m = 1 << v
        for p in g.parents(v):
            m |= masks[p]
        masks[v] = m
    return masks


def strongly_connected_components(g: Digraph) -> list[frozenset[int]]:
    """Tarjan's algorithm, iterative; components ordered by smallest member."""
    index_of: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    components: list[frozenset[int]] = []
    counter = itertools.count()

    for root in range(g.n):
        if root in index_of:
            continue
        work: list[tuple[int, Iterator[int]]] = [(root, iter(sorted(g.children(root))))]
        index_of[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index_of:
                    index_of[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(g.children(w)))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index_of[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index_of[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                components.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    components.sort(key=min)
    return components


def simple_cycles(g: Digraph) -> list[tuple[int, ...]]:
    """All simple directed cycles, each reported once.

    Johnson's algorithm. Every cycle is rotated so its smallest node comes
    first and the leading node is repeated at the end, e.g. ``(1, 4, 1)``;
    the returned list is sorted lexicographically.
    """
    cycles: list[tuple[int, ...]] = []
    for s in range(g.n):
        comp = _scc_through(g, s)
        if len(comp) < 2:
            continue
        adj = {v: sorted(g.children(v) & comp) for v in comp}
        blocked = {v: False for v in comp}
        blocked_by: dict[int, set[int]] = {v: set() for v in comp}
        path: list[int] = []

        def circuit(v: int) -> bool:
            found = False
            path.append(v)
            blocked[v] = True
            for w in adj[v]:
                if w == s:
                    cycles.append(tuple(path) + (s,))
                    found = True
                elif not blocked[w]:
                    if circuit(w):
                        found = True
            if found:
                _unblock(v, blocked, blocked_by)
            else:
                for w in adj[v]:
                    blocked_by[w].add(v)
            path.pop()
            return found

        circuit(s)
    cycles.sort()
    return cycles


def _unblock(v: int, blocked: dict[int, bool], blocked_by: dict[int, set[int]]) -> None:
    stack = [v]
    while stack:
        u = stack.pop()
        if blocked[u]:
            blocked[u] = False
            stack.extend(blocked_by[u])
            blocked_by[u].clear()


def _scc_through(g: Digraph, s: int) -> frozenset[int]:
    """Strongly connected component of ``s`` in the subgraph on nodes >= s."""
    forward = _filtered_reach(g, s, g.children, s)
    backward = _filtered_reach(g, s, g.parents, s)
    return frozenset((forward & backward) | {s})


def _filtered_reach(g: Digraph, start: int, adjacency, min_node: int) -> set[int]:
    seen: set[int] = set()
    stack = [w for w in adjacency(start) if w >= min_node]
    while stack:
        v = stack.pop()
        if v not in seen:
            seen.add(v)
            stack.extend(w for w in adjacency(v) if w >= min_node and w not in seen)
    return seen


def minimum_feedback_vertex_set(
    g: Digraph,
    *,
    exact_node_limit: int | None = None,
    inclusion_minimal: bool = False,
) -> frozenset[int]:
    """A smallest node set whose removal leaves ``g`` acyclic.

    Solved exactly per nontrivial strongly connected component by branch and
    bound on shortest cycles, with a final pass that picks the
    lexicographically smallest optimal set (deterministic tie-breaking).

    ``exact_node_limit`` caps the component size for the exact search;
    components above the cap fall back to a greedy max-degree heuristic whose
    result is inclusion-minimal but possibly larger than the true minimum.
    ``inclusion_minimal=True`` skips the exact search entirely and returns the
    cheaper inclusion-minimal set for every component.
    """
    picked: set[int] = set()
    for comp in strongly_connected_components(g):
        if len(comp) < 2:
            continue
        children = {v: g.children(v) & comp for v in comp}
        exact = not inclusion_minimal and (
            exact_node_limit is None or len(comp) <= exact_node_limit
        )
        if exact:
            picked |= _exact_fvs(comp, children)
        else:
            picked |= _greedy_fvs(comp, children)
    return frozenset(picked)


def _exact_fvs(comp: frozenset[int], children: dict[int, frozenset[int]]) -> set[int]:
    best = len(_greedy_fvs(comp, children))
    seen: dict[frozenset[int], int] = {}

    def search(active: frozenset[int], depth: int) -> None:
        nonlocal best
        cycle = _shortest_cycle(active, children)
        if cycle is None:
            if depth < best:
                best = depth
            return
        if depth + 1 >= best:
            return
        for v in cycle:
            remaining = active - {v}
            prior = seen.get(remaining)
            if prior is not None and prior <= depth + 1:
                continue
            seen[remaining] = depth + 1
            search(remaining, depth + 1)

    search(frozenset(comp), 0)
    for combo in itertools.combinations(sorted(comp), best):
        if _acyclic_within(comp - set(combo), children):
            return set(combo)
    raise AssertionError("branch-and-bound bound not realized by any subset")


def _greedy_fvs(comp: frozenset[int], children: dict[int, frozenset[int]]) -> set[int]:
    parents: dict[int, set[int]] = {v: set() for v in comp}
    for v, ws in children.items():
        for w in ws:
            parents[w].add(v)
    active = set(comp)
    removed: list[int] = []
    while not _acyclic_within(active, children):
        cyclic_nodes = _nodes_on_cycles(active, children)
        v = max(
            sorted(cyclic_nodes),
            key=lambda u: (
                len(children[u] & cyclic_nodes) + len(parents[u] & cyclic_nodes)
            ),
        )
        removed.append(v)
        active.discard(v)
    result = set(removed)
    for v in sorted(removed):
        if _acyclic_within(comp - (result - {v}), children):
            result.discard(v)
    return result


def _nodes_on_cycles(active: set[int], children: dict[int, frozenset[int]]) -> set[int]:
    """Union of nontrivial SCCs of the induced subgraph on ``active``."""
    sub = Digraph(
        max(active) + 1,
        ((u, v) for u in active for v in children[u] & active),
    )
    out: set[int] = set()
    for comp in strongly_connected_components(sub):
        comp &= active
        if len(comp) >= 2:
            out |= comp
    return out


def _shortest_cycle(
    active: frozenset[int], children: dict[int, frozenset[int]]
) -> list[int] | None:
    best: list[int] | None = None
    for s in sorted(active):
        if best is not None and len(best) == 2:
            break
        prev: dict[int, int] = {}
        queue = deque([s])
        dist = {s: 0}
        hit = False
        while queue and not hit:
            v = queue.popleft()
            if best is not None and dist[v] + 1 >= len(best):
                break
            for w in sorted(children[v] & active):
                if w == s:
                    cycle = [v]
                    while cycle[-1] != s:
                        cycle.append(prev[cycle[-1]])
                    cycle.reverse()
                    if best is None or len(cycle) < len(best):
                        best = cycle
                    hit = True
                    break
                if w not in dist:
                    dist[w] = dist[v] + 1
                    prev[w] = v
                    queue.append(w)
    return best


def _acyclic_within(active: Iterable[int], children: dict[int, frozenset[int]]) -> bool:
    active = set(active)
    indegree = {v: 0 for v in active}
    for v in active:
        for w in children[v] & active:
            indegree[w] += 1
    ready = [v for v in active if indegree[v] == 0]
    count = 0
    while ready:
        v = ready.pop()
        count += 1
        for w in children[v] & active:
            indegree[w] -= 1
            if indegree[w] == 0:
                ready.append(w)
    return count == len(active)
