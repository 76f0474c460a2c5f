"""Shared fixtures and brute-force oracles for the test suite.

The oracles here are deliberately naive re-derivations (path enumeration,
subset enumeration, closed-form covariance) kept independent of the library
code they check.
"""

import numpy as np

from cadim.graphs import Dag
from cadim.mixture import MixtureModel, NodeMechanism
from cadim.sem import GeneratorConfig, random_mixture


def make_model(n, edge_sets, mixing=None, shared_noise=True):
    """Model with deterministic parameters: weight of edge (u, v) is
    0.5 + 0.2*u + 0.03*v in every component and noise is N(0, 1) everywhere,
    so mechanism changes come from parent-set differences alone."""
    dags = tuple(Dag(n, edges) for edges in edge_sets)
    mechanisms = []
    for dag in dags:
        row = []
        for v in range(n):
            parents = tuple(sorted(dag.parents(v)))
            row.append(
                NodeMechanism(
                    parents=parents,
                    weights=tuple(0.5 + 0.2 * p + 0.03 * v for p in parents),
                    noise_mean=0.0,
                    noise_var=1.0,
                )
            )
        mechanisms.append(tuple(row))
    return MixtureModel(
        dags=dags,
        mechanisms=tuple(mechanisms),
        intervention_means=tuple(0.0 for _ in range(n)),
        intervention_vars=tuple(1.0 for _ in range(n)),
        mixing=mixing,
    )


def emergent_pairs_mixture():
    """Two 4-node components whose pooling makes every pair inseparable.

    Component edges {0>1, 1>2, 2>3} and {2>1, 0>3}; node 0 keeps the same
    mechanism in both, so the changed set is {1, 2, 3}, the true edges are
    {(0,1), (1,2), (2,1), (2,3), (0,3)} and the observationally inseparable
    pairs are all six, with (0,2) and (1,3) backed by no edge.
    """
    return make_model(4, [[(0, 1), (1, 2), (2, 3)], [(2, 1), (0, 3)]])


def golden_cyclic_mixture():
    """Two 5-node components whose ancestor relation is cyclic.

    Mixture ancestors: an(0)={1,4}, an(1)={2,4}, an(2)={}, an(3)={0,1,2,4},
    an(4)={0,1}. The ancestral digraph restricted to an(0) has the single
    cycle (1,4,1); restricted to an(3) it has three cycles; the cyclic
    complexities are (1, 0, 0, 1, 0).
    """
    return make_model(5, [[(1, 0), (0, 4), (4, 3)], [(4, 0), (4, 1), (2, 1), (1, 3)]])


GOLDEN_ANCESTORS = (
    frozenset({1, 4}),
    frozenset({2, 4}),
    frozenset(),
    frozenset({0, 1, 2, 4}),
    frozenset({0, 1}),
)


def random_model(rng, n, k, density=None, **kwargs):
    seed = int(rng.integers(0, 2**31))
    cfg = GeneratorConfig(n=n, k=k, density=density, seed=seed, **kwargs)
    return random_mixture(cfg)


# ---------------------------------------------------------------------------
# brute-force oracles


def bf_active_path_exists(g, x, y, cond):
    """d-connection by exhaustive enumeration of simple undirected trails."""
    cond = set(cond)
    desc = {v: g.descendants(v) for v in range(g.n)}

    def neighbors(v):
        for w in g.children(v):
            yield w, (v, w)
        for w in g.parents(v):
            yield w, (w, v)

    def path_active(path_nodes, path_edges):
        for idx in range(1, len(path_nodes) - 1):
            mid = path_nodes[idx]
            into_prev = path_edges[idx - 1][1] == mid
            into_next = path_edges[idx][1] == mid
            if into_prev and into_next:
                if mid not in cond and not (desc[mid] & cond):
                    return False
            else:
                if mid in cond:
                    return False
        return True

    stack = [([x], [])]
    while stack:
        nodes, edges = stack.pop()
        v = nodes[-1]
        if v == y:
            if path_active(nodes, edges):
                return True
            continue
        for w, e in neighbors(v):
            if w not in nodes:
                stack.append((nodes + [w], edges + [e]))
    return False


def bf_mixture_dependent(model, i, j, cond=(), targets=()):
    """Oracle CI by brute-force path search on the pooled graph: some copy of
    i must be d-connected to some copy of j given all copies of cond."""
    from cadim.mixture import mixture_graph

    g = mixture_graph(model, targets)
    bar_cond = g.copies(cond)
    for ci in range(model.k):
        for cj in range(model.k):
            if bf_active_path_exists(
                g.graph, g.copy_index(i, ci), g.copy_index(j, cj), bar_cond
            ):
                return True
    return False


def component_moments(model, component, targets=()):
    """Closed-form mean and covariance of one linear-Gaussian component."""
    intervened = model.intervene(targets)
    n = intervened.n
    weights = np.zeros((n, n))
    noise_mean = np.zeros(n)
    noise_var = np.zeros(n)
    for v in range(n):
        mech = intervened.mechanisms[component][v]
        noise_mean[v] = mech.noise_mean
        noise_var[v] = mech.noise_var
        for p, w in zip(mech.parents, mech.weights):
            weights[p, v] = w
    transfer = np.linalg.inv(np.eye(n) - weights.T)
    mean = transfer @ noise_mean
    cov = transfer @ np.diag(noise_var) @ transfer.T
    return mean, cov
