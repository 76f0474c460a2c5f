"""Observational baseline: what CI tests alone can and cannot learn.

Starting from the complete undirected graph, each pair is tested against
conditioning sets of growing size and dropped at the first independence.
What survives is the set of inseparable pairs, which for a mixture is a
strict superset of the true-edge skeleton whenever pooling manufactures
dependence between nonadjacent nodes; classifying the survivors against
ground truth exhibits exactly that gap.

The search spends O(n^2 * 2^n) queries, so node counts above the guard
require an explicit override.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping

from .independence import CiBackend

__all__ = [
    "InseparablePairs",
    "PairClassification",
    "learn_inseparable_pairs",
    "classify_pairs",
    "skeleton",
]

EXHAUSTIVE_NODE_GUARD = 15


@dataclass(frozen=True)
class InseparablePairs:
    """Pairs (i, j) with i < j that no conditioning set separated, plus the
    first separating set found for every pair that was dropped."""

    pairs: frozenset[tuple[int, int]]
    separating_sets: Mapping[tuple[int, int], frozenset[int]]

    def __contains__(self, pair) -> bool:
        i, j = pair
        return (min(i, j), max(i, j)) in self.pairs


@dataclass(frozen=True)
class PairClassification:
    """Inseparable pairs split by whether some component carries the edge."""

    edge_backed: frozenset[tuple[int, int]]
    emergent: frozenset[tuple[int, int]]


def learn_inseparable_pairs(
    backend: CiBackend,
    n: int,
    *,
    max_nodes: int = EXHAUSTIVE_NODE_GUARD,
    force: bool = False,
) -> InseparablePairs:
    """Exhaustive observational CI search over all pairs.

    Conditioning sets are enumerated size-ascending, lexicographically within
    a size, and the first independent verdict both removes the pair and is
    recorded as its separating set, so results are deterministic for a
    deterministic backend.
    """
    if n > max_nodes and not force:
        raise ValueError(
            f"exhaustive search over {n} nodes needs 2^{n - 2} tests per pair; "
            f"pass force=True to run anyway"
        )
    pairs: set[tuple[int, int]] = set()
    separating: dict[tuple[int, int], frozenset[int]] = {}
    for i, j in itertools.combinations(range(n), 2):
        rest = [v for v in range(n) if v != i and v != j]
        separator = None
        for size in range(len(rest) + 1):
            for cond in itertools.combinations(rest, size):
                if not backend.dependent(i, j, conditioning=cond):
                    separator = frozenset(cond)
                    break
            if separator is not None:
                break
        if separator is None:
            pairs.add((i, j))
        else:
            separating[(i, j)] = separator
    return InseparablePairs(pairs=frozenset(pairs), separating_sets=separating)


def skeleton(edges: Iterable[tuple[int, int]]) -> frozenset[tuple[int, int]]:
    """Undirected version of a directed edge set, pairs normalized i < j."""
    return frozenset((min(u, v), max(u, v)) for u, v in edges)


def classify_pairs(
    pairs: InseparablePairs, true_edges: Iterable[tuple[int, int]]
) -> PairClassification:
    """Split inseparable pairs into edge-backed and emergent against truth."""
    backed = skeleton(true_edges)
    return PairClassification(
        edge_backed=frozenset(p for p in pairs.pairs if p in backed),
        emergent=frozenset(p for p in pairs.pairs if p not in backed),
    )
