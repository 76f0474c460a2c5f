"""Conditional-independence queries against interventional mixture models.

Two interchangeable backends answer the question "are X_i and X_j dependent
given X_A under the intervention I?":

* :class:`OracleBackend` answers exactly, as d-separation between the copy
  sets of i and j given the copies of A in the pooled interventional graph
  (the infinite-sample regime under Markov plus faithfulness).
* :class:`SampleBackend` answers from finite data with a partial-correlation
  test and Fisher's z transform, drawing and caching one dataset per distinct
  intervention so repeated queries stay consistent within a run.

Both backends count queries served, distinct interventions used, and the
largest intervention size. The oracle is pure and freely shareable; the
sample backend mutates its dataset cache, so give each concurrent task its
own instance or serialize calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.stats import norm

from .graphs import d_separated
from .mixture import MixtureGraph, MixtureModel, mixture_graph
from .sem import sample

__all__ = [
    "CiQuery",
    "QueryRecord",
    "CiTestResult",
    "partial_correlation_test",
    "CiBackend",
    "OracleBackend",
    "SampleBackend",
]

RHO_CLAMP = 0.99999


@dataclass(frozen=True)
class CiQuery:
    """Is X_i dependent on X_j given X_conditioning under the intervention?"""

    i: int
    j: int
    conditioning: frozenset[int] = frozenset()
    intervention: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "conditioning", frozenset(self.conditioning))
        object.__setattr__(self, "intervention", frozenset(self.intervention))
        if self.i == self.j:
            raise ValueError("query nodes must differ")
        if self.i in self.conditioning or self.j in self.conditioning:
            raise ValueError("query nodes cannot appear in the conditioning set")


@dataclass(frozen=True)
class QueryRecord:
    index: int
    i: int
    j: int
    conditioning: frozenset[int]
    intervention: frozenset[int]
    dependent: bool
    backend: str


@dataclass(frozen=True)
class CiTestResult:
    dependent: bool
    rho: float
    statistic: float
    degenerate: bool = False


def _partial_rho(matrix: np.ndarray) -> tuple[float, bool]:
    """Partial correlation of variables 0 and 1 given the rest, from their
    joint correlation matrix. Returns ``(rho, degenerate)``."""
    if not np.all(np.isfinite(matrix)):
        return 0.0, True
    if matrix.shape[0] == 2:
        rho = float(matrix[0, 1])
    else:
        try:
            precision = np.linalg.inv(matrix)
        except np.linalg.LinAlgError:
            return 0.0, True
        denom = precision[0, 0] * precision[1, 1]
        if denom <= 0:
            return 0.0, True
        rho = float(-precision[0, 1] / math.sqrt(denom))
    if not math.isfinite(rho):
        return 0.0, True
    return rho, False


def _fisher_z_verdict(
    rho: float, degenerate: bool, rows: int, cond_size: int, alpha: float
) -> CiTestResult:
    if degenerate:
        # a singular conditioning covariance signals a deterministic relation
        return CiTestResult(dependent=True, rho=rho, statistic=math.inf, degenerate=True)
    clamped = max(-RHO_CLAMP, min(RHO_CLAMP, rho))
    statistic = math.sqrt(rows - cond_size - 3) * abs(math.atanh(clamped))
    threshold = norm.ppf(1 - alpha / 2)
    return CiTestResult(dependent=statistic > threshold, rho=rho, statistic=statistic)


def partial_correlation_test(
    data: np.ndarray,
    i: int,
    j: int,
    conditioning: Iterable[int] = (),
    alpha: float = 0.05,
) -> CiTestResult:
    """Fisher-z partial-correlation test on columns of a sample matrix.

    The partial correlation is computed from the inverse of the correlation
    submatrix of (i, j, conditioning); the null of zero partial correlation
    is rejected when sqrt(rows - |conditioning| - 3) * |atanh(rho)| exceeds
    the two-sided normal quantile at level ``alpha``.
    """
    cond = sorted(set(int(c) for c in conditioning))
    if i == j or i in cond or j in cond:
        raise ValueError("test variables must be distinct from the conditioning set")
    data = np.asarray(data, dtype=float)
    rows = data.shape[0]
    if rows < len(cond) + 4:
        raise ValueError(
            f"need at least {len(cond) + 4} rows for |conditioning|={len(cond)}, got {rows}"
        )
    columns = [i, j, *cond]
    with np.errstate(invalid="ignore", divide="ignore"):
        corr = np.corrcoef(data[:, columns].T)
    rho, degenerate = _partial_rho(np.atleast_2d(corr))
    return _fisher_z_verdict(rho, degenerate, rows, len(cond), alpha)


class CiBackend:
    """Query contract plus accounting shared by all backends."""

    name = "abstract"

    def __init__(self):
        self.queries_served = 0
        self.max_intervention_size = 0
        self.query_log: list[QueryRecord] = []
        self._interventions: dict[frozenset[int], int] = {}

    def answer(self, query: CiQuery) -> bool:
        """True iff the backend calls the pair dependent."""
        dependent = self._answer(query)
        self._interventions.setdefault(query.intervention, len(self._interventions))
        self.max_intervention_size = max(
            self.max_intervention_size, len(query.intervention)
        )
        self.query_log.append(
            QueryRecord(
                index=self.queries_served,
                i=query.i,
                j=query.j,
                conditioning=query.conditioning,
                intervention=query.intervention,
                dependent=dependent,
                backend=self.name,
            )
        )
        self.queries_served += 1
        return dependent

    def dependent(
        self,
        i: int,
        j: int,
        conditioning: Iterable[int] = (),
        intervention: Iterable[int] = (),
    ) -> bool:
        return self.answer(
            CiQuery(
                i=i,
                j=j,
                conditioning=frozenset(conditioning),
                intervention=frozenset(intervention),
            )
        )

    @property
    def interventions_used(self) -> list[frozenset[int]]:
        """Distinct intervention sets, in first-use order."""
        return list(self._interventions)

    def _answer(self, query: CiQuery) -> bool:
        raise NotImplementedError


class OracleBackend(CiBackend):
    """Exact graphical answers from a ground-truth model."""

    name = "oracle"

    def __init__(self, model: MixtureModel):
        super().__init__()
        self.model = model
        self._graphs: dict[frozenset[int], MixtureGraph] = {}

    def graph(self, intervention: Iterable[int] = ()) -> MixtureGraph:
        key = frozenset(intervention)
        cached = self._graphs.get(key)
        if cached is None:
            cached = mixture_graph(self.model, key)
            self._graphs[key] = cached
        return cached

    def _answer(self, query: CiQuery) -> bool:
        g = self.graph(query.intervention)
        if not query.conditioning:
            return g.marginally_connected(query.i, query.j)
        return not d_separated(
            g.graph,
            g.copies({query.i}),
            g.copies({query.j}),
            g.copies(query.conditioning),
        )


class SampleBackend(CiBackend):
    """Finite-sample answers via partial-correlation tests.

    One dataset of ``samples`` rows is drawn per distinct intervention (seeded
    by ``(seed, intervention)``, so runs are reproducible) and cached together
    with its correlation matrix.
    """

    name = "sample"

    def __init__(
        self,
        model: MixtureModel,
        samples: int,
        alpha: float = 0.05,
        seed: int = 0,
    ):
        super().__init__()
        if samples < 4:
            raise ValueError("at least 4 samples are required for the Fisher-z test")
        if seed < 0:
            raise ValueError("seed must be nonnegative")
        self.model = model
        self.samples = samples
        self.alpha = alpha
        self.seed = seed
        self._datasets: dict[frozenset[int], tuple[np.ndarray, np.ndarray]] = {}

    def dataset(self, intervention: Iterable[int] = ()) -> np.ndarray:
        key = frozenset(intervention)
        cached = self._datasets.get(key)
        if cached is None:
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=(self.seed, *sorted(key)))
            )
            data = sample(self.model, key, self.samples, rng)
            with np.errstate(invalid="ignore", divide="ignore"):
                corr = np.corrcoef(data.T)
            cached = (data, corr)
            self._datasets[key] = cached
        return cached[0]

    def _answer(self, query: CiQuery) -> bool:
        cond = sorted(query.conditioning)
        if self.samples < len(cond) + 4:
            raise ValueError(
                f"{self.samples} samples cannot support |conditioning|={len(cond)}"
            )
        self.dataset(query.intervention)
        _, corr = self._datasets[frozenset(query.intervention)]
        sel = [query.i, query.j, *cond]
        rho, degenerate = _partial_rho(corr[np.ix_(sel, sel)])
        result = _fisher_z_verdict(rho, degenerate, self.samples, len(cond), self.alpha)
        return result.dependent
