"""CI backends: exact oracle answers, Fisher-z behavior, accounting."""

import itertools

import numpy as np
import pytest

from cadim.graphs import d_separated
from cadim.independence import (
    CiQuery,
    OracleBackend,
    SampleBackend,
    partial_correlation_test,
)
from helpers import (
    bf_mixture_dependent,
    emergent_pairs_mixture,
    make_model,
    random_model,
)


def test_query_validation():
    with pytest.raises(ValueError):
        CiQuery(1, 1)
    with pytest.raises(ValueError):
        CiQuery(0, 1, conditioning={1})


# ---------------------------------------------------------------------------
# oracle backend


def test_changed_nonadjacent_pair_marginally_dependent():
    backend = OracleBackend(emergent_pairs_mixture())
    # (0,2) and (1,3) carry no edge but both endpoints changed
    assert backend.dependent(1, 3)
    assert backend.dependent(0, 2)


def test_intervened_node_independent_of_nondescendants():
    rng = np.random.default_rng(51)
    for _ in range(15):
        model = random_model(rng, n=6, k=2)
        backend = OracleBackend(model)
        rel = model.relations()
        for i in range(model.n):
            for j in range(model.n):
                if j == i or j in rel.descendants[i]:
                    continue
                assert not backend.dependent(i, j, intervention={i})


def test_single_component_oracle_reduces_to_d_separation():
    rng = np.random.default_rng(52)
    for _ in range(10):
        model = random_model(rng, n=6, k=1)
        backend = OracleBackend(model)
        dag = model.dags[0]
        for i, j in itertools.combinations(range(6), 2):
            rest = [v for v in range(6) if v not in (i, j)]
            for size in range(3):
                for cond in itertools.combinations(rest, size):
                    expected = not d_separated(dag, {i}, {j}, cond)
                    assert backend.dependent(i, j, conditioning=cond) == expected


def test_oracle_matches_brute_force_paths_exhaustively():
    rng = np.random.default_rng(53)
    for _ in range(6):
        model = random_model(rng, n=5, k=2)
        backend = OracleBackend(model)
        for targets in [set(), {0}, {1, 3}]:
            for i, j in itertools.combinations(range(5), 2):
                rest = [v for v in range(5) if v not in (i, j)]
                for size in range(len(rest) + 1):
                    for cond in itertools.combinations(rest, size):
                        got = backend.dependent(
                            i, j, conditioning=cond, intervention=targets
                        )
                        assert got == bf_mixture_dependent(model, i, j, cond, targets)


def test_oracle_symmetric_in_pair():
    rng = np.random.default_rng(54)
    model = random_model(rng, n=6, k=2)
    backend = OracleBackend(model)
    for i, j in itertools.combinations(range(6), 2):
        assert backend.dependent(i, j) == backend.dependent(j, i)
        assert backend.dependent(i, j, intervention={i}) == backend.dependent(
            j, i, intervention={i}
        )


# ---------------------------------------------------------------------------
# partial correlation test


def test_duplicated_column_is_dependent():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(500)
    data = np.column_stack([x, x])
    res = partial_correlation_test(data, 0, 1)
    assert res.dependent
    assert res.rho == pytest.approx(1.0)


def test_known_correlation_detected():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(100)
    y = x + rng.standard_normal(100)
    assert partial_correlation_test(np.column_stack([x, y]), 0, 1).dependent


def test_conditioning_removes_chain_dependence():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(5000)
    y = 0.9 * x + 0.5 * rng.standard_normal(5000)
    z = 0.8 * y + 0.5 * rng.standard_normal(5000)
    data = np.column_stack([x, y, z])
    assert partial_correlation_test(data, 0, 2).dependent
    assert not partial_correlation_test(data, 0, 2, [1]).dependent


def test_singular_conditioning_covariance_flags_degenerate():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(200)
    data = np.column_stack([x, rng.standard_normal(200), x, x])
    res = partial_correlation_test(data, 0, 1, [2, 3])
    assert res.dependent
    assert res.degenerate


def test_row_count_guard():
    data = np.zeros((5, 4))
    with pytest.raises(ValueError):
        partial_correlation_test(data, 0, 1, [2, 3])


def test_null_false_rejection_rate_near_alpha():
    rng = np.random.default_rng(4)
    alpha, trials = 0.05, 400
    rejections = 0
    for _ in range(trials):
        data = rng.standard_normal((300, 2))
        rejections += partial_correlation_test(data, 0, 1, alpha=alpha).dependent
    rate = rejections / trials
    assert abs(rate - alpha) <= 3 * np.sqrt(alpha * (1 - alpha) / trials)


# ---------------------------------------------------------------------------
# sample backend


def test_sample_backend_detects_strong_edge_and_caches():
    model = make_model(2, [[(0, 1)], [(0, 1)]])
    backend = SampleBackend(model, samples=2000, seed=1)
    assert backend.dependent(0, 1)
    assert backend.dependent(0, 1)  # cached dataset, consistent answer
    assert len(backend._datasets) == 1


def test_sample_backend_agrees_with_oracle_as_samples_grow():
    rng = np.random.default_rng(55)
    queries = []
    models = []
    for _ in range(8):
        model = random_model(rng, n=5, k=2)
        oracle = OracleBackend(model)
        for i, j in itertools.combinations(range(5), 2):
            for targets in [frozenset(), frozenset({i})]:
                queries.append((len(models), i, j, targets, oracle.dependent(i, j, intervention=targets)))
        models.append(model)

    def agreement(samples):
        hits = 0
        backends = [
            SampleBackend(m, samples=samples, alpha=0.05, seed=9) for m in models
        ]
        for idx, i, j, targets, truth in queries:
            hits += backends[idx].dependent(i, j, intervention=targets) == truth
        return hits / len(queries)

    small, large = agreement(500), agreement(5000)
    assert large >= small - 0.02
    assert large >= 0.9


def test_sample_backend_deterministic_given_seed():
    model = make_model(3, [[(0, 1), (1, 2)], [(2, 0)]])
    answers = []
    for _ in range(2):
        backend = SampleBackend(model, samples=500, seed=123)
        answers.append(
            [
                backend.dependent(i, j, intervention=targets)
                for i, j in itertools.combinations(range(3), 2)
                for targets in [frozenset(), frozenset({i})]
            ]
        )
    assert answers[0] == answers[1]


def test_sample_backend_conditioning_size_guard():
    model = make_model(5, [[(0, 1)]])
    backend = SampleBackend(model, samples=5, seed=0)
    with pytest.raises(ValueError):
        backend.dependent(0, 1, conditioning={2, 3})


# ---------------------------------------------------------------------------
# accounting


def test_identical_queries_log_one_intervention():
    backend = OracleBackend(emergent_pairs_mixture())
    backend.dependent(0, 1, intervention={2})
    backend.dependent(0, 1, intervention={2})
    assert backend.queries_served == 2
    assert backend.interventions_used == [frozenset({2})]


def test_nested_interventions_log_separately():
    backend = OracleBackend(emergent_pairs_mixture())
    backend.dependent(0, 1, intervention={2})
    backend.dependent(0, 1, intervention={2, 3})
    assert backend.interventions_used == [frozenset({2}), frozenset({2, 3})]
    assert backend.max_intervention_size == 2


def test_query_log_records_everything():
    backend = OracleBackend(emergent_pairs_mixture())
    backend.dependent(0, 1)
    backend.dependent(2, 3, conditioning={0}, intervention={1})
    rec = backend.query_log[1]
    assert (rec.i, rec.j) == (2, 3)
    assert rec.conditioning == {0}
    assert rec.intervention == {1}
    assert rec.backend == "oracle"
    assert backend.query_log[0].index == 0
