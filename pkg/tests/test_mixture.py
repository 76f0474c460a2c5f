"""Mixture model structure: changed nodes, interventions, pooled graphs."""

import itertools

import numpy as np
import pytest

from cadim.graphs import Dag, d_separated
from cadim.mixture import MixtureModel, NodeMechanism, mixture_graph
from helpers import (
    GOLDEN_ANCESTORS,
    emergent_pairs_mixture,
    golden_cyclic_mixture,
    make_model,
    random_model,
)


def test_mechanism_validation():
    with pytest.raises(ValueError):
        NodeMechanism((0, 1), (1.0,), 0.0, 1.0)
    with pytest.raises(ValueError):
        NodeMechanism((), (), 0.0, 0.0)
    with pytest.raises(ValueError):
        NodeMechanism((1, 0), (1.0, 1.0), 0.0, 1.0)


def test_model_validation_catches_mismatched_parents():
    dag = Dag(2, [(0, 1)])
    mechs = ((NodeMechanism((), (), 0, 1), NodeMechanism((), (), 0, 1)),)
    with pytest.raises(ValueError):
        MixtureModel(
            dags=(dag,),
            mechanisms=mechs,
            intervention_means=(0.0, 0.0),
            intervention_vars=(1.0, 1.0),
        )


def test_mixing_defaults_to_uniform():
    model = make_model(3, [[(0, 1)], [(1, 2)]])
    assert model.mixing == (0.5, 0.5)
    with pytest.raises(ValueError):
        make_model(3, [[(0, 1)], [(1, 2)]], mixing=(0.7, 0.7))


# ---------------------------------------------------------------------------
# changed-mechanism nodes


def test_identical_components_have_no_changes():
    model = make_model(3, [[(0, 1), (1, 2)], [(0, 1), (1, 2)]])
    assert model.changed_nodes() == frozenset()


def test_distinct_parent_sets_all_change():
    model = make_model(3, [[(0, 1), (1, 2)], [(2, 0)]])
    assert model.changed_nodes() == {0, 1, 2}


def test_emergent_fixture_changes_exclude_shared_root():
    assert emergent_pairs_mixture().changed_nodes() == {1, 2, 3}


def test_weight_difference_beyond_tolerance_changes_node():
    base = make_model(2, [[(0, 1)], [(0, 1)]])
    bumped_mechs = list(list(row) for row in base.mechanisms)
    mech = bumped_mechs[1][1]
    bumped_mechs[1][1] = NodeMechanism(
        mech.parents, (mech.weights[0] + 1e-6,), mech.noise_mean, mech.noise_var
    )
    bumped = MixtureModel(
        dags=base.dags,
        mechanisms=tuple(tuple(r) for r in bumped_mechs),
        intervention_means=base.intervention_means,
        intervention_vars=base.intervention_vars,
    )
    assert bumped.changed_nodes() == {1}
    assert bumped.changed_nodes(tolerance=1e-3) == frozenset()


# ---------------------------------------------------------------------------
# interventions


def test_empty_intervention_is_identity():
    model = emergent_pairs_mixture()
    assert model.intervene(()) is model


def test_full_intervention_cuts_everything():
    model = emergent_pairs_mixture()
    cut = model.intervene(range(model.n))
    assert all(dag.edge_count == 0 for dag in cut.dags)
    for c in range(cut.k):
        for v in range(cut.n):
            mech = cut.mechanisms[c][v]
            assert mech.parents == ()
            assert mech.noise_mean == model.intervention_means[v]
            assert mech.noise_var == model.intervention_vars[v]


def test_changed_set_shrinks_by_targets():
    model = emergent_pairs_mixture()
    assert model.intervene({1}).changed_nodes() == {2, 3}


def test_intervention_idempotent_and_union_composable():
    model = golden_cyclic_mixture()
    assert model.intervene({0, 4}).intervene({0, 4}) == model.intervene({0, 4})
    assert model.intervene({0}).intervene({4}) == model.intervene({0, 4})
    assert model.intervene({4}).intervene({0}) == model.intervene({0, 4})


def test_shared_intervention_mechanism_reused_across_sets():
    model = emergent_pairs_mixture()
    for targets in [{1}, {1, 2}, {0, 1, 3}]:
        cut = model.intervene(targets)
        for c in range(cut.k):
            assert cut.mechanisms[c][1].noise_mean == model.intervention_means[1]
            assert cut.mechanisms[c][1].noise_var == model.intervention_vars[1]


# ---------------------------------------------------------------------------
# pooled interventional graph


def test_pooled_graph_shape_and_selector_edges():
    model = emergent_pairs_mixture()
    g = mixture_graph(model, {1})
    assert g.graph.n == model.n * model.k + 1
    assert g.changed == {2, 3}
    selector_targets = {v for u, v in g.graph.edges if u == g.selector}
    expected = {g.copy_index(v, c) for v in {2, 3} for c in range(model.k)}
    assert selector_targets == expected


def test_pooled_graph_isolated_selector_when_nothing_changed():
    model = make_model(3, [[(0, 1)], [(0, 1)]])
    g = mixture_graph(model, ())
    assert g.changed == frozenset()
    assert all(u != g.selector and v != g.selector for u, v in g.graph.edges)


def test_pooled_graph_edge_count():
    rng = np.random.default_rng(42)
    for _ in range(15):
        model = random_model(rng, n=5, k=3)
        for targets in [set(), {0}, {1, 3}]:
            g = mixture_graph(model, targets)
            per_component = sum(
                model.component_dag(c, targets).edge_count for c in range(model.k)
            )
            assert g.graph.edge_count == per_component + model.k * len(g.changed)
            assert g.changed == model.changed_nodes() - targets
            assert g.changed == model.intervene(targets).changed_nodes()


def test_pooled_graph_always_acyclic():
    rng = np.random.default_rng(7)
    for _ in range(10):
        model = random_model(rng, n=5, k=2)
        for size in range(3):
            for targets in itertools.combinations(range(model.n), size):
                mixture_graph(model, targets)  # Dag constructor verifies


# ---------------------------------------------------------------------------
# mixture relations and true edges


def test_golden_mixture_ancestors():
    model = golden_cyclic_mixture()
    rel = model.relations()
    assert rel.ancestors == GOLDEN_ANCESTORS


def test_relations_on_shared_dag_match_single_component():
    model = make_model(4, [[(0, 1), (1, 2), (1, 3)]] * 3)
    rel = model.relations()
    dag = model.dags[0]
    for v in range(4):
        assert rel.ancestors[v] == dag.ancestors(v)
        assert rel.descendants[v] == dag.descendants(v)


def test_two_component_cycle_example_relations():
    model = make_model(3, [[(0, 1), (1, 2)], [(2, 0)]])
    rel = model.relations()
    assert 0 in rel.ancestors[2]
    assert 2 in rel.parents[0]


def test_relations_internally_consistent():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model = random_model(rng, n=6, k=2)
        rel = model.relations()
        for v in range(model.n):
            assert rel.parents[v] <= rel.ancestors[v]
            for u in rel.ancestors[v]:
                assert v in rel.descendants[u]
            for u in rel.descendants[v]:
                assert v in rel.ancestors[u]
        for j, i in model.true_edges():
            assert j in rel.parents[i]
            assert j in rel.ancestors[i]


def test_true_edges_of_fixture():
    assert emergent_pairs_mixture().true_edges() == {
        (0, 1),
        (1, 2),
        (2, 1),
        (2, 3),
        (0, 3),
    }


# ---------------------------------------------------------------------------
# paths through changed nodes


def test_chain_through_changed_node():
    model = make_model(3, [[(0, 1), (1, 2)], [(2, 0)]])  # every node changed
    assert model.has_path_through_changed(0, 0, 2)
    assert model.has_path_through_changed(0, 0, 2, child_only=True)
    # intervening on the middle node cuts the path and removes it from the
    # changed set at once
    assert not model.has_path_through_changed(0, 0, 2, targets={1})


def test_through_path_requires_intermediate_changed_node():
    model = emergent_pairs_mixture()  # changed = {1,2,3}, component 0 chain
    assert model.has_path_through_changed(0, 0, 2)  # 0>1>2 through 1
    assert model.has_path_through_changed(0, 1, 3)  # 1>2>3 through 2
    assert not model.has_path_through_changed(1, 0, 3)  # direct edge only
    with pytest.raises(ValueError):
        model.has_path_through_changed(0, 1, 1)


def test_through_path_matches_brute_force():
    rng = np.random.default_rng(100)
    for _ in range(20):
        model = random_model(rng, n=6, k=2)
        changed = model.changed_nodes()
        for targets in [set(), {0}, {2, 4}]:
            live = changed - set(targets)
            for c in range(model.k):
                dag = model.component_dag(c, targets)
                for src, dst in itertools.permutations(range(6), 2):
                    expect = any(
                        u in dag.descendants(src) and dst in dag.descendants(u)
                        for u in live - {src, dst}
                    )
                    got = model.has_path_through_changed(c, src, dst, targets)
                    assert got == expect
                    expect_child = any(
                        u in dag.children(src) and dst in dag.descendants(u)
                        for u in live - {src, dst}
                    )
                    got_child = model.has_path_through_changed(
                        c, src, dst, targets, child_only=True
                    )
                    assert got_child == expect_child


# ---------------------------------------------------------------------------
# separability facts the pooled graph must reproduce


def test_changed_nonadjacent_pairs_inseparable_exhaustively():
    rng = np.random.default_rng(17)
    checked = 0
    for _ in range(25):
        model = random_model(rng, n=5, k=2)
        changed = model.changed_nodes()
        true_edges = model.true_edges()
        g = mixture_graph(model, ())
        for i, j in itertools.combinations(range(model.n), 2):
            if i not in changed or j not in changed:
                continue
            if (i, j) in true_edges or (j, i) in true_edges:
                continue
            checked += 1
            rest = [v for v in range(model.n) if v not in (i, j)]
            for size in range(len(rest) + 1):
                for cond in itertools.combinations(rest, size):
                    assert not d_separated(
                        g.graph, g.copies({i}), g.copies({j}), g.copies(cond)
                    )
    assert checked > 10
