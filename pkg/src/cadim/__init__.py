"""Causal discovery from interventions on mixtures of DAGs.

Simulate mixtures of linear-Gaussian causal models, answer interventional
CI queries exactly or from samples, learn every true edge with near-optimal
intervention sizes, and reproduce the supporting guarantees.
"""

__version__ = "0.1.0"

from .graphs import (
    CyclicGraphError,
    Dag,
    Digraph,
    d_separated,
    is_acyclic,
    minimum_feedback_vertex_set,
    simple_cycles,
    strongly_connected_components,
    topological_order,
)
from .mixture import MixtureGraph, MixtureModel, MixtureRelations, NodeMechanism, mixture_graph
from .sem import (
    GeneratorConfig,
    parameterize_mixture,
    random_dag,
    random_mixture,
    sample,
    sample_with_labels,
)
from .independence import (
    CiBackend,
    CiQuery,
    CiTestResult,
    OracleBackend,
    SampleBackend,
    partial_correlation_test,
)
from .algorithm import (
    AncestorEstimate,
    CadimResult,
    InterventionRecord,
    LayeringStallError,
    NodeWorkspace,
    cycle_free_descendants,
    identify_ancestors,
    identify_parents,
    run_cadim,
    topological_layers,
)
from .theory import (
    CyclicComplexity,
    NecessityInstance,
    NecessityReport,
    SufficientSets,
    cyclic_complexity,
    decide_parent,
    edge_identifiability,
    necessity_general,
    necessity_trees,
    sufficient_sets,
    tree_sufficient_set,
    verify_necessity,
)
from .observational import (
    InseparablePairs,
    PairClassification,
    classify_pairs,
    learn_inseparable_pairs,
    skeleton,
)
from .experiments import (
    ExperimentConfig,
    ExperimentResult,
    MetricsRow,
    precision_recall,
    run_experiment,
    run_trial,
)
from .io import load_model, parse_edge_list, save_model, format_edge_list

__all__ = [name for name in dir() if not name.startswith("_")]
