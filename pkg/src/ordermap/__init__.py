"""Minimal I-map DAG learning by optimizing variable orderings against a
conditional-independence oracle."""

from .algorithm import (
    CliqueRecord,
    LearnResult,
    Restriction,
    RunTrace,
    TraceStep,
    VerifyReport,
    clique_priority,
    clique_restricted_by_clique,
    find_restrictions,
    optimize_ordering,
    split_cliques,
    verify_trace,
)
from .bruteforce import (
    MODEL_LIMIT,
    SWEEP_LIMIT,
    OrderingSweep,
    model_contains,
    oracle_singleton_model,
    perfect_map_exists,
    sweep,
)
from .core import (
    Dag,
    Ordering,
    SizeLimitError,
    Statement,
    boundary_of,
    build_causal_input_list,
    d_separated,
    dag_from_boundaries,
    descendants,
    is_imap,
    is_minimal_imap,
    maximal_cliques,
    represented_model,
    skeleton,
    statement,
    validate_boundaries,
)
from .modelfile import Config, ModelFile, ModelFileError, dag_to_json, emit_dot, load_model_file, parse_dot
from .operators import (
    DEFAULT_MAX_PERMS,
    PermutationBudgetError,
    RejectedSwapError,
    ReunionOutcome,
    ReversalOutcome,
    SwapOutcome,
    UncliqueResult,
    ancestor_set,
    apply_swap,
    clique_reunion,
    free_sets,
    has_head_to_head,
    reversal,
    shift,
    swap_admissible,
    unclique,
)
from .oracle import CachedOracle, DagOracle, DataOracle, Oracle, TableOracle, canonical_key
from .simulate import (
    SimulationConfig,
    SimulationReport,
    forward_sample,
    random_cpts,
    random_dag,
    run_simulation,
    skeleton_metrics,
)

__all__ = [name for name in dir() if not name.startswith("_")]
