"""Coded packet storage across parallel switch memories.

Packets are written as n encoded chunks over N memory units; any k chunks
recover a packet.  This package models such instances, solves the
maximal-throughput read problem (exactly, and by matching or greedy
algorithms in the polynomial cases), computes probabilistic throughput
bounds, carries the set-packing hardness reduction, and runs randomized
scheme-comparison ensembles.
"""

from .bounds import (
    BoundReport,
    MonteCarloSummary,
    PacketReadProbability,
    UnionSizeDistribution,
    bound_report,
    hall_all_subsets_check,
    hall_condition_check,
    hall_full_throughput_upper_bound,
    lower_bound_expected,
    packet_read_probabilities,
    packet_read_probability,
    poisson_binomial_tail,
    randomized_assignment,
    randomized_read_plan,
    union_size_distribution,
)
from .core import (
    BLOCKS,
    CONSECUTIVE,
    EMPTY_PLAN,
    MDS,
    UNRESTRICTED,
    WRITE_POLICIES,
    BipartiteGraph,
    ReadPlan,
    Replication,
    SwitchInstance,
    ValidationReport,
    require_valid,
    throughput,
    to_bipartite_graph,
    validate_instance,
    validate_read_plan,
)
from .ensemble import (
    DEFAULT_SEED,
    EnsembleConfig,
    EnsembleRow,
    EnsembleStats,
    PairedDifference,
    SchemeSpec,
    compare_mds_replication,
    compare_schemes,
    random_instance,
    run_ensemble,
    run_schemes,
    sweep_hall_bound,
)
from .matching import maximum_bipartite_matching
from .reduction import (
    LspInstance,
    ReducedInstance,
    extend_n,
    lift_solution,
    reduce_set_packing,
)
from .solvers import (
    SolveResult,
    dispatch_solver,
    solve_auto,
    solve_blocks,
    solve_consecutive_greedy,
    solve_exact,
    solve_k1_matching,
    solve_k2n2_matching,
)

__version__ = "0.1.0"

__all__ = [
    "BLOCKS",
    "BipartiteGraph",
    "BoundReport",
    "CONSECUTIVE",
    "DEFAULT_SEED",
    "EMPTY_PLAN",
    "EnsembleConfig",
    "EnsembleRow",
    "EnsembleStats",
    "LspInstance",
    "MDS",
    "MonteCarloSummary",
    "PacketReadProbability",
    "PairedDifference",
    "ReadPlan",
    "ReducedInstance",
    "Replication",
    "SchemeSpec",
    "SolveResult",
    "SwitchInstance",
    "UNRESTRICTED",
    "UnionSizeDistribution",
    "ValidationReport",
    "WRITE_POLICIES",
    "bound_report",
    "compare_mds_replication",
    "compare_schemes",
    "dispatch_solver",
    "extend_n",
    "hall_all_subsets_check",
    "hall_condition_check",
    "hall_full_throughput_upper_bound",
    "lift_solution",
    "lower_bound_expected",
    "maximum_bipartite_matching",
    "packet_read_probabilities",
    "packet_read_probability",
    "poisson_binomial_tail",
    "random_instance",
    "randomized_assignment",
    "randomized_read_plan",
    "reduce_set_packing",
    "require_valid",
    "run_ensemble",
    "run_schemes",
    "solve_auto",
    "solve_blocks",
    "solve_consecutive_greedy",
    "solve_exact",
    "solve_k1_matching",
    "solve_k2n2_matching",
    "sweep_hall_bound",
    "throughput",
    "to_bipartite_graph",
    "union_size_distribution",
    "validate_instance",
    "validate_read_plan",
]
