"""Exact allocation rules for networks with externalities."""

from .axioms import (
    BCE,
    FCE,
    FCE_DIRECT,
    JW,
    AuditReport,
    RuleUnderTest,
    adversarial_rule,
    bc_residual,
    check_bc,
    check_bcplus,
    check_ce,
    check_f,
    check_symmetry,
    cycle_sum_check,
    run_suite,
)
from .games import (
    Allocation,
    InconsistencyError,
    LinkedBeneficiary,
    PFFGame,
    TableWorth,
    TUGame,
    WorthFunction,
    ef_tu_game,
    graph_restrict_pff,
    is_externality_free,
    jw_tu_game,
    pff_from_worth,
    project_worth,
)
from .netcore import (
    LIMITS,
    Cycle,
    DomainError,
    Network,
    Partition,
    Permutation,
    ResourceLimitError,
    components,
    cycles,
    enumerate_partitions,
    minimal_index_bfs,
    spanning_forests,
)
from .values import (
    bce,
    bce_with_forest,
    ef_value,
    fce_direct,
    fce_formula,
    jw_value,
    myerson,
    oracle_solve,
    pff_dividends,
    pff_value,
    shapley,
)

__version__ = "0.1.0"
