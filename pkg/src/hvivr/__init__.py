"""Variance-reduced solvers for two-level variational inequalities with finite-sum operators."""
from .core import (
    BlockSplit,
    ConfigError,
    DomainError,
    FiniteSumOperator,
    HierarchicalProblem,
    NumericalError,
    SeparableOperator,
    block_norms,
    combined_component,
    combined_labels,
    eval_combined,
    eval_full,
)
from .geometry import (
    EntropicGeometry,
    EuclideanGeometry,
    bregman_divergence,
    entropic_three_point,
    euclid_three_point,
    make_geometry,
    mirror_average,
    project_simplex,
    prox_simplex_pair,
)
from .oracles import (
    FORMULAS,
    LipschitzBound,
    OracleSample,
    SamplingScheme,
    empirical_lipschitz_check,
    exhaustive_expectation,
    lipschitz_bound,
    oracle_difference,
    oracle_value,
    sample_index,
)
from .problems import (
    EquilibriumSelection,
    LinearlyConstrained,
    MatchingPenniesGame,
    build_matching_pennies,
    dist_to_S2_selection,
    dist_to_opt_selection,
    feas_gap_game,
    gap_bifunction,
    gaps_linear,
    make_problem,
    weak_sharpness_probe,
)
from .schedules import (
    ScheduleParams,
    beta_bregman,
    beta_euclid,
    h_bar_bound,
    tau_bregman,
    tau_euclid,
    validate_schedule,
)
from .solvers import (
    SolverParams,
    bregman_epoch,
    bregman_params,
    check_energy_bregman,
    check_energy_euclid,
    deterministic_eg_step,
    eg_step_size,
    ergodic_point,
    euclid_params,
    euclid_step,
    init_bregman,
    init_eg,
    init_euclid,
)

__version__ = "0.1.0"
