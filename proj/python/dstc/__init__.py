"""Dynamic self-triggered control: timing functions, parameter synthesis and simulation."""

from ._dstc import (
    AssumptionReport,
    BoundType,
    HybridTrajectory,
    ParameterFamily,
    ParameterSet,
    PhiSolution,
    StcConfig,
    SystemSpec,
    TriggerDecision,
    build_family,
    decide_interval,
    interval_for_set,
    linear_test,
    log_spaced_epsilons,
    phi_solve,
    run_command,
    simulate,
    simulate_periodic,
    solve_lambda_for_horizon,
    synthesize_gamma,
    system_from_json,
    t_max,
    t_tilde_max,
    van_der_pol,
    verify_assumption,
    window_average_c,
)

__all__ = [name for name in dir() if not name.startswith("_")]
