"""LQR synthesis: structured PGD, model-free PGD, and LMI-based design."""

from ._lqrsyn import (  # noqa: F401
    BlockSym,
    ConstraintSpec,
    CostSpec,
    Gain,
    PgdIterate,
    PgdRun,
    SdpProblem,
    SdpSolution,
    StructureMask,
    SystemModel,
    VerifyReport,
    build_dual_sdp,
    build_sdp_constrained,
    build_sdp_design,
    closed_loop,
    dare_oracle,
    default_horizon,
    discounted_cost,
    gradient_model_based,
    is_stabilizing,
    pgd_modelfree_run,
    pgd_run,
    project_structure,
    recover_gain,
    rollout_state_aggregate,
    solve_sdp,
    solve_stein_covariance,
    solve_stein_value,
    spectral_radius,
    verify_design,
)
