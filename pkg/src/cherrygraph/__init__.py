"""Simulation and analysis of randomly evolving cherry graphs."""

from .model import (
    Constant,
    Explicit,
    Litter,
    ModelParams,
    OffspringDist,
    ShiftedGeometric,
    ShiftedPoisson,
    joint_pgf_kappa_eps,
    mean_eps,
    pgf_eps,
    pgf_kappa,
    sample_litter,
)
from .numerics import BracketError, ConvergenceError, QuadratureSpec, find_root, integrate_inner_exponent, integrate_power_weighted
from .analytic import (
    AnalyticSummary,
    DegreeSubcriticalError,
    SubcriticalError,
    criticality_index,
    degree_beta,
    discounted_lifetime_moment,
    malthusian_alpha,
    mean_intensity,
    ratios,
    survival,
)
from .genfun import (
    FixedPointResult,
    big_g,
    degree_extinction,
    extinction_probability,
    isolation_probability,
    pgf_eta_lambda,
    pgf_xi_lambda,
)
from .oracle import (
    GwExtinctionBracket,
    JointLifePmf,
    RefinementError,
    SingleEdgeSample,
    eta_transform,
    gw_extinction,
    single_edge_life_mc,
    tv_distance,
    v_recursion,
)
from .sim import (
    EdgeRecord,
    EventDescriptor,
    GraphState,
    RunStats,
    TrackerOutcome,
    Trajectory,
    advance_clock,
    check_invariants,
    init,
    lifetime_estimators,
    rng_streams,
    run,
    step,
    track_vertex,
)
from .montecarlo import McReport, StatRow, build_report, run_campaign, simulate_many, write_runs_csv

__version__ = "0.1.0"
