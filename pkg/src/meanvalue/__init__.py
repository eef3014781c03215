"""Mean-value diagnostics for semilinear and degenerate reaction-diffusion equations."""

from .analysis import (
    ConditionReport,
    SandwichBounds,
    Verdict,
    energy_monitor,
    evaluate_blowup_criterion,
    evaluate_decay_criteria,
    evaluate_wang_criteria,
    fit_decay_rate,
    predict_blowup,
    verify_trajectory,
)
from .errors import (
    BracketError,
    ConfigError,
    CoverageError,
    DegenerateFieldError,
    DomainError,
    MeanValueError,
    NotReachedError,
    PositivityError,
)
from .foundation import (
    Domain1D,
    GridField,
    GridSpec,
    InitialData,
    Potential,
    ProblemSpec,
    SpectralInfo,
    field_norms,
    potential_avg,
    potential_eval,
    potential_inf,
    sample_initial_data,
    unit_grid,
)
from .mvt import locate_chi, locate_xi, mean_ratio, path_over_trajectory, xi_weighted
from .solvers import SolveConfig, Trajectory, solve, solve_degenerate, solve_semilinear
from .sweep import compute_g, emit_outputs, extract_contour, run_sweep

__version__ = "0.1.0"
