"""Sparse one-bit compressive sensing: penalties, dual solvers, oracles and an experiment harness."""

from .dual import (
    DEFAULT_CONFIG,
    BracketError,
    DualSolution,
    SolverConfig,
    Status,
    certify,
    dual_value,
    lagrangian,
    mcp_norm_root,
    objective,
    solve,
    solve_homogeneous,
    solve_l0,
    solve_mcp,
    solve_passive,
    solve_sorted_l1,
)
from .experiment import ConfigError, ExperimentConfig, SweepResult, run_sweep
from .metrics import RecoveryMetrics, compute_metrics
from .oracles import dual_bisection, l0_support_enumeration, mcp_naive, sphere_grid_search
from .penalties import Penalty, PenaltyKind, evaluate, proximal_point, sorted_l1_weights
from .selection import cross_validate, ideal_select, method_grid
from .sensing import MeasurementEnsemble, NoiseModel, SignalSpec, correlation, generate_signal, sense

__version__ = "0.1.0"
