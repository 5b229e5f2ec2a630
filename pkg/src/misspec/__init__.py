"""Bayesian learning with misspecified models: simulation, limit dynamics and equilibrium analysis."""

__version__ = "0.1.0"

from .bayes import Belief, init_belief, posterior_mean, update_belief
from .env import (
    Environment,
    as_action_dist,
    environment_document,
    load_environment,
    project_to_simplex,
    simplex_grid,
    validate_environment,
)
from .equilibrium import (
    CandidateSet,
    EquilibriumComponent,
    StabilityCertificate,
    berk_nash_residual,
    best_response_cycle,
    build_staircase,
    check_weak_identification,
    classify_model,
    equilibrium_models,
    equilibrium_residual,
    find_equilibria,
    model_equilibrium_set,
    test_attracting,
    test_repelling,
    test_robust_attracting,
)
from .errors import MisspecError
from .inclusion import (
    BranchSample,
    DIConfig,
    DIPath,
    Filippov,
    FixedSelection,
    di_rhs,
    integrate_di,
    integrate_perturbed_di,
)
from .kld import closest_model, closest_models, kl_divergence, minimize_kld, model_of
from .policy import Bellman, Myopic, Table1D, TableSimplex, load_policy, select_action, solve_bellman
from .presets import PRESET_NAMES, ExperimentConfig, preset
from .simulate import Trajectory, apt_distance, interpolate, run_batch, run_learning, tau_of
