"""Natural power method for general square matrices, with model order
reduction and low-rank LTV control built on top of it."""

__version__ = "0.1.0"

from .errors import (
    CrossGramSingular,
    EigFailed,
    NatPowerError,
    NearSingular,
    NotOrthonormal,
    NotSymmetric,
    ParseError,
    RankDeficient,
    ResolventSingular,
    ShapeError,
    Uncontrollable,
    Unobservable,
)
from .linalg import (
    inv_sqrt_spd,
    orthonormal_complement,
    qr_thin,
    random_stiefel,
    spectral_norm,
    sym_eig,
)
from .oracle import Spectrum, general_eig
from .npm import (
    NpmConfig,
    NpmRunReport,
    SubspaceProjector,
    domain_rank_check,
    fit_rate,
    npm_run,
    npm_stationary_step,
    npm_step,
    oja_residual,
    partial_overlap_distance,
    projected_matrix,
    reduced_npm_run,
    subspace_distance,
)
from .mor import (
    DualSubspaces,
    LtiSystem,
    ReducedRealization,
    dual_subspaces,
    gramian_projection_residual,
    minor_left_subspace_check,
    observability_gramian,
    reachability_gramian,
    reduced_models,
    similarity_block_form,
    staircase_rank,
    transfer_function_eval,
)
from .ltv import (
    LtvScenario,
    TrajectoryLog,
    a_alpha,
    ltv_simulate,
    place_observer_si,
    place_poles_si,
    plant_at,
    rotation_Q,
)
from .io import load_matrix, load_system
from .experiments import ExperimentSpec, run_experiment
