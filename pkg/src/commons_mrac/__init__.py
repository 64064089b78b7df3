"""Adaptive inspection control for a feedback-evolving common-pool resource
game: plant and reference dynamics, the Lyapunov-based adaptive law, an
explicit region-of-attraction estimate, and a fixed-step simulator with
regime classification."""

from .game import (
    FixedPoint,
    FixedPointKind,
    GameParams,
    PopState,
    RegimeThresholds,
    fixed_points,
    plant_rhs,
    reference_rhs,
    regime_thresholds,
)
from .controller import (
    ControllerState,
    ErrorSystemMatrices,
    ErrorVector,
    GainMatrix,
    ReferenceUnstableError,
    ShiftedState,
    assemble_matrices,
    check_admissible,
    error_rhs,
    lyapunov_value,
    p_hat_dot,
    reference_matrix,
    remainder_f,
    shift,
    shifted_rhs,
    solve_lyapunov,
    unshift,
)
from .roa import AttractionEstimate, compute_K, compute_k, compute_roa, maximize_m
from .simulate import (
    AdaptiveInspection,
    FixedInspection,
    IntegrationError,
    Phase,
    RegimeLabel,
    RegimeMap,
    Schedule,
    Trajectory,
    classify_regime,
    detect_convergence,
    integrate,
    normalized_distance,
    sweep_phase_plane,
)
from .config import ScenarioConfig, load_config, save_config
from .presets import PRESETS, example1, example2, example3, get_preset

__version__ = "0.1.0"
