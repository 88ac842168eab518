"""High-precision simulation and diagnostics for optimistic no-regret
learning dynamics (optimistic FTRL and optimistic OMD) in two-player
zero-sum matrix games."""

from .analysis import (
    AssumptionReport,
    ExtremaTracker,
    GapWitnessTracker,
    LiftReport,
    PeakTracker,
    ScalingEntry,
    StageReport,
    best_and_average,
    detect_stages,
    find_gap_peaks,
    fit_inverse_sqrt_rate,
    flat_region_scaling,
    gap_peaks_of,
    lift_equivalence,
    verify_assumptions,
)
from .dynamics import (
    AdaGradStep,
    AlgorithmSpec,
    ConstantStep,
    Record,
    Trajectory,
    load_trajectory_csv,
    next_stepsize,
    run_oftrl,
    run_oomd,
    write_trajectory_csv,
)
from .games import (
    MatrixGame,
    SimplexPoint,
    duality_gap,
    duplicate_lift,
    duplicate_strategy,
    hard_instance,
    hard_instance_nash,
    load_game,
    loss_vectors,
    save_game,
)
from .numerics import (
    NumericContext,
    Tolerance,
    canonical,
    default_tolerance,
    is_close,
    make_context,
    parse_real,
)
from .regularizers import (
    LogBarrier,
    NegativeEntropy,
    Regularizer,
    RegularizerConstants,
    SquaredEuclidean,
    TsallisEntropy,
    bregman_prox,
    constants,
    euclidean_simplex_projection,
    f_eta,
    f_inverse,
    f_one,
    ftrl_argmin,
    parse_regularizer,
)

__version__ = "0.1.0"
