"""Algebraic phase retrieval from quadratic magnitude measurements.

Simulation of magnitude measurements under linear projections, closed-form
signal reconstruction at the k = n+1 identifiability threshold via coefficient
space linear algebra, numerical identifiability certification, and a
reproducible Monte-Carlo experiment harness.
"""

__version__ = "0.1.0"

from .errors import (
    AlgPhaseError,
    DimensionMismatch,
    IllConditioned,
    NonGenericMeasurement,
    NonGenericSignal,
    NotIdentifiable,
)
from .harness import (
    CellSummary,
    ExperimentConfig,
    ResultTable,
    TrialResult,
    aggregate,
    load_config,
    run_experiment,
)
from .identifiability import (
    ClassificationReport,
    SolutionCensus,
    StabilityClass,
    ThresholdReport,
    classify_diag_plus_ones,
    compare_projector_classes,
    count_solutions,
    diag_ensemble,
    diag_plus_ones_ensemble,
    estimate_generic_threshold,
    jacobian_rank,
)
from .inversion import (
    QuadricSet,
    RecoveryReport,
    ScaleResult,
    anchored_complex_ensemble,
    anchored_ensemble,
    invert_ideal_regression,
    invert_lifted_least_squares,
    normalize_quadrics,
    recover_scale,
    solve_anchored_complex,
    solve_anchored_real,
    split_anchored_observation,
)
from .model import (
    Distribution,
    MeasurementEnsemble,
    MeasurementMatrix,
    Mode,
    Observation,
    ProjectorSpec,
    Signal,
    add_noise,
    ensemble_from_matrices,
    ensemble_from_split_pairs,
    forward_measure,
    make_ensemble,
    sample_signal,
    signal_rel_error,
)
from .plots import emit_plots
from .polyspace import (
    FormCoeffs,
    MonomialBasis,
    ProlongationMatrix,
    catalecticant_extract,
    catalecticant_matrix,
    monomial_basis,
    moment_vector,
    null_direction,
    prolong,
    quadric_from_matrix,
)
from .serialize import dump_instance, instance_from_payload, instance_to_payload, load_instance

__all__ = [
    "AlgPhaseError", "DimensionMismatch", "IllConditioned",
    "NonGenericMeasurement", "NonGenericSignal", "NotIdentifiable",
    "CellSummary", "ExperimentConfig", "ResultTable", "TrialResult",
    "aggregate", "load_config", "run_experiment",
    "ClassificationReport", "SolutionCensus", "StabilityClass",
    "ThresholdReport", "classify_diag_plus_ones", "compare_projector_classes",
    "count_solutions", "diag_ensemble", "diag_plus_ones_ensemble",
    "estimate_generic_threshold", "jacobian_rank",
    "QuadricSet", "RecoveryReport", "ScaleResult",
    "anchored_complex_ensemble", "anchored_ensemble",
    "invert_ideal_regression", "invert_lifted_least_squares",
    "normalize_quadrics", "recover_scale", "solve_anchored_complex",
    "solve_anchored_real", "split_anchored_observation",
    "Distribution", "MeasurementEnsemble", "MeasurementMatrix", "Mode",
    "Observation", "ProjectorSpec", "Signal", "add_noise",
    "ensemble_from_matrices", "ensemble_from_split_pairs", "forward_measure",
    "make_ensemble", "sample_signal", "signal_rel_error",
    "emit_plots",
    "FormCoeffs", "MonomialBasis", "ProlongationMatrix",
    "catalecticant_extract", "catalecticant_matrix", "monomial_basis",
    "moment_vector", "null_direction", "prolong", "quadric_from_matrix",
    "dump_instance", "instance_from_payload", "instance_to_payload",
    "load_instance",
]
