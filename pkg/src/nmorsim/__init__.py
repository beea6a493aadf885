"""nmorsim: intensity correlations in resonant magneto-optical rotation.

A laser beam crossing a Lambda-type atomic vapor in a longitudinal
magnetic field converts its phase noise into intensity noise; the two
orthogonally polarized analyzer channels then show field-dependent
correlations.  This package provides the steady-state atomic response,
a phase-diffusion noise source, quasi-static field propagation through
the cell, polarimetry, correlation estimators, and a config-driven
harness that reproduces the field-sweep and time-trace phenomenology.
"""

__version__ = "0.1.0"

from .atom import (
    ApproximateSolution,
    ComplexLinewidths,
    DetuningSet,
    FieldAmplitudes,
    LambdaAtomParams,
    SaturationCoefficients,
    SteadyStateSolution,
    apply_zeeman,
    approximate_solution,
    complex_linewidths,
    saturation_coefficients,
    steady_state_coherences,
    steady_state_populations,
    steady_state_response,
    zeeman_splitting,
)
from .cell import CellParams, PropagationResult, propagate
from .config import DEFAULT_CONFIG_YAML, ExperimentConfig, config_from_dict, load_config
from .correlation import (
    CorrelationFunction,
    FieldTracePair,
    FluctuationMoments,
    analytic_correlation,
    correlation_peak_width,
    cross_correlation,
    delta_channels,
    extract_fluctuations,
    moments_from_samples,
)
from .harness import (
    SweepRow,
    analyze_external,
    iter_field_sweep,
    run_field_sweep,
    run_time_trace,
)
from .noise import FrequencyTrace, NoiseParams, generate_frequency_trace
from .polarimetry import (
    DetectionRecord,
    IntensityPair,
    detection_channels,
    rotation_angle,
    rotation_from_fields,
    transmission,
)

__all__ = [name for name in dir() if not name.startswith("_")]
