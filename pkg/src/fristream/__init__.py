"""Periodic Dirac-stream reconstruction from noisy low-rate samples.

Subspace estimators (annihilating filter with Cadzow denoising, matrix
pencil), their Cramer-Rao and breakdown-threshold references, and a
deterministic Monte Carlo benchmarking harness.
"""

from .analysis import (
    BreakdownPrediction,
    CrbResult,
    breakdown_psnr,
    crlb_location_std,
    location_std,
    predict_breakdown,
    sample_jacobian,
)
from .estimators import (
    EstimateRecord,
    EstimationError,
    Method,
    cadzow,
    cadzow_with_trace,
    conjugate_closure_defect,
    estimate,
    match_estimates,
    matrix_pencil,
    prony,
    recover_amplitudes,
    roots_to_locations,
)
from .harness import (
    DatasetSpec,
    ScatterReport,
    SchemaError,
    SweepConfig,
    SweepReport,
    export_dataset,
    generate_dataset,
    ingest_estimates,
    run_scatter,
    run_sweep,
    score_records,
)
from .moments import (
    CoefficientMatrix,
    MomentVector,
    coefficients,
    moments_to_samples,
    samples_to_moments,
)
from .seeding import derive_seed, splitmix64
from .signals import (
    DiracStream,
    NoiseSpec,
    SampleVector,
    SamplingConfig,
    add_noise,
    circular_difference,
    dirichlet_kernel,
    dirichlet_samples,
    exponential_sums,
    random_stream,
    synthesize_samples,
    wrap_location,
)

__version__ = "0.1.0"

__all__ = [
    "BreakdownPrediction",
    "CoefficientMatrix",
    "CrbResult",
    "DatasetSpec",
    "DiracStream",
    "EstimateRecord",
    "EstimationError",
    "Method",
    "MomentVector",
    "NoiseSpec",
    "SampleVector",
    "SamplingConfig",
    "ScatterReport",
    "SchemaError",
    "SweepConfig",
    "SweepReport",
    "add_noise",
    "breakdown_psnr",
    "cadzow",
    "cadzow_with_trace",
    "circular_difference",
    "coefficients",
    "conjugate_closure_defect",
    "crlb_location_std",
    "derive_seed",
    "dirichlet_kernel",
    "dirichlet_samples",
    "estimate",
    "exponential_sums",
    "export_dataset",
    "generate_dataset",
    "ingest_estimates",
    "location_std",
    "match_estimates",
    "matrix_pencil",
    "moments_to_samples",
    "predict_breakdown",
    "prony",
    "random_stream",
    "recover_amplitudes",
    "roots_to_locations",
    "run_scatter",
    "run_sweep",
    "sample_jacobian",
    "samples_to_moments",
    "score_records",
    "splitmix64",
    "synthesize_samples",
    "wrap_location",
]
