"""qaoatune: end-to-end QAOA parameter setting at desk scale.

Problem encoding (spin polynomials), exact statevector simulation with shot
sampling, annealing-style schedules, shot-frugal trust-region fine-tuning,
and scaling/benchmark metrics.
"""

__version__ = "0.1.0"

from .errors import DegenerateSpectrumError, ResourceLimitError, RetryExhaustedError
from .problems import (
    SpinPolynomial,
    SpinTerm,
    Spectrum,
    evaluate,
    gen_labs,
    gen_maxcut,
    gen_random_weighted_maxcut,
    load_problem,
    rescale,
    save_problem,
    spectrum,
)
from .schedules import ScheduleSpec, interp_extend, parse_schedule, to_parameters
from .simulator import (
    QaoaParameters,
    SampleSet,
    StateVector,
    energy,
    estimate_energy,
    evolve,
    ground_state_overlap,
    sample,
    uniform_state,
)
from .metrics import (
    DepthProgressionResult,
    ScalingFit,
    approximation_ratio,
    depth_progression_benchmark,
    exact_energy_executor,
    fit_exponential,
    ramp_family,
    sampling_executor,
    time_to_solution,
)
from .tuner import (
    EvaluationLedger,
    OptimizerConfig,
    ShotPlan,
    allocate_shots,
    load_transfer_library,
    lookup_transfer,
    make_energy_objective,
    run_protocol,
    transfer_parameters,
    trust_region_minimize,
)

__all__ = [
    "__version__",
    "DegenerateSpectrumError",
    "ResourceLimitError",
    "RetryExhaustedError",
    "SpinPolynomial",
    "SpinTerm",
    "Spectrum",
    "evaluate",
    "gen_labs",
    "gen_maxcut",
    "gen_random_weighted_maxcut",
    "load_problem",
    "rescale",
    "save_problem",
    "spectrum",
    "ScheduleSpec",
    "interp_extend",
    "parse_schedule",
    "to_parameters",
    "QaoaParameters",
    "SampleSet",
    "StateVector",
    "energy",
    "estimate_energy",
    "evolve",
    "ground_state_overlap",
    "sample",
    "uniform_state",
    "DepthProgressionResult",
    "ScalingFit",
    "approximation_ratio",
    "depth_progression_benchmark",
    "exact_energy_executor",
    "fit_exponential",
    "ramp_family",
    "sampling_executor",
    "time_to_solution",
    "EvaluationLedger",
    "OptimizerConfig",
    "ShotPlan",
    "allocate_shots",
    "load_transfer_library",
    "lookup_transfer",
    "make_energy_objective",
    "run_protocol",
    "transfer_parameters",
    "trust_region_minimize",
]
