"""Momentum methods near strict saddle points of nonconvex quadratics.

Spectral analysis of the heavy-ball iteration map, per-iteration divergence
rates for the general accelerated framework, and deterministic escape-time
experiments.
"""

__version__ = "0.1.0"

from .problems import (
    FunctionOracle,
    GradientOracle,
    QuadraticProblem,
    gradient,
    random_orthogonal,
    random_problem,
    sample_unit_ball,
    toy_problem,
)
from .schedules import (
    AttouchSchedule,
    ConstantSchedule,
    MomentumSchedule,
    NesterovSchedule,
    PolyakSchedule,
    ScheduleError,
    TkPropertyReport,
    TkSequence,
    ToySchedule,
    limit_params,
    nesterov_t,
    params_array,
    polyak_params,
    schedule_from_json_dict,
    schedule_params,
    schedule_to_json_dict,
    verify_tk_properties,
)
from .optimizers import (
    DIVERGENCE_CUTOFF,
    EqualStart,
    IterationTrace,
    PerturbedStart,
    RunConfig,
    StartPolicy,
    escape_time,
    run,
    run_accelerated,
    run_gradient_descent,
    run_heavy_ball,
    write_trace_csv,
)
from .spectral import (
    ConditionError,
    EigenPair,
    ParamCheck,
    SpectrumClassification,
    apply_iteration_map,
    block_eigenvalues,
    classify_saddle_map,
    invert_iteration_map,
    param_conditions,
    unstable_eigenvector,
)
from .rates import (
    RateLimit,
    RateSequence,
    escape_bounds,
    predicted_escape_iters,
    product_reconstruction,
    rate_limit,
    rate_sequence,
)
from .experiments import (
    NegspaceSeries,
    TableResult,
    TableRow,
    ToyFigure,
    TrialRecord,
    divergence_table,
    negspace_experiment,
    toy_figure,
)
from .seeding import rng_from
