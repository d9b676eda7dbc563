"""Mean-field simulator for collective radiation emission from dense
two-level atomic samples, with pulse-train analysis and an exact small-N
cascade oracle."""

from .bloch import (
    BlochState,
    BlochTrajectory,
    IntegrationControl,
    IntegratorStats,
    default_initial_state,
    default_t_end,
    envelope_timescale,
)
from .errors import (
    ConfigError,
    EmptyAnalysisError,
    IntegrationFailure,
    ParameterDomainError,
    SampleBudgetError,
    SimulationError,
    StepSizeError,
)
from .ladder import (
    LadderRun,
    LadderState,
    cascade_rates,
    evolve_ladder,
    fully_excited,
    ladder_intensity,
    step_ladder,
)
from .observables import (
    EmissionRecord,
    emission_arrays,
    energy_strong,
    intensity_strong,
    trajectory_to_emission,
)
from .params import (
    DerivedParams,
    Regime,
    SampleParams,
    classify_regime,
    derive_params,
)
from .pulses import (
    PulseMetrics,
    Superpulse,
    compute_metrics,
    envelope,
    find_superpulses,
)
from .runner import (
    PRESETS,
    RunConfig,
    RunResult,
    run_config,
    run_preset,
)
from .strong import integrate_cartesian, integrate_strong, rhs_strong
from .weak import (
    characteristic_time,
    delay_time,
    integrate_weak_ode,
    peak_intensity,
    sample_weak_solution,
    weak_energy,
    weak_intensity,
    weak_solution,
)

__version__ = "0.1.0"
