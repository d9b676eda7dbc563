"""Bloch-sphere state and trajectory containers shared by both regimes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterDomainError, SampleBudgetError
from .params import DerivedParams, Regime, SampleParams, derive_params

# canonical initial azimuth: sin(phi)^2 = 1, maximal initial emission channel
DEFAULT_PHI0 = math.pi / 2

# resolve the fast phase with at least 20 steps per 2*pi/omega_eff period
FAST_PHASE_STEPS_PER_PERIOD = 20


@dataclass(frozen=True)
class BlochState:
    """A point on the unit Bloch sphere at scaled time t = gamma*t.

    theta is the polar angle in [0, pi]; phi is the accumulated azimuthal
    phase and is deliberately left unwrapped.
    """

    theta: float
    phi: float
    t: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.theta <= math.pi + 1e-12:
            raise ParameterDomainError("theta", f"must lie in [0, pi], got {self.theta!r}")
        object.__setattr__(self, "theta", min(max(self.theta, 0.0), math.pi))
        if self.t < 0:
            raise ParameterDomainError("t", f"must be non-negative, got {self.t!r}")


@dataclass(frozen=True)
class IntegrationControl:
    rtol: float = 1e-9
    atol: float = 1e-12
    max_samples: int = 2_000_000
    dense: bool = False          # additionally retain the integrator's natural steps
    max_step: float | None = None  # extra cap on top of the fast-phase resolution cap

    def __post_init__(self):
        if not self.rtol > 0:
            raise ParameterDomainError("rtol", f"must be positive, got {self.rtol!r}")
        if not self.atol > 0:
            raise ParameterDomainError("atol", f"must be positive, got {self.atol!r}")
        if self.max_samples < 1:
            raise ParameterDomainError("max_samples", "need at least one sample")


@dataclass(frozen=True)
class IntegratorStats:
    n_steps: int
    n_rejected: int
    max_error_ratio: float
    norm_drift: float | None = None  # cartesian diagnostic only


@dataclass
class BlochTrajectory:
    """Dense (theta, phi) samples on a uniform scaled-time grid.

    kind records which regime's observable map applies to the samples
    (set by whichever routine produced the trajectory, not by the
    classifier).
    """

    params: DerivedParams
    sample_params: SampleParams
    kind: Regime
    t: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    t_end: float
    stats: IntegratorStats
    step_t: np.ndarray | None = field(default=None, repr=False)
    step_theta: np.ndarray | None = field(default=None, repr=False)
    step_phi: np.ndarray | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.t)


def default_initial_state(p: SampleParams, phi0: float = DEFAULT_PHI0) -> BlochState:
    """Initial tipping angle shared by the strong and weak pipelines.

    sin(theta0) = 2/(N + 1/N) = sech(ln N), which is exactly where the
    weak-coupling closed form sits at t = 0.  The fully excited pole is a
    fixed point, so some tipping is required for any emission at all.
    """
    n = float(p.n_atoms)
    return BlochState(theta=math.asin(2.0 / (n + 1.0 / n)), phi=phi0, t=0.0)


def envelope_timescale(p: SampleParams, kind: Regime) -> float:
    """Estimated emission-envelope time constant in units of 1/gamma.

    Weak coupling: the closed form gives 2/((1+alpha) N gamma) exactly.
    Strong coupling: sin(phi)^2 in the polar equation time-averages to 1/2
    while the phase circulates, so the envelope runs at half the weak rate.
    Once the nonlinear term dominates the phase equation (roughly
    N*gamma/(4*omega0) >= 1) the phase locks near a slow-growth angle and
    the envelope slows down further; the locked rate is used then.
    """
    d = derive_params(p)
    n = float(p.n_atoms)
    if kind.is_weak_like():
        return 2.0 / (d.gamma_eff * n)
    half_rate = (n - 1.0) * d.gamma_eff / 2.0
    lock = (n - 1.0) * d.gamma_eff / (4.0 * d.omega_eff)
    if lock < 1.0:
        return 2.0 / half_rate
    sin2_locked = (1.0 - math.sqrt(1.0 - (1.0 / lock) ** 2)) / 2.0
    return 1.0 / (half_rate * sin2_locked)


def default_t_end(p: SampleParams, kind: Regime) -> float:
    """Integration window covering the delay, the envelope and its tail."""
    tau = envelope_timescale(p, kind)
    return tau * (math.log(p.n_atoms) + 5.0)


def output_grid(t_end: float, d: DerivedParams, ctrl: IntegrationControl) -> np.ndarray:
    """Uniform output grid on [0, t_end].

    Target spacing is min(tau_1_pred/10, tau_c_pred/1000); if that blows
    the sample budget the grid decimates down to 10 samples per
    tau_1_pred, and past that the request is refused.
    """
    if t_end < 0:
        raise ParameterDomainError("t_end", f"must be non-negative, got {t_end!r}")
    if t_end == 0.0:
        return np.zeros(1)
    spacing = min(d.tau_1_pred / 10.0, d.tau_c_pred / 1000.0)
    n = math.ceil(t_end / spacing)
    if n + 1 > ctrl.max_samples:
        spacing = d.tau_1_pred / 10.0
        n = math.ceil(t_end / spacing)
        if n + 1 > ctrl.max_samples:
            raise SampleBudgetError(n + 1, ctrl.max_samples)
    return np.linspace(0.0, t_end, n + 1)


def fast_phase_max_step(d: DerivedParams, ctrl: IntegrationControl) -> float:
    cap = (2.0 * math.pi / d.omega_eff) / FAST_PHASE_STEPS_PER_PERIOD
    if ctrl.max_step is not None:
        cap = min(cap, ctrl.max_step)
    return cap
