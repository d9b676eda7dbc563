"""Weak-coupling dynamics: closed-form solution, observables and the ODE
cross-check.

The closed form is authoritative in this regime; the ODE integrator exists
to validate it.  The polar branch through pi/2 is resolved by tracking
cos(theta) = -tanh((t - t0)/tau_c), which is single-valued where arcsin of
the sech form is not.
"""
from __future__ import annotations

import math

import numpy as np

from . import rk
from .bloch import (
    DEFAULT_PHI0,
    BlochState,
    BlochTrajectory,
    IntegrationControl,
    IntegratorStats,
    default_initial_state,
    default_t_end,
    fast_phase_max_step,
    output_grid,
)
from .params import Regime, SampleParams, derive_params


def characteristic_time(p: SampleParams) -> float:
    """Envelope time constant tau_c = 2/((1+alpha) N gamma), in 1/gamma."""
    d = derive_params(p)
    return 2.0 / (d.gamma_eff * p.n_atoms)


def delay_time(p: SampleParams) -> float:
    """Correlation build-up delay t0 = tau_c * ln N, in 1/gamma."""
    return characteristic_time(p) * math.log(p.n_atoms)


def _sech(x):
    """Numerically safe sech: decays to 0 instead of overflowing cosh."""
    ax = np.abs(x)
    e = np.exp(-ax)
    return 2.0 * e / (1.0 + e * e)


def weak_solution(p: SampleParams, t: float, phi0: float = DEFAULT_PHI0) -> BlochState:
    """Closed-form Bloch angles at scaled time t.

    sin(theta) = sech((t - t0)/tau_c) with theta < pi/2 before the delay
    time and theta > pi/2 after it; phi advances linearly at the effective
    frequency.
    """
    tau_c = characteristic_time(p)
    t0 = delay_time(p)
    x = (t - t0) / tau_c
    theta = math.acos(-math.tanh(x))
    d = derive_params(p)
    return BlochState(theta=theta, phi=phi0 + d.omega_eff * t, t=t)


def weak_energy(p: SampleParams, t):
    """Representative-atom energy over omega0: -((1+alpha)/2) tanh((t-t0)/tau_c).

    Accepts a scalar or an array of scaled times.
    """
    d = derive_params(p)
    tau_c = characteristic_time(p)
    t0 = delay_time(p)
    return -(1.0 + d.alpha) / 2.0 * np.tanh((np.asarray(t, dtype=float) - t0) / tau_c)


def weak_intensity(p: SampleParams, t):
    """Emitted intensity over gamma*omega0: (N^2/4)(1+alpha)^2 sech^2((t-t0)/tau_c).

    Accepts a scalar or an array of scaled times.
    """
    d = derive_params(p)
    tau_c = characteristic_time(p)
    t0 = delay_time(p)
    n = float(p.n_atoms)
    s = _sech((np.asarray(t, dtype=float) - t0) / tau_c)
    return (n * (1.0 + d.alpha)) ** 2 / 4.0 * s * s


def peak_intensity(p: SampleParams) -> float:
    """Closed-form peak of weak_intensity, reached exactly at t0."""
    d = derive_params(p)
    return (p.n_atoms * (1.0 + d.alpha)) ** 2 / 4.0


def sample_weak_solution(
    p: SampleParams,
    t_end: float | None = None,
    ctrl: IntegrationControl | None = None,
    phi0: float = DEFAULT_PHI0,
) -> BlochTrajectory:
    """Evaluate the closed form on the standard output grid.

    This is the production path for weak-regime runs; no integration error
    is involved, so the stats report zero steps.
    """
    d = derive_params(p)
    if t_end is None:
        t_end = default_t_end(p, Regime.WEAK)
    if ctrl is None:
        ctrl = IntegrationControl()
    grid = output_grid(t_end, d, ctrl)
    tau_c = characteristic_time(p)
    t0 = delay_time(p)
    theta = np.arccos(-np.tanh((grid - t0) / tau_c))
    phi = phi0 + d.omega_eff * grid
    return BlochTrajectory(
        params=d,
        sample_params=p,
        kind=Regime.WEAK,
        t=grid,
        theta=theta,
        phi=phi,
        t_end=t_end,
        stats=IntegratorStats(0, 0, 0.0),
    )


def integrate_weak_ode(
    p: SampleParams,
    init: BlochState | None = None,
    t_end: float | None = None,
    ctrl: IntegrationControl | None = None,
    double_phase_rate: bool = False,
) -> BlochTrajectory:
    """Numerically integrate the weak-coupling ODEs (validation path).

    dtheta/dt = (N-1)(Gamma/2) sin(theta); phi advances linearly at the
    effective frequency, or at twice it when double_phase_rate is set (the
    two conventions appear side by side in the strong/weak derivations and
    no observable in this regime depends on phi, so the factor is exposed
    rather than decided).
    """
    d = derive_params(p)
    if init is None:
        init = default_initial_state(p)
    if t_end is None:
        t_end = default_t_end(p, Regime.WEAK)
    if ctrl is None:
        ctrl = IntegrationControl()

    a = (p.n_atoms - 1.0) * d.gamma_eff / 2.0
    om = 2.0 * d.omega_eff if double_phase_rate else d.omega_eff

    def f(t, theta, phi):
        return a * math.sin(theta), om

    grid = output_grid(t_end, d, ctrl)
    res = rk.solve(
        f,
        (init.theta, init.phi),
        t_end,
        grid,
        rtol=ctrl.rtol,
        atol=ctrl.atol,
        max_step=fast_phase_max_step(d, ctrl),
        keep_steps=ctrl.dense,
    )
    traj = BlochTrajectory(
        params=d,
        sample_params=p,
        kind=Regime.WEAK,
        t=grid,
        theta=np.clip(res.grid_values[0], 0.0, math.pi),
        phi=res.grid_values[1],
        t_end=t_end,
        stats=IntegratorStats(res.n_accepted, res.n_rejected, res.max_error_ratio),
    )
    if ctrl.dense:
        traj.step_t = res.step_times
        traj.step_theta = res.step_values[0]
        traj.step_phi = res.step_values[1]
    return traj
