import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from superpulse import (
    BlochState,
    BlochTrajectory,
    IntegratorStats,
    Regime,
    SampleParams,
    derive_params,
    emission_arrays,
    energy_strong,
    find_superpulses,
    integrate_strong,
    intensity_strong,
    sample_weak_solution,
    trajectory_to_emission,
    weak_intensity,
)

P_DENSE = SampleParams(10_000, 1e6, 1e2)
D_DENSE = derive_params(P_DENSE)
P_DICKE = SampleParams(10_000, 1e6, 0.0, regime=Regime.DICKE_LIMIT)


def test_energy_fully_excited():
    assert energy_strong(BlochState(0.0, 0.0), D_DENSE) == 1.5


def test_energy_equator_zero():
    assert energy_strong(BlochState(math.pi / 2, 0.0), D_DENSE) == pytest.approx(0.0, abs=1e-15)


def test_energy_ground_state():
    d = derive_params(SampleParams(10_000, 1e6, 0.0))
    assert energy_strong(BlochState(math.pi, 0.0), d) == pytest.approx(-0.5, rel=1e-15)


def test_intensity_maximal_configuration():
    s = BlochState(math.pi / 2, math.pi / 2)
    assert intensity_strong(s, D_DENSE) == pytest.approx(0.25 * 1e4 * 9999 * 9, rel=1e-14)


def test_intensity_vanishes_on_the_zero_set():
    assert intensity_strong(BlochState(1.0, 0.0), D_DENSE) == 0.0
    assert intensity_strong(BlochState(0.0, 1.0), D_DENSE) == 0.0
    # sin(pi) is one ulp away from zero in floats
    assert intensity_strong(BlochState(1.0, math.pi), D_DENSE) < 1e-20


angles = st.floats(min_value=0.0, max_value=math.pi)
phases = st.floats(min_value=-50.0, max_value=50.0)


@given(theta=angles, phi=phases)
def test_intensity_nonnegative_and_bounded(theta, phi):
    val = intensity_strong(BlochState(theta, phi), D_DENSE)
    assert val >= 0.0
    assert val <= D_DENSE.peak_intensity_pred * (1.0 + 1e-9)


@given(theta=angles)
def test_energy_bounded_by_half_enhancement(theta):
    val = energy_strong(BlochState(theta, 0.0), D_DENSE)
    assert abs(val) <= (1.0 + D_DENSE.alpha) / 2.0


def test_weak_trajectory_emission_single_sech_pulse():
    # Dicke-limit run: single pulse peaking at the delay time near (N/2)^2
    traj = sample_weak_solution(P_DICKE)
    t, energy, intensity = emission_arrays(traj)
    ipk = int(np.argmax(intensity))
    from superpulse import delay_time

    t0 = delay_time(P_DICKE)
    dt = t[1] - t[0]
    assert abs(t[ipk] - t0) <= dt
    assert intensity[ipk] == pytest.approx(2.5e7, rel=1e-6)
    assert np.all(intensity >= 0.0)
    pulses = find_superpulses((t, intensity))
    assert len(pulses) == 1


def test_emission_records_match_arrays():
    traj = sample_weak_solution(P_DICKE, t_end=1e-4)
    records = trajectory_to_emission(traj)
    t, energy, intensity = emission_arrays(traj)
    assert len(records) == len(t)
    assert records[7].t == t[7]
    assert records[7].energy_scaled == energy[7]
    assert records[7].intensity_scaled == intensity[7]


def test_zero_length_trajectory_gives_empty_list():
    traj = BlochTrajectory(
        params=D_DENSE,
        sample_params=P_DENSE,
        kind=Regime.STRONG,
        t=np.empty(0),
        theta=np.empty(0),
        phi=np.empty(0),
        t_end=0.0,
        stats=IntegratorStats(0, 0, 0.0),
    )
    assert trajectory_to_emission(traj) == []


def test_strong_peaks_sit_where_the_phase_channel_opens():
    # intensity maxima of the comb coincide with |sin(phi)| ~ 1 and are
    # spaced by half a phase period, pi/omega_eff
    p = SampleParams(10_000, 1e5, 1e2)
    d = derive_params(p)
    traj = integrate_strong(p)
    t, energy, intensity = emission_arrays(traj)
    pulses = find_superpulses((t, intensity))
    big = [q for q in pulses if q.height >= 0.1 * max(q.height for q in pulses)]
    phi_at_peaks = np.interp([q.t_peak for q in big], t, traj.phi)
    assert np.min(np.abs(np.sin(phi_at_peaks))) > 0.99
    spacing = np.median(np.diff([q.t_peak for q in pulses]))
    assert spacing == pytest.approx(math.pi / d.omega_eff, rel=1e-2)


def test_weak_energy_intensity_consistency_on_grid():
    # finite differences of the sampled energy reproduce the intensity
    traj = sample_weak_solution(P_DICKE)
    t, energy, intensity = emission_arrays(traj)
    mid = intensity >= 0.25 * intensity.max()
    didt = -P_DICKE.n_atoms * np.gradient(energy, t)
    rel = np.abs(didt[mid] - intensity[mid]) / intensity[mid]
    assert np.max(rel) < 1e-3


def test_strong_energy_intensity_consistency_near_peaks():
    # I = -N d(eps)/dt holds on the comb; fourth-order differences keep the
    # truncation error of the fast phase below the 1e-3 budget
    p = SampleParams(10_000, 1e5, 1e2)
    traj = integrate_strong(p)
    t, energy, intensity = emission_arrays(traj)
    h = t[1] - t[0]
    n = p.n_atoms
    didt = np.full_like(energy, np.nan)
    didt[2:-2] = -n * (
        -energy[4:] + 8 * energy[3:-1] - 8 * energy[1:-3] + energy[:-4]
    ) / (12 * h)
    sel = np.zeros(len(t), dtype=bool)
    sel[2:-2] = intensity[2:-2] >= 0.5 * np.nanmax(intensity)
    rel = np.abs(didt[sel] - intensity[sel]) / intensity[sel]
    assert np.max(rel) < 1e-3
