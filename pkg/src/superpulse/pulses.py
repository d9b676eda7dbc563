"""Pulse-train analysis of emission records.

find_superpulses(): local maxima with a prominence filter, plus per-pulse
FWHM from linear interpolation to the half-height crossings.
envelope(): piecewise-linear upper envelope through the superpulse peaks.
compute_metrics(): envelope statistics and measured/predicted ratios
against the scaling-law predictions.

The envelope characteristic time is defined by converting the envelope
FWHM with the sech^2 factor 2*acosh(sqrt(2)), which makes single-pulse and
comb signals comparable under one definition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyAnalysisError, ParameterDomainError
from .observables import EmissionRecord
from .params import DerivedParams

# FWHM of sech^2 is 2*acosh(sqrt(2)) times its time constant
SECH2_FWHM_FACTOR = 2.0 * math.acosh(math.sqrt(2.0))

# reject resampling ripple without suppressing genuine comb teeth
PROMINENCE_FRACTION = 1e-3


@dataclass(frozen=True)
class Superpulse:
    t_peak: float
    height: float
    fwhm: float


@dataclass(frozen=True)
class PulseMetrics:
    peak_intensity_scaled: float
    delay_time: float               # gamma*t of the envelope maximum
    envelope_fwhm: float
    tau_c_measured: float           # envelope FWHM / (2*acosh(sqrt 2))
    tau_1_measured: float           # median FWHM of the half-height superpulses
    pulse_count_half_height: int
    predictions: DerivedParams
    ratios: dict[str, float]        # measured/predicted per metric


def _as_arrays(records) -> tuple[np.ndarray, np.ndarray]:
    """Accept a list of EmissionRecord or a (t, ..., intensity) array tuple."""
    if isinstance(records, tuple):
        t = np.asarray(records[0], dtype=float)
        y = np.asarray(records[-1], dtype=float)
    else:
        t = np.array([r.t for r in records], dtype=float)
        y = np.array([r.intensity_scaled for r in records], dtype=float)
    if t.size == 0:
        raise EmptyAnalysisError("no emission records to analyse")
    if t.size >= 3:
        dt = np.diff(t)
        if dt.min() <= 0 or (dt.max() - dt.min()) > 1e-6 * dt.mean():
            raise ParameterDomainError("records", "must be on a uniform time grid")
    return t, y


def _local_maxima(y: np.ndarray) -> np.ndarray:
    """Strict-left, non-strict-right three-point maxima (plateau keeps first)."""
    return np.where((y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]))[0] + 1


def _prominences(y: np.ndarray, peaks: np.ndarray) -> np.ndarray:
    """Prominence of each peak over the maxima/valley skeleton."""
    k = len(peaks)
    heights = y[peaks]
    # valley minima between consecutive peaks plus the two boundary segments
    valleys = np.empty(k + 1)
    valleys[0] = y[: peaks[0] + 1].min()
    for i in range(k - 1):
        valleys[i + 1] = y[peaks[i]: peaks[i + 1] + 1].min()
    valleys[k] = y[peaks[-1]:].min()

    prom = np.empty(k)
    for i in range(k):
        base_left = valleys[i]
        j = i - 1
        while j >= 0 and heights[j] <= heights[i]:
            base_left = min(base_left, valleys[j])
            j -= 1
        base_right = valleys[i + 1]
        j = i + 1
        while j < k and heights[j] <= heights[i]:
            base_right = min(base_right, valleys[j + 1])
            j += 1
        prom[i] = heights[i] - max(base_left, base_right)
    return prom


def _half_crossing(t, y, i_from, i_to, half):
    """Linear interpolation of the half crossing scanning i_from -> i_to."""
    step = 1 if i_to >= i_from else -1
    prev = i_from
    for j in range(i_from + step, i_to + step, step):
        if y[j] <= half:
            f = (y[prev] - half) / (y[prev] - y[j])
            return t[prev] + f * (t[j] - t[prev])
        prev = j
    return t[i_to]  # never crossed inside the segment; clamp at its end


def _pulse_fwhm(t, y, peak_idx, left_bound, right_bound):
    half = y[peak_idx] / 2.0
    tl = _half_crossing(t, y, peak_idx, left_bound, half)
    tr = _half_crossing(t, y, peak_idx, right_bound, half)
    return tr - tl


def find_superpulses(
    records: Sequence[EmissionRecord] | tuple,
    prominence_fraction: float = PROMINENCE_FRACTION,
) -> list[Superpulse]:
    """Detect individual pulses in a uniformly gridded emission record.

    Local maxima are kept when their prominence is at least
    prominence_fraction of the global maximum.  Raises EmptyAnalysisError
    for an all-zero signal.
    """
    t, y = _as_arrays(records)
    gmax = y.max()
    if gmax <= 0.0:
        raise EmptyAnalysisError("emission record is identically zero")

    idx = _local_maxima(y)
    if len(idx) == 0:
        # monotone or boundary-peaked signal: treat the global maximum as
        # the single pulse
        idx = np.array([int(np.argmax(y))])
        prom = np.array([gmax - y.min()])
    else:
        prom = _prominences(y, idx)
    keep = prom >= prominence_fraction * gmax
    idx = idx[keep]
    if len(idx) == 0:
        idx = np.array([int(np.argmax(y))])

    pulses = []
    for pos, i in enumerate(idx):
        lb = idx[pos - 1] if pos > 0 else 0
        rb = idx[pos + 1] if pos + 1 < len(idx) else len(y) - 1
        pulses.append(
            Superpulse(
                t_peak=float(t[i]),
                height=float(y[i]),
                fwhm=float(_pulse_fwhm(t, y, int(i), int(lb), int(rb))),
            )
        )
    return pulses


def envelope(
    records: Sequence[EmissionRecord] | tuple,
    pulses: list[Superpulse] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Upper envelope as (times, values) nodes.

    Piecewise-linear through the superpulse peaks; a single-pulse signal is
    its own envelope, so the raw record is returned in that case.
    """
    t, y = _as_arrays(records)
    if pulses is None:
        pulses = find_superpulses(records)
    if len(pulses) <= 1:
        return t, y
    return (
        np.array([p.t_peak for p in pulses]),
        np.array([p.height for p in pulses]),
    )


def _envelope_fwhm(et: np.ndarray, ev: np.ndarray) -> float:
    """FWHM of the envelope polyline, clamped to the window where needed."""
    imax = int(np.argmax(ev))
    half = ev[imax] / 2.0
    tl = et[0]
    for j in range(imax, 0, -1):
        if ev[j - 1] <= half:
            f = (ev[j] - half) / (ev[j] - ev[j - 1])
            tl = et[j] + f * (et[j - 1] - et[j])
            break
    tr = et[-1]
    for j in range(imax, len(ev) - 1):
        if ev[j + 1] <= half:
            f = (ev[j] - half) / (ev[j] - ev[j + 1])
            tr = et[j] + f * (et[j + 1] - et[j])
            break
    return tr - tl


def compute_metrics(
    records: Sequence[EmissionRecord] | tuple,
    d: DerivedParams,
) -> PulseMetrics:
    """Measure the pulse-train statistics and compare with the predictions."""
    pulses = find_superpulses(records)
    et, ev = envelope(records, pulses)
    env_max = float(ev.max())
    delay = float(et[np.argmax(ev)])
    env_fwhm = float(_envelope_fwhm(et, ev))
    tau_c_meas = env_fwhm / SECH2_FWHM_FACTOR

    at_half = [p for p in pulses if p.height >= 0.5 * env_max]
    count = max(len(at_half), 1)
    tau_1_meas = float(np.median([p.fwhm for p in at_half]))
    peak = max(p.height for p in pulses)

    ratios = {
        "tau_c": tau_c_meas / d.tau_c_pred,
        "tau_1": tau_1_meas / d.tau_1_pred,
        "pulse_count": count / d.pulse_count_pred,
        "peak_intensity": peak / d.peak_intensity_pred,
        "delay_time": delay / d.delay_time_pred,
    }
    return PulseMetrics(
        peak_intensity_scaled=peak,
        delay_time=delay,
        envelope_fwhm=env_fwhm,
        tau_c_measured=tau_c_meas,
        tau_1_measured=tau_1_meas,
        pulse_count_half_height=count,
        predictions=d,
        ratios=ratios,
    )
