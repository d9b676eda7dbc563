"""Configuration ingestion, figure presets, batch execution and serialization.

Trajectories go to CSV (one row per grid point, 17 significant digits so
values round-trip exactly); metrics go to a JSON document embedding the
derived parameters, the measured pulse statistics, integrator stats and
the fully resolved configuration.  Both files are written atomically.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bloch import (
    DEFAULT_PHI0,
    BlochState,
    BlochTrajectory,
    IntegrationControl,
    default_initial_state,
    default_t_end,
)
from .errors import ConfigError
from .observables import emission_arrays
from .params import DerivedParams, Regime, SampleParams, derive_params
from .pulses import SECH2_FWHM_FACTOR, PROMINENCE_FRACTION, PulseMetrics, compute_metrics
from .strong import integrate_strong
from .weak import sample_weak_solution

TRAJECTORY_HEADER = "gamma_t,theta,phi,energy_over_omega0,intensity_over_gamma_omega0"

MEASUREMENT_DEFINITIONS = {
    "envelope": "piecewise-linear interpolation through superpulse peaks",
    "tau_c_measured": "envelope FWHM / (2*acosh(sqrt(2)))",
    "tau_1_measured": "median FWHM of superpulses at half height of the envelope",
    "pulse_count_half_height": "superpulses whose peak >= half the envelope maximum",
    "delay_time": "time of the envelope maximum",
    "prominence_filter": f"prominence >= {PROMINENCE_FRACTION:g} of global maximum",
    "sech2_fwhm_factor": SECH2_FWHM_FACTOR,
}


@dataclass(frozen=True)
class Preset:
    n_atoms: int
    omega0: float
    g: float
    regime: Regime


PRESETS: dict[str, Preset] = {
    "fig1": Preset(10_000, 1e6, 1e2, Regime.STRONG),
    "fig2": Preset(10_000, 1e5, 1e2, Regime.STRONG),
    "fig3": Preset(10_000, 1e6, 1e3, Regime.STRONG),
    "fig4": Preset(1_000_000, 1e6, 1e2, Regime.STRONG),
    "fig5": Preset(10_000_000, 1e6, 1e2, Regime.STRONG),
    "fig6": Preset(10_000, 1e6, 0.0, Regime.STRONG),
    "fig7": Preset(10_000, 1e6, 0.0, Regime.DICKE_LIMIT),
    "fig8": Preset(10_000, 1e3, 0.0, Regime.STRONG),
}


@dataclass
class RunConfig:
    params: SampleParams
    label: str = "run"
    init: BlochState | None = None
    t_end: float | None = None
    integration: IntegrationControl = field(default_factory=IntegrationControl)
    out_dir: Path = Path(".")

    def resolved_t_end(self) -> float:
        if self.t_end is not None:
            return self.t_end
        return default_t_end(self.params, self.params.regime)

    def resolved_init(self) -> BlochState:
        if self.init is not None:
            return self.init
        return default_initial_state(self.params)


@dataclass(frozen=True)
class RunResult:
    label: str
    trajectory_path: Path
    metrics_path: Path
    metrics: PulseMetrics


# ---------------------------------------------------------------------------
# config file parsing

_REGIME_NAMES = {r.value: r for r in Regime}


def _require_keys(obj: dict, allowed: set[str], where: str):
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}"
        )


def _get_number(obj: dict, key: str, where: str):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number, got {v!r}")
    return v


def parse_config(doc: dict, base_dir: Path = Path(".")) -> list[RunConfig]:
    """Validate a configuration document; returns one RunConfig per sweep value."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a JSON object")
    _require_keys(
        doc,
        {"params", "regime", "label", "init", "t_end", "integration", "outputs", "sweep"},
        "config",
    )
    if "params" not in doc:
        raise ConfigError("missing required key 'params'")
    pd = doc["params"]
    if not isinstance(pd, dict):
        raise ConfigError("'params' must be an object")
    _require_keys(pd, {"n_atoms", "omega0", "g", "gamma"}, "params")
    for key in ("n_atoms", "omega0"):
        if key not in pd:
            raise ConfigError(f"missing required key 'params.{key}'")

    regime = None
    if "regime" in doc:
        name = doc["regime"]
        if name not in _REGIME_NAMES:
            raise ConfigError(
                f"regime must be one of {sorted(_REGIME_NAMES)}, got {name!r}"
            )
        regime = _REGIME_NAMES[name]

    init = None
    if "init" in doc:
        idoc = doc["init"]
        if not isinstance(idoc, dict):
            raise ConfigError("'init' must be an object")
        _require_keys(idoc, {"theta0", "phi0"}, "init")
        theta0 = _get_number(idoc, "theta0", "init") if "theta0" in idoc else None
        phi0 = _get_number(idoc, "phi0", "init") if "phi0" in idoc else DEFAULT_PHI0
        if theta0 is not None:
            init = BlochState(theta=theta0, phi=phi0, t=0.0)

    ctrl_kwargs = {}
    if "integration" in doc:
        cdoc = doc["integration"]
        if not isinstance(cdoc, dict):
            raise ConfigError("'integration' must be an object")
        _require_keys(cdoc, {"rtol", "atol", "max_samples", "dense", "max_step"}, "integration")
        for key in ("rtol", "atol", "max_step"):
            if key in cdoc:
                ctrl_kwargs[key] = _get_number(cdoc, key, "integration")
        if "max_samples" in cdoc:
            ctrl_kwargs["max_samples"] = int(_get_number(cdoc, "max_samples", "integration"))
        if "dense" in cdoc:
            if not isinstance(cdoc["dense"], bool):
                raise ConfigError("integration.dense must be a boolean")
            ctrl_kwargs["dense"] = cdoc["dense"]

    out_dir = base_dir
    if "outputs" in doc:
        odoc = doc["outputs"]
        if not isinstance(odoc, dict):
            raise ConfigError("'outputs' must be an object")
        _require_keys(odoc, {"directory", "formats"}, "outputs")
        if "directory" in odoc:
            out_dir = Path(odoc["directory"])
            if not out_dir.is_absolute():
                out_dir = base_dir / out_dir
        if "formats" in odoc:
            fmts = odoc["formats"]
            if not isinstance(fmts, list) or set(fmts) - {"csv", "json"}:
                raise ConfigError("outputs.formats supports only ['csv', 'json']")

    t_end = _get_number(doc, "t_end", "config") if "t_end" in doc else None
    base_label = doc.get("label", "run")
    if not isinstance(base_label, str):
        raise ConfigError("'label' must be a string")

    sweeps: list[tuple[str, dict]] = [(base_label, dict(pd))]
    if "sweep" in doc:
        sdoc = doc["sweep"]
        if not isinstance(sdoc, dict):
            raise ConfigError("'sweep' must be an object")
        _require_keys(sdoc, {"param", "values"}, "sweep")
        for key in ("param", "values"):
            if key not in sdoc:
                raise ConfigError(f"missing required key 'sweep.{key}'")
        sp = sdoc["param"]
        if sp not in ("n_atoms", "omega0", "g"):
            raise ConfigError(f"sweep.param must be one of n_atoms/omega0/g, got {sp!r}")
        values = sdoc["values"]
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a non-empty list")
        sweeps = []
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"sweep value {v!r} is not a number")
            swept = dict(pd)
            swept[sp] = v
            sweeps.append((f"{base_label}_{sp}{v:g}", swept))

    configs = []
    for label, params_doc in sweeps:
        try:
            params = SampleParams(regime=regime, **params_doc)
        except TypeError as exc:
            raise ConfigError(f"bad params: {exc}") from exc
        configs.append(
            RunConfig(
                params=params,
                label=label,
                init=init,
                t_end=t_end,
                integration=IntegrationControl(**ctrl_kwargs),
                out_dir=out_dir,
            )
        )
    return configs


def load_config(path: str | Path) -> list[RunConfig]:
    path = Path(path)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_config(doc, base_dir=path.parent)


# ---------------------------------------------------------------------------
# serialization

def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trajectory_csv(path: Path, t, theta, phi, energy, intensity):
    rows = [TRAJECTORY_HEADER]
    rows.extend(
        f"{a:.17g},{b:.17g},{c:.17g},{d:.17g},{e:.17g}"
        for a, b, c, d, e in zip(t, theta, phi, energy, intensity)
    )
    rows.append("")
    _atomic_write(path, "\n".join(rows))


def read_trajectory_csv(path: str | Path):
    """Load a trajectory CSV back into (t, theta, phi, energy, intensity)."""
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    data = np.atleast_2d(data)
    return tuple(data[:, i] for i in range(5))


def _config_doc(cfg: RunConfig, t_end: float, init: BlochState) -> dict:
    p = cfg.params
    return {
        "label": cfg.label,
        "params": {
            "n_atoms": p.n_atoms,
            "omega0": p.omega0,
            "g": p.g,
            "gamma": p.gamma,
            "regime": p.regime.value,
        },
        "init": {"theta0": init.theta, "phi0": init.phi},
        "t_end": t_end,
        "integration": asdict(cfg.integration),
    }


def _metrics_doc(
    cfg: RunConfig,
    d: DerivedParams,
    metrics: PulseMetrics,
    traj: BlochTrajectory,
    init: BlochState,
) -> dict:
    mdoc = asdict(metrics)
    mdoc.pop("predictions")
    return {
        "config": _config_doc(cfg, traj.t_end, init),
        "derived_params": asdict(d),
        "pulse_metrics": mdoc,
        "integrator_stats": asdict(traj.stats),
        "samples": len(traj),
        "definitions": MEASUREMENT_DEFINITIONS,
    }


# ---------------------------------------------------------------------------
# execution

def execute(cfg: RunConfig) -> RunResult:
    """Run one resolved configuration and write its trajectory and metrics."""
    p = cfg.params
    d = derive_params(p)
    t_end = cfg.resolved_t_end()
    init = cfg.resolved_init()
    if p.regime.is_weak_like():
        traj = sample_weak_solution(p, t_end=t_end, ctrl=cfg.integration, phi0=init.phi)
    else:
        traj = integrate_strong(p, init=init, t_end=t_end, ctrl=cfg.integration)

    t, energy, intensity = emission_arrays(traj)
    metrics = compute_metrics((t, energy, intensity), d)

    traj_path = cfg.out_dir / f"{cfg.label}_trajectory.csv"
    metrics_path = cfg.out_dir / f"{cfg.label}_metrics.json"
    write_trajectory_csv(traj_path, t, traj.theta, traj.phi, energy, intensity)
    doc = _metrics_doc(cfg, d, metrics, traj, init)
    _atomic_write(metrics_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return RunResult(cfg.label, traj_path, metrics_path, metrics)


def run_preset(
    name: str,
    out_dir: str | Path = ".",
    rtol: float | None = None,
    t_end: float | None = None,
    theta0: float | None = None,
    phi0: float | None = None,
) -> RunResult:
    """Execute one of the figure presets, with optional overrides."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    preset = PRESETS[name]
    params = SampleParams(
        n_atoms=preset.n_atoms, omega0=preset.omega0, g=preset.g, regime=preset.regime
    )
    init = None
    if theta0 is not None or phi0 is not None:
        base = default_initial_state(params)
        init = BlochState(
            theta=theta0 if theta0 is not None else base.theta,
            phi=phi0 if phi0 is not None else base.phi,
        )
    ctrl = IntegrationControl() if rtol is None else IntegrationControl(rtol=rtol)
    cfg = RunConfig(
        params=params,
        label=name,
        init=init,
        t_end=t_end,
        integration=ctrl,
        out_dir=Path(out_dir),
    )
    return execute(cfg)


def _apply_overrides(
    cfg: RunConfig,
    rtol: float | None,
    t_end: float | None,
    theta0: float | None,
    phi0: float | None,
):
    if rtol is not None:
        cfg.integration = IntegrationControl(
            rtol=rtol,
            atol=cfg.integration.atol,
            max_samples=cfg.integration.max_samples,
            dense=cfg.integration.dense,
            max_step=cfg.integration.max_step,
        )
    if t_end is not None:
        cfg.t_end = t_end
    if theta0 is not None or phi0 is not None:
        base = cfg.resolved_init()
        cfg.init = BlochState(
            theta=theta0 if theta0 is not None else base.theta,
            phi=phi0 if phi0 is not None else base.phi,
        )


def run_config(
    path: str | Path,
    out_dir: str | Path | None = None,
    rtol: float | None = None,
    t_end: float | None = None,
    theta0: float | None = None,
    phi0: float | None = None,
) -> list[RunResult]:
    """Execute every run described by a configuration file."""
    results = []
    for cfg in load_config(path):
        if out_dir is not None:
            cfg.out_dir = Path(out_dir)
        _apply_overrides(cfg, rtol, t_end, theta0, phi0)
        results.append(execute(cfg))
    return results
