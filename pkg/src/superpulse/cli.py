"""Command-line interface.

    simulate preset fig1 --out results/
    simulate run --config sweep.json --out results/
    simulate oracle --n 10 --gamma-eff 1.0 --out results/

Exit codes: 0 success, 2 validation error, 3 integration failure,
4 I/O error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .errors import (
    ConfigError,
    IntegrationFailure,
    ParameterDomainError,
    SampleBudgetError,
    StepSizeError,
)
from .ladder import evolve_ladder
from .runner import PRESETS, run_config, run_preset

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INTEGRATION = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Collective-emission simulator for dense two-level samples",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pre = sub.add_parser("preset", help="run a built-in figure preset")
    pre.add_argument("name", choices=sorted(PRESETS))
    _add_run_options(pre)

    run = sub.add_parser("run", help="run from a JSON configuration file")
    run.add_argument("--config", required=True, help="path to the config file")
    _add_run_options(run)

    orc = sub.add_parser("oracle", help="exact symmetric-ladder cascade at small N")
    orc.add_argument("--n", type=int, required=True, help="number of atoms")
    orc.add_argument("--gamma-eff", type=float, default=1.0,
                     help="effective dissipative factor in units of gamma")
    orc.add_argument("--omega-ratio", type=float, default=1.0,
                     help="emitted quantum energy over omega0 (1+alpha)")
    orc.add_argument("--t-end", type=float, default=None,
                     help="run length in gamma*t (default: long enough to decay)")
    orc.add_argument("--out", default=".", help="output directory")
    return parser


def _add_run_options(sp: argparse.ArgumentParser):
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--rtol", type=float, default=None, help="relative tolerance")
    sp.add_argument("--t-end", type=float, default=None, help="window length in gamma*t")
    sp.add_argument("--theta0", type=float, default=None, help="initial polar angle")
    sp.add_argument("--phi0", type=float, default=None, help="initial azimuth")


def _run_oracle(args) -> int:
    n = args.n
    gamma_eff = args.gamma_eff
    t_end = args.t_end
    if t_end is None:
        # the end rungs are the slowest (rate N*gamma_eff); allow full decay
        t_end = 40.0 * math.log(max(n, 3)) / (n * gamma_eff)
    run = evolve_ladder(n, gamma_eff, t_end, omega_ratio=args.omega_ratio)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"oracle_n{n}_trajectory.csv"
    rows = ["gamma_t,mean_m,intensity_over_gamma_omega0"]
    rows.extend(
        f"{t:.17g},{m:.17g},{i:.17g}"
        for t, m, i in zip(run.t, run.mean_m, run.intensity)
    )
    rows.append("")
    csv_path.write_text("\n".join(rows))

    import numpy as np

    integrated = float(np.trapezoid(run.intensity, run.t))
    summary = {
        "n_atoms": n,
        "gamma_eff": gamma_eff,
        "omega_ratio": args.omega_ratio,
        "t_end": t_end,
        "peak_intensity": float(run.intensity.max()),
        "peak_time": float(run.t[int(np.argmax(run.intensity))]),
        "integrated_intensity": integrated,
        "quanta_emitted": float(run.mean_m[0] - run.mean_m[-1]),
        "final_mean_m": float(run.mean_m[-1]),
    }
    (out / f"oracle_n{n}_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n"
    )
    print(f"oracle: wrote {csv_path}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "preset":
            result = run_preset(
                args.name,
                out_dir=args.out,
                rtol=args.rtol,
                t_end=args.t_end,
                theta0=args.theta0,
                phi0=args.phi0,
            )
            print(f"{args.name}: wrote {result.trajectory_path} and {result.metrics_path}")
        elif args.command == "run":
            results = run_config(
                args.config,
                out_dir=args.out,
                rtol=args.rtol,
                t_end=args.t_end,
                theta0=args.theta0,
                phi0=args.phi0,
            )
            for r in results:
                print(f"{r.label}: wrote {r.trajectory_path} and {r.metrics_path}")
        else:
            return _run_oracle(args)
    except (ParameterDomainError, ConfigError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationFailure, SampleBudgetError, StepSizeError) as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
