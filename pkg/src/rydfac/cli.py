"""Command-line entry point.

    simulate --config run.cfg --out result.csv [--seed S] [--workers W]
             [--basis full|blockade] [--no-control] [--oracle]
             [--engine compiled|python] [--dynamics-out series.csv]

Exit codes: 0 success, 2 at least one unconverged sweep point, 1 bad input.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import mcwf, sweeps
from .hilbert import BLOCKADE, FULL
from .lindblad import OracleError

log = logging.getLogger("rydfac")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Quantum-trajectory sweeps of the control-ensemble system")
    parser.add_argument("--config", help="flat key=value config file "
                        "(omit for built-in defaults)")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--seed", type=int, help="override the master seed")
    parser.add_argument("--workers", type=int, default=1,
                        help="worker processes (results identical for any count)")
    parser.add_argument("--basis", choices=["full", "blockade"],
                        help="override the basis mode")
    parser.add_argument("--no-control", action="store_true",
                        help="drop the control atom (single-ensemble run)")
    parser.add_argument("--oracle", action="store_true",
                        help="integrate the master equation instead of trajectories")
    parser.add_argument("--engine", choices=list(mcwf.available_engines()),
                        help="stepping kernel (default: compiled when built)")
    parser.add_argument("--dynamics-out",
                        help="also write trajectory-averaged time series "
                             "(single_run only)")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    try:
        spec = sweeps.load_config(args.config) if args.config else sweeps.default_spec()
    except (OSError, sweeps.ConfigError) as exc:
        log.error("%s", exc)
        return 1

    base = spec.base
    if args.seed is not None:
        base = base.with_(seed=args.seed)
    if args.basis is not None:
        base = base.with_(basis_mode=FULL if args.basis == "full" else BLOCKADE)
    wawc = spec.with_and_without_control
    if args.no_control:
        base = base.with_(control_present=False)
        wawc = False
    spec = sweeps.SweepSpec(kind=spec.kind, grid=spec.grid, base=base,
                            with_and_without_control=wawc)

    if args.dynamics_out and spec.kind != "single_run":
        log.error("--dynamics-out needs kind = single_run")
        return 1

    try:
        result = sweeps.run_sweep(spec, workers=args.workers,
                                  engine=args.engine, use_oracle=args.oracle)
        sweeps.emit_csv(result, args.out)
        if args.dynamics_out:
            _write_dynamics(spec, args, result)
    except (OracleError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 1

    if not result.all_converged:
        log.warning("unconverged points present; see converged_* columns")
        return 2
    return 0


def _write_dynamics(spec, args, result):
    params = sweeps.point_params(spec, spec.grid[0])
    t_final = result.points[0].t_final_used
    settings = ((True, False) if spec.with_and_without_control
                else (params.control_present,))
    for control_present in settings:
        run_params = params.with_(control_present=control_present)
        if args.oracle:
            series = sweeps._oracle_series(run_params, 0, t_final)
        else:
            series = mcwf.run_observables(run_params, point_index=0,
                                          t_final=t_final,
                                          workers=args.workers,
                                          engine=args.engine)
        path = args.dynamics_out
        if len(settings) > 1:
            stem, dot, ext = path.rpartition(".")
            suffix = "with" if control_present else "without"
            path = f"{stem}_{suffix}{dot}{ext}" if dot else f"{path}_{suffix}"
        sweeps.emit_dynamics_csv(series, path)


if __name__ == "__main__":
    sys.exit(main())
