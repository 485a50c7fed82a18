"""Parameter sweeps, config files and CSV emission.

A sweep spec names a swept quantity (probe ratio, atom number, temperature,
control distance, or a single run), a grid, and base parameters.  Each grid
point runs M trajectories per requested control setting; unconverged points
rerun with the horizon doubled (at most twice).  All results are
deterministic functions of (config, seed), independent of worker count.

Config files are flat ``key = value`` lines with unit suffixes, e.g.::

    kind = distance
    grid = 2.0:9.0:15
    Omega_p = 12.12 MHz
    T = 1 uK

Unknown keys and malformed units are rejected with the offending line
number.
"""
from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import disorder, lindblad, mcwf, units
from .hilbert import BLOCKADE, FULL, build_basis
from .model import AUTO_ANTIBLOCKADE, SimParams, build_model, ground_state
from .observables import standard_set

log = logging.getLogger(__name__)

KINDS = ("probe_ratio", "atom_number", "temperature", "distance", "single_run")

CSV_HEADER = ("param,fr_with,fr_with_err,fr_without,fr_without_err,"
              "converged_with,converged_without,pmulti_max")
DYNAMICS_HEADER = ("time,P_gc,P_gc_err,P_rc,P_rc_err,P_gcG,P_gcG_err,"
                   "P_multi,P_multi_err")


class ConfigError(ValueError):
    """Malformed configuration input."""


@dataclass(frozen=True)
class SweepSpec:
    kind: str
    grid: tuple
    base: SimParams
    with_and_without_control: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown sweep kind {self.kind!r}")
        if len(self.grid) == 0:
            raise ConfigError("sweep grid is empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if self.kind == "atom_number":
            if any(v != int(v) or v < 1 for v in self.grid):
                raise ConfigError("atom_number grid must be positive integers")
        if self.kind == "single_run" and len(self.grid) != 1:
            raise ConfigError("single_run takes exactly one grid value")


@dataclass(frozen=True)
class PointResult:
    value: float
    fr_with: float
    fr_with_err: float
    fr_without: float
    fr_without_err: float
    converged_with: bool
    converged_without: bool
    pmulti_max: float
    below_blockade_radius: bool
    t_final_used: float


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    points: tuple

    @property
    def all_converged(self) -> bool:
        return all(p.converged_with and p.converged_without for p in self.points)


def point_params(spec: SweepSpec, value: float) -> SimParams:
    base = spec.base
    if spec.kind == "probe_ratio":
        return base.with_(Omega_p=value * base.Omega_c)
    if spec.kind == "atom_number":
        return base.with_(N=int(value))
    if spec.kind == "temperature":
        return base.with_(T=float(value))
    if spec.kind == "distance":
        # the antiblockade condition tracks the distance
        return base.with_(r0=float(value), delta=AUTO_ANTIBLOCKADE)
    return base


def _steady_with_extension(params, *, point_index, workers, engine,
                           use_oracle):
    """Run one (point, setting), doubling t_final up to 4x on drift."""
    last = None
    for mult in (1, 2, 4):
        t_final = params.t_final * mult
        if use_oracle:
            series = _oracle_series(params, point_index, t_final)
        else:
            series = mcwf.run_observables(
                params, point_index=point_index, t_final=t_final,
                workers=workers, engine=engine)
        state = mcwf.steady_state(series, params.tail_fraction)
        pmulti = float(series.get("P_multi")[0].max())
        last = (state, pmulti, t_final)
        if state.converged:
            break
        log.warning("point %d (control_present=%s) unconverged at t_final=%g us",
                    point_index, params.control_present, t_final)
    return last


def _oracle_series(params, point_index, t_final):
    basis = build_basis(params.N, params.basis_mode)
    if basis.dim > lindblad.DIM_GUARD:
        raise lindblad.OracleError(
            f"oracle path needs dim <= {lindblad.DIM_GUARD}; "
            f"N={params.N} {params.basis_mode} has dim {basis.dim}")
    rng = mcwf._trajectory_stream(params.seed, point_index, 0)
    dis = disorder.sample(params, rng)
    ops = build_model(params, basis, dis)
    obs = standard_set(basis)
    times = mcwf.record_times(params, t_final)
    rho0 = lindblad.pure_density(ground_state(basis))
    return lindblad.integrate(ops, rho0, times, step=params.dt / 10.0,
                              observables=obs)


def run_sweep(spec: SweepSpec, *, workers: int = 1, engine=None,
              use_oracle: bool = False) -> SweepResult:
    points = []
    for point_index, value in enumerate(spec.grid):
        params = point_params(spec, value)
        if spec.with_and_without_control:
            settings = (True, False)
        else:
            settings = (params.control_present,)
        results = {}
        pmulti_max = 0.0
        t_used = params.t_final
        for control_present in settings:
            run_params = params.with_(control_present=control_present)
            state, pmulti, t_final = _steady_with_extension(
                run_params, point_index=point_index, workers=workers,
                engine=engine, use_oracle=use_oracle)
            results[control_present] = state
            pmulti_max = max(pmulti_max, pmulti)
            t_used = max(t_used, t_final)

        nan = float("nan")
        with_state = results.get(True)
        without_state = results.get(False)
        below_rb = params.r0 < disorder.blockade_radius(params)
        if below_rb and spec.kind == "distance":
            log.warning("distance point r0=%g um lies below the blockade radius",
                        params.r0)
        points.append(PointResult(
            value=float(value),
            fr_with=with_state.f_r if with_state else nan,
            fr_with_err=with_state.stderr if with_state else nan,
            fr_without=without_state.f_r if without_state else nan,
            fr_without_err=without_state.stderr if without_state else nan,
            converged_with=with_state.converged if with_state else True,
            converged_without=without_state.converged if without_state else True,
            pmulti_max=pmulti_max,
            below_blockade_radius=below_rb,
            t_final_used=t_used,
        ))
        log.info("point %g done: fr_with=%s fr_without=%s",
                 value,
                 f"{points[-1].fr_with:.4f}",
                 f"{points[-1].fr_without:.4f}")
    return SweepResult(spec=spec, points=tuple(points))


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_csv(result: SweepResult, path) -> None:
    """Write the sweep CSV (full float precision, LF endings)."""
    lines = [CSV_HEADER]
    for p in result.points:
        lines.append(",".join([
            _fmt(p.value),
            _fmt(p.fr_with), _fmt(p.fr_with_err),
            _fmt(p.fr_without), _fmt(p.fr_without_err),
            "true" if p.converged_with else "false",
            "true" if p.converged_without else "false",
            _fmt(p.pmulti_max),
        ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def emit_dynamics_csv(series, path) -> None:
    """Write a trajectory-averaged time-series CSV (single runs)."""
    lines = [DYNAMICS_HEADER]
    cols = []
    for label in ("P_gc", "P_rc", "P_gcG", "P_multi"):
        mean, err = series.get(label)
        cols.extend([mean, err])
    for k, t in enumerate(series.times):
        lines.append(",".join([_fmt(t)] + [_fmt(c[k]) for c in cols]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Config parsing

_FREQ_UNITS = {"Hz": 1e-6, "kHz": 1e-3, "MHz": 1.0, "GHz": 1e3}
_C6_UNITS = {"GHz.um6": 1e3, "GHz*um6": 1e3, "GHz·um6": 1e3,
             "MHz.um6": 1.0, "MHz*um6": 1.0}
_LEN_UNITS = {"um": 1.0, "nm": 1e-3}
_TIME_UNITS = {"us": 1.0, "ms": 1e3}


def _parse_with_units(text, table, what, lineno, *, angular=True):
    m = re.fullmatch(r"([-+0-9.eE]+)\s*(\S+)", text.strip())
    if not m:
        raise ConfigError(f"line {lineno}: expected '<number> <unit>' for {what}, "
                          f"got {text!r}")
    try:
        value = float(m.group(1))
    except ValueError:
        raise ConfigError(f"line {lineno}: bad number {m.group(1)!r}") from None
    unit = m.group(2)
    if unit not in table:
        raise ConfigError(f"line {lineno}: unknown {what} unit {unit!r} "
                          f"(expected one of {sorted(table)})")
    scaled = value * table[unit]
    return units.TWO_PI * scaled if angular else scaled


def _parse_float(text, lineno, what):
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: {what} must be a number, got {text!r}") from None


def _parse_grid(text, lineno):
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"line {lineno}: grid range must be lo:hi:count")
        lo = _parse_float(parts[0], lineno, "grid start")
        hi = _parse_float(parts[1], lineno, "grid stop")
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"line {lineno}: grid count must be an integer") from None
        if count < 1:
            raise ConfigError(f"line {lineno}: grid count must be >= 1")
        return tuple(float(v) for v in np.linspace(lo, hi, count))
    return tuple(_parse_float(v, lineno, "grid value") for v in text.split(","))


_FREQ_KEYS = ("Omega_p", "Omega_c", "Delta", "Gamma_e", "Gamma_r",
              "gamma_ge", "gamma_er", "omega_trap", "u_rr")
_BASIS_NAMES = {"blockade": BLOCKADE, "blockade_constrained": BLOCKADE,
                "full": FULL}


def load_config(path) -> SweepSpec:
    """Parse a config file into a fully resolved SweepSpec.

    Missing keys fall back to the package defaults (the reference Rb-87
    operating point).  Unknown keys are rejected.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw_lines = fh.readlines()

    fields = {}
    kind = "single_run"
    grid: Optional[tuple] = None
    control_mode = "both"

    for lineno, raw in enumerate(raw_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not value:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")

        if key == "kind":
            if value not in KINDS:
                raise ConfigError(f"line {lineno}: unknown kind {value!r} "
                                  f"(expected one of {KINDS})")
            kind = value
        elif key == "grid":
            grid = _parse_grid(value, lineno)
        elif key == "control":
            if value not in ("both", "with", "without"):
                raise ConfigError(f"line {lineno}: control must be both/with/without")
            control_mode = value
        elif key in _FREQ_KEYS:
            fields[key] = _parse_with_units(value, _FREQ_UNITS, "frequency", lineno)
        elif key == "delta":
            if value == "auto":
                fields["delta"] = AUTO_ANTIBLOCKADE
            else:
                fields["delta"] = _parse_with_units(value, _FREQ_UNITS,
                                                    "frequency", lineno)
        elif key == "C6":
            fields["C6"] = _parse_with_units(value, _C6_UNITS, "C6", lineno)
        elif key == "r0":
            fields["r0"] = _parse_with_units(value, _LEN_UNITS, "length",
                                             lineno, angular=False)
        elif key == "sigma":
            fields["sigma_override"] = _parse_with_units(
                value, _LEN_UNITS, "length", lineno, angular=False)
        elif key == "T":
            m = re.fullmatch(r"([-+0-9.eE]+)\s*uK", value)
            if not m:
                raise ConfigError(f"line {lineno}: temperature needs a uK suffix")
            fields["T"] = float(m.group(1))
        elif key in ("dt", "t_final", "record_dt"):
            fields[key] = _parse_with_units(value, _TIME_UNITS, "time",
                                            lineno, angular=False)
        elif key == "tail_fraction":
            fields["tail_fraction"] = _parse_float(value, lineno, key)
        elif key in ("N", "M", "seed"):
            try:
                fields[key] = int(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} must be an integer") from None
        elif key == "basis":
            if value not in _BASIS_NAMES:
                raise ConfigError(f"line {lineno}: basis must be blockade or full")
            fields["basis_mode"] = _BASIS_NAMES[value]
        elif key == "exact_distance":
            if value.lower() not in ("true", "false"):
                raise ConfigError(f"line {lineno}: exact_distance must be true/false")
            fields["exact_distance"] = value.lower() == "true"
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")

    if control_mode == "without":
        fields["control_present"] = False
    elif control_mode == "with":
        fields["control_present"] = True

    try:
        base = SimParams(**fields)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    if grid is None:
        if kind != "single_run":
            raise ConfigError(f"sweep kind {kind!r} requires a grid")
        ratio = base.Omega_p / base.Omega_c if base.Omega_c else math.nan
        grid = (ratio,)

    return SweepSpec(kind=kind, grid=grid, base=base,
                     with_and_without_control=(control_mode == "both"))


def default_spec() -> SweepSpec:
    """The spec an empty config resolves to."""
    base = SimParams()
    return SweepSpec(kind="single_run", grid=(base.Omega_p / base.Omega_c,),
                     base=base, with_and_without_control=True)
