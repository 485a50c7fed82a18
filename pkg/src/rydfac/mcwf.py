"""Quantum-jump (Monte Carlo wave function) trajectory engine.

Unraveling: between jumps the state evolves under the precomputed dense
propagator exp(-i H_eff dt).  A uniform variate eps fixes the next jump
time through the waiting-time construction: the jump fires at the first
step where ||psi||^2 <= eps, the channel is drawn proportionally to
<psi|L^dag L|psi>, the state is replaced by the normalized L psi and eps is
redrawn.  Trajectory averages over M runs converge to the Lindblad master
equation (see the oracle module and its equivalence tests).

Randomness is counter-based: trajectory m of sweep point p uses the
Philox stream keyed by (seed, p, m), so results are independent of worker
count and scheduling.  Each trajectory draws its own disorder realization
from that stream before consuming jump variates.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from threadpoolctl import threadpool_limits

from . import _pystepper, disorder
from .hilbert import build_basis
from .model import ModelOperators, SimParams, build_model, ground_state
from .observables import ObservableSeries, ObservableSet, standard_set

try:
    from . import _stepper
    HAVE_COMPILED = True
except ImportError:  # extension not built; numpy fallback
    _stepper = None
    HAVE_COMPILED = False

_DEFAULT_ENGINE = os.environ.get(
    "RYDFAC_ENGINE", "compiled" if HAVE_COMPILED else "python"
)


class TrajectoryError(RuntimeError):
    """Non-finite amplitudes or an impossible jump draw."""


def available_engines() -> tuple:
    return ("compiled", "python") if HAVE_COMPILED else ("python",)


def resolve_engine(name=None):
    """Return the propagate_segment callable for an engine name."""
    name = name or _DEFAULT_ENGINE
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled stepper not available; build the extension "
                               "or use engine='python'")
        return _stepper.propagate_segment
    if name == "python":
        return _pystepper.propagate_segment
    raise ValueError(f"unknown engine {name!r}")


@dataclass(frozen=True)
class TrajectoryRecord:
    times: np.ndarray
    values: np.ndarray          # (n_obs, n_t)
    jumps: tuple                # of (time, label)


def step_propagator(h_eff: np.ndarray, dt: float) -> np.ndarray:
    """Dense exp(-i H_eff dt), computed once per realization."""
    return np.ascontiguousarray(scipy.linalg.expm(-1j * dt * h_eff))


def total_jump_weight(ops: ModelOperators, psi: np.ndarray) -> float:
    """sum_a <psi| L_a^dag L_a |psi> for a normalized state."""
    total = 0.0
    for op, _label in ops.jumps:
        amp = op @ psi
        total += float(np.real(np.vdot(amp, amp)))
    return total


def validate_step(ops: ModelOperators, psi0: np.ndarray, dt: float,
                  budget: float = 0.01) -> None:
    """Reject dt too coarse for the initial total jump rate."""
    rate = total_jump_weight(ops, psi0)
    if rate * dt > budget:
        raise ValueError(
            f"dt={dt} too large: initial jump weight {rate:.3g}/us gives "
            f"rate*dt={rate * dt:.3g} > {budget}"
        )


def record_times(params: SimParams, t_final=None) -> np.ndarray:
    """Uniform output grid; spacing must be an integer number of dt steps."""
    t_final = params.t_final if t_final is None else t_final
    stride = params.record_dt / params.dt
    if abs(stride - round(stride)) > 1e-9 or round(stride) < 1:
        raise ValueError("record_dt must be a positive integer multiple of dt")
    n_rec = int(round(t_final / params.record_dt))
    return np.arange(n_rec + 1) * params.record_dt


def run_trajectory(ops: ModelOperators, psi0: np.ndarray, times: np.ndarray,
                   rng: np.random.Generator, *, dt: float,
                   observables: ObservableSet, propagator=None,
                   engine=None, collect_jumps: bool = False) -> TrajectoryRecord:
    """Integrate one quantum trajectory and record observables on ``times``."""
    segment = resolve_engine(engine) if not callable(engine) else engine
    validate_step(ops, psi0, dt)

    stride = int(round((times[1] - times[0]) / dt))
    if abs(stride * dt - (times[1] - times[0])) > 1e-9 * dt * stride:
        raise ValueError("record grid spacing is not a multiple of dt")

    if propagator is None:
        propagator = step_propagator(ops.H_eff, dt)
    psi = np.array(psi0, dtype=np.complex128)
    work = np.empty_like(psi)
    jump_mats = [op for op, _label in ops.jumps]
    jump_labels = [label for _op, label in ops.jumps]

    values = np.empty((observables.size, len(times)))
    jumps = []
    eps = rng.random()
    norm_sq = float(np.real(np.vdot(psi, psi)))
    values[:, 0] = observables.evaluate_state(psi, norm_sq)

    for k in range(1, len(times)):
        remaining = stride
        while remaining > 0:
            taken, norm_sq, crossed = segment(propagator, psi, work, eps, remaining)
            remaining -= taken
            if not np.isfinite(norm_sq):
                raise TrajectoryError(
                    f"non-finite state norm near t={times[k] - remaining * dt:.4f} us"
                )
            if crossed:
                weights = np.empty(len(jump_mats))
                for a, mat in enumerate(jump_mats):
                    amp = mat @ psi
                    weights[a] = np.real(np.vdot(amp, amp))
                total = weights.sum()
                if not np.isfinite(total) or total <= 0.0:
                    raise TrajectoryError(
                        f"all jump weights vanished at t={times[k] - remaining * dt:.4f} us"
                    )
                choice = np.searchsorted(np.cumsum(weights) / total, rng.random())
                choice = min(choice, len(jump_mats) - 1)
                psi = jump_mats[choice] @ psi
                psi /= np.linalg.norm(psi)
                if collect_jumps:
                    jumps.append((times[k] - remaining * dt, jump_labels[choice]))
                eps = rng.random()
                norm_sq = 1.0
        values[:, k] = observables.evaluate_state(psi, norm_sq)

    return TrajectoryRecord(times=times, values=values, jumps=tuple(jumps))


def average(records, labels) -> ObservableSeries:
    """Trajectory mean and standard error on a shared grid."""
    if len(records) < 2:
        raise ValueError("need at least two trajectory records")
    times = records[0].times
    for rec in records[1:]:
        if rec.times.shape != times.shape or not np.allclose(rec.times, times):
            raise ValueError("trajectory records use different time grids")
    stack = np.stack([rec.values for rec in records])  # (M, n_obs, n_t)
    mean = stack.mean(axis=0)
    stderr = stack.std(axis=0, ddof=1) / np.sqrt(stack.shape[0])
    return ObservableSeries(times=times, labels=tuple(labels), mean=mean,
                            stderr=stderr, n_samples=stack.shape[0])


@dataclass(frozen=True)
class SteadyState:
    f_r: float
    stderr: float
    converged: bool
    tail_start: float


def steady_state(series: ObservableSeries, tail_fraction: float) -> SteadyState:
    """Tail average of the combined Rydberg population P_ryd.

    The reported stderr is the tail mean of the per-point standard errors;
    successive points share trajectories, so no 1/sqrt(n_points) gain is
    claimed.  The convergence flag compares the two halves of the tail.
    """
    mean, err = series.get("P_ryd")
    n_t = len(series.times)
    n_tail = int(round(n_t * tail_fraction))
    if n_tail < 10:
        raise ValueError(f"tail window of {n_tail} points is too short (< 10)")
    tail = mean[n_t - n_tail:]
    tail_err = err[n_t - n_tail:]
    f_r = float(tail.mean())
    stderr = float(tail_err.mean())
    half = n_tail // 2
    drift = abs(float(tail[:half].mean()) - float(tail[half:].mean()))
    converged = drift < 0.005 + 2.0 * stderr
    return SteadyState(f_r=f_r, stderr=stderr, converged=converged,
                       tail_start=float(series.times[n_t - n_tail]))


# ---------------------------------------------------------------------------
# Parallel many-trajectory runner


def _trajectory_stream(seed: int, point_index: int, traj_index: int):
    seq = np.random.SeedSequence(entropy=seed,
                                 spawn_key=(point_index, traj_index))
    return np.random.Generator(np.random.Philox(seq))


def _collective_projections(basis):
    from .collective import fifteen_labels, dicke_state, label_name
    pairs = []
    for control, m_e, m_r in fifteen_labels(basis.n_atoms):
        vec = dicke_state(basis, m_e, m_r, control)
        pairs.append((label_name(control, m_e, m_r), vec))
    return pairs


def _run_batch(args):
    (params, point_index, lo, hi, t_final, collective, fixed_disorder,
     engine) = args
    with threadpool_limits(limits=1):
        basis = build_basis(params.N, params.basis_mode)
        extra = _collective_projections(basis) if collective else ()
        obs = standard_set(basis, extra)
        times = record_times(params, t_final)
        psi0 = ground_state(basis)
        blocks = []
        for m in range(lo, hi):
            rng = _trajectory_stream(params.seed, point_index, m)
            dis = disorder.sample(params, rng)  # keeps streams aligned
            if fixed_disorder is not None:
                dis = fixed_disorder
            ops = build_model(params, basis, dis)
            rec = run_trajectory(ops, psi0, times, rng, dt=params.dt,
                                 observables=obs, engine=engine)
            blocks.append(rec.values)
        return lo, np.stack(blocks), tuple(obs.all_labels)


def run_observables(params: SimParams, *, point_index: int = 0,
                    t_final=None, workers: int = 1, engine=None,
                    collective: bool = False,
                    fixed_disorder=None) -> ObservableSeries:
    """Average params.M trajectories, in parallel when workers > 1.

    One fresh disorder realization is drawn per trajectory unless
    ``fixed_disorder`` pins a single realization (used for oracle
    comparisons).  Identical (params, seed) give bit-identical results for
    any worker count.
    """
    t_final = params.t_final if t_final is None else t_final
    m_total = params.M
    chunk = max(1, -(-m_total // (max(1, workers) * 4)))
    tasks = [
        (params, point_index, lo, min(lo + chunk, m_total), t_final,
         collective, fixed_disorder, engine)
        for lo in range(0, m_total, chunk)
    ]
    results = {}
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for lo, block, labels in pool.map(_run_batch, tasks):
                results[lo] = (block, labels)
    else:
        for task in tasks:
            lo, block, labels = _run_batch(task)
            results[lo] = (block, labels)

    order = sorted(results)
    labels = results[order[0]][1]
    stack = np.concatenate([results[lo][0] for lo in order], axis=0)
    times = record_times(params, t_final)
    mean = stack.mean(axis=0)
    if stack.shape[0] > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(stack.shape[0])
    else:
        stderr = np.zeros_like(mean)
    return ObservableSeries(times=times, labels=labels, mean=mean,
                            stderr=stderr, n_samples=stack.shape[0])
