#!/usr/bin/env python3
"""Compare the compiled stepping kernel against the numpy fallback.

Reports per-step time for the propagator loop at several basis sizes plus a
whole-trajectory comparison, and checks the engines agree bit for bit.

    python benchmarks/bench_stepper.py [--steps 20000]
"""
import argparse
import time

import numpy as np
from threadpoolctl import threadpool_limits

from rydfac import mcwf
from rydfac.disorder import frozen
from rydfac.hilbert import BLOCKADE, FULL, build_basis
from rydfac.model import SimParams, build_model, ground_state
from rydfac.observables import standard_set

CASES = (
    (1, BLOCKADE), (2, BLOCKADE), (3, BLOCKADE), (3, FULL),
    (4, BLOCKADE), (5, BLOCKADE),
)


def time_segment(engine, prop, psi0, steps):
    psi = psi0.copy()
    work = np.empty_like(psi)
    start = time.perf_counter()
    done, _norm, _crossed = engine(prop, psi, work, -1.0, steps)
    return (time.perf_counter() - start) / done


def time_trajectory(params, engine_name):
    start = time.perf_counter()
    mcwf.run_observables(params, engine=engine_name)
    return time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--steps", type=int, default=20_000)
    args = parser.parse_args()

    if not mcwf.HAVE_COMPILED:
        print("compiled extension unavailable; benchmarking fallback only")
    engines = mcwf.available_engines()

    print(f"{'case':24s} {'dim':>5s} " +
          " ".join(f"{name + ' us/step':>18s}" for name in engines))
    for n_atoms, mode in CASES:
        params = SimParams(N=n_atoms, basis_mode=mode, T=0.0)
        basis = build_basis(n_atoms, mode)
        ops = build_model(params, basis, frozen(params))
        with threadpool_limits(limits=1):
            prop = mcwf.step_propagator(ops.H_eff, params.dt)
            psi0 = ground_state(basis)
            row = []
            for name in engines:
                per_step = time_segment(mcwf.resolve_engine(name), prop, psi0,
                                        args.steps)
                row.append(per_step * 1e6)
        print(f"N={n_atoms} {mode:20s} {basis.dim:5d} " +
              " ".join(f"{v:18.3f}" for v in row))

    print("\nwhole run (N=3 blockade, M=20, t_final=5 us):")
    params = SimParams(N=3, M=20, t_final=5.0, T=1.0)
    results = {}
    for name in engines:
        elapsed = time_trajectory(params, name)
        results[name] = elapsed
        print(f"  {name:9s} {elapsed:8.2f} s")
    if len(engines) == 2:
        print(f"  speedup   {results['python'] / results['compiled']:8.2f} x")

    a = mcwf.run_observables(SimParams(N=2, M=4, t_final=1.0), engine=engines[0])
    b = mcwf.run_observables(SimParams(N=2, M=4, t_final=1.0), engine=engines[-1])
    print("\nengines bit-identical:", bool(np.array_equal(a.mean, b.mean)))


if __name__ == "__main__":
    main()
