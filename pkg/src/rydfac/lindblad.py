"""Dense Lindblad master-equation integrator (validation oracle).

Classical fixed-step RK4 on drho/dt = -i(H_nh rho - rho H_nh^dag)
+ sum_a L_a rho L_a^dag, with H_nh the same non-Hermitian matrix used by
the trajectory engine.  Deliberately independent of the propagator-based
unraveling: no matrix exponentials, no stochastic elements.  Guarded to
small dimensions; this is a brute-force reference, not a production path.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .model import ModelOperators
from .observables import ObservableSeries, ObservableSet

DIM_GUARD = 256


class OracleError(RuntimeError):
    pass


def pure_density(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def _superoperator(ops: ModelOperators) -> sp.csr_matrix:
    """Sparse generator acting on row-major vec(rho).

    vec_C(A rho B) = (A kron B^T) vec_C(rho), so the Lindblad RHS becomes a
    single matvec; this is the same equation the triple-product form
    evaluates, precomputed once.
    """
    dim = ops.dim
    identity = sp.identity(dim, format="csr", dtype=np.complex128)
    h_nh = sp.csr_matrix(ops.H_eff)
    gen = -1j * (sp.kron(h_nh, identity, format="csr")
                 - sp.kron(identity, h_nh.conj(), format="csr"))
    for op, _label in ops.jumps:
        mat = op.tocsr()
        gen = gen + sp.kron(mat, mat.conj(), format="csr")
    return gen.tocsr()


def integrate(ops: ModelOperators, rho0: np.ndarray, times: np.ndarray, *,
              step: float, observables: ObservableSet,
              state_callback=None) -> ObservableSeries:
    """Integrate rho0 over a uniform grid, emitting trajectory-style series.

    ``step`` is the RK4 step; each record interval is split into an integer
    number of substeps no larger than ``step``.  ``state_callback(t, rho)``
    runs at every record point (positivity and purity checks in tests).
    Trace drift beyond 1e-6 aborts with a step-size diagnostic.
    """
    dim = rho0.shape[0]
    if dim > DIM_GUARD:
        raise OracleError(f"oracle limited to dim <= {DIM_GUARD}, got {dim}")
    if rho0.shape != (dim, dim) or ops.H_eff.shape != (dim, dim):
        raise OracleError("dimension mismatch between rho0 and operators")

    generator = _superoperator(ops)

    spacing = float(times[1] - times[0])
    n_sub = max(1, int(np.ceil(spacing / step - 1e-12)))
    h = spacing / n_sub

    vec = np.array(rho0, dtype=np.complex128).reshape(-1)
    values = np.empty((observables.size, len(times)))
    values[:, 0] = observables.evaluate_density(rho0)
    if state_callback is not None:
        state_callback(float(times[0]), np.array(rho0, dtype=np.complex128))

    for k in range(1, len(times)):
        for _ in range(n_sub):
            k1 = generator @ vec
            k2 = generator @ (vec + 0.5 * h * k1)
            k3 = generator @ (vec + 0.5 * h * k2)
            k4 = generator @ (vec + h * k3)
            vec = vec + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = vec.reshape(dim, dim)
        drift = abs(float(np.real(np.trace(rho))) - 1.0)
        if not drift <= 1e-6:  # catches NaN from an unstable step
            raise OracleError(
                f"trace drifted by {drift:.2e} at t={times[k]:.4f} us; "
                f"reduce the integration step"
            )
        values[:, k] = observables.evaluate_density(rho)
        if state_callback is not None:
            state_callback(float(times[k]), rho)

    zeros = np.zeros_like(values)
    return ObservableSeries(times=np.asarray(times), labels=tuple(observables.all_labels),
                            mean=values, stderr=zeros, n_samples=1)
