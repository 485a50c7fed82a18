# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot loop of the trajectory engine: repeated propagator matvecs.

Calls the same BLAS kernels (zgemv/zdotc) that numpy dispatches to, so the
numpy fallback in ``_pystepper`` produces bit-identical amplitudes; the win
here is removing per-step Python and ufunc overhead, which dominates at the
typical dimensions (tens to a few hundred).
"""
from scipy.linalg.cython_blas cimport zgemv, zcopy, zdotc


def propagate_segment(const double complex[:, ::1] prop,
                      double complex[::1] psi,
                      double complex[::1] work,
                      double threshold,
                      long max_steps):
    """Apply ``prop`` to ``psi`` in place, at most ``max_steps`` times.

    Stops early when the squared norm drops to ``threshold`` or below
    (a jump is due).  Returns (steps_taken, norm_sq, crossed).
    """
    cdef int n = psi.shape[0]
    cdef int inc = 1
    cdef double complex one = 1.0 + 0.0j
    cdef double complex zero = 0.0 + 0.0j
    cdef double complex acc
    cdef double norm_sq = -1.0
    cdef long steps = 0
    cdef bint crossed = False
    # Row-major C array fed to Fortran BLAS as its own transpose.
    cdef char trans = b'T'

    if prop.shape[0] != n or prop.shape[1] != n or work.shape[0] != n:
        raise ValueError("shape mismatch between propagator and state buffers")

    with nogil:
        while steps < max_steps:
            zgemv(&trans, &n, &n, &one, &prop[0, 0], &n,
                  &psi[0], &inc, &zero, &work[0], &inc)
            zcopy(&n, &work[0], &inc, &psi[0], &inc)
            steps += 1
            acc = zdotc(&n, &psi[0], &inc, &psi[0], &inc)
            norm_sq = acc.real
            if norm_sq <= threshold:
                crossed = True
                break

    return steps, norm_sq, crossed
