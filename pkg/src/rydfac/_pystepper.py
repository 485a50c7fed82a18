"""Pure-numpy fallback for the stepping kernel.

Same contract as ``_stepper.propagate_segment``.  ``prop.T`` is an
F-contiguous view of the same buffer, so scipy's zgemv wrapper hits the
identical BLAS code path as the compiled kernel and the amplitudes match
bit for bit.
"""
import numpy as np
from scipy.linalg import blas


def propagate_segment(prop, psi, work, threshold, max_steps):
    n = psi.shape[0]
    if prop.shape != (n, n) or work.shape[0] != n:
        raise ValueError("shape mismatch between propagator and state buffers")
    prop_t = prop.T  # no copy
    steps = 0
    norm_sq = -1.0
    crossed = False
    while steps < max_steps:
        out = blas.zgemv(1.0, prop_t, psi, trans=1)
        psi[:] = out
        steps += 1
        norm_sq = blas.zdotc(psi, psi).real
        if norm_sq <= threshold:
            crossed = True
            break
    return steps, norm_sq, crossed
