"""Observable extraction shared by the trajectory engine and the oracle.

The standard set follows the single-Rydberg projectors
O_s = |s><s| (x) sum_j |r_j><r_j| prod_{k!=j} |g_k><g_k|  for s in {g_c, r_c},
the collective ground projector, the multi-excitation leakage population,
and the derived total P_ryd = P_gc + P_rc whose steady tail is f_r.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hilbert import Basis, Level

STANDARD_LABELS = ("P_gc", "P_rc", "P_gcG", "P_multi", "P_ryd")


@dataclass(frozen=True)
class ObservableSet:
    """Diagonal index groups plus optional state projections."""

    labels: tuple
    groups: tuple = field(repr=False)        # index arrays, one per diagonal label
    proj_labels: tuple = ()
    projections: tuple = field(default=(), repr=False)  # unit vectors

    @property
    def all_labels(self) -> tuple:
        return self.labels + self.proj_labels

    @property
    def size(self) -> int:
        return len(self.labels) + len(self.proj_labels)

    def evaluate_state(self, psi: np.ndarray, norm_sq: float) -> np.ndarray:
        """Expectation values on |psi>/||psi||."""
        weights = psi.real**2 + psi.imag**2
        out = np.empty(self.size)
        for k, group in enumerate(self.groups):
            out[k] = weights[group].sum() / norm_sq
        base = len(self.groups)
        for k, vec in enumerate(self.projections):
            amp = np.vdot(vec, psi)
            out[base + k] = (amp.real**2 + amp.imag**2) / norm_sq
        return out

    def evaluate_density(self, rho: np.ndarray) -> np.ndarray:
        diag = np.real(np.diag(rho))
        out = np.empty(self.size)
        for k, group in enumerate(self.groups):
            out[k] = diag[group].sum()
        base = len(self.groups)
        for k, vec in enumerate(self.projections):
            out[base + k] = np.real(np.vdot(vec, rho @ vec))
        return out


def _counts(ensemble) -> tuple:
    n_e = sum(1 for lvl in ensemble if lvl == Level.E)
    n_r = sum(1 for lvl in ensemble if lvl == Level.R)
    return n_e, n_r


def standard_set(basis: Basis, extra_projections=()) -> ObservableSet:
    """The four population observables plus the combined Rydberg signal.

    ``extra_projections`` is an iterable of (label, vector) pairs appended
    after the diagonal observables (used for collective-state tracking).
    """
    gc, rc, gcG, multi, ryd = [], [], [], [], []
    for i, (control, ensemble) in enumerate(basis.configs):
        n_e, n_r = _counts(ensemble)
        single_r = n_r == 1 and n_e == 0
        if single_r and control == Level.G:
            gc.append(i)
        if single_r and control == Level.R:
            rc.append(i)
        if single_r and control in (Level.G, Level.R):
            ryd.append(i)
        if control == Level.G and n_e == 0 and n_r == 0:
            gcG.append(i)
        if (n_e >= 2 and n_r == 1) or n_e >= 3:
            multi.append(i)
    groups = tuple(
        np.asarray(g, dtype=np.intp) for g in (gc, rc, gcG, multi, ryd)
    )
    proj_labels = tuple(label for label, _vec in extra_projections)
    projections = tuple(np.asarray(vec, dtype=np.complex128)
                        for _label, vec in extra_projections)
    return ObservableSet(labels=STANDARD_LABELS, groups=groups,
                         proj_labels=proj_labels, projections=projections)


@dataclass(frozen=True)
class ObservableSeries:
    """Trajectory-averaged observables on a common time grid."""

    times: np.ndarray
    labels: tuple
    mean: np.ndarray    # (n_obs, n_t)
    stderr: np.ndarray  # (n_obs, n_t)
    n_samples: int

    def get(self, label: str):
        k = self.labels.index(label)
        return self.mean[k], self.stderr[k]
