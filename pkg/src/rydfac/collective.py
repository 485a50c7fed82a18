"""Symmetric collective (Dicke) states and closed-form reduced models.

A Dicke label (m_e, m_r) counts ensemble atoms in e and in r (m_r <= 1
under blockade).  Combined with the three control levels this gives the
15 collective states of the coupled system, 5 of which form the resonant
excitation chain

    |g_c G> -- sqrt(N) Op --> |g_c E1R0> -- Oc --> |g_c E0R1>
             -- Op --> |e_c E0R1> -- Oc --> |r_c E0R1>.

The couplings are obtained by projecting the full Hamiltonian rather than
hand-coding them, so the chain coefficients are a consequence of the
operator construction, not an independent transcription.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from . import disorder
from .hilbert import Basis, Level
from .model import SimParams, build_hamiltonian

ENSEMBLE_LABELS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1))
_ENS_NAMES = {(0, 0): "G", (1, 0): "E1R0", (0, 1): "E0R1",
              (2, 0): "E2R0", (1, 1): "E1R1"}
_CONTROL_NAMES = {Level.G: "gc", Level.E: "ec", Level.R: "rc"}

# The resonant chain, in transition order.
THICK_LABELS = (
    (Level.G, 0, 0),
    (Level.G, 1, 0),
    (Level.G, 0, 1),
    (Level.E, 0, 1),
    (Level.R, 0, 1),
)


def label_name(control: Level, m_e: int, m_r: int) -> str:
    return f"{_CONTROL_NAMES[Level(control)]}_{_ENS_NAMES[(m_e, m_r)]}"


def fifteen_labels(n_atoms: int) -> tuple:
    """All (control, m_e, m_r) labels realizable with n_atoms atoms."""
    out = []
    for control in (Level.G, Level.E, Level.R):
        for m_e, m_r in ENSEMBLE_LABELS:
            if m_e + m_r <= n_atoms:
                out.append((control, m_e, m_r))
    return tuple(out)


def thin_labels(n_atoms: int) -> tuple:
    """The off-resonant complement of the five-state chain."""
    return tuple(l for l in fifteen_labels(n_atoms) if l not in THICK_LABELS)


def dicke_state(basis: Basis, m_e: int, m_r: int, control: Level) -> np.ndarray:
    """Normalized equal-amplitude superposition with the given occupations."""
    if m_r not in (0, 1):
        raise ValueError("blockade restricts m_r to 0 or 1")
    if m_e < 0 or m_e + m_r > basis.n_atoms:
        raise ValueError(
            f"label (m_e={m_e}, m_r={m_r}) impossible for N={basis.n_atoms}"
        )
    vec = np.zeros(basis.dim, dtype=np.complex128)
    hits = []
    for i, (ctrl, ensemble) in enumerate(basis.configs):
        if ctrl != control:
            continue
        n_e = sum(1 for lvl in ensemble if lvl == Level.E)
        n_r = sum(1 for lvl in ensemble if lvl == Level.R)
        if n_e == m_e and n_r == m_r:
            hits.append(i)
    if not hits:
        raise ValueError("label selects no configuration in this basis")
    vec[hits] = 1.0 / math.sqrt(len(hits))
    return vec


def project_collective(state, basis: Basis) -> dict:
    """Populations of the 15 collective states plus the remainder.

    ``state`` is either a normalized state vector or a density matrix.
    Populations and remainder sum to one.
    """
    rho_mode = np.ndim(state) == 2
    pops = {}
    total = 0.0
    for control, m_e, m_r in fifteen_labels(basis.n_atoms):
        vec = dicke_state(basis, m_e, m_r, control)
        if rho_mode:
            p = float(np.real(np.vdot(vec, state @ vec)))
        else:
            amp = np.vdot(vec, state)
            p = float(amp.real**2 + amp.imag**2)
        pops[label_name(control, m_e, m_r)] = p
        total += p
    norm = float(np.real(np.trace(state))) if rho_mode else float(
        np.real(np.vdot(state, state)))
    pops["remainder"] = norm - total
    return pops


def collective_couplings(basis: Basis, params: SimParams) -> np.ndarray:
    """Full Hamiltonian projected onto the five-state chain (frozen atoms)."""
    if not params.control_present:
        raise ValueError("the five-state chain involves the control atom")
    H = build_hamiltonian(params, basis, disorder.frozen(params))
    P = np.column_stack([
        dicke_state(basis, m_e, m_r, control)
        for control, m_e, m_r in THICK_LABELS
    ])
    return P.conj().T @ (H @ P)


def reduced_ensemble_H(params: SimParams, variant: str) -> np.ndarray:
    """Strong-probe reduced ensemble Hamiltonians.

    ``four_state`` keeps {G, E1R0, E0R1, E1R1}; ``three_state`` also
    eliminates E1R1, leaving the (N-1) Op^2 / Delta shift on E0R1.
    """
    n, op_, oc, dlt = params.N, params.Omega_p, params.Omega_c, params.Delta
    if variant == "four_state":
        h = np.zeros((4, 4))
        h[1, 1] = h[3, 3] = -dlt
        h[0, 1] = h[1, 0] = math.sqrt(n) * op_
        h[1, 2] = h[2, 1] = oc
        h[2, 3] = h[3, 2] = math.sqrt(n - 1) * op_
        return h
    if variant == "three_state":
        if dlt == 0:
            raise ValueError("three_state reduction requires Delta != 0")
        h = np.zeros((3, 3))
        h[1, 1] = -dlt
        h[2, 2] = (n - 1) * op_**2 / dlt
        h[0, 1] = h[1, 0] = math.sqrt(n) * op_
        h[1, 2] = h[2, 1] = oc
        return h
    raise ValueError(f"unknown variant {variant!r}")


def superatom_fr(n_atoms: int, omega_p: float, omega_c: float) -> float:
    """Blockaded-ensemble estimate f_r = N Op^2 / (N Op^2 + Oc^2)."""
    denom = n_atoms * omega_p**2 + omega_c**2
    if denom == 0.0:
        raise ValueError("superatom formula undefined for Omega_p = Omega_c = 0")
    return n_atoms * omega_p**2 / denom


@dataclass(frozen=True)
class DipEstimate:
    """Closed-form and root-found location of the excitation dip."""

    r_dip: float                      # closed form, um
    delta_dip: float                  # exact root of the residual, rad/us
    r_dip_exact: float                # um, from the exact root
    residual: Callable[[float], float]


def dip_position(params: SimParams) -> DipEstimate:
    """Where the alternative chain through |r_c G> becomes resonant.

    The residual is the effective |r_c G> detuning as a function of the
    control detuning d; its root d* in (-Delta, 0) maps to a distance via
    d* = -C6/r^6.  The closed form drops d against Delta.
    """
    n, op_, oc, dlt = params.N, params.Omega_p, params.Omega_c, params.Delta

    def residual(d: float) -> float:
        return (oc**2 - op_**2) / dlt + d + n * op_**2 / (dlt - d)

    r_dip = (params.C6 * dlt / (oc**2 + (n - 1) * op_**2)) ** (1.0 / 6.0)
    lo, hi = -dlt * (1.0 - 1e-9), -dlt * 1e-12
    if residual(lo) * residual(hi) > 0:
        raise ValueError("no dip root in (-Delta, 0) for these parameters")
    delta_dip = bisect(residual, lo, hi, xtol=1e-12 * dlt)
    r_dip_exact = (params.C6 / (-delta_dip)) ** (1.0 / 6.0)
    return DipEstimate(r_dip=r_dip, delta_dip=delta_dip,
                       r_dip_exact=r_dip_exact, residual=residual)
