"""System parameters and operator assembly.

The Hamiltonian (rad/us, rotating frame) is

    H = sum_j [ -Delta |e_j><e_j| + (Omega_p |e_j><g_j| + Omega_c |r_j><e_j| + h.c.) ]
      + [ -Delta |e_c><e_c| + delta |r_c><r_c|
          + (Omega_p |e_c><g_c| + Omega_c |r_c><e_c| + h.c.) ]      (control only)
      + sum_j U_j |r_c r_j><r_c r_j|
      + sum_{k>j} u_rr |r_j r_k><r_j r_k|                            (full basis only)

with four dissipation channels per atom: decay e->g (Gamma_e), decay r->g
(Gamma_r) and the two dephasings (gamma_ge, gamma_er).  The antiblockade
sentinel delta='auto_antiblockade' resolves to -C6/r0^6 so the doubly
excited |r_c r_j> configurations sit at zero energy for atoms at the trap
center.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp

from . import hilbert, units
from .disorder import DisorderRealization
from .hilbert import BLOCKADE, FULL, Basis, Level

AUTO_ANTIBLOCKADE = "auto_antiblockade"


@dataclass(frozen=True)
class SimParams:
    """Physical and numerical parameters.

    Rabi frequencies, detunings and rates are angular frequencies in
    rad/us; C6 is rad/us*um^6; lengths um, times us, temperature uK.
    Defaults reproduce the reference operating point of the simulator
    (Rb 87, 55S, Omega_p = 2 Omega_c).
    """

    Omega_p: float = units.mhz(12.12)
    Omega_c: float = units.mhz(6.06)
    Delta: float = units.mhz(121.2)
    delta: Union[float, str] = AUTO_ANTIBLOCKADE
    Gamma_e: float = units.mhz(6.06)
    Gamma_r: float = units.khz(2.0)
    gamma_ge: float = units.khz(12.12)
    gamma_er: float = units.khz(12.12)
    C6: float = units.ghz_um6(50.0)
    r0: float = 3.062
    T: float = 1.0
    omega_trap: float = units.khz(100.0)
    atom_mass: float = units.RB87_MASS
    N: int = 3
    M: int = 300
    dt: float = 1e-3
    t_final: float = 50.0
    tail_fraction: float = 0.2
    seed: int = 20240817
    control_present: bool = True
    basis_mode: str = BLOCKADE
    u_rr: float = units.mhz(500.0)
    sigma_override: Optional[float] = None
    exact_distance: bool = False
    record_dt: float = 0.05

    def __post_init__(self):
        for name in ("Omega_p", "Omega_c", "Gamma_e", "Gamma_r", "gamma_ge",
                     "gamma_er", "T", "u_rr"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("Delta", "C6", "r0", "omega_trap", "atom_mass", "dt",
                     "t_final", "record_dt"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.tail_fraction <= 1.0:
            raise ValueError("tail_fraction must lie in (0, 1]")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if isinstance(self.delta, str) and self.delta != AUTO_ANTIBLOCKADE:
            raise ValueError(f"unknown delta sentinel {self.delta!r}")
        if self.basis_mode not in (FULL, BLOCKADE):
            raise ValueError(f"unknown basis mode {self.basis_mode!r}")
        if self.sigma_override is not None and self.sigma_override < 0:
            raise ValueError("sigma_override must be non-negative")

    def resolved_delta(self) -> float:
        """Control Rydberg detuning with the antiblockade sentinel applied."""
        if self.delta == AUTO_ANTIBLOCKADE:
            return -self.C6 / self.r0**6
        return float(self.delta)

    def with_(self, **changes) -> "SimParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ModelOperators:
    """Hamiltonian, jump operators and the non-Hermitian effective matrix."""

    basis: Basis
    H: sp.csr_matrix
    jumps: tuple  # of (csr_matrix, label)
    H_eff: np.ndarray = field(repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim


def build_hamiltonian(params: SimParams, basis: Basis,
                      dis: DisorderRealization) -> sp.csr_matrix:
    if basis.n_atoms != params.N or dis.n_atoms != params.N:
        raise ValueError(
            f"atom count mismatch: params N={params.N}, basis {basis.n_atoms}, "
            f"disorder {dis.n_atoms}"
        )
    dim = basis.dim
    H = sp.csr_matrix((dim, dim), dtype=np.complex128)

    def drive(atom):
        t_ge = hilbert.transition_operator(basis, atom, Level.G, Level.E)
        t_er = hilbert.transition_operator(basis, atom, Level.E, Level.R)
        return (params.Omega_p * (t_ge + t_ge.T)
                + params.Omega_c * (t_er + t_er.T)
                - params.Delta * hilbert.projector(basis, atom, Level.E))

    for j in range(1, params.N + 1):
        H = H + drive(j)
    if params.control_present:
        H = H + drive("control")
        H = H + params.resolved_delta() * hilbert.projector(basis, "control", Level.R)

    diag = np.zeros(dim)
    for i, (control, ensemble) in enumerate(basis.configs):
        if control == Level.R:
            diag[i] += sum(
                dis.interactions[j] for j, lvl in enumerate(ensemble) if lvl == Level.R
            )
        if basis.mode == FULL:
            n_r = sum(1 for lvl in ensemble if lvl == Level.R)
            diag[i] += params.u_rr * (n_r * (n_r - 1) // 2)
    H = H + sp.diags(diag, format="csr", dtype=np.complex128)
    return H.tocsr()


def build_jumps(params: SimParams, basis: Basis) -> tuple:
    """Four Lindblad channels per atom; control channels only if present."""
    ops = []
    atoms = [str(j) for j in range(1, params.N + 1)]
    selectors = list(range(1, params.N + 1))
    if params.control_present:
        atoms.append("c")
        selectors.append("control")
    for name, atom in zip(atoms, selectors):
        p_g = hilbert.projector(basis, atom, Level.G)
        p_e = hilbert.projector(basis, atom, Level.E)
        p_r = hilbert.projector(basis, atom, Level.R)
        ops.append((
            math.sqrt(params.Gamma_e)
            * hilbert.transition_operator(basis, atom, Level.E, Level.G),
            f"decay_e:{name}",
        ))
        ops.append((
            math.sqrt(params.Gamma_r)
            * hilbert.transition_operator(basis, atom, Level.R, Level.G),
            f"decay_r:{name}",
        ))
        ops.append((math.sqrt(params.gamma_ge) * (p_e - p_g), f"dephase_ge:{name}"))
        ops.append((math.sqrt(params.gamma_er) * (p_r - p_e), f"dephase_er:{name}"))
    return tuple(ops)


def build_effective(H: sp.spmatrix, jumps) -> np.ndarray:
    """H_eff = H - (i/2) sum_a L_a^dag L_a, densified."""
    dim = H.shape[0]
    damping = sp.csr_matrix((dim, dim), dtype=np.complex128)
    for op, _label in jumps:
        if op.shape[0] != dim:
            raise ValueError("jump operator dimension mismatch")
        damping = damping + op.conj().T @ op
    h_eff = H.toarray().astype(np.complex128)
    h_eff -= 0.5j * damping.toarray()
    return np.ascontiguousarray(h_eff)


def build_model(params: SimParams, basis: Basis,
                dis: DisorderRealization) -> ModelOperators:
    H = build_hamiltonian(params, basis, dis)
    jumps = build_jumps(params, basis)
    return ModelOperators(basis=basis, H=H, jumps=jumps,
                          H_eff=build_effective(H, jumps))


def ground_state(basis: Basis) -> np.ndarray:
    """|g_c; g...g>, the initial state of every run."""
    psi = np.zeros(basis.dim, dtype=np.complex128)
    psi[basis.index[(0, (0,) * basis.n_atoms)]] = 1.0
    return psi
