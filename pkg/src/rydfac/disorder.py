"""Thermal position disorder of the ensemble atoms.

Atoms sit in a harmonic trap at temperature T, giving a Gaussian position
spread of width sigma = sqrt(k_B T / (m w^2)) per axis.  Each realization
draws one 3-D displacement per atom, held frozen for the whole trajectory,
and maps it to a control-ensemble interaction through the first-order
expansion  U_j = C6/r0^6 - 6 C6 |dr_j| / r0^7.  An exact-distance mode
(U_j = C6/|r0 + dr_j|^6) is kept as a cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import units


@dataclass(frozen=True)
class DisorderRealization:
    n_atoms: int
    displacements: np.ndarray  # |dr_j| magnitudes, um
    interactions: np.ndarray   # U_j, rad/us
    sigma: float               # um


def sigma_of(params) -> float:
    """Positional standard deviation per axis in um.

    ``params.sigma_override`` wins when set; otherwise the thermal value is
    computed from CODATA constants.
    """
    if params.sigma_override is not None:
        return params.sigma_override
    return units.thermal_sigma_um(params.T, params.omega_trap, params.atom_mass)


def interaction_at(params) -> float:
    """Unperturbed interaction U(r0) = C6 / r0^6 in rad/us."""
    return params.C6 / params.r0**6


def sample(params, rng: np.random.Generator) -> DisorderRealization:
    """Draw one frozen-gas disorder realization.

    Consumes exactly 3N normal variates from ``rng`` so that downstream
    random streams stay aligned across modes.
    """
    sigma = sigma_of(params)
    offsets = rng.normal(0.0, 1.0, size=(params.N, 3)) * sigma
    magnitudes = np.linalg.norm(offsets, axis=1)
    u0 = interaction_at(params)
    if params.exact_distance:
        # control at origin, trap center on the x axis
        centers = np.array([params.r0, 0.0, 0.0]) + offsets
        interactions = params.C6 / np.linalg.norm(centers, axis=1) ** 6
    else:
        interactions = u0 - 6.0 * params.C6 * magnitudes / params.r0**7
    return DisorderRealization(
        n_atoms=params.N,
        displacements=magnitudes,
        interactions=interactions,
        sigma=sigma,
    )


def frozen(params) -> DisorderRealization:
    """The zero-temperature limit: every atom exactly at the trap center."""
    u0 = interaction_at(params)
    return DisorderRealization(
        n_atoms=params.N,
        displacements=np.zeros(params.N),
        interactions=np.full(params.N, u0),
        sigma=0.0,
    )


def blockade_radius(params) -> float:
    """R_b = (gamma_ge * C6 / Omega_c^2)^(1/6) in um."""
    if params.Omega_c == 0.0:
        raise ValueError("blockade radius undefined for Omega_c = 0")
    return (params.gamma_ge * params.C6 / params.Omega_c**2) ** (1.0 / 6.0)
