"""Product-state basis for one control atom and N ensemble atoms.

Every atom is a three-level system g/e/r.  Two basis modes exist: ``full``
enumerates all 3^(N+1) configurations, ``blockade_constrained`` removes
configurations with two or more ensemble atoms in r, which implements a
perfect intra-ensemble blockade exactly instead of through a large pair
shift.  Enumeration is lexicographic over (control, ensemble atoms) with
g < e < r, so indices are stable across runs and platforms.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
import scipy.sparse as sp


class Level(IntEnum):
    G = 0
    E = 1
    R = 2


FULL = "full"
BLOCKADE = "blockade_constrained"

# Hard cap so index arithmetic and operator storage stay sane; 3^13 ~ 1.6M.
MAX_ATOMS = 12

Config = tuple[int, tuple[int, ...]]


class CapacityError(ValueError):
    """Requested atom count exceeds what the basis can index."""


@dataclass(frozen=True)
class Basis:
    """Ordered configuration list plus its inverse index map."""

    mode: str
    n_atoms: int
    configs: tuple[Config, ...]
    index: dict = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.configs)

    def ensemble_rydberg_count(self, i: int) -> int:
        return sum(1 for lvl in self.configs[i][1] if lvl == Level.R)


def blockade_dim(n_atoms: int) -> int:
    """Dimension of the blockade-constrained basis, 3*(2^N + N*2^(N-1))."""
    return 3 * (2**n_atoms + n_atoms * 2 ** (n_atoms - 1))


def build_basis(n_atoms: int, mode: str = BLOCKADE) -> Basis:
    if n_atoms < 1:
        raise ValueError(f"need at least one ensemble atom, got N={n_atoms}")
    if n_atoms > MAX_ATOMS:
        raise CapacityError(
            f"N={n_atoms} gives dim 3^{n_atoms + 1}, beyond the supported cap "
            f"(N <= {MAX_ATOMS})"
        )
    if mode not in (FULL, BLOCKADE):
        raise ValueError(f"unknown basis mode {mode!r}")

    configs = []
    for tup in itertools.product((0, 1, 2), repeat=n_atoms + 1):
        control, ensemble = tup[0], tup[1:]
        if mode == BLOCKADE and sum(1 for lvl in ensemble if lvl == 2) >= 2:
            continue
        configs.append((control, ensemble))
    index = {c: i for i, c in enumerate(configs)}
    basis = Basis(mode=mode, n_atoms=n_atoms, configs=tuple(configs), index=index)
    expected = 3 ** (n_atoms + 1) if mode == FULL else blockade_dim(n_atoms)
    assert basis.dim == expected
    return basis


def _atom_slot(basis: Basis, atom) -> int:
    """Map the public atom selector ('control' or 1..N) to a tuple slot."""
    if atom == "control":
        return -1
    if isinstance(atom, int) and 1 <= atom <= basis.n_atoms:
        return atom - 1
    raise ValueError(f"atom selector must be 'control' or 1..{basis.n_atoms}, got {atom!r}")


def transition_operator(basis: Basis, atom, level_from: Level, level_to: Level) -> sp.csr_matrix:
    """Single-atom flip |to><from| embedded in the product space.

    Transitions whose target configuration is excluded from a constrained
    basis are dropped.
    """
    slot = _atom_slot(basis, atom)
    rows, cols = [], []
    for i, (control, ensemble) in enumerate(basis.configs):
        occupied = control if slot == -1 else ensemble[slot]
        if occupied != level_from:
            continue
        if slot == -1:
            target = (int(level_to), ensemble)
        else:
            flipped = list(ensemble)
            flipped[slot] = int(level_to)
            target = (control, tuple(flipped))
        j = basis.index.get(target)
        if j is not None:
            rows.append(j)
            cols.append(i)
    data = np.ones(len(rows), dtype=np.complex128)
    return sp.csr_matrix((data, (rows, cols)), shape=(basis.dim, basis.dim))


def projector(basis: Basis, atom, level: Level) -> sp.csr_matrix:
    """|level><level| on one atom."""
    return transition_operator(basis, atom, level, level)


def dense(op: sp.spmatrix, max_dim: int = 1024) -> np.ndarray:
    """Densify a sparse operator, guarded against runaway dimensions."""
    if op.shape[0] > max_dim:
        raise CapacityError(f"refusing to densify dim {op.shape[0]} > {max_dim}")
    return np.asarray(op.todense(), dtype=np.complex128)


def project_to(sub: Basis, full: Basis, op: sp.spmatrix) -> sp.csr_matrix:
    """Restrict an operator on ``full`` to the configurations of ``sub``."""
    if sub.n_atoms != full.n_atoms:
        raise ValueError("basis atom counts differ")
    keep = np.fromiter(
        (full.index[c] for c in sub.configs), dtype=np.int64, count=sub.dim
    )
    return op.tocsr()[keep][:, keep]
