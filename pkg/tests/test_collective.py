import itertools
import math

import numpy as np
import pytest

from rydfac import units
from rydfac.collective import (
    THICK_LABELS, DipEstimate, collective_couplings, dicke_state, dip_position,
    fifteen_labels, label_name, project_collective, reduced_ensemble_H,
    superatom_fr, thin_labels,
)
from rydfac.hilbert import BLOCKADE, FULL, Level, build_basis
from rydfac.model import SimParams


# --- exhaustive ensemble-space oracle -------------------------------------
# Product space of N three-level atoms as dicts config -> amplitude, with
# the collective raising operators applied term by term.

def apply_sum_flip(state, frm, to):
    out = {}
    for config, amp in state.items():
        for j, lvl in enumerate(config):
            if lvl == frm:
                flipped = list(config)
                flipped[j] = to
                key = tuple(flipped)
                out[key] = out.get(key, 0.0) + amp
    return out


def norm_sq(state):
    return sum(abs(a) ** 2 for a in state.values())


def ground(n):
    return {(0,) * n: 1.0}


@pytest.mark.parametrize("n", range(1, 7))
def test_e_ladder_norms_match_factorial_formula(n):
    # ||(sum_j |e><g|)^m |G>||^2 = N! m! / (N-m)!
    state = ground(n)
    for m in range(1, n + 1):
        state = apply_sum_flip(state, 0, 1)
        expected = (math.factorial(n) * math.factorial(m)
                    / math.factorial(n - m))
        assert norm_sq(state) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_r_ladder_norms_from_enumeration(n):
    # ||(sum|e><g|)^(m-1) (sum|r><g|) |G>||^2 = N! (m-1)! / (N-m)!
    # (enumeration oracle; differs from the naive N*N!(m-1)!/(N-m+1)!)
    state = apply_sum_flip(ground(n), 0, 2)
    assert norm_sq(state) == pytest.approx(n, rel=1e-12)
    for m in range(2, n + 1):
        state = apply_sum_flip(state, 0, 1)
        expected = (math.factorial(n) * math.factorial(m - 1)
                    / math.factorial(n - m))
        assert norm_sq(state) == pytest.approx(expected, rel=1e-12)


def test_dicke_state_matches_operator_construction():
    n = 4
    basis = build_basis(n, BLOCKADE)
    state = apply_sum_flip(apply_sum_flip(ground(n), 0, 2), 0, 1)  # m_e=1,m_r=1
    scale = math.sqrt(norm_sq(state))
    vec = dicke_state(basis, 1, 1, Level.G)
    for config, amp in state.items():
        i = basis.index[(0, config)]
        assert vec[i] == pytest.approx(amp / scale, rel=1e-12)


# --- dicke_state basics -----------------------------------------------------

def test_ground_label_single_amplitude():
    basis = build_basis(3, BLOCKADE)
    vec = dicke_state(basis, 0, 0, Level.G)
    assert np.count_nonzero(vec) == 1
    assert vec[basis.index[(0, (0, 0, 0))]] == 1.0


def test_single_e_amplitudes():
    basis = build_basis(3, BLOCKADE)
    vec = dicke_state(basis, 1, 0, Level.G)
    nz = vec[vec != 0]
    assert len(nz) == 3
    assert np.allclose(nz, 1 / math.sqrt(3))


def test_one_e_one_r_amplitudes():
    basis = build_basis(3, BLOCKADE)
    vec = dicke_state(basis, 1, 1, Level.G)
    nz = vec[vec != 0]
    assert len(nz) == 6  # 3 choices of r atom x 2 of e atom
    assert np.allclose(nz, 1 / math.sqrt(6))


def test_dicke_rejects_impossible_labels():
    basis = build_basis(3, BLOCKADE)
    with pytest.raises(ValueError):
        dicke_state(basis, 3, 1, Level.G)
    with pytest.raises(ValueError):
        dicke_state(basis, 0, 2, Level.G)


def test_fifteen_labels_orthonormal():
    basis = build_basis(3, BLOCKADE)
    vecs = [dicke_state(basis, m_e, m_r, c) for c, m_e, m_r in fifteen_labels(3)]
    gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
    assert np.allclose(gram, np.eye(15), atol=1e-12)


def test_fifteen_labels_small_n():
    assert len(fifteen_labels(3)) == 15
    assert len(fifteen_labels(1)) == 9  # E2R0 and E1R1 impossible
    assert len(thin_labels(3)) == 10


# --- projections ------------------------------------------------------------

def test_project_pure_ground():
    basis = build_basis(3, BLOCKADE)
    psi = dicke_state(basis, 0, 0, Level.G)
    pops = project_collective(psi, basis)
    assert pops["gc_G"] == pytest.approx(1.0)
    assert pops["remainder"] == pytest.approx(0.0, abs=1e-12)
    assert sum(pops.values()) == pytest.approx(1.0, abs=1e-8)


def test_project_dicke_self():
    basis = build_basis(3, BLOCKADE)
    psi = dicke_state(basis, 1, 0, Level.G)
    pops = project_collective(psi, basis)
    assert pops["gc_E1R0"] == pytest.approx(1.0)


def test_project_density_matrix():
    basis = build_basis(2, BLOCKADE)
    psi = dicke_state(basis, 0, 1, Level.R)
    rho = np.outer(psi, psi.conj())
    pops = project_collective(rho, basis)
    assert pops["rc_E0R1"] == pytest.approx(1.0)


def test_project_nonsymmetric_goes_to_remainder():
    basis = build_basis(2, BLOCKADE)
    psi = np.zeros(basis.dim, dtype=complex)
    a = basis.index[(0, (1, 0))]
    b = basis.index[(0, (0, 1))]
    psi[a], psi[b] = 1 / math.sqrt(2), -1 / math.sqrt(2)  # antisymmetric
    pops = project_collective(psi, basis)
    assert pops["remainder"] == pytest.approx(1.0, abs=1e-12)


# --- reduced models ---------------------------------------------------------

def test_collective_couplings_match_analytic_chain():
    params = SimParams(T=0.0)
    basis = build_basis(3, BLOCKADE)
    got = collective_couplings(basis, params)
    assert np.allclose(got, got.conj().T, atol=1e-12)

    op, oc = params.Omega_p, params.Omega_c
    u0 = params.C6 / params.r0**6
    expected = np.zeros((5, 5))
    expected[1, 1] = expected[3, 3] = -params.Delta
    expected[4, 4] = params.resolved_delta() + u0  # zero under antiblockade
    chain = (math.sqrt(3) * op, oc, op, oc)
    for k, amp in enumerate(chain):
        expected[k, k + 1] = expected[k + 1, k] = amp
    assert np.allclose(got, expected, atol=1e-10)


def test_collective_couplings_full_basis_agrees():
    params = SimParams(T=0.0)
    got_constrained = collective_couplings(build_basis(3, BLOCKADE), params)
    got_full = collective_couplings(build_basis(3, FULL), params)
    assert np.allclose(got_constrained, got_full, atol=1e-12)


def test_reduced_three_state_shift():
    params = SimParams(N=1)
    h = reduced_ensemble_H(params, "three_state")
    assert h[2, 2] == 0.0

    params5 = SimParams(N=5)  # Omega_p = 2 Omega_c, Delta = 20 Gamma_e
    h5 = reduced_ensemble_H(params5, "three_state")
    expected = 16.0 * params5.Omega_c**2 / params5.Delta
    assert h5[2, 2] == pytest.approx(expected, rel=1e-12)
    assert h5[0, 1] == pytest.approx(math.sqrt(5) * params5.Omega_p, rel=1e-12)


def test_reduced_four_state_couplings():
    params = SimParams(N=3)
    h = reduced_ensemble_H(params, "four_state")
    assert h[2, 3] == pytest.approx(math.sqrt(2) * params.Omega_p, rel=1e-12)
    assert h[1, 1] == h[3, 3] == -params.Delta
    with pytest.raises(ValueError):
        reduced_ensemble_H(params, "five_state")


# --- closed-form analytics --------------------------------------------------

def test_superatom_values():
    assert superatom_fr(1, 1.0, 1.0) == pytest.approx(0.5, rel=1e-12)
    assert superatom_fr(3, 0.4, 1.0) == pytest.approx(0.48 / 1.48, rel=1e-12)
    assert superatom_fr(3, 1e9, 1.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        superatom_fr(3, 0.0, 0.0)


def test_superatom_monotonicity():
    for n in range(1, 6):
        assert superatom_fr(n + 1, 2.0, 1.0) > superatom_fr(n, 2.0, 1.0)
    ratios = np.linspace(0.1, 3.0, 12)
    values = [superatom_fr(3, r, 1.0) for r in ratios]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_dip_reference_point():
    est = dip_position(SimParams())
    assert isinstance(est, DipEstimate)
    assert est.r_dip == pytest.approx(5.13, abs=0.1)
    assert abs(est.r_dip_exact - est.r_dip) / est.r_dip < 0.02
    assert abs(est.residual(est.delta_dip)) < 1e-8


def test_dip_formula_collapse():
    params = SimParams(N=1, Omega_p=0.0)
    est = dip_position(params)
    expected = (params.C6 * params.Delta / params.Omega_c**2) ** (1.0 / 6.0)
    assert est.r_dip == pytest.approx(expected, rel=1e-12)


def test_thick_labels_are_the_chain():
    names = [label_name(*lab) for lab in THICK_LABELS]
    assert names == ["gc_G", "gc_E1R0", "gc_E0R1", "ec_E0R1", "rc_E0R1"]
