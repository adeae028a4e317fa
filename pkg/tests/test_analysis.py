import math
from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdialogue.adversary import entangling_unitary
from qdialogue.analysis import (
    AttackAnalysisParams,
    attack_eigenvalues,
    build_rho,
    cabello_efficiency,
    conditional_entropy,
    emit_fig1,
    eve_info,
    eve_info_point,
    fig1_csv,
    fig1_grid,
    info_sent_one,
    info_sent_zero,
    leakage_audit,
    rho_for_detection,
    shannon_entropy,
    von_neumann_info,
)
from qdialogue.bellalg import COLLECTION_MEMBERS, BellClass, Collection, PauliCode
from qdialogue.protocol import SessionConfig, run_session
from qdialogue.qsim import PAULI_MATRICES, bell_vector

# |0,e00>, |1,e01>, |1,e00>, |0,e01> in (data, ancilla) computational order
ANALYSIS_ORDER = [0, 3, 2, 1]

I_QUARTER = 1.81127812445913286  # 1 + h(1/4), high-precision reference


def simulated_rho(priors, d, sent=0):
    """Mixture over Alice's Pauli after the entangling attack on |sent>."""
    psi = entangling_unitary(d) @ np.kron(np.eye(2)[sent], [1, 0])
    rho = np.zeros((4, 4), dtype=complex)
    for p, op in zip(priors, PauliCode):
        v = np.kron(PAULI_MATRICES[op], np.eye(2)) @ psi
        rho += p * np.outer(v, v.conj())
    return rho[np.ix_(ANALYSIS_ORDER, ANALYSIS_ORDER)]


def h2(x):
    return shannon_entropy([x, 1 - x])


PRIOR_GRID = [
    (0.25, 0.25, 0.25, 0.25),
    (0.4, 0.1, 0.2, 0.3),
    (0.7, 0.1, 0.1, 0.1),
    (0.5, 0.0, 0.5, 0.0),
    (1.0, 0.0, 0.0, 0.0),
    (0.1, 0.2, 0.3, 0.4),
]
D_GRID = [0.0, 0.05, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.8, 1.0]


@pytest.mark.parametrize("priors", PRIOR_GRID)
@pytest.mark.parametrize("d", [0.0, 0.1, 0.3, 0.5, 0.9])
def test_build_rho_matches_simulation(priors, d):
    rho = rho_for_detection(AttackAnalysisParams(priors, d)).entries
    assert np.allclose(rho, simulated_rho(priors, d), atol=1e-12, rtol=0)


def test_build_rho_rejects_unnormalised():
    with pytest.raises(ValueError):
        build_rho(AttackAnalysisParams(), 1.0, 0.5)
    with pytest.raises(ValueError):
        AttackAnalysisParams((0.5, 0.5, 0.5, 0.0), 0.1)
    with pytest.raises(ValueError):
        AttackAnalysisParams(d=1.2)


def test_spectrum_matches_diagonalisation_on_grid():
    points = 0
    for priors, d in product(PRIOR_GRID, D_GRID):
        params = AttackAnalysisParams(priors, d)
        numeric = np.sort(np.linalg.eigvalsh(rho_for_detection(params).entries))
        closed = np.sort(attack_eigenvalues(params))
        assert np.allclose(numeric, closed, atol=1e-9, rtol=0)
        points += 1
    assert points >= 50


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0, 1), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3),
    st.floats(0, 1),
)
def test_spectrum_property(weights, d):
    priors = tuple(w / sum(weights) for w in weights)
    priors = (*priors[:3], 1 - sum(priors[:3]))
    if priors[3] < 0:
        return
    params = AttackAnalysisParams(priors, d)
    lam = attack_eigenvalues(params)
    assert sum(lam) == pytest.approx(1, abs=1e-12)
    assert min(lam) > -1e-12
    numeric = np.sort(np.linalg.eigvalsh(rho_for_detection(params).entries))
    assert np.allclose(numeric, np.sort(lam), atol=1e-9, rtol=0)


def test_uniform_prior_spectrum():
    # any d: {(1-d)/2, d/2} twice, as a multiset
    for d in D_GRID:
        lam = sorted(attack_eigenvalues(AttackAnalysisParams(d=d)))
        assert np.allclose(lam, sorted([(1 - d) / 2, d / 2] * 2), atol=1e-12)


def test_zero_strength_spectrum():
    p = (0.4, 0.1, 0.2, 0.3)
    lam = attack_eigenvalues(AttackAnalysisParams(p, 0.0))
    assert np.allclose(lam, (p[0] + p[3], 0, p[1] + p[2], 0), atol=1e-12)


def test_eve_info_reference_values():
    assert eve_info(0.0) == 1.0
    assert eve_info(1.0) == 1.0
    assert eve_info(0.5) == pytest.approx(2.0, abs=1e-15)
    assert eve_info(0.25) == pytest.approx(I_QUARTER, abs=1e-12)
    assert eve_info(0.1) == pytest.approx(1.468995593589281, abs=1e-12)
    assert eve_info(0.3) == pytest.approx(1.881290899230693, abs=1e-12)
    with pytest.raises(ValueError):
        eve_info(-0.01)


def test_closed_form_equals_entropy_route():
    for k in range(101):
        d = k / 100
        assert eve_info(d) == pytest.approx(1 + h2(d), abs=1e-12)
        assert eve_info(d) == pytest.approx(eve_info_point(d).info, abs=1e-9)


def test_sent_one_route_by_simulation():
    for d in D_GRID:
        rho = simulated_rho((0.25,) * 4, d, sent=1)
        lam = np.linalg.eigvalsh(rho)
        assert info_sent_one(d) == pytest.approx(von_neumann_info(np.clip(lam, 0, None)), abs=1e-9)
        rho0 = simulated_rho((0.25,) * 4, d, sent=0)
        assert info_sent_zero(d) == pytest.approx(von_neumann_info(np.clip(np.linalg.eigvalsh(rho0), 0, None)), abs=1e-9)


def test_curve_shape():
    xs = [k / 100 for k in range(51)]
    ys = [eve_info(x) for x in xs]
    assert all(b > a for a, b in zip(ys, ys[1:]))
    for x in xs:
        assert eve_info(x) == pytest.approx(eve_info(1 - x), abs=1e-12)


def test_fig1_rows_and_csv():
    rows = emit_fig1(0.01)
    assert len(rows) == 101
    assert rows[0] == (0.0, 1.0) and rows[-1] == (1.0, 1.0)
    text = fig1_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "d,I"
    assert "0.5,2" in lines
    assert lines[1] == "0,1"
    assert fig1_csv(emit_fig1(0.25)).splitlines()[2] == "0.25,1.811278124459133"
    assert fig1_grid(0.3)[-1] == 1.0
    with pytest.raises(ValueError):
        fig1_grid(0)


def test_entropy_axioms():
    assert shannon_entropy([1 / 16] * 16) == pytest.approx(4.0, abs=1e-15)
    assert shannon_entropy([1.0]) == 0.0
    assert shannon_entropy([1, 0, 0]) == 0.0
    assert shannon_entropy([Fraction(1, 2)] * 2) == 1.0
    assert von_neumann_info([0.5, 0.5, 0, 0]) == 1.0
    with pytest.raises(ValueError):
        von_neumann_info([0.6, 0.6])


def test_conditional_entropy_hand_cases():
    indep = {(x, y): Fraction(1, 4) for x, y in product((0, 1), repeat=2)}
    assert conditional_entropy(indep, lambda k: k[0], lambda k: k[1]) == pytest.approx(1.0)
    copy = {(x, x): Fraction(1, 2) for x in (0, 1)}
    assert conditional_entropy(copy, lambda k: k[0], lambda k: k[1]) == pytest.approx(0.0)


# --- leakage audit ---------------------------------------------------------

def _bell_pair_matrix(cls):
    return bell_vector(cls).reshape(2, 2)


def collection_by_amplitudes(first, second):
    """Collection from explicit projection of A1 B1 A2 B2 onto Bell pairs (A1 A2), (B1 B2)."""
    psi = np.einsum("ab,cd->abcd", _bell_pair_matrix(first), _bell_pair_matrix(second))
    support = set()
    for ma, mb in product(BellClass, BellClass):
        amp = np.einsum("ac,bd,abcd->", _bell_pair_matrix(ma).conj(), _bell_pair_matrix(mb).conj(), psi)
        if abs(amp) ** 2 > 1e-9:
            support.add((ma, mb))
    (coll,) = [c for c, members in COLLECTION_MEMBERS.items() if set(members) == support]
    return coll


def class_after(cls, op):
    v = np.kron(PAULI_MATRICES[op], np.eye(2)) @ bell_vector(cls)
    (out,) = [c for c in BellClass if abs(abs(np.vdot(bell_vector(c), v)) - 1) < 1e-9]
    return out


def test_audit_joint_matches_amplitude_route():
    audit = leakage_audit()
    assert len(audit.joint) == 64
    for (chi, ua, ub, c), p in audit.joint.items():
        assert p == Fraction(1, 64)
        assert collection_by_amplitudes(class_after(chi, ua), class_after(chi, ub)) is c
    assert audit.total_probability == 1


def test_audit_entropies():
    audit = leakage_audit()
    assert audit.prior_entropy == pytest.approx(4.0, abs=1e-12)
    assert audit.conditional_entropy == pytest.approx(2.0, abs=1e-12)
    assert audit.mutual_information == pytest.approx(2.0, abs=1e-12)
    assert audit.conditional_entropy_alice == pytest.approx(2.0, abs=1e-12)
    assert audit.conditional_entropy_bob == pytest.approx(2.0, abs=1e-12)
    assert audit.conditional_entropy <= audit.prior_entropy + 1e-12
    assert audit.claimed_conditional_entropy == 4.0
    assert set(audit.consistent_pairs_per_collection.values()) == {4}
    d = audit.to_dict()
    assert d["total_probability"] == "1" and d["cases"] == 64
    assert d["claimed_conditional_entropy_bits"] == 4.0


# --- efficiency -------------------------------------------------------------

def test_efficiency_counts():
    rep = cabello_efficiency(b_s=4, q_t=4, b_t=2)
    assert rep.eta_exact == Fraction(2, 3)
    assert rep.eta == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        cabello_efficiency(b_s=1, q_t=0, b_t=0)
    with pytest.raises(ValueError):
        cabello_efficiency(b_s=1)


def test_efficiency_from_transcript():
    for n in (1, 3, 8):
        t = run_session(SessionConfig(groups=n, seed=n))
        rep = cabello_efficiency(t)
        assert (rep.b_s, rep.q_t, rep.b_t) == (4 * n, 4 * n, 2 * n)
        assert rep.eta_exact == Fraction(2, 3)
        assert not math.isnan(rep.eta)


def test_no_attack_no_encoding_is_pure():
    rho = build_rho(AttackAnalysisParams((1, 0, 0, 0), 0.0), 1.0, 0.0).entries
    assert np.allclose(rho, np.diag([1, 0, 0, 0]), atol=1e-15)


def test_half_strength_spectrum_is_flat():
    assert np.allclose(attack_eigenvalues(AttackAnalysisParams(d=0.5)), [0.25] * 4, atol=1e-12)
