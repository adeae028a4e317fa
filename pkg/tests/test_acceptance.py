"""Acceptance criteria, one test each; every test prints a PASS/FAIL line."""

from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from qdialogue.adversary import AttackModel, detection_stats
from qdialogue.analysis import (
    AttackAnalysisParams,
    attack_eigenvalues,
    cabello_efficiency,
    eve_info,
    eve_info_point,
    leakage_audit,
    rho_for_detection,
    shannon_entropy,
)
from qdialogue.bellalg import SWAP_TABLE, BellClass, Collection, PauliCode
from qdialogue.protocol import SessionConfig, run_session
from qdialogue.qsim import Basis, prepare_bell, reduced_density
from qdialogue.verify import swap_outcome_distribution

from test_protocol import find_seed_with_initial, run_group


@pytest.fixture
def report(capsys, request):
    lines = []

    def emit(ok, detail=""):
        lines.append(f"[{'PASS' if ok else 'FAIL'}] {request.node.name}: {detail}")
        return ok

    yield emit
    with capsys.disabled():
        for line in lines:
            print("\n" + line, end="")


def test_criterion_1_swap_table_oracle(report):
    worst, stray = 0.0, 0.0
    for first, second in product(BellClass, BellClass):
        members = set(SWAP_TABLE[first, second].members)
        for outcome, p in swap_outcome_distribution(first, second).items():
            if outcome in members:
                worst = max(worst, abs(p - 0.25))
            else:
                stray = max(stray, p)
    ok = worst <= 1e-12 and stray <= 1e-12
    assert report(ok, f"max |p - 1/4| = {worst:.1e}, max stray mass = {stray:.1e}")


def test_criterion_2_round_trip(report):
    failures = 0
    for chi, ua, ub, conv in product(BellClass, PauliCode, PauliCode, ("odd", "even")):
        _, _, alice_read, bob_read = run_group(chi, ua, ub, convention=conv)
        failures += not (alice_read is ub and bob_read is ua)
    record, announced, alice_read, bob_read = run_group(BellClass.PSI_MINUS, PauliCode.SX, PauliCode.SZ)
    seed = find_seed_with_initial(BellClass.PSI_MINUS)
    t = run_session(SessionConfig(groups=1, seed=seed, alice_bits="01", bob_bits="11"))
    example_ok = (
        announced is Collection.C3
        and alice_read.bit_string() == "11"
        and bob_read.bit_string() == "01"
        and t.groups[0].announced is Collection.C3
        and t.decoded == {"at_alice": "11", "at_bob": "01"}
    )
    ok = failures == 0 and example_ok
    assert report(ok, f"128 cases, {failures} failures; worked example {'ok' if example_ok else 'wrong'}")


def test_criterion_3_eve_information(report):
    grid = [k / 100 for k in range(101)]
    route_err = max(abs(eve_info(d) - eve_info_point(d).info) for d in grid)
    ends = eve_info(0) == 1 and eve_info(1) == 1 and abs(eve_info(0.5) - 2) < 1e-12
    half = [eve_info(d) for d in grid[:51]]
    monotone = all(b > a for a, b in zip(half, half[1:]))
    symmetric = max(abs(eve_info(d) - eve_info(1 - d)) for d in grid) < 1e-12
    priors = [
        (0.25, 0.25, 0.25, 0.25),
        (0.4, 0.1, 0.2, 0.3),
        (0.7, 0.1, 0.1, 0.1),
        (0.5, 0.0, 0.5, 0.0),
        (0.1, 0.2, 0.3, 0.4),
    ]
    ds = [0.0, 0.05, 0.1, 0.2, 0.3, 0.45, 0.5, 0.6, 0.8, 1.0]
    diag_err = 0.0
    for p, d in product(priors, ds):
        params = AttackAnalysisParams(p, d)
        numeric = np.sort(np.linalg.eigvalsh(rho_for_detection(params).entries))
        diag_err = max(diag_err, np.max(np.abs(numeric - np.sort(attack_eigenvalues(params)))))
    npoints = len(priors) * len(ds)
    ok = route_err <= 1e-9 and ends and monotone and symmetric and diag_err <= 1e-9 and npoints >= 50
    assert report(
        ok,
        f"route err {route_err:.1e}, endpoints {ends}, monotone {monotone}, symmetric {symmetric}, "
        f"diagonalisation err {diag_err:.1e} over {npoints} points",
    )


def test_criterion_4_reduced_states(report):
    worst = 0.0
    for cls, qubit in product(BellClass, (0, 1)):
        rho = reduced_density(prepare_bell(cls), [qubit]).entries
        worst = max(worst, np.max(np.abs(rho - np.eye(2) / 2)))
    assert report(worst <= 1e-12, f"max deviation from I/2 = {worst:.1e}")


def test_criterion_5_detection(report):
    clean = run_session(SessionConfig(groups=2, seed=0, check_pairs=10_000, decoys=10_000))
    clean_ok = clean.status == "completed" and all(
        c.samples_tested >= 10_000 and c.mismatches == 0 for c in clean.checks
    )
    root = np.random.SeedSequence(2024)
    rngs = iter(np.random.default_rng(s) for s in root.spawn(5))
    mr = [
        detection_stats(AttackModel.parse("measure-resend"), 10_000, next(rngs), check=k).rate
        for k in (1, 2)
    ]
    mr_ok = all(abs(r - 0.25) <= 0.02 for r in mr)
    flips = {
        b2: detection_stats(
            AttackModel.parse(f"entangle:{b2}"), 10_000, next(rngs), check=2, decoy_basis=Basis.Z
        ).rate
        for b2 in (0.1, 0.3, 0.5)
    }
    ent_ok = all(abs(r - b2) <= 0.02 for b2, r in flips.items())
    ok = clean_ok and mr_ok and ent_ok
    assert report(
        ok,
        f"clean errors {[c.mismatches for c in clean.checks]} over {[c.samples_tested for c in clean.checks]}; "
        f"measure-resend {mr[0]:.4f}/{mr[1]:.4f}; entangle flips "
        + ", ".join(f"{b}->{r:.4f}" for b, r in flips.items()),
    )


def test_criterion_6_efficiency(report):
    ok = True
    for seed in range(10):
        t = run_session(SessionConfig(groups=1 + seed, seed=seed))
        ok &= all(
            (g["secret_bits"], g["qubits"], g["classical_bits"]) == (4, 4, 2) for g in t.tallies["per_group"]
        )
        ok &= cabello_efficiency(t).eta_exact == Fraction(2, 3)
    assert report(ok, "per group (4, 4, 2), eta = 2/3 exact over 10 transcripts")


def test_criterion_7_leakage_audit(report):
    uniform = shannon_entropy([Fraction(1, 16)] * 16)
    deterministic = shannon_entropy([1.0] + [0.0] * 15)
    audit = leakage_audit()
    d = audit.to_dict()
    ok = (
        abs(uniform - 4.0) < 1e-12
        and deterministic == 0.0
        and len(audit.joint) == 64
        and audit.total_probability == 1
        and audit.conditional_entropy <= audit.prior_entropy + 1e-12
        and audit.conditional_entropy_alice <= 2.0 + 1e-12
        and d["claimed_conditional_entropy_bits"] == 4.0
        and "conditional_entropy_bits" in d
    )
    assert report(
        ok,
        f"H(uA,uB) = {audit.prior_entropy:g}, H(uA,uB|C) = {audit.conditional_entropy:g} "
        f"(claimed {audit.claimed_conditional_entropy:g}), I = {audit.mutual_information:g}",
    )


def test_criterion_8_determinism(report, tmp_path):
    from qdialogue.cli import main

    argv = ["run", "--groups", "6", "--seed", "17", "--attack", "intercept", "--threshold", "1"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    codes = (main([*argv, "-o", str(a)]), main([*argv, "-o", str(b)]))
    ok = codes == (0, 0) and a.read_bytes() == b.read_bytes()
    assert report(ok, f"exit codes {codes}, {a.stat().st_size} bytes, identical {a.read_bytes() == b.read_bytes()}")
