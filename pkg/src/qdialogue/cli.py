"""Command-line front end.

Exit codes: 0 success, 1 usage or configuration error, 2 protocol abort
(eavesdropping detected), 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import analysis, bellalg
from .adversary import AttackKind, AttackModel, detection_stats
from .protocol import ATTACK_TARGETS, CONVENTIONS, SessionConfig, run_session
from .qsim import Basis
from .verify import verify_all

EXIT_OK, EXIT_USAGE, EXIT_ABORT, EXIT_VERIFY = 0, 1, 2, 3

DEFAULT_SWEEP = "none,measure-resend,intercept,entangle:0.1,entangle:0.3,entangle:0.5"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, output: str | None) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
        return
    path = Path(output)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc}") from None


def cmd_run(args) -> int:
    try:
        config = SessionConfig(
            groups=args.groups,
            seed=args.seed,
            attack=args.attack,
            check_pairs=args.check_pairs,
            decoys=args.decoys,
            threshold=args.threshold,
            convention=args.convention,
            attack_on=args.attack_on,
            alice_bits=args.alice_bits,
            bob_bits=args.bob_bits,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    transcript = run_session(config)
    _write(transcript.to_json(), args.output)
    if transcript.aborted:
        print(f"protocol aborted: {transcript.status}", file=sys.stderr)
        return EXIT_ABORT
    return EXIT_OK


def cmd_verify_table(args, table=None) -> int:
    report = verify_all(table)
    _write(report.render(), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_fig1(args) -> int:
    try:
        rows = analysis.emit_fig1(args.step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(analysis.fig1_csv(rows), args.output)
    return EXIT_OK


def cmd_audit(args) -> int:
    audit = analysis.leakage_audit()
    report = {
        "leakage_audit": audit.to_dict(),
        "efficiency_per_group": _efficiency_dict(
            analysis.cabello_efficiency(b_s=4, q_t=4, b_t=2)
        ),
    }
    _write(json.dumps(report, indent=2, ensure_ascii=False) + "\n", args.output)
    return EXIT_OK


def _efficiency_dict(rep: analysis.EfficiencyReport) -> dict:
    return {"b_s": rep.b_s, "q_t": rep.q_t, "b_t": rep.b_t, "eta": rep.eta, "eta_exact": str(rep.eta_exact)}


def sweep(attack_specs: Sequence[str], trials: int, seed: int) -> list[dict]:
    """Empirical detection rates for each attack on both checks."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    models = [AttackModel.parse(s) for s in attack_specs]
    root = np.random.SeedSequence(seed)
    rows = []
    for model, child in zip(models, root.spawn(len(models))):
        r1, r2, r3 = (np.random.default_rng(s) for s in child.spawn(3))
        one = detection_stats(model, trials, r1, check=1)
        two = detection_stats(model, trials, r2, check=2)
        row = {
            "attack": model.spec,
            "trials": trials,
            "check_one_rate": one.rate,
            "check_one_stderr": one.stderr,
            "check_two_rate": two.rate,
            "check_two_stderr": two.stderr,
        }
        if model.kind is AttackKind.ENTANGLE:
            flips = detection_stats(model, trials, r3, check=2, decoy_basis=Basis.Z)
            row.update(
                d=model.strength,
                z_decoy_flip_rate=flips.rate,
                z_decoy_flip_stderr=flips.stderr,
                eve_info_bits=analysis.eve_info(model.strength),
            )
        rows.append(row)
    return rows


def cmd_sweep(args) -> int:
    specs = [s for s in args.attacks.split(",") if s.strip()]
    try:
        rows = sweep(specs, args.trials, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(json.dumps({"seed": args.seed, "results": rows}, indent=2) + "\n", args.output)
    return EXIT_OK


def _bits(text: str) -> str:
    if any(ch not in "01" for ch in text):
        raise argparse.ArgumentTypeError(f"expected a bit string, got {text!r}")
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qdialogue", description="Quantum dialogue simulator and security analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one protocol session and write its transcript")
    run.add_argument("--groups", type=int, required=True, help="number of groups N (2 Bell pairs each)")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--attack", default="none", help="none | measure-resend | intercept | entangle:<beta2>")
    run.add_argument("--attack-on", choices=ATTACK_TARGETS, default="both")
    run.add_argument("--check-pairs", type=int, default=None, help="check Bell pairs (default 2N)")
    run.add_argument("--decoys", type=int, default=None, help="decoy qubits (default 2N)")
    run.add_argument("--threshold", type=float, default=0.0, help="abort when error rate exceeds this")
    run.add_argument("--convention", choices=CONVENTIONS, default="odd", help="which A particle Alice encodes")
    run.add_argument("--alice-bits", type=_bits, default=None)
    run.add_argument("--bob-bits", type=_bits, default=None)
    run.add_argument("--output", "-o", default=None, help="transcript path (default stdout)")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify-table", help="check the swap table and decoding against the amplitude oracle")
    ver.add_argument("--output", "-o", default=None)
    ver.set_defaults(func=cmd_verify_table)

    fig = sub.add_parser("fig1", help="emit the (d, I) curve as CSV")
    fig.add_argument("--step", type=float, default=0.01)
    fig.add_argument("--output", "-o", default=None)
    fig.set_defaults(func=cmd_fig1)

    aud = sub.add_parser("audit", help="exhaustive information-leakage audit")
    aud.add_argument("--output", "-o", default=None)
    aud.set_defaults(func=cmd_audit)

    sw = sub.add_parser("sweep", help="Monte Carlo detection rates per attack")
    sw.add_argument("--attacks", default=DEFAULT_SWEEP, help="comma-separated attack specs")
    sw.add_argument("--trials", type=int, default=10_000)
    sw.add_argument("--seed", type=int, default=0)
    sw.add_argument("--output", "-o", default=None)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qdialogue: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
