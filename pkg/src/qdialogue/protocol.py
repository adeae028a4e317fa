"""Alice/Bob execution of the three-step quantum dialogue.

A :class:`Session` walks through preparation, the first security check,
Alice's encoding, the second security check and the per-group dialogue,
refusing to run a step out of order. :func:`run_session` drives a session
end to end and returns its :class:`SessionTranscript`.

Qubit naming: ``A<k>``/``B<k>`` are the halves of message pair ``k``
(1-based), ``sA<k>``/``sB<k>`` the halves of check pair ``k``, ``d<k>``
the decoys, and a trailing ``'`` marks Bob's re-prepared pair.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .adversary import DECOY_LABELS, AttackKind, AttackModel, transmit
from .bellalg import (
    BellClass,
    Collection,
    PauliCode,
    bits_to_codes,
    classify_outcome,
    codes_to_bits,
    decode_partner,
)
from .qsim import KET_LABELS, Basis, QuantumMemory, ket, outcome_parity, prepare_bell

CONVENTIONS = ("odd", "even")
ATTACK_TARGETS = ("both", "first", "second")
STREAMS = ("preparation", "insertion", "measurement", "attack", "secrets")

# per-group accounting: secret bits, message qubits, announcement bits
BITS_PER_GROUP = 4
QUBITS_PER_GROUP = 4
ANNOUNCE_BITS_PER_GROUP = 2


class ProtocolOrderError(RuntimeError):
    """A protocol step was invoked before the step it depends on."""


def make_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent generators per purpose, so enabling an attack leaves preparation untouched."""
    return {
        name: np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        for i, name in enumerate(STREAMS)
    }


@dataclass
class SessionConfig:
    groups: int
    seed: int = 0
    attack: str = "none"
    check_pairs: int | None = None
    decoys: int | None = None
    threshold: float = 0.0
    convention: str = "odd"
    attack_on: str = "both"
    alice_bits: str | None = None
    bob_bits: str | None = None

    def __post_init__(self):
        if not isinstance(self.groups, int) or self.groups < 1:
            raise ValueError(f"groups must be a positive integer, got {self.groups!r}")
        if self.check_pairs is None:
            self.check_pairs = 2 * self.groups
        if self.decoys is None:
            self.decoys = 2 * self.groups
        if self.check_pairs < 0 or self.decoys < 0:
            raise ValueError("check_pairs and decoys must be non-negative")
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError(f"threshold must lie in [0, 1], got {self.threshold!r}")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        if self.attack_on not in ATTACK_TARGETS:
            raise ValueError(f"attack_on must be one of {ATTACK_TARGETS}, got {self.attack_on!r}")
        AttackModel.parse(self.attack)
        for who in ("alice_bits", "bob_bits"):
            bits = getattr(self, who)
            if bits is not None and len(bits_to_codes(bits)) != self.groups:
                raise ValueError(f"{who} must hold {2 * self.groups} bits, got {len(bits)}")


@dataclass
class GroupRecord:
    index: int
    initial_class: BellClass
    alice_op: PauliCode | None = None
    bob_op: PauliCode | None = None
    encode_position: str | None = None
    bob_initial: BellClass | None = None
    m_a: BellClass | None = None
    m_b: BellClass | None = None
    announced: Collection | None = None
    alice_decoded: PauliCode | None = None
    bob_decoded: PauliCode | None = None

    @property
    def pair_names(self) -> tuple[tuple[str, str], tuple[str, str]]:
        k = 2 * self.index - 1
        return (f"A{k}", f"B{k}"), (f"A{k + 1}", f"B{k + 1}")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key, value in asdict(self).items():
            if isinstance(value, (BellClass, Collection)):
                value = str(value)
            elif isinstance(value, PauliCode):
                value = {"op": value.symbol, "bits": value.bit_string()}
            out[key] = value
        return out


@dataclass
class CheckReport:
    check_id: int
    samples_tested: int
    mismatches: int
    threshold: float

    @property
    def error_rate(self) -> float:
        # no samples means nothing was observed to go wrong
        return self.mismatches / self.samples_tested if self.samples_tested else 0.0

    @property
    def verdict(self) -> str:
        return "abort" if self.error_rate > self.threshold else "continue"

    def to_dict(self) -> dict[str, Any]:
        return {
            "check_id": self.check_id,
            "samples_tested": self.samples_tested,
            "mismatches": self.mismatches,
            "error_rate": self.error_rate,
            "threshold": self.threshold,
            "verdict": self.verdict,
        }


@dataclass
class SessionTranscript:
    config: dict[str, Any]
    groups: list[GroupRecord]
    checks: list[CheckReport]
    classical_log: list[dict[str, Any]]
    eve_log: list[dict[str, Any]]
    status: str
    decoded: dict[str, str] | None
    tallies: dict[str, Any] = field(default_factory=dict)

    @property
    def aborted(self) -> bool:
        return self.status != "completed"

    def to_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "status": self.status,
            "groups": [g.to_dict() for g in self.groups],
            "checks": [c.to_dict() for c in self.checks],
            "classical_log": self.classical_log,
            "decoded": self.decoded,
            "tallies": self.tallies,
            "eve_log": self.eve_log,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


def prepare_blocks(
    n_groups: int, memory: QuantumMemory, rng: np.random.Generator
) -> tuple[list[str], list[str], list[GroupRecord]]:
    """Prepare 2N message pairs, both pairs of a group in one random class."""
    if n_groups < 1:
        raise ValueError("need at least one group")
    s_a, s_b, records = [], [], []
    for n in range(1, n_groups + 1):
        chi = BellClass.from_index(int(rng.integers(4)))
        record = GroupRecord(n, chi)
        for a, b in record.pair_names:
            memory.add(prepare_bell(chi), [a, b])
            s_a.append(a)
            s_b.append(b)
        records.append(record)
    return s_a, s_b, records


def _random_positions(length: int, count: int, rng: np.random.Generator) -> list[int]:
    return sorted(int(p) for p in rng.choice(length + count, size=count, replace=False))


def _insert(sequence: list[str], positions: list[int], items: list[str]) -> list[str]:
    out = list(sequence)
    for pos, item in zip(positions, items):
        out.insert(pos, item)
    return out


def remove_positions(sequence: list[str], positions: list[int]) -> list[str]:
    drop = set(positions)
    return [q for i, q in enumerate(sequence) if i not in drop]


def insert_check_pairs(
    s_a: list[str],
    s_b: list[str],
    count: int,
    memory: QuantumMemory,
    rng: np.random.Generator,
) -> tuple[list[str], list[str], list[int], list[BellClass]]:
    """Mix ``count`` random check pairs into both sequences at the same positions."""
    if count < 0:
        raise ValueError("count must be non-negative")
    positions = _random_positions(len(s_a), count, rng)
    classes = [BellClass.from_index(int(rng.integers(4))) for _ in range(count)]
    for k, cls in enumerate(classes, 1):
        memory.add(prepare_bell(cls), [f"sA{k}", f"sB{k}"])
    s_a2 = _insert(s_a, positions, [f"sA{k}" for k in range(1, count + 1)])
    s_b2 = _insert(s_b, positions, [f"sB{k}" for k in range(1, count + 1)])
    return s_a2, s_b2, positions, classes


def insert_decoys(
    s_a: list[str], count: int, memory: QuantumMemory, rng: np.random.Generator
) -> tuple[list[str], list[int], list[str]]:
    """Mix ``count`` single qubits drawn from |0>, |1>, |+>, |-> into the sequence."""
    if count < 0:
        raise ValueError("count must be non-negative")
    positions = _random_positions(len(s_a), count, rng)
    states = [DECOY_LABELS[int(rng.integers(4))] for _ in range(count)]
    for k, label in enumerate(states, 1):
        memory.add(ket(label), [f"d{k}"])
    return _insert(s_a, positions, [f"d{k}" for k in range(1, count + 1)]), positions, states


def alice_encode(
    memory: QuantumMemory, groups: list[GroupRecord], codes: list[PauliCode], convention: str = "odd"
) -> None:
    """Apply Alice's operation to A(2n-1) ("odd") or A(2n) ("even") of every group."""
    if len(codes) != len(groups):
        raise ValueError(f"secret must hold {2 * len(groups)} bits, got {2 * len(codes)}")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    for record, code in zip(groups, codes):
        first, second = record.pair_names
        target = first[0] if convention == "odd" else second[0]
        memory.apply(code, target)
        record.alice_op = code
        record.encode_position = convention


def bob_dialogue_group(
    memory: QuantumMemory, record: GroupRecord, bob_op: PauliCode, rng: np.random.Generator
) -> tuple[Collection, PauliCode]:
    """Bob's side of one group: learn the initial class, encode, swap, announce, decode.

    The unencoded pair (the shared secret Bell state) is Bell-measured and
    replaced by a fresh pair in the measured class; Bob encodes on the B
    particle of the fresh pair, then Bell-measures the two A particles and
    the two B particles.
    """
    if record.announced is not None:
        raise ProtocolOrderError(f"group {record.index} already consumed")
    if record.encode_position is None:
        raise ProtocolOrderError(f"group {record.index} was not encoded by Alice")
    first, second = record.pair_names
    odd = record.encode_position == "odd"
    shared = second if odd else first
    chi = memory.measure_bell(shared[0], shared[1], rng)
    fresh = (shared[0] + "'", shared[1] + "'")
    memory.add(prepare_bell(chi), fresh)
    memory.apply(bob_op, fresh[1])
    if odd:
        a_pair, b_pair = (first[0], fresh[0]), (first[1], fresh[1])
    else:
        a_pair, b_pair = (fresh[0], second[0]), (fresh[1], second[1])
    m_a = memory.measure_bell(*a_pair, rng)
    m_b = memory.measure_bell(*b_pair, rng)
    announced = classify_outcome(m_a, m_b)
    # Bob's pair is the second of the group under the odd convention
    decoded = decode_partner(announced, chi, bob_op, own_first=not odd)
    record.bob_op = bob_op
    record.bob_initial = chi
    record.m_a, record.m_b = m_a, m_b
    record.announced = announced
    record.bob_decoded = decoded
    return announced, decoded


def alice_decode(announced: Collection, record: GroupRecord) -> PauliCode:
    """Alice reads Bob's operation from the announcement, her initial class and her own operation."""
    own_first = record.encode_position == "odd"
    decoded = decode_partner(announced, record.initial_class, record.alice_op, own_first=own_first)
    record.alice_decoded = decoded
    return decoded


class Session:
    """Single protocol run between Alice and Bob over an attackable channel.

    Methods must be called in protocol order; each raises
    :class:`ProtocolOrderError` otherwise.
    """

    _ORDER = (
        "new",
        "prepared",
        "first_sent",
        "first_checked",
        "encoded",
        "second_sent",
        "second_checked",
        "completed",
    )

    def __init__(self, config: SessionConfig):
        self.config = config
        self.attack = AttackModel.parse(config.attack)
        self.rng = make_streams(config.seed)
        self.memory = QuantumMemory()
        self.phase = "new"
        self.groups: list[GroupRecord] = []
        self.checks: list[CheckReport] = []
        self.classical_log: list[dict[str, Any]] = []
        self.s_a: list[str] = []
        self.s_b: list[str] = []
        self._samples: tuple[list[int], list[BellClass]] = ([], [])
        self._decoys: tuple[list[int], list[str]] = ([], [])
        self._alice_codes: list[PauliCode] = []
        self._bob_codes: list[PauliCode] = []

    def _require(self, phase: str) -> None:
        if self.phase == "aborted":
            raise ProtocolOrderError("session was aborted")
        if self.phase != phase:
            raise ProtocolOrderError(f"step needs phase {phase!r}, session is at {self.phase!r}")

    def publish(self, sender: str, kind: str, payload: Any) -> None:
        """Send on the public authenticated classical channel; Eve reads everything."""
        message = {
            "seq": len(self.classical_log),
            "phase": self.phase,
            "sender": sender,
            "kind": kind,
            "payload": payload,
        }
        self.classical_log.append(message)
        self.attack.wiretap(message)

    def _attacks(self, transmission: str) -> AttackModel:
        target = self.config.attack_on
        if target == "both" or target == transmission:
            return self.attack
        # untouched transmission, but Eve's log stays shared
        return AttackModel(AttackKind.NONE, eve_log=self.attack.eve_log)

    def _secrets(self) -> None:
        cfg, rng = self.config, self.rng["secrets"]
        draw = lambda: "".join(str(int(b)) for b in rng.integers(2, size=2 * cfg.groups))
        self.alice_bits = cfg.alice_bits if cfg.alice_bits is not None else draw()
        self.bob_bits = cfg.bob_bits if cfg.bob_bits is not None else draw()
        self._alice_codes = bits_to_codes(self.alice_bits)
        self._bob_codes = bits_to_codes(self.bob_bits)

    def prepare(self) -> None:
        self._require("new")
        self._secrets()
        s_a, s_b, self.groups = prepare_blocks(self.config.groups, self.memory, self.rng["preparation"])
        self.s_a, self.s_b, positions, classes = insert_check_pairs(
            s_a, s_b, self.config.check_pairs, self.memory, self.rng["insertion"]
        )
        self._samples = (positions, classes)
        self.phase = "prepared"

    def send_first(self) -> None:
        self._require("prepared")
        self.s_b = transmit(self.s_b, "S'_B", self._attacks("first"), self.memory, self.rng["attack"])
        self.publish("bob", "received", "S'_B")
        self.phase = "first_sent"

    def check_one(self) -> CheckReport:
        """Bell-correlation test on the check pairs of S'_B."""
        self._require("first_sent")
        positions, classes = self._samples
        rng = self.rng["measurement"]
        self.publish("alice", "sample_positions", positions)
        bob_reports, mismatches = [], 0
        for pos, cls in zip(positions, classes):
            basis = Basis.Z if rng.random() < 0.5 else Basis.X
            b_bit = self.memory.measure(self.s_b[pos], basis, rng)
            a_bit = self.memory.measure(self.s_a[pos], basis, rng)
            bob_reports.append([pos, basis.value, b_bit])
            mismatches += (a_bit ^ b_bit) != outcome_parity(cls, basis)
        self.publish("bob", "check_one_outcomes", bob_reports)
        report = CheckReport(1, len(positions), int(mismatches), self.config.threshold)
        self.checks.append(report)
        self.publish("alice", "check_one_verdict", report.verdict)
        self.s_a = remove_positions(self.s_a, positions)
        self.s_b = remove_positions(self.s_b, positions)
        self.phase = "first_checked" if report.verdict == "continue" else "aborted"
        return report

    def encode(self) -> None:
        self._require("first_checked")
        alice_encode(self.memory, self.groups, self._alice_codes, self.config.convention)
        self.phase = "encoded"

    def send_second(self) -> None:
        self._require("encoded")
        self.s_a, positions, states = insert_decoys(
            self.s_a, self.config.decoys, self.memory, self.rng["insertion"]
        )
        self._decoys = (positions, states)
        self.s_a = transmit(self.s_a, "S''_A", self._attacks("second"), self.memory, self.rng["attack"])
        self.publish("bob", "received", "S''_A")
        self.phase = "second_sent"

    def check_two(self) -> CheckReport:
        """Decoy test on S''_A: Bob measures each decoy in its preparation basis."""
        self._require("second_sent")
        positions, states = self._decoys
        rng = self.rng["measurement"]
        self.publish(
            "alice",
            "decoy_positions_bases",
            [[p, KET_LABELS[s][0].value] for p, s in zip(positions, states)],
        )
        outcomes, mismatches = [], 0
        for pos, label in zip(positions, states):
            basis, bit = KET_LABELS[label]
            got = self.memory.measure(self.s_a[pos], basis, rng)
            outcomes.append(got)
            mismatches += got != bit
        self.publish("bob", "decoy_outcomes", outcomes)
        report = CheckReport(2, len(positions), int(mismatches), self.config.threshold)
        self.checks.append(report)
        self.publish("alice", "check_two_verdict", report.verdict)
        self.s_a = remove_positions(self.s_a, positions)
        self.phase = "second_checked" if report.verdict == "continue" else "aborted"
        return report

    def dialogue(self) -> dict[str, str]:
        self._require("second_checked")
        rng = self.rng["measurement"]
        for record, code in zip(self.groups, self._bob_codes):
            announced, _ = bob_dialogue_group(self.memory, record, code, rng)
            self.publish("bob", "collection", {"group": record.index, "collection": str(announced)})
            alice_decode(announced, record)
        self.phase = "completed"
        # at_alice is Bob's secret as Alice reads it, and vice versa
        return {
            "at_alice": codes_to_bits([g.alice_decoded for g in self.groups]),
            "at_bob": codes_to_bits([g.bob_decoded for g in self.groups]),
        }

    def run(self) -> SessionTranscript:
        self.prepare()
        self.send_first()
        decoded = None
        if self.check_one().verdict == "continue":
            self.encode()
            self.send_second()
            if self.check_two().verdict == "continue":
                decoded = self.dialogue()
        return self.transcript(decoded)

    def transcript(self, decoded: dict[str, str] | None = None) -> SessionTranscript:
        cfg = self.config
        config = {
            "groups": cfg.groups,
            "seed": cfg.seed,
            "attack": self.attack.spec,
            "attack_on": cfg.attack_on,
            "check_pairs": cfg.check_pairs,
            "decoys": cfg.decoys,
            "threshold": cfg.threshold,
            "convention": cfg.convention,
            "alice_bits": getattr(self, "alice_bits", cfg.alice_bits),
            "bob_bits": getattr(self, "bob_bits", cfg.bob_bits),
        }
        if self.phase == "completed":
            status = "completed"
        elif self.phase == "aborted":
            status = f"aborted_check_{len(self.checks)}"
        else:
            status = f"incomplete_{self.phase}"
        done = [g for g in self.groups if g.announced is not None]
        tallies = {
            "per_group": [
                {
                    "group": g.index,
                    "secret_bits": BITS_PER_GROUP,
                    "qubits": QUBITS_PER_GROUP,
                    "classical_bits": ANNOUNCE_BITS_PER_GROUP,
                }
                for g in done
            ],
            "secret_bits": BITS_PER_GROUP * len(done),
            "message_qubits": QUBITS_PER_GROUP * len(done),
            "announcement_bits": ANNOUNCE_BITS_PER_GROUP * len(done),
            "check_qubits": 2 * cfg.check_pairs,
            "decoy_qubits": len(self._decoys[0]),
            "classical_messages": len(self.classical_log),
        }
        return SessionTranscript(
            config=config,
            groups=list(self.groups),
            checks=list(self.checks),
            classical_log=list(self.classical_log),
            eve_log=list(self.attack.eve_log),
            status=status,
            decoded=decoded,
            tallies=tallies,
        )


def run_session(config: SessionConfig) -> SessionTranscript:
    """Execute all three steps; an abort is reported in the transcript, not raised."""
    return Session(config).run()
