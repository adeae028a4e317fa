"""Eavesdropper models for the two quantum transmissions.

Each attack is written twice: as a pure function on a ``StateVector``
(the qubit under attack keeps its index; any qubit Eve holds on to is
appended at the end) and, through :func:`transmit`, as an action on a
whole sequence of named qubits living in a :class:`QuantumMemory`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .bellalg import BellClass
from .qsim import (
    Basis,
    KET_LABELS,
    QuantumMemory,
    StateVector,
    apply_matrix,
    compose,
    ket,
    measure_single,
    outcome_parity,
    prepare_bell,
)

DECOY_LABELS = ("0", "1", "+", "-")


class AttackKind(Enum):
    NONE = "none"
    MEASURE_RESEND = "measure-resend"
    INTERCEPT = "intercept"
    ENTANGLE = "entangle"


@dataclass
class AttackModel:
    """Eve's strategy plus everything she has seen.

    ``strength`` is the flip probability ``|beta|^2`` of the entangle-measure
    attack and must be ``None`` for every other kind.
    """

    kind: AttackKind = AttackKind.NONE
    strength: float | None = None
    eve_log: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        self.kind = AttackKind(self.kind)
        if self.kind is AttackKind.ENTANGLE:
            if self.strength is None or not 0.0 <= self.strength <= 1.0:
                raise ValueError(f"entangle strength must lie in [0, 1], got {self.strength!r}")
            self.strength = float(self.strength)
        elif self.strength is not None:
            raise ValueError(f"{self.kind.value} attack takes no strength")

    @classmethod
    def parse(cls, spec: str) -> "AttackModel":
        """Parse ``none | measure-resend | intercept | entangle:<beta2>``."""
        spec = spec.strip()
        if spec.startswith("entangle:"):
            raw = spec.split(":", 1)[1]
            try:
                strength = float(raw)
            except ValueError:
                raise ValueError(f"bad entangle strength {raw!r}") from None
            if not math.isfinite(strength):
                raise ValueError(f"bad entangle strength {raw!r}")
            return cls(AttackKind.ENTANGLE, strength)
        try:
            kind = AttackKind(spec)
        except ValueError:
            raise ValueError(
                f"unknown attack {spec!r}; expected none, measure-resend, intercept or entangle:<beta2>"
            ) from None
        if kind is AttackKind.ENTANGLE:
            raise ValueError("entangle attack needs a strength, e.g. entangle:0.3")
        return cls(kind)

    @property
    def spec(self) -> str:
        if self.kind is AttackKind.ENTANGLE:
            return f"entangle:{self.strength!r}"
        return self.kind.value

    def wiretap(self, message: dict[str, Any]) -> None:
        self.eve_log.append({"type": "classical", "message": message})


def entangling_unitary(strength: float) -> np.ndarray:
    """Attack unitary on (data, ancilla), basis index ``2 * data + ancilla``.

    ``|d>|0> -> alpha |d>|0> + beta |1-d>|1>`` with ``alpha = sqrt(1 - strength)``
    and ``beta = sqrt(strength)``; the ancilla states ``|0>`` and ``|1>`` are
    the orthogonal probe states paired with "no flip" and "flip". The
    ancilla-``|1>`` columns complete it to a rotation that is the identity
    at strength 0.
    """
    if not 0.0 <= strength <= 1.0:
        raise ValueError(f"strength must lie in [0, 1], got {strength!r}")
    alpha, beta = math.sqrt(1.0 - strength), math.sqrt(strength)
    u = np.zeros((4, 4), dtype=complex)
    for d in (0, 1):
        flipped = 1 - d
        u[2 * d, 2 * d] = alpha
        u[2 * flipped + 1, 2 * d] = beta
        u[2 * d + 1, 2 * d + 1] = alpha
        u[2 * flipped, 2 * d + 1] = -beta
    return u


def attack_measure_resend(
    state: StateVector, index: int, rng: np.random.Generator
) -> tuple[StateVector, dict[str, Any]]:
    """Measure the qubit in a random Z/X basis and resend the observed eigenstate."""
    basis = Basis.Z if rng.random() < 0.5 else Basis.X
    bit, rest = measure_single(state, index, basis, rng)
    fresh = ket(_label_of(basis, bit))
    if rest is None:
        out = fresh
    else:
        out = _insert_qubit(rest, index, fresh)
    return out, {"attack": "measure-resend", "basis": basis.value, "outcome": bit}


def attack_intercept_substitute(
    state: StateVector, index: int, rng: np.random.Generator
) -> tuple[StateVector, dict[str, Any]]:
    """Keep the transmitted qubit and forward a random decoy-type substitute.

    The returned state has the substitute at ``index`` and Eve's stored
    qubit appended as the last qubit.
    """
    label = DECOY_LABELS[int(rng.integers(4))]
    with_sub = compose([state, ket(label)])
    n = with_sub.num_qubits
    # swap the stored qubit to the end and the substitute into its slot
    perm = list(range(n))
    perm[index], perm[n - 1] = perm[n - 1], perm[index]
    psi = np.transpose(with_sub.tensor(), perm).reshape(-1)
    return StateVector(psi), {"attack": "intercept", "substitute": label}


def attack_entangle_measure(state: StateVector, index: int, strength: float) -> StateVector:
    """Couple the qubit at ``index`` to a fresh ``|0>`` ancilla appended at the end."""
    extended = compose([state, ket("0")])
    return apply_matrix(entangling_unitary(strength), [index, extended.num_qubits - 1], extended)


def _label_of(basis: Basis, bit: int) -> str:
    for label, value in KET_LABELS.items():
        if value == (basis, bit):
            return label
    raise AssertionError


def _insert_qubit(rest: StateVector, index: int, qubit: StateVector) -> StateVector:
    joint = compose([rest, qubit])
    n = joint.num_qubits
    order = list(range(n - 1))
    order.insert(index, n - 1)
    return StateVector(np.transpose(joint.tensor(), order).reshape(-1))


def transmit(
    sequence: Sequence[str],
    direction: str,
    attack: AttackModel,
    memory: QuantumMemory,
    rng: np.random.Generator,
) -> list[str]:
    """Carry a sequence of qubits across the quantum channel.

    The delivered sequence reuses the sent names: a qubit Eve replaces
    is delivered under the original name, while anything she keeps is
    renamed ``E:<name>``. An entangle-measure ancilla is read out in Z
    right away; since nobody else ever touches it, this gives the same
    statistics as measuring it later and keeps registers small.
    """
    delivered = list(sequence)
    if attack.kind is AttackKind.NONE:
        return delivered
    for position, name in enumerate(sequence):
        entry: dict[str, Any] = {"type": "quantum", "direction": direction, "position": position, "qubit": name}
        state, (idx,) = memory.local(name)
        if attack.kind is AttackKind.MEASURE_RESEND:
            new_state, info = attack_measure_resend(state, idx, rng)
            memory.replace(name, new_state)
            # the resent qubit is a product with the rest
            memory.split(name)
        elif attack.kind is AttackKind.INTERCEPT:
            new_state, info = attack_intercept_substitute(state, idx, rng)
            stored = f"E:{name}"
            memory.replace(name, new_state, [stored])
            memory.split(name)
            info["stored"] = stored
        else:
            ancilla = f"E:{name}"
            memory.replace(name, attack_entangle_measure(state, idx, attack.strength), [ancilla])
            info = {"attack": "entangle", "strength": attack.strength}
            info["ancilla_z"] = memory.measure(ancilla, Basis.Z, rng)
        entry.update(info)
        attack.eve_log.append(entry)
    return delivered


@dataclass(frozen=True)
class DetectionEstimate:
    """Empirical detection rate with its binomial standard error."""

    trials: int
    detections: int

    @property
    def rate(self) -> float:
        return self.detections / self.trials

    @property
    def stderr(self) -> float:
        p = self.rate
        return math.sqrt(p * (1 - p) / self.trials)


def _attack_one(state: StateVector, index: int, attack: AttackModel, rng) -> StateVector:
    if attack.kind is AttackKind.NONE:
        return state
    if attack.kind is AttackKind.MEASURE_RESEND:
        return attack_measure_resend(state, index, rng)[0]
    if attack.kind is AttackKind.INTERCEPT:
        return attack_intercept_substitute(state, index, rng)[0]
    return attack_entangle_measure(state, index, attack.strength)


def detection_stats(
    attack: AttackModel,
    trials: int,
    rng: np.random.Generator,
    check: int = 2,
    decoy_basis: Basis | None = None,
) -> DetectionEstimate:
    """Per-sample detection rate of ``attack`` against one of the two checks.

    ``check=1`` attacks the B half of a random Bell pair and runs the
    correlation test in a random basis; ``check=2`` attacks a random
    decoy qubit, restricted to ``decoy_basis`` when given, and measures it
    in its preparation basis.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if check not in (1, 2):
        raise ValueError(f"check must be 1 or 2, got {check!r}")
    labels = DECOY_LABELS
    if decoy_basis is not None:
        labels = tuple(l for l in DECOY_LABELS if KET_LABELS[l][0] is decoy_basis)
    hits = 0
    for _ in range(trials):
        if check == 1:
            cls = BellClass.from_index(int(rng.integers(4)))
            state = _attack_one(prepare_bell(cls), 1, attack, rng)
            basis = Basis.Z if rng.random() < 0.5 else Basis.X
            b_bit, rest = measure_single(state, 1, basis, rng)
            a_bit, _ = measure_single(rest, 0, basis, rng)
            hits += (a_bit ^ b_bit) != outcome_parity(cls, basis)
        else:
            label = labels[int(rng.integers(len(labels)))]
            basis, bit = KET_LABELS[label]
            state = _attack_one(ket(label), 0, attack, rng)
            got, _ = measure_single(state, 0, basis, rng)
            hits += got != bit
    return DetectionEstimate(trials, int(hits))
