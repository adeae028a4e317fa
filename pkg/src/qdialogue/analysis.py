"""Eavesdropper information, leakage audit and efficiency.

The entangle-measure analysis works in the orthogonal basis
``{|0,e00>, |1,e01>, |1,e00>, |0,e01>}`` where Eve's probe state after
Alice's encoding is block diagonal. ``d = |beta|^2`` is the probability
that the attack flips a Z-basis qubit, i.e. the detection probability.
"""

from __future__ import annotations

import io
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .bellalg import BellClass, Collection, PauliCode, pauli_action, swap_collection
from .qsim import DensityMatrix

SPECTRUM_TOL = 1e-10
EIGEN_TOL = 1e-12

# Eve's uncertainty about the 4 exchanged bits as asserted by the
# protocol's own leakage argument; reported next to the enumeration.
CLAIMED_CONDITIONAL_ENTROPY = 4.0


@dataclass(frozen=True)
class AttackAnalysisParams:
    """Alice's encoding priors for I, sx, isy, sz and the detection probability ``d``."""

    priors: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)
    d: float = 0.0

    def __post_init__(self):
        p = tuple(float(x) for x in self.priors)
        if len(p) != 4 or min(p) < 0 or abs(sum(p) - 1) > 1e-12:
            raise ValueError(f"priors must be 4 non-negative numbers summing to 1, got {self.priors!r}")
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"d must lie in [0, 1], got {self.d!r}")
        object.__setattr__(self, "priors", p)


@dataclass(frozen=True)
class EveInfoPoint:
    d: float
    eigenvalues: tuple[float, float, float, float]
    info: float


def build_rho(params: AttackAnalysisParams, alpha: complex, beta: complex) -> DensityMatrix:
    """Block-diagonal state of Bob's qubit and Eve's probe after encoding."""
    if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1) > 1e-12:
        raise ValueError("|alpha|^2 + |beta|^2 must equal 1")
    p0, p1, p2, p3 = params.priors
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    ab = alpha * np.conj(beta)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0], rho[1, 1] = (p0 + p3) * a2, (p0 + p3) * b2
    rho[0, 1] = (p0 - p3) * ab
    rho[1, 0] = np.conj(rho[0, 1])
    rho[2, 2], rho[3, 3] = (p1 + p2) * a2, (p1 + p2) * b2
    rho[2, 3] = (p1 - p2) * ab
    rho[3, 2] = np.conj(rho[2, 3])
    return DensityMatrix(rho)


def rho_for_detection(params: AttackAnalysisParams) -> DensityMatrix:
    """``build_rho`` with real ``alpha = sqrt(1 - d)``, ``beta = sqrt(d)``."""
    return build_rho(params, math.sqrt(1 - params.d), math.sqrt(params.d))


def _pair_eigenvalues(pa: float, pb: float, flip_term: float) -> tuple[float, float]:
    s = pa + pb
    disc = s * s - 16 * pa * pb * flip_term
    if disc < -EIGEN_TOL:
        raise ValueError(f"negative discriminant {disc!r}; parameters are inconsistent")
    root = math.sqrt(max(disc, 0.0))
    return 0.5 * s + 0.5 * root, 0.5 * s - 0.5 * root


def attack_eigenvalues(params: AttackAnalysisParams) -> tuple[float, float, float, float]:
    """Closed-form spectrum ``(l0, l1, l2, l3)``; ``l0``/``l2`` take the ``+`` root."""
    p0, p1, p2, p3 = params.priors
    flip = params.d - params.d**2
    return (*_pair_eigenvalues(p0, p3, flip), *_pair_eigenvalues(p1, p2, flip))


def _xlog2x(p: float) -> float:
    return p * math.log2(p) if p > 0 else 0.0


def shannon_entropy(probs: Iterable[float | Fraction]) -> float:
    """Entropy in bits with 0 log 0 = 0."""
    return -sum(_xlog2x(float(p)) for p in probs)


def von_neumann_info(spectrum: Sequence[float]) -> float:
    """Entropy of a density-matrix spectrum, in bits."""
    lam = np.asarray(spectrum, dtype=float)
    if lam.min() < -EIGEN_TOL or abs(lam.sum() - 1) > SPECTRUM_TOL:
        raise ValueError(f"not a valid spectrum: {spectrum!r}")
    return shannon_entropy(np.clip(lam, 0.0, None))


def _check_d(d: float) -> None:
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"d must lie in [0, 1], got {d!r}")


def info_sent_zero(d: float) -> float:
    """Eve's information when Alice's qubit is |0>, uniform encoding."""
    _check_d(d)
    return -_xlog2x(d) + d - _xlog2x(1 - d) + (1 - d)


def info_sent_one(d: float) -> float:
    """Eve's information when Alice's qubit is |1>; same form as for |0>."""
    _check_d(d)
    # -d log2(d/2) - (1-d) log2((1-d)/2)
    return -(_xlog2x(d) - d) - (_xlog2x(1 - d) - (1 - d))


def eve_info(d: float) -> float:
    """Maximal information per attacked qubit, ``1 - d log2 d - (1-d) log2 (1-d)``."""
    return 0.5 * (info_sent_zero(d) + info_sent_one(d))


def eve_info_point(d: float) -> EveInfoPoint:
    lam = attack_eigenvalues(AttackAnalysisParams(d=d))
    return EveInfoPoint(d, lam, von_neumann_info(lam))


def fig1_grid(step: float) -> list[float]:
    if not 0 < step <= 0.5:
        raise ValueError(f"step must lie in (0, 0.5], got {step!r}")
    n = round(1 / step)
    if abs(n * step - 1) < 1e-9:
        return [k / n for k in range(n + 1)]
    grid = [round(k * step, 12) for k in range(int(math.floor(1 / step)) + 1)]
    if grid[-1] < 1.0:
        grid.append(1.0)
    return grid


def emit_fig1(step: float) -> list[tuple[float, float]]:
    """``(d, I(d))`` rows on a grid over [0, 1]."""
    return [(d, eve_info(d)) for d in fig1_grid(step)]


def _fmt(x: float) -> str:
    return np.format_float_positional(x, trim="-")


def fig1_csv(rows: Sequence[tuple[float, float]]) -> str:
    buf = io.StringIO()
    buf.write("d,I\n")
    for d, info in rows:
        buf.write(f"{_fmt(d)},{_fmt(info)}\n")
    return buf.getvalue()


@dataclass
class LeakageAudit:
    """What Eve learns about ``(u_A, u_B)`` from the announced collection.

    Entropies are in bits. ``joint`` maps ``(chi, u_A, u_B, C)`` to its
    exact probability under uniform priors.
    """

    joint: dict[tuple[BellClass, PauliCode, PauliCode, Collection], Fraction]
    prior_entropy: float
    conditional_entropy: float
    mutual_information: float
    conditional_entropy_alice: float
    conditional_entropy_bob: float
    consistent_pairs_per_collection: dict[Collection, int]
    claimed_conditional_entropy: float = CLAIMED_CONDITIONAL_ENTROPY
    assumptions: list[str] = field(default_factory=lambda: [
        "initial class uniform over the four Bell states",
        "Alice's and Bob's operations independent and uniform",
        "Eve sees the announced collection only",
    ])

    @property
    def total_probability(self) -> Fraction:
        return sum(self.joint.values(), Fraction(0))

    def to_dict(self) -> dict[str, Any]:
        return {
            "cases": len(self.joint),
            "total_probability": str(self.total_probability),
            "prior_entropy_bits": self.prior_entropy,
            "conditional_entropy_bits": self.conditional_entropy,
            "mutual_information_bits": self.mutual_information,
            "conditional_entropy_alice_bits": self.conditional_entropy_alice,
            "conditional_entropy_bob_bits": self.conditional_entropy_bob,
            "claimed_conditional_entropy_bits": self.claimed_conditional_entropy,
            "consistent_pairs_per_collection": {
                str(c): n for c, n in self.consistent_pairs_per_collection.items()
            },
            "assumptions": self.assumptions,
            "joint": [
                {
                    "initial": str(chi),
                    "alice_op": ua.bit_string(),
                    "bob_op": ub.bit_string(),
                    "collection": str(c),
                    "probability": str(p),
                }
                for (chi, ua, ub, c), p in self.joint.items()
            ],
        }


def _marginal(joint: Mapping[tuple, Fraction], keep) -> dict:
    out: dict = defaultdict(Fraction)
    for key, p in joint.items():
        out[keep(key)] += p
    return dict(out)


def conditional_entropy(joint: Mapping[tuple, Fraction], target, given) -> float:
    """H(target | given) = H(target, given) - H(given)."""
    both = _marginal(joint, lambda k: (target(k), given(k)))
    cond = _marginal(joint, given)
    return shannon_entropy(both.values()) - shannon_entropy(cond.values())


def leakage_audit() -> LeakageAudit:
    """Enumerate all 64 (initial class, Alice op, Bob op) cases with uniform priors."""
    weight = Fraction(1, 64)
    joint = {}
    for chi, ua, ub in product(BellClass, PauliCode, PauliCode):
        c = swap_collection(pauli_action(chi, ua), pauli_action(chi, ub))
        joint[chi, ua, ub, c] = weight
    ops = lambda k: (k[1], k[2])
    coll = lambda k: k[3]
    prior = shannon_entropy(_marginal(joint, ops).values())
    h_cond = conditional_entropy(joint, ops, coll)
    pairs = _marginal(joint, lambda k: (k[3], k[1], k[2]))
    consistent = {c: sum(1 for key in pairs if key[0] is c) for c in Collection}
    return LeakageAudit(
        joint=joint,
        prior_entropy=prior,
        conditional_entropy=h_cond,
        mutual_information=prior - h_cond,
        conditional_entropy_alice=conditional_entropy(joint, lambda k: k[1], coll),
        conditional_entropy_bob=conditional_entropy(joint, lambda k: k[2], coll),
        consistent_pairs_per_collection=consistent,
    )


@dataclass(frozen=True)
class EfficiencyReport:
    b_s: int
    q_t: int
    b_t: int

    @property
    def eta(self) -> float:
        return self.b_s / (self.q_t + self.b_t)

    @property
    def eta_exact(self) -> Fraction:
        return Fraction(self.b_s, self.q_t + self.b_t)


def cabello_efficiency(source=None, *, b_s: int | None = None, q_t: int | None = None,
                       b_t: int | None = None) -> EfficiencyReport:
    """Secret bits over qubits plus classical bits.

    Pass a transcript (anything with a ``tallies`` mapping) or the three
    raw counts. Check overhead is not counted.
    """
    if source is not None:
        t = source.tallies
        b_s, q_t, b_t = t["secret_bits"], t["message_qubits"], t["announcement_bits"]
    if b_s is None or q_t is None or b_t is None:
        raise ValueError("need a transcript or all of b_s, q_t, b_t")
    if q_t + b_t <= 0:
        raise ValueError("no qubits or classical bits were used")
    return EfficiencyReport(b_s, q_t, b_t)
