"""Brute-force amplitude checks of the Bell-class algebra.

Every symbolic rule in :mod:`qdialogue.bellalg` is compared against an
explicit state-vector computation: the swap table cell by cell, the
Pauli action on both particles, the decoding round trip and the Latin
property of the table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

import numpy as np

from .bellalg import (
    SWAP_TABLE,
    BellClass,
    Collection,
    PauliCode,
    classify_outcome,
    decode_partner,
    pauli_action,
    swap_collection,
)
from .qsim import apply_single, bell_probabilities, compose, identify_bell, prepare_bell, project_bell

EXACT_TOL = 1e-12

# qubit layout of a group: A1, B1, A2, B2
A1, B1, A2, B2 = range(4)


def swap_outcome_distribution(first: BellClass, second: BellClass) -> dict[tuple[BellClass, BellClass], float]:
    """Exact probability of every ``(m_A, m_B)`` for Bell measurements on (A1, A2) then (B1, B2)."""
    state = compose([prepare_bell(first), prepare_bell(second)])
    dist = {}
    for m_a in BellClass:
        p_a, rest = project_bell(state, [A1, A2], m_a)
        # rest holds (B1, B2) in that order
        probs = bell_probabilities(rest, [0, 1]) if rest is not None else np.zeros(4)
        for m_b in BellClass:
            dist[m_a, m_b] = p_a * probs[m_b.index]
    return dist


@dataclass
class CellCheck:
    first: BellClass
    second: BellClass
    expected: Collection
    observed: set[Collection]
    max_member_error: float
    outside_mass: float

    @property
    def ok(self) -> bool:
        return (
            self.observed == {self.expected}
            and self.max_member_error <= EXACT_TOL
            and self.outside_mass <= EXACT_TOL
        )


def check_cell(first: BellClass, second: BellClass, table=None) -> CellCheck:
    expected = swap_collection(first, second, table=table)
    dist = swap_outcome_distribution(first, second)
    observed = {classify_outcome(*k) for k, p in dist.items() if p > EXACT_TOL}
    member_err = max(abs(dist[k] - 0.25) for k in expected.members)
    outside = sum(p for k, p in dist.items() if k not in expected.members)
    return CellCheck(first, second, expected, observed, member_err, outside)


@dataclass
class VerificationReport:
    cells: list[CellCheck] = field(default_factory=list)
    pauli_failures: list[tuple[BellClass, PauliCode, str]] = field(default_factory=list)
    decode_failures: list[tuple[BellClass, PauliCode, PauliCode]] = field(default_factory=list)
    latin_failures: list[str] = field(default_factory=list)
    decode_cases: int = 0
    pauli_cases: int = 0

    @property
    def failed_cells(self) -> list[CellCheck]:
        return [c for c in self.cells if not c.ok]

    @property
    def passed(self) -> bool:
        return not (self.failed_cells or self.pauli_failures or self.decode_failures or self.latin_failures)

    def render(self) -> str:
        lines = ["swap table vs amplitude oracle (row = (A1,B1), column = (A2,B2))"]
        header = "".ljust(8) + "".join(str(c).ljust(12) for c in BellClass)
        lines.append(header)
        by_cell = {(c.first, c.second): c for c in self.cells}
        for row in BellClass:
            cells = []
            for col in BellClass:
                c = by_cell.get((row, col))
                mark = "?" if c is None else ("ok" if c.ok else "FAIL")
                label = "" if c is None else str(c.expected)
                cells.append(f"{label} {mark}".ljust(12))
            lines.append(str(row).ljust(8) + "".join(cells))
        for c in self.failed_cells:
            seen = ",".join(sorted(str(o) for o in c.observed))
            lines.append(f"FAIL cell ({c.first},{c.second}): table says {c.expected}, amplitudes give {seen}")
        lines.append(f"pauli action: {self.pauli_cases - len(self.pauli_failures)}/{self.pauli_cases} ok")
        for cls, op, side in self.pauli_failures:
            lines.append(f"FAIL pauli {op} on {side} of {cls}")
        lines.append(f"decode round trips: {self.decode_cases - len(self.decode_failures)}/{self.decode_cases} ok")
        for chi, ua, ub in self.decode_failures:
            lines.append(f"FAIL decode initial={chi} alice={ua} bob={ub}")
        lines.append("latin square: " + ("ok" if not self.latin_failures else "FAIL"))
        lines.extend(f"FAIL {msg}" for msg in self.latin_failures)
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines) + "\n"


def verify_pauli_action() -> list[tuple[BellClass, PauliCode, str]]:
    failures = []
    for cls, op in product(BellClass, PauliCode):
        for side, index in (("A", 0), ("B", 1)):
            try:
                got = identify_bell(apply_single(op, index, prepare_bell(cls)))
            except ValueError:
                got = None
            if got is not pauli_action(cls, op):
                failures.append((cls, op, side))
    return failures


def verify_latin(table: Mapping | None = None) -> list[str]:
    failures = []
    for row in BellClass:
        seen = {swap_collection(row, col, table=table) for col in BellClass}
        if len(seen) != 4:
            failures.append(f"row {row} repeats a collection")
    for col in BellClass:
        seen = {swap_collection(row, col, table=table) for row in BellClass}
        if len(seen) != 4:
            failures.append(f"column {col} repeats a collection")
    return failures


def verify_decode(table: Mapping | None = None) -> list[tuple[BellClass, PauliCode, PauliCode]]:
    failures = []
    for chi, ua, ub in product(BellClass, PauliCode, PauliCode):
        announced = swap_collection(pauli_action(chi, ua), pauli_action(chi, ub), table=table)
        try:
            ok = (
                decode_partner(announced, chi, ua, own_first=True, table=table) is ub
                and decode_partner(announced, chi, ub, own_first=False, table=table) is ua
            )
        except ValueError:
            ok = False
        if not ok:
            failures.append((chi, ua, ub))
    return failures


def verify_all(table: Mapping | None = None) -> VerificationReport:
    table = SWAP_TABLE if table is None else table
    report = VerificationReport()
    report.cells = [check_cell(r, c, table=table) for r, c in product(BellClass, BellClass)]
    report.pauli_cases = 2 * 16
    report.pauli_failures = verify_pauli_action()
    report.decode_cases = 64
    report.decode_failures = verify_decode(table)
    report.latin_failures = verify_latin(table)
    return report
