"""Symbolic algebra of the four Bell classes.

Every Bell class is carried as a pair of bits ``(x, z)``: ``x`` is the
bit-flip component (Phi vs Psi) and ``z`` the phase component (+ vs -).
One-sided Pauli operations act on these labels by XOR, and the outcome
collection of an entanglement swap between two Bell pairs is read from
the swap table below.
"""

from __future__ import annotations

from enum import Enum
from typing import Mapping


class BellClass(Enum):
    """One of the four Bell states, valued by its ``(x, z)`` label."""

    PHI_PLUS = (0, 0)
    PHI_MINUS = (0, 1)
    PSI_PLUS = (1, 0)
    PSI_MINUS = (1, 1)

    @property
    def x(self) -> int:
        return self.value[0]

    @property
    def z(self) -> int:
        return self.value[1]

    @property
    def index(self) -> int:
        return 2 * self.x + self.z

    @property
    def symbol(self) -> str:
        return _BELL_SYMBOLS[self]

    @classmethod
    def from_bits(cls, x: int, z: int) -> "BellClass":
        return cls((int(x), int(z)))

    @classmethod
    def from_index(cls, index: int) -> "BellClass":
        return _BELL_BY_INDEX[index]

    @classmethod
    def from_symbol(cls, symbol: str) -> "BellClass":
        for member, sym in _BELL_SYMBOLS.items():
            if symbol in (sym, member.name):
                return member
        raise ValueError(f"unknown Bell class {symbol!r}")

    def xor(self, label: tuple[int, int]) -> "BellClass":
        return BellClass.from_bits(self.x ^ label[0], self.z ^ label[1])

    def __str__(self) -> str:
        return self.symbol


_BELL_SYMBOLS = {
    BellClass.PHI_PLUS: "Phi+",
    BellClass.PHI_MINUS: "Phi-",
    BellClass.PSI_PLUS: "Psi+",
    BellClass.PSI_MINUS: "Psi-",
}
_BELL_BY_INDEX = {c.index: c for c in BellClass}


class PauliCode(Enum):
    """Encoding operation, valued by the two secret bits it carries.

    The agreed codec is ``I -> 00``, ``sigma_x -> 01``, ``i sigma_y -> 10``
    and ``sigma_z -> 11``.
    """

    I = (0, 0)
    SX = (0, 1)
    ISY = (1, 0)
    SZ = (1, 1)

    @property
    def bits(self) -> tuple[int, int]:
        return self.value

    @property
    def flip(self) -> tuple[int, int]:
        """``(x, z)`` change this operation induces on a Bell class."""
        return _PAULI_FLIPS[self]

    @property
    def symbol(self) -> str:
        return _PAULI_SYMBOLS[self]

    @classmethod
    def from_bits(cls, b0: int, b1: int) -> "PauliCode":
        return cls((int(b0), int(b1)))

    @classmethod
    def from_flip(cls, label: tuple[int, int]) -> "PauliCode":
        for member, flip in _PAULI_FLIPS.items():
            if flip == tuple(label):
                return member
        raise ValueError(f"no Pauli operation with flip label {label!r}")

    def bit_string(self) -> str:
        return f"{self.value[0]}{self.value[1]}"

    def __str__(self) -> str:
        return self.symbol


_PAULI_FLIPS = {
    PauliCode.I: (0, 0),
    PauliCode.SX: (1, 0),
    PauliCode.ISY: (1, 1),
    PauliCode.SZ: (0, 1),
}
_PAULI_SYMBOLS = {
    PauliCode.I: "I",
    PauliCode.SX: "sx",
    PauliCode.ISY: "isy",
    PauliCode.SZ: "sz",
}


class Collection(Enum):
    """Announced entanglement-swapping outcome class C0..C3."""

    C0 = 0
    C1 = 1
    C2 = 2
    C3 = 3

    @property
    def label(self) -> tuple[int, int]:
        """Intrinsic ``(x, z)`` label shared by every member's XOR."""
        return (self.value >> 1, self.value & 1)

    @property
    def members(self) -> frozenset[tuple[BellClass, BellClass]]:
        return COLLECTION_MEMBERS[self]

    @classmethod
    def from_label(cls, label: tuple[int, int]) -> "Collection":
        return cls(2 * label[0] + label[1])

    def __str__(self) -> str:
        return self.name


_P, _M, _S, _T = (
    BellClass.PHI_PLUS,
    BellClass.PHI_MINUS,
    BellClass.PSI_PLUS,
    BellClass.PSI_MINUS,
)

# (m_A, m_B) outcome pairs on (A1, A2) and (B1, B2), transcribed per collection.
COLLECTION_MEMBERS: Mapping[Collection, frozenset[tuple[BellClass, BellClass]]] = {
    Collection.C0: frozenset({(_P, _P), (_M, _M), (_S, _S), (_T, _T)}),
    Collection.C1: frozenset({(_M, _P), (_P, _M), (_S, _T), (_T, _S)}),
    Collection.C2: frozenset({(_P, _S), (_M, _T), (_S, _P), (_T, _M)}),
    Collection.C3: frozenset({(_M, _S), (_P, _T), (_T, _P), (_S, _M)}),
}

# Row: class of (A1, B1). Column: class of (A2, B2).
SWAP_TABLE: dict[tuple[BellClass, BellClass], Collection] = {}
for _row, _cells in zip(
    (_P, _M, _S, _T),
    (
        ("C0", "C1", "C2", "C3"),
        ("C1", "C0", "C3", "C2"),
        ("C2", "C3", "C0", "C1"),
        ("C3", "C2", "C1", "C0"),
    ),
):
    for _col, _cell in zip((_P, _M, _S, _T), _cells):
        SWAP_TABLE[_row, _col] = Collection[_cell]
del _row, _cells, _col, _cell


def pauli_action(cls: BellClass, op: PauliCode) -> BellClass:
    """Bell class after ``op`` acts on either particle, up to global phase."""
    return cls.xor(op.flip)


def combine_ops(u: PauliCode, v: PauliCode) -> PauliCode:
    """Operation whose flip label is the XOR of those of ``u`` and ``v``."""
    a, b = u.flip, v.flip
    return PauliCode.from_flip((a[0] ^ b[0], a[1] ^ b[1]))


def swap_collection(
    first: BellClass,
    second: BellClass,
    table: Mapping[tuple[BellClass, BellClass], Collection] | None = None,
) -> Collection:
    """Outcome collection of swapping pair ``(A1, B1)`` in ``first`` with ``(A2, B2)`` in ``second``."""
    table = SWAP_TABLE if table is None else table
    return table[first, second]


def classify_outcome(m_a: BellClass, m_b: BellClass) -> Collection:
    """Collection containing the joint outcome ``(m_A, m_B)``."""
    for collection, members in COLLECTION_MEMBERS.items():
        if (m_a, m_b) in members:
            return collection
    raise AssertionError("collections do not cover all outcome pairs")


def decode_partner(
    announced: Collection,
    initial: BellClass,
    own_op: PauliCode,
    own_first: bool = True,
    table: Mapping[tuple[BellClass, BellClass], Collection] | None = None,
) -> PauliCode:
    """Recover the partner's operation from the announced collection.

    The party knows the initial class of the group and its own operation,
    hence the class of its own encoded pair. Scanning the table along that
    row (or column, when ``own_first`` is false) for the announced
    collection identifies the partner's encoded class and therefore the
    partner's operation.

    Raises:
        ValueError: if the table has no such entry, which only happens
            for a corrupted table.
    """
    own_class = pauli_action(initial, own_op)
    matches = []
    for candidate in PauliCode:
        other = pauli_action(initial, candidate)
        cell = (own_class, other) if own_first else (other, own_class)
        if swap_collection(*cell, table=table) is announced:
            matches.append(candidate)
    if len(matches) != 1:
        raise ValueError(
            f"{len(matches)} candidate operations for {announced} given "
            f"initial {initial} and own {own_op}"
        )
    return matches[0]


def bits_to_codes(bits: str | list[int]) -> list[PauliCode]:
    """Group a 2N-bit secret into N encoding operations."""
    values = [int(b) for b in bits]
    if len(values) % 2:
        raise ValueError(f"secret must have an even number of bits, got {len(values)}")
    if any(b not in (0, 1) for b in values):
        raise ValueError("secret bits must be 0 or 1")
    return [PauliCode.from_bits(values[i], values[i + 1]) for i in range(0, len(values), 2)]


def codes_to_bits(codes: list[PauliCode]) -> str:
    return "".join(code.bit_string() for code in codes)
