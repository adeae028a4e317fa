"""Exact state-vector simulation for a handful of qubits.

Qubit 0 is the leftmost ket position and the most significant bit of the
basis-state index, so ``|01>`` is amplitude index 1. Operations never strip
global phase. Measurements remove the measured qubits from the returned
state.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .bellalg import BellClass, PauliCode

MAX_QUBITS = 5
ATOL = 1e-10

SQRT1_2 = 1 / np.sqrt(2)

PAULI_MATRICES = {
    PauliCode.I: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliCode.SX: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliCode.ISY: np.array([[0, 1], [-1, 0]], dtype=complex),
    PauliCode.SZ: np.array([[1, 0], [0, -1]], dtype=complex),
}


class Basis(Enum):
    Z = "Z"
    X = "X"


_BASIS_VECTORS = {
    Basis.Z: (np.array([1, 0], dtype=complex), np.array([0, 1], dtype=complex)),
    Basis.X: (
        np.array([SQRT1_2, SQRT1_2], dtype=complex),
        np.array([SQRT1_2, -SQRT1_2], dtype=complex),
    ),
}

# single-qubit states by name: (basis, bit)
KET_LABELS = {"0": (Basis.Z, 0), "1": (Basis.Z, 1), "+": (Basis.X, 0), "-": (Basis.X, 1)}


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitude vector over 1 to ``MAX_QUBITS`` qubits."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size != 1 << n or not 1 <= n <= MAX_QUBITS:
            raise ValueError(
                f"state must hold 2**n amplitudes with 1 <= n <= {MAX_QUBITS}, got {amps.size}"
            )
        norm = np.vdot(amps, amps).real
        if abs(norm - 1) > ATOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def num_qubits(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix."""

    entries: np.ndarray

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, atol=ATOL, rtol=0):
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > ATOL:
            raise ValueError(f"density matrix trace is {np.trace(rho)!r}")
        if np.linalg.eigvalsh(rho).min() < -ATOL:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def ket(label: str) -> StateVector:
    """One of ``|0>``, ``|1>``, ``|+>``, ``|->``."""
    basis, bit = KET_LABELS[label]
    return StateVector(_BASIS_VECTORS[basis][bit])


def bell_vector(cls: BellClass) -> np.ndarray:
    """(|0,x> + (-1)^z |1,1-x>) / sqrt(2) as a length-4 array."""
    amps = np.zeros(4, dtype=complex)
    amps[cls.x] = SQRT1_2
    amps[2 + (1 - cls.x)] = SQRT1_2 * (-1) ** cls.z
    return amps


BELL_MATRIX = np.array([bell_vector(BellClass.from_index(k)) for k in range(4)])
_BASIS_ROWS = {b: np.array(vecs) for b, vecs in _BASIS_VECTORS.items()}


def prepare_bell(cls: BellClass) -> StateVector:
    return StateVector(bell_vector(cls))


def compose(states: Sequence[StateVector]) -> StateVector:
    """Tensor product in argument order."""
    if not states:
        raise ValueError("nothing to compose")
    total = sum(s.num_qubits for s in states)
    if total > MAX_QUBITS:
        raise ValueError(f"composite of {total} qubits exceeds the {MAX_QUBITS}-qubit limit")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.outer(amps, s.amplitudes).reshape(-1)
    return StateVector(amps)


def _check_indices(state: StateVector, indices: Sequence[int]) -> None:
    n = state.num_qubits
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"qubit index {i} out of range for {n} qubits")
    if len(set(indices)) != len(indices):
        raise ValueError(f"qubit indices must be distinct, got {tuple(indices)}")


def apply_matrix(matrix: np.ndarray, indices: Sequence[int], state: StateVector) -> StateVector:
    """Apply a ``2**k x 2**k`` matrix to the qubits at ``indices`` (first index is MSB)."""
    indices = list(indices)
    _check_indices(state, indices)
    k = len(indices)
    n = state.num_qubits
    op = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * k))
    psi = np.tensordot(op, state.tensor(), axes=(list(range(k, 2 * k)), indices))
    psi = np.moveaxis(psi, list(range(k)), indices)
    return StateVector(psi.reshape(1 << n))


def apply_single(op: PauliCode | np.ndarray, index: int, state: StateVector) -> StateVector:
    matrix = PAULI_MATRICES[op] if isinstance(op, PauliCode) else op
    return apply_matrix(matrix, [index], state)


def _split(state: StateVector, indices: list[int]) -> np.ndarray:
    """Amplitudes as a matrix: rows index ``indices`` (first is MSB), columns the rest."""
    psi = state.tensor()
    if indices != list(range(len(indices))):
        psi = np.moveaxis(psi, indices, list(range(len(indices))))
    return psi.reshape(1 << len(indices), -1)


def _remainder(vec: np.ndarray, prob: float) -> StateVector | None:
    if vec.size == 1:
        return None
    return StateVector(vec / np.sqrt(prob))


def _outcome_branches(
    state: StateVector, indices: Sequence[int], basis_rows: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized remainders for every outcome (one per row of ``basis_rows``) and their probabilities."""
    indices = list(indices)
    _check_indices(state, indices)
    branches = basis_rows.conj() @ _split(state, indices)
    probs = np.einsum("ij,ij->i", branches.conj(), branches).real
    return branches, probs


def _bell_rows(pair: Sequence[int]) -> np.ndarray:
    if len(pair) != 2:
        raise ValueError("a Bell measurement needs exactly two qubits")
    return BELL_MATRIX


def bell_probabilities(state: StateVector, pair: Sequence[int]) -> np.ndarray:
    """Born probabilities of the four Bell outcomes on ``pair``, ordered by ``BellClass.index``."""
    return _outcome_branches(state, pair, _bell_rows(pair))[1]


def project_bell(
    state: StateVector, pair: Sequence[int], cls: BellClass
) -> tuple[float, StateVector | None]:
    """Probability of outcome ``cls`` and the renormalized state of the other qubits."""
    branches, probs = _outcome_branches(state, pair, _bell_rows(pair))
    prob = float(probs[cls.index])
    if prob <= 0:
        return 0.0, None
    return prob, _remainder(branches[cls.index], prob)


def measure_bell_pair(
    state: StateVector, pair: Sequence[int], rng: np.random.Generator
) -> tuple[BellClass, StateVector | None]:
    """Bell-basis measurement of ``pair``.

    Returns the sampled class and the post-measurement state of the
    remaining qubits, or ``None`` when no qubits remain.
    """
    branches, probs = _outcome_branches(state, pair, _bell_rows(pair))
    k = int(np.searchsorted(np.cumsum(probs), rng.random() * probs.sum(), side="right"))
    k = min(k, 3)
    return BellClass.from_index(k), _remainder(branches[k], float(probs[k]))


def project_single(
    state: StateVector, index: int, basis: Basis, bit: int
) -> tuple[float, StateVector | None]:
    branches, probs = _outcome_branches(state, [index], _BASIS_ROWS[basis])
    prob = float(probs[bit])
    if prob <= 0:
        return 0.0, None
    return prob, _remainder(branches[bit], prob)


def measure_single(
    state: StateVector, index: int, basis: Basis, rng: np.random.Generator
) -> tuple[int, StateVector | None]:
    """Measure one qubit in Z or X; bit 0 is ``|0>``/``|+>``, bit 1 is ``|1>``/``|->``."""
    branches, probs = _outcome_branches(state, [index], _BASIS_ROWS[basis])
    bit = int(rng.random() * probs.sum() >= probs[0])
    return bit, _remainder(branches[bit], float(probs[bit]))


def reduced_density(state: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Partial trace onto ``keep``, in the order given."""
    keep = list(keep)
    if not keep:
        raise ValueError("must keep at least one qubit")
    _check_indices(state, keep)
    psi = _split(state, keep)
    return DensityMatrix(psi @ psi.conj().T)


def density_of(state: StateVector) -> DensityMatrix:
    return DensityMatrix(np.outer(state.amplitudes, state.amplitudes.conj()))


def overlap(a: StateVector | np.ndarray, b: StateVector | np.ndarray) -> float:
    """|<a|b>|, equal to 1 iff the states agree up to global phase."""
    va = a.amplitudes if isinstance(a, StateVector) else np.asarray(a)
    vb = b.amplitudes if isinstance(b, StateVector) else np.asarray(b)
    return float(abs(np.vdot(va, vb)))


def identify_bell(state: StateVector, atol: float = ATOL) -> BellClass:
    """Bell class of a two-qubit state, ignoring global phase."""
    if state.num_qubits != 2:
        raise ValueError("only two-qubit states can be Bell states")
    for cls in BellClass:
        if abs(overlap(bell_vector(cls), state) - 1) < atol:
            return cls
    raise ValueError("state is not a Bell state")


def outcome_parity(cls: BellClass, basis: Basis) -> int:
    """XOR of the two single-qubit outcomes when ``cls`` is measured qubit-wise in ``basis``.

    Z outcomes agree exactly for the Phi states, X outcomes agree exactly
    for the + states.
    """
    return cls.x if basis is Basis.Z else cls.z


class QuantumMemory:
    """Named qubits held in small independent registers.

    Registers are merged when an operation spans two of them and shrink
    as qubits are measured, which keeps every joint state within the
    simulator's size limit for the protocols modelled here.
    """

    def __init__(self):
        self._registers: dict[int, tuple[StateVector, list[str]]] = {}
        self._where: dict[str, int] = {}
        self._next = 0

    def __contains__(self, name: str) -> bool:
        return name in self._where

    def __len__(self) -> int:
        return len(self._where)

    def add(self, state: StateVector, names: Sequence[str]) -> None:
        names = list(names)
        if len(names) != state.num_qubits:
            raise ValueError(f"{len(names)} names for {state.num_qubits} qubits")
        clash = [n for n in names if n in self._where]
        if clash or len(set(names)) != len(names):
            raise ValueError(f"qubit names already in use: {clash or names}")
        self._put(self._next, state, names)
        self._next += 1

    def _put(self, rid: int, state: StateVector | None, names: list[str]) -> None:
        if state is None:
            self._registers.pop(rid, None)
            return
        self._registers[rid] = (state, names)
        for n in names:
            self._where[n] = rid

    def _rid(self, name: str) -> int:
        try:
            return self._where[name]
        except KeyError:
            raise KeyError(f"no qubit named {name!r} in memory") from None

    def _joint(self, names: Sequence[str]) -> int:
        rids = list(dict.fromkeys(self._rid(n) for n in names))
        if len(rids) == 1:
            return rids[0]
        states, all_names = [], []
        for rid in rids:
            s, ns = self._registers.pop(rid)
            states.append(s)
            all_names.extend(ns)
        self._put(rids[0], compose(states), all_names)
        return rids[0]

    def local(self, *names: str) -> tuple[StateVector, list[int]]:
        """Joint state holding ``names`` and their indices in it."""
        rid = self._joint(names)
        state, order = self._registers[rid]
        return state, [order.index(n) for n in names]

    def register_names(self, name: str) -> list[str]:
        return list(self._registers[self._rid(name)][1])

    def replace(self, name: str, state: StateVector, extra: Sequence[str] = ()) -> None:
        """Swap in a new state for ``name``'s register, appending qubits ``extra``."""
        rid = self._rid(name)
        _, order = self._registers[rid]
        new_order = order + list(extra)
        if state.num_qubits != len(new_order):
            raise ValueError("replacement state does not match register layout")
        self._put(rid, state, new_order)

    def rename(self, old: str, new: str) -> None:
        if new in self._where:
            raise ValueError(f"qubit name {new!r} already in use")
        rid = self._where.pop(old)
        state, order = self._registers[rid]
        order[order.index(old)] = new
        self._where[new] = rid

    def split(self, name: str, atol: float = 1e-9) -> None:
        """Move a qubit that is in a product state with its register into its own register."""
        state, (idx,) = self.local(name)
        if state.num_qubits == 1:
            return
        rid = self._rid(name)
        others = [n for n in self._registers[rid][1] if n != name]
        u, s, vh = np.linalg.svd(np.moveaxis(state.tensor(), idx, 0).reshape(2, -1))
        if s[1] > atol:
            raise ValueError(f"qubit {name!r} is entangled with {others}")
        self._registers[rid] = (StateVector(s[0] * vh[0]), others)
        del self._where[name]
        self.add(StateVector(u[:, 0]), [name])

    def _drop(self, rid: int, names: Sequence[str], rest: StateVector | None) -> None:
        _, order = self._registers[rid]
        for n in names:
            del self._where[n]
        remaining = [n for n in order if n not in names]
        if rest is None:
            assert not remaining
            del self._registers[rid]
        else:
            self._registers[rid] = (rest, remaining)

    def apply(self, op: PauliCode | np.ndarray, name: str) -> None:
        state, (idx,) = self.local(name)
        self.replace(name, apply_single(op, idx, state))

    def apply_matrix(self, matrix: np.ndarray, names: Sequence[str]) -> None:
        state, idx = self.local(*names)
        self.replace(names[0], apply_matrix(matrix, idx, state))

    def measure_bell(self, first: str, second: str, rng: np.random.Generator) -> BellClass:
        state, idx = self.local(first, second)
        outcome, rest = measure_bell_pair(state, idx, rng)
        self._drop(self._rid(first), [first, second], rest)
        return outcome

    def measure(self, name: str, basis: Basis, rng: np.random.Generator) -> int:
        state, (idx,) = self.local(name)
        bit, rest = measure_single(state, idx, basis, rng)
        self._drop(self._rid(name), [name], rest)
        return bit

    def reduced(self, *names: str) -> DensityMatrix:
        state, idx = self.local(*names)
        return reduced_density(state, idx)
