from itertools import product

import pytest

from qdialogue.bellalg import (
    COLLECTION_MEMBERS,
    SWAP_TABLE,
    BellClass,
    Collection,
    PauliCode,
    bits_to_codes,
    classify_outcome,
    codes_to_bits,
    combine_ops,
    decode_partner,
    pauli_action,
    swap_collection,
)
from qdialogue.qsim import apply_single, identify_bell, prepare_bell
from qdialogue.verify import check_cell, verify_decode, verify_latin

PHI_P, PHI_M, PSI_P, PSI_M = BellClass


def test_bell_labels_are_a_bijection():
    assert {c.value for c in BellClass} == {(0, 0), (0, 1), (1, 0), (1, 1)}
    assert (PHI_P.value, PHI_M.value, PSI_P.value, PSI_M.value) == ((0, 0), (0, 1), (1, 0), (1, 1))
    for c in BellClass:
        assert BellClass.from_symbol(c.symbol) is c
        assert BellClass.from_index(c.index) is c


def test_pauli_codec():
    assert [c.bit_string() for c in (PauliCode.I, PauliCode.SX, PauliCode.ISY, PauliCode.SZ)] == [
        "00",
        "01",
        "10",
        "11",
    ]
    for c in PauliCode:
        assert PauliCode.from_bits(*c.bits) is c
    assert bits_to_codes("0111") == [PauliCode.SX, PauliCode.SZ]
    assert codes_to_bits([PauliCode.ISY, PauliCode.I]) == "1000"
    with pytest.raises(ValueError):
        bits_to_codes("011")
    with pytest.raises(ValueError):
        bits_to_codes("0121")


def test_pauli_action_examples():
    assert pauli_action(PSI_M, PauliCode.SX) is PHI_M
    assert pauli_action(PSI_M, PauliCode.SZ) is PSI_P
    for c in BellClass:
        assert pauli_action(c, PauliCode.I) is c


@pytest.mark.parametrize("cls,op", list(product(BellClass, PauliCode)))
@pytest.mark.parametrize("side", [0, 1])
def test_pauli_action_agrees_with_simulation(cls, op, side):
    assert identify_bell(apply_single(op, side, prepare_bell(cls))) is pauli_action(cls, op)


def test_group_action():
    for c, u, v in product(BellClass, PauliCode, PauliCode):
        assert pauli_action(pauli_action(c, u), v) is pauli_action(c, combine_ops(u, v))
    for u in PauliCode:
        assert {pauli_action(c, u) for c in BellClass} == set(BellClass)


def test_collections_partition_all_pairs():
    seen = set()
    for coll, members in COLLECTION_MEMBERS.items():
        assert len(members) == 4
        assert not seen & members
        seen |= members
        xors = {(a.x ^ b.x, a.z ^ b.z) for a, b in members}
        assert xors == {coll.label}
    assert seen == set(product(BellClass, BellClass))


def test_swap_table_examples():
    assert swap_collection(PSI_M, PSI_M) is Collection.C0
    assert swap_collection(PHI_M, PSI_P) is Collection.C3
    assert swap_collection(PHI_P, PHI_P) is Collection.C0


def test_classify_examples():
    assert classify_outcome(PHI_M, PHI_P) is Collection.C1
    assert classify_outcome(PSI_P, PHI_M) is Collection.C3
    for m in BellClass:
        assert classify_outcome(m, m) is Collection.C0


def test_latin_square():
    assert verify_latin() == []


def test_xor_law():
    for a, b in product(BellClass, BellClass):
        assert swap_collection(a, b) is Collection.from_label((a.x ^ b.x, a.z ^ b.z))


@pytest.mark.parametrize("first,second", list(product(BellClass, BellClass)))
def test_swap_table_cell_against_amplitudes(first, second):
    cell = check_cell(first, second)
    assert cell.ok, cell


def test_decode_examples():
    assert decode_partner(Collection.C3, PSI_M, PauliCode.SX) is PauliCode.SZ
    assert decode_partner(Collection.C3, PSI_M, PauliCode.SZ) is PauliCode.SX
    assert decode_partner(Collection.C3, PSI_M, PauliCode.SX).bit_string() == "11"
    assert decode_partner(Collection.C3, PSI_M, PauliCode.SZ).bit_string() == "01"
    assert decode_partner(Collection.C0, PHI_P, PauliCode.I) is PauliCode.I


def test_decode_round_trip_all_64():
    assert verify_decode() == []


def test_decode_matches_xor_shortcut():
    for c, chi, u in product(Collection, BellClass, PauliCode):
        shortcut = PauliCode.from_flip(
            (c.label[0] ^ u.flip[0], c.label[1] ^ u.flip[1])
        )
        assert decode_partner(c, chi, u) is shortcut


def test_decode_rejects_corrupted_table():
    bad = dict(SWAP_TABLE)
    bad[PHI_P, PHI_M] = Collection.C0
    with pytest.raises(ValueError):
        decode_partner(Collection.C0, PHI_P, PauliCode.I, table=bad)
