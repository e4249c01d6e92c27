import hashlib
import struct

import pytest
from hypothesis import given, strategies as st

from hashgraph import Event, coin, supermajor, superminor
from hashgraph.events import (BadHash, CreatorMismatch, DuplicateId, MalformedEvent,
                              MissingParent, UnknownEvent, event_digest, serialize)
from hashgraph.world import ProtocolParams, World


def test_serialization_layout():
    sp, op = b"\x01" * 32, b"\x02" * 32
    blob = serialize(3, sp, op, 7, b"xy")
    assert blob == struct.pack(">I", 3) + sp + op + struct.pack(">Q", 7) + struct.pack(">I", 2) + b"xy"
    assert serialize(0, None, None, 0, b"")[4:68] == b"\0" * 64


def test_digest_is_sha256_of_serialization():
    blob = serialize(1, None, None, 5, b"p")
    assert event_digest(1, None, None, 5, b"p") == hashlib.sha256(blob).digest()


def test_coin_is_bit_128():
    e = Event.create(0, None, None, 0, b"")
    assert coin(e) == bool(int.from_bytes(e.id, "big") >> 127 & 1)
    assert coin(e) == coin(e.id) == coin(e)


def test_coin_differs_with_payload():
    coins = {coin(Event.create(0, None, None, 0, bytes([i]))) for i in range(16)}
    assert coins == {True, False}


def test_coin_is_fair():
    n = 10_000
    heads = sum(coin(Event.create(0, None, None, i, b"")) for i in range(n))
    assert abs(heads - n / 2) < 3 * (n ** 0.5) / 2


@pytest.mark.parametrize("count,total,sup,sub", [(3, 4, True, True), (2, 4, False, True), (1, 4, False, False),
                                                  (7, 10, True, True), (6, 9, False, True)])
def test_thresholds(count, total, sup, sub):
    assert supermajor(count, total) is sup
    assert superminor(count, total) is sub


@given(st.integers(1, 200).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n))))
def test_superminor_complements_supermajor(mn):
    m, n = mn
    assert superminor(m, n) == (not supermajor(n - m, n))


def test_params_validation():
    ProtocolParams(4, 1, 4)
    for bad in [(1, 1, 4), (4, 0, 4), (4, 1, 3), (4, 2, 4)]:
        with pytest.raises(ValueError):
            ProtocolParams(*bad)


def _pair():
    a1 = Event.create(0, None, None, 0, b"")
    b1 = Event.create(1, None, None, 0, b"")
    return a1, b1


def test_insert_and_errors(kernel):
    a1, b1 = _pair()
    w = World(2, kernel)
    w.insert(a1)
    with pytest.raises(DuplicateId):
        w.insert(a1)
    b2 = Event.create(1, b1.id, a1.id, 1, b"")
    with pytest.raises(MissingParent):
        w.insert(b2)
    w.insert(b1)
    w.insert(b2)
    assert len(w) == 3 and b2.id in w
    bad_sp = Event.create(0, b1.id, a1.id, 1, b"")
    with pytest.raises(CreatorMismatch):
        w.insert(bad_sp)
    forged = Event(b"\x00" * 32, 0, None, None, 0, b"")
    with pytest.raises(BadHash):
        w.insert(forged)
    with pytest.raises(MalformedEvent):
        w.insert(Event.create(0, a1.id, None, 1, b""))
    with pytest.raises(UnknownEvent):
        w.is_ancestor(b"\x09" * 32, a1.id)
