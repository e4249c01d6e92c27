"""Events, content addressing and the hash-derived coin."""
from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass

DIGEST_SIZE = 32
NULL_ID = bytes(DIGEST_SIZE)
COIN_BIT = 128


class HashgraphError(Exception):
    """Base class for every error raised by this package."""


class DuplicateId(HashgraphError):
    pass


class MissingParent(HashgraphError):
    pass


class BadHash(HashgraphError):
    pass


class CreatorMismatch(HashgraphError):
    pass


class MalformedEvent(HashgraphError):
    pass


class UnknownEvent(HashgraphError, KeyError):
    pass


def serialize(creator: int, self_parent: bytes | None, other_parent: bytes | None,
              timestamp: int, payload: bytes) -> bytes:
    """Canonical length-prefixed encoding of an event body.

    Layout: creator u32 | self_parent 32B | other_parent 32B | ts u64 |
    payload length u32 | payload. Absent parents are all-zero.
    """
    return b"".join((
        struct.pack(">I", creator),
        self_parent or NULL_ID,
        other_parent or NULL_ID,
        struct.pack(">Q", timestamp),
        struct.pack(">I", len(payload)),
        payload,
    ))


def event_digest(creator, self_parent, other_parent, timestamp, payload) -> bytes:
    return hashlib.sha256(serialize(creator, self_parent, other_parent, timestamp, payload)).digest()


@dataclass(frozen=True)
class Event:
    id: bytes
    creator: int
    self_parent: bytes | None
    other_parent: bytes | None
    timestamp: int
    payload: bytes = b""

    @classmethod
    def create(cls, creator: int, self_parent: bytes | None = None,
               other_parent: bytes | None = None, timestamp: int = 0,
               payload: bytes = b"") -> "Event":
        digest = event_digest(creator, self_parent, other_parent, timestamp, payload)
        return cls(digest, creator, self_parent, other_parent, timestamp, payload)

    @property
    def is_initial(self) -> bool:
        return self.self_parent is None

    def check(self) -> None:
        """Raise if the structural event invariants do not hold."""
        if (self.self_parent is None) != (self.other_parent is None):
            raise MalformedEvent("parents must be both present or both absent")
        if self.self_parent is not None and self.self_parent == self.other_parent:
            raise MalformedEvent("self_parent equals other_parent")
        if self.creator < 0 or self.timestamp < 0:
            raise MalformedEvent("negative creator or timestamp")
        expected = event_digest(self.creator, self.self_parent, self.other_parent,
                                self.timestamp, self.payload)
        if expected != self.id:
            raise BadHash(f"id {self.id.hex()[:16]} does not match event body")

    def short(self) -> str:
        return self.id.hex()[:8]


def coin(e: Event | bytes) -> bool:
    """Middle bit (index 128, MSB-first) of the event digest."""
    digest = e.id if isinstance(e, Event) else e
    return bool((digest[COIN_BIT // 8] >> (7 - COIN_BIT % 8)) & 1)


def supermajor(count: int, total: int) -> bool:
    return 3 * count > 2 * total


def superminor(count: int, total: int) -> bool:
    return 3 * count >= total
