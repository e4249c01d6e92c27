"""Worlds: ancestry-closed event sets with ancestry, fork, seeing and round queries."""
from __future__ import annotations

from dataclasses import dataclass

from .events import (CreatorMismatch, DuplicateId, Event, MalformedEvent,
                     MissingParent, UnknownEvent, supermajor)
from .kernel import Kernel


@dataclass(frozen=True)
class ProtocolParams:
    n_peers: int
    d: int = 1
    c: int = 4

    def __post_init__(self):
        if self.n_peers < 2:
            raise ValueError("need at least two peers")
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.c < self.d + 3:
            raise ValueError(f"c must be at least d + 3 (got c={self.c}, d={self.d})")


class World:
    """Append-only, ancestry-closed set of events.

    Forks are stored as given; use :meth:`honest_forks` to check that honest
    creators did not fork. Rounds and witness flags are assigned on insert.
    """

    def __init__(self, n_peers: int, kernel=None):
        if n_peers < 2:
            raise ValueError("need at least two peers")
        self.n_peers = n_peers
        self.events: list[Event] = []
        self.index: dict[bytes, int] = {}
        self.by_creator: list[list[int]] = [[] for _ in range(n_peers)]
        self._self_children: dict[int, int] = {}
        self._initials = [0] * n_peers
        self._k = (kernel or Kernel)(n_peers)
        self._witnesses: list[list[int]] = []
        self.labels: dict[bytes, str] = {}
        self.cache: dict = {}

    @classmethod
    def from_events(cls, n_peers, events, kernel=None) -> "World":
        w = cls(n_peers, kernel)
        for e in events:
            w.insert(e)
        return w

    def __len__(self):
        return len(self.events)

    def __contains__(self, x):
        return _key(x) in self.index

    def __iter__(self):
        return iter(self.events)

    @property
    def backend(self):
        return self._k.backend

    # storage -------------------------------------------------------------

    def insert(self, e: Event) -> int:
        if e.id in self.index:
            raise DuplicateId(e.id.hex())
        if not 0 <= e.creator < self.n_peers:
            raise MalformedEvent(f"creator {e.creator} outside [0, {self.n_peers})")
        e.check()
        if e.is_initial:
            sp = op = -1
        else:
            try:
                sp = self.index[e.self_parent]
                op = self.index[e.other_parent]
            except KeyError as exc:
                raise MissingParent(f"parent {exc.args[0].hex()[:16]} of {e.short()} not in world") from None
            if self.events[sp].creator != e.creator:
                raise CreatorMismatch(f"self-parent of {e.short()} has creator {self.events[sp].creator}")
            if self.events[op].creator == e.creator:
                raise CreatorMismatch(f"other-parent of {e.short()} has the same creator")
        x = self._k.add(e.creator, sp, op)
        self.events.append(e)
        self.index[e.id] = x
        self.by_creator[e.creator].append(x)
        if sp < 0:
            self._initials[e.creator] += 1
        else:
            self._self_children[sp] = self._self_children.get(sp, 0) + 1
        r = self._k.round(x)
        if self._k.witness(x):
            while len(self._witnesses) <= r:
                self._witnesses.append([])
            self._witnesses[r].append(x)
        self.cache.clear()  # derived consensus state is per snapshot
        return x

    def ix(self, x) -> int:
        try:
            return self.index[_key(x)]
        except KeyError:
            raise UnknownEvent(_key(x).hex()[:16]) from None

    def get(self, x) -> Event:
        return self.events[self.ix(x)]

    def name(self, x) -> str:
        k = _key(x)
        return self.labels.get(k) or k.hex()[:8]

    # relations -----------------------------------------------------------

    def is_ancestor(self, x, y) -> bool:
        return self._k.is_anc(self.ix(x), self.ix(y))

    def is_strict_ancestor(self, x, y) -> bool:
        a, b = self.ix(x), self.ix(y)
        return a != b and self._k.is_anc(a, b)

    def is_self_ancestor(self, x, y) -> bool:
        return self._k.is_self_anc(self.ix(x), self.ix(y))

    def is_fork(self, x, y) -> bool:
        a, b = self.ix(x), self.ix(y)
        k = self._k
        return (k.creator(a) == k.creator(b) and not k.is_self_anc(a, b)
                and not k.is_self_anc(b, a))

    def observes_fork(self, y, peer: int) -> bool:
        """True if some fork by ``peer`` lies among the ancestors of ``y``."""
        return self._k.forked(self.ix(y), peer)

    def sees(self, y, x) -> bool:
        return self._k.sees(self.ix(y), self.ix(x))

    def strongly_sees(self, y, x) -> bool:
        return self._k.stsees(self.ix(y), self.ix(x))

    def ancestors(self, y) -> list[bytes]:
        return [self.events[i].id for i in self._k.ancestors(self.ix(y))]

    def self_chain(self, y) -> list[bytes]:
        """Self-ancestors of ``y``, oldest first."""
        out = []
        i = self.ix(y)
        while i >= 0:
            out.append(self.events[i].id)
            i = self._k.self_parent(i)
        out.reverse()
        return out

    def tips(self) -> list[bytes]:
        """Events with no children in this world."""
        has_child = set()
        for e in self.events:
            if not e.is_initial:
                has_child.add(e.self_parent)
                has_child.add(e.other_parent)
        return [e.id for e in self.events if e.id not in has_child]

    # rounds --------------------------------------------------------------

    def round_of(self, x) -> int:
        return self._k.round(self.ix(x))

    def is_witness(self, x) -> bool:
        return self._k.witness(self.ix(x))

    def rwitness(self, i: int, x) -> bool:
        k = self.ix(x)
        return self._k.witness(k) and self._k.round(k) == i

    def witnesses_in_round(self, i: int) -> list[bytes]:
        if 0 <= i < len(self._witnesses):
            return [self.events[k].id for k in self._witnesses[i]]
        return []

    @property
    def max_round(self) -> int:
        return len(self._witnesses) - 1

    # validation ----------------------------------------------------------

    def forking_creators(self) -> list[int]:
        """Creators with two events in this world that form a fork."""
        out = {p for p, n in enumerate(self._initials) if n > 1}
        for sp, n in self._self_children.items():
            if n > 1:
                out.add(self.events[sp].creator)
        return sorted(out)

    def honest_forks(self, honest) -> list[tuple[bytes, bytes]]:
        """Fork pairs created by honest peers (empty for a valid world)."""
        honest = set(honest)
        out = []
        for p in self.forking_creators():
            if p not in honest:
                continue
            mine = self.by_creator[p]
            for a_pos, a in enumerate(mine):
                for b in mine[a_pos + 1:]:
                    if not self._k.is_self_anc(a, b) and not self._k.is_self_anc(b, a):
                        out.append((self.events[a].id, self.events[b].id))
                        break
                if out and out[-1][0] == self.events[a].id:
                    break
        return out

    def supermajor(self, count: int) -> bool:
        return supermajor(count, self.n_peers)


def _key(x) -> bytes:
    return x.id if isinstance(x, Event) else x
