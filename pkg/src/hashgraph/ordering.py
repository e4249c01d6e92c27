"""Round received, consensus timestamps and the consensus order."""
from __future__ import annotations

from dataclasses import dataclass, field

from .elections import Elections, Unsettled
from .events import HashgraphError
from .world import ProtocolParams, World


class NotAnAncestor(HashgraphError):
    pass


@dataclass(frozen=True)
class ConsensusEntry:
    event: bytes
    round_received: int
    consensus_ts: int
    order_index: int


@dataclass
class OrderReport:
    settled: list[ConsensusEntry] = field(default_factory=list)
    unsettled: list[tuple[bytes, str]] = field(default_factory=list)
    settled_rounds: int = 0
    empty_rounds: list[int] = field(default_factory=list)
    max_round: int = -1

    def position(self) -> dict[bytes, ConsensusEntry]:
        return {e.event: e for e in self.settled}


def median_lower(values) -> int:
    """Lower median: for an even count, the smaller of the two central values."""
    vals = sorted(values)
    if not vals:
        raise ValueError("median of an empty sequence")
    return vals[(len(vals) + 1) // 2 - 1]


def assigned_timestamp(world: World, x, y) -> int:
    """Timestamp of the earliest self-ancestor z of ``y`` with x <= z."""
    if not world.is_ancestor(x, y):
        raise NotAnAncestor(f"{world.name(x)} is not an ancestor of {world.name(y)}")
    k = world._k
    a = world.ix(x)
    z = world.ix(y)
    while True:
        sp = k.self_parent(z)
        if sp < 0 or not k.is_anc(a, sp):
            return world.events[z].timestamp
        z = sp


class Consensus:
    """Settled rounds and their unique famous witnesses for one world."""

    def __init__(self, world: World, params: ProtocolParams):
        self.world = world
        self.params = params
        self.elections = Elections.of(world, params)
        self.ufws: list[dict[int, bytes]] = []
        for i in range(world.max_round + 1):
            if not world.witnesses_in_round(i):
                break
            try:
                self.ufws.append(self.elections.unique_famous_witnesses(i))
            except Unsettled:
                break

    @property
    def settled_rounds(self) -> int:
        """Rounds ``0 .. settled_rounds-1`` have every witness's fame decided."""
        return len(self.ufws)

    def round_received(self, x) -> int | None:
        k = self.world._k
        a = self.world.ix(x)
        for i in range(k.round(a), self.settled_rounds):
            u = self.ufws[i]
            if u and all(k.is_anc(a, self.world.index[w]) for w in u.values()):
                return i
        return None

    def consensus_timestamp(self, x) -> int | None:
        i = self.round_received(x)
        if i is None:
            return None
        return median_lower(assigned_timestamp(self.world, x, u) for u in self.ufws[i].values())

    def report(self) -> OrderReport:
        rows = []
        unsettled = []
        for e in self.world.events:
            i = self.round_received(e.id)
            if i is None:
                reason = ("fame-pending" if self.world.round_of(e.id) >= self.settled_rounds
                          else "not-received")
                unsettled.append((e.id, reason))
                continue
            ts = median_lower(assigned_timestamp(self.world, e.id, u)
                              for u in self.ufws[i].values())
            rows.append((i, ts, e.id))
        rows.sort()
        settled = [ConsensusEntry(eid, i, ts, n) for n, (i, ts, eid) in enumerate(rows)]
        return OrderReport(
            settled=settled,
            unsettled=unsettled,
            settled_rounds=self.settled_rounds,
            empty_rounds=[i for i, u in enumerate(self.ufws) if not u],
            max_round=self.world.max_round,
        )


def round_received(world, params, x):
    return Consensus(world, params).round_received(x)


def consensus_timestamp(world, params, x):
    return Consensus(world, params).consensus_timestamp(x)


def consensus_order(world, params) -> OrderReport:
    return Consensus(world, params).report()
