"""Virtual voting: electors, tallies, votes, decisions and fame."""
from __future__ import annotations

from dataclasses import dataclass

from .events import HashgraphError, coin
from .world import ProtocolParams, World


class NotAWitness(HashgraphError):
    pass


class RoundOrderViolation(HashgraphError):
    pass


class Unsettled(HashgraphError):
    pass


@dataclass
class FameRecord:
    candidate: bytes
    decided: bool | None = None
    decider: bytes | None = None
    decision_round: int | None = None


def tally_vote(offset: int, t: int, f: int, n_peers: int, c: int, voter_id: bytes) -> bool:
    """Vote of a witness ``offset`` rounds past the candidate, given its tally.

    Regular rounds follow the majority, ties going to yes. Coin rounds keep a
    supermajor side and otherwise flip the voter's coin.
    """
    if offset % c:
        return t >= f
    if 3 * t > 2 * n_peers:
        return True
    if 3 * f > 2 * n_peers:
        return False
    return coin(voter_id)


class Elections:
    """Memoised fame elections over one (append-only) world.

    Votes, tallies and elector sets depend only on ancestry, so entries stay
    valid as the world grows; later witnesses are filled in on demand.
    """

    def __init__(self, world: World, params: ProtocolParams):
        self.world = world
        self.d = params.d
        self.c = params.c
        self.n = world.n_peers
        self._electors: dict[int, list[int]] = {}
        self._votes: dict[int, dict[int, tuple[bool, int, int]]] = {}
        self._fame: dict[int, FameRecord] = {}

    @classmethod
    def of(cls, world: World, params: ProtocolParams) -> "Elections":
        key = ("elections", params.d, params.c)
        ctx = world.cache.get(key)
        if ctx is None:
            ctx = world.cache[key] = cls(world, params)
        return ctx

    # helpers -------------------------------------------------------------

    def _witness_ix(self, x) -> int:
        k = self.world.ix(x)
        if not self.world._k.witness(k):
            raise NotAWitness(self.world.name(x))
        return k

    def _round(self, k: int) -> int:
        return self.world._k.round(k)

    def _round_witnesses(self, r: int) -> list[int]:
        ws = self.world._witnesses
        return ws[r] if 0 <= r < len(ws) else []

    def electors_ix(self, y: int) -> list[int]:
        got = self._electors.get(y)
        if got is None:
            k = self.world._k
            got = [w for w in self._round_witnesses(k.round(y) - 1) if k.stsees(y, w)]
            self._electors[y] = got
        return got

    def _ensure(self, x: int, upto: int) -> dict[int, tuple[bool, int, int]]:
        """Fill in votes on ``x`` for every witness in rounds up to ``upto``."""
        votes = self._votes.setdefault(x, {})
        k = self.world._k
        i = k.round(x)
        for r in range(i + 1, min(upto, self.world.max_round) + 1):
            for y in self._round_witnesses(r):
                if y in votes:
                    continue
                if r <= i + self.d:
                    votes[y] = (k.is_anc(x, y), 0, 0)
                    continue
                t = f = 0
                for w in self.electors_ix(y):
                    if votes[w][0]:
                        t += 1
                    else:
                        f += 1
                votes[y] = (tally_vote(r - i, t, f, self.n, self.c, self.world.events[y].id), t, f)
        return votes

    def _decision(self, x: int, y: int) -> bool | None:
        i, j = self._round(x), self._round(y)
        if j <= i + self.d or (j - i) % self.c == 0:
            return None
        _, t, f = self._ensure(x, j)[y]
        yes, no = 3 * t > 2 * self.n, 3 * f > 2 * self.n
        assert not (yes and no), "both tallies supermajor"
        if yes:
            return True
        if no:
            return False
        return None

    # public operations ---------------------------------------------------

    def elector(self, n: int, w, y) -> bool:
        return self.world.rwitness(n, w) and self.world.strongly_sees(y, w)

    def electors(self, y) -> list[bytes]:
        return [self.world.events[w].id for w in self.electors_ix(self._witness_ix(y))]

    def election_tally(self, candidate, n: int, y) -> tuple[int, int]:
        """Yeas and nays on ``candidate`` from the round-``n`` electors of ``y``."""
        x = self._witness_ix(candidate)
        yk = self.world.ix(y)
        if n <= self._round(x):
            raise RoundOrderViolation(f"no votes in round {n} on a round-{self._round(x)} candidate")
        k = self.world._k
        votes = self._ensure(x, n)
        t = f = 0
        for w in self._round_witnesses(n):
            if k.stsees(yk, w):
                if votes[w][0]:
                    t += 1
                else:
                    f += 1
        return t, f

    def vote(self, candidate, voter) -> bool:
        x, y = self._witness_ix(candidate), self._witness_ix(voter)
        if self._round(y) <= self._round(x):
            raise RoundOrderViolation(f"voter round {self._round(y)} <= candidate round {self._round(x)}")
        return self._ensure(x, self._round(y))[y][0]

    def decide(self, candidate, voter) -> bool | None:
        x, y = self._witness_ix(candidate), self._witness_ix(voter)
        return self._decision(x, y)

    def fame_record(self, candidate) -> FameRecord:
        x = self._witness_ix(candidate)
        rec = self._fame.get(x)
        if rec is not None and rec.decided is not None:
            return rec
        rec = FameRecord(self.world.events[x].id)
        i = self._round(x)
        for r in range(i + self.d + 1, self.world.max_round + 1):
            if (r - i) % self.c == 0:
                continue
            for y in self._round_witnesses(r):
                beta = self._decision(x, y)
                if beta is not None:
                    rec = FameRecord(rec.candidate, beta, self.world.events[y].id, r)
                    self._fame[x] = rec
                    return rec
        self._fame[x] = rec
        return rec

    def fame(self, candidate) -> bool | None:
        return self.fame_record(candidate).decided

    def unique_famous_witnesses(self, i: int) -> dict[int, bytes]:
        """Smallest-id famous round-``i`` witness per creator; raises Unsettled."""
        chosen: dict[int, bytes] = {}
        for w in self._round_witnesses(i):
            f = self.fame(self.world.events[w].id)
            if f is None:
                raise Unsettled(f"fame of round-{i} witness {self.world.name(self.world.events[w].id)} undecided")
            if f:
                e = self.world.events[w]
                if e.creator not in chosen or e.id < chosen[e.creator]:
                    chosen[e.creator] = e.id
        return chosen

    def explain(self, candidate) -> dict:
        """Per-round tallies seen by the candidate's voters, for election traces."""
        x = self._witness_ix(candidate)
        i = self._round(x)
        rec = self.fame_record(candidate)
        last = rec.decision_round if rec.decision_round is not None else self.world.max_round
        votes = self._ensure(x, last)
        tallies = []
        for r in range(i + self.d + 1, last + 1):
            for y in self._round_witnesses(r):
                _, t, f = votes[y]
                tallies.append([r, self.world.events[y].id.hex(), t, f])
        return {
            "candidate": self.world.events[x].id.hex(),
            "round": i,
            "tallies": tallies,
            "decider": rec.decider.hex() if rec.decider else None,
            "fame": rec.decided,
        }


# functional front-ends ---------------------------------------------------

def elector(world, n, w, y):
    return world.rwitness(n, w) and world.strongly_sees(y, w)


def election_tally(world, params, candidate, n, y):
    return Elections.of(world, params).election_tally(candidate, n, y)


def vote(world, params, candidate, voter):
    return Elections.of(world, params).vote(candidate, voter)


def decide(world, params, candidate, voter):
    return Elections.of(world, params).decide(candidate, voter)


def fame(world, params, candidate):
    return Elections.of(world, params).fame(candidate)


def unique_famous_witnesses(world, params, i):
    return Elections.of(world, params).unique_famous_witnesses(i)
