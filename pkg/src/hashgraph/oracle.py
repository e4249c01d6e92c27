"""Definitional re-evaluation of the graph relations, rounds and votes.

Nothing here touches the kernel: ancestry is recomputed from parent links
and every relation follows its definition by enumeration. Used to
cross-check the fast path.
"""
from __future__ import annotations

import numpy as np

from .events import coin, supermajor


class Oracle:
    def __init__(self, events, n_peers: int):
        self.n_peers = n_peers
        self.events = {e.id: e for e in events}
        self.order = [e.id for e in events]
        self._anc: dict[bytes, frozenset] = {}
        self._selfanc: dict[bytes, frozenset] = {}
        for eid in self.order:
            e = self.events[eid]
            if e.is_initial:
                self._anc[eid] = frozenset([eid])
                self._selfanc[eid] = frozenset([eid])
            else:
                self._anc[eid] = self._anc[e.self_parent] | self._anc[e.other_parent] | {eid}
                self._selfanc[eid] = self._selfanc[e.self_parent] | {eid}
        self._round: dict[bytes, int] = {}
        self._votes: dict = {}
        self._observed: dict = {}

    def creator(self, x):
        return self.events[x].creator

    def is_ancestor(self, x, y):
        return x in self._anc[y]

    def is_self_ancestor(self, x, y):
        return x in self._selfanc[y]

    def is_fork(self, x, y):
        return (self.creator(x) == self.creator(y) and not self.is_self_ancestor(x, y)
                and not self.is_self_ancestor(y, x))

    def sees(self, y, x):
        if not self.is_ancestor(x, y):
            return False
        return not self.observes_fork(y, self.creator(x))

    def observes_fork(self, y, p):
        """Some pair of ancestors of ``y`` by ``p`` forms a fork (pairwise scan)."""
        key = (y, p)
        if key not in self._observed:
            mine = [z for z in self._anc[y] if self.creator(z) == p]
            self._observed[key] = any(self.is_fork(a, b) for a in mine for b in mine)
        return self._observed[key]

    def strongly_sees(self, y, x):
        creators = {self.creator(z) for z in self._anc[y]
                    if self.is_ancestor(x, z) and self.sees(z, x)}
        return supermajor(len(creators), self.n_peers)

    # rounds --------------------------------------------------------------

    def round(self, x):
        """Event-based round rule, evaluated in topological order."""
        if not self._round:
            for eid in self.order:
                e = self.events[eid]
                if e.is_initial:
                    self._round[eid] = 0
                    continue
                m = max(self._round[e.self_parent], self._round[e.other_parent])
                creators = {self.creator(w) for w in self._anc[eid]
                            if w != eid and self._round[w] == m and self.strongly_sees(eid, w)}
                self._round[eid] = m + 1 if supermajor(len(creators), self.n_peers) else m
        return self._round[x]

    def is_witness(self, x):
        e = self.events[x]
        return e.is_initial or self.round(x) > self.round(e.self_parent)

    def witness_rounds(self):
        """Original witness-based rule: advance on strongly-seen round-m witnesses."""
        rnd, wit = {}, {}
        for eid in self.order:
            e = self.events[eid]
            if e.is_initial:
                rnd[eid], wit[eid] = 0, True
                continue
            m = max(rnd[e.self_parent], rnd[e.other_parent])
            creators = {self.creator(w) for w in self._anc[eid]
                        if w != eid and rnd[w] == m and wit[w] and self.strongly_sees(eid, w)}
            rnd[eid] = m + 1 if supermajor(len(creators), self.n_peers) else m
            wit[eid] = rnd[eid] > rnd[e.self_parent]
        return rnd

    # voting --------------------------------------------------------------

    def witnesses(self, i):
        return [x for x in self.order if self.round(x) == i and self.is_witness(x)]

    def vote(self, x, y, d, c):
        """Recursive vote of witness ``y`` on witness ``x``'s fame."""
        key = (x, y, d, c)
        if key not in self._votes:
            self._votes[key] = self._vote(x, y, d, c)
        return self._votes[key]

    def _vote(self, x, y, d, c):
        i, j = self.round(x), self.round(y)
        assert self.is_witness(x) and self.is_witness(y) and i < j
        if j <= i + d:
            return self.is_ancestor(x, y)
        t, f = self.tally(x, y, j - 1, d, c)
        if (j - i) % c:
            return t >= f
        if 3 * t > 2 * self.n_peers:
            return True
        if 3 * f > 2 * self.n_peers:
            return False
        return coin(y)

    def tally(self, x, y, n, d, c):
        votes = [self.vote(x, w, d, c) for w in self.witnesses(n) if self.strongly_sees(y, w)]
        return sum(votes), len(votes) - sum(votes)

    def decide(self, x, y, d, c):
        i, j = self.round(x), self.round(y)
        if not (j > i + d and (j - i) % c):
            return None
        t, f = self.tally(x, y, j - 1, d, c)
        if 3 * t > 2 * self.n_peers:
            return True
        if 3 * f > 2 * self.n_peers:
            return False
        return None


def strongly_sees_oracle(world, y, x) -> bool:
    """Definitional strongly-sees over ``world.events``; no kernel state used."""
    return Oracle(world.events, world.n_peers).strongly_sees(_key(y), _key(x))


def strongly_sees_matrix(events, n_peers: int) -> np.ndarray:
    """``M[y, x]`` is True iff event ``y`` strongly sees event ``x``.

    Same definition as :meth:`Oracle.strongly_sees`, vectorised: ancestry
    and self-ancestry closures are rebuilt from parent links, fork
    observation is computed pairwise, and the intermediary count per
    creator is a boolean matrix product.
    """
    n = len(events)
    pos = {e.id: k for k, e in enumerate(events)}
    creator = np.array([e.creator for e in events], dtype=np.int64)
    anc = np.zeros((n, n), dtype=bool)       # anc[y, x]: x <= y
    selfanc = np.zeros((n, n), dtype=bool)
    for k, e in enumerate(events):
        anc[k, k] = selfanc[k, k] = True
        if not e.is_initial:
            sp, op = pos[e.self_parent], pos[e.other_parent]
            anc[k] |= anc[sp] | anc[op]
            selfanc[k] |= selfanc[sp]
    observed = np.zeros((n, n_peers), dtype=bool)  # y has a fork by p below it
    for p in range(n_peers):
        idx = np.flatnonzero(creator == p)
        if len(idx) < 2:
            continue
        sa = selfanc[np.ix_(idx, idx)]
        fork = ~sa & ~sa.T
        a = anc[:, idx].astype(np.int64)
        observed[:, p] = ((a @ fork.astype(np.int64)) * a).sum(axis=1) > 0
    sees = anc & ~observed[:, creator]                # sees[z, x]
    count = np.zeros((n, n), dtype=np.int64)
    a64 = anc.astype(np.float64)
    s64 = sees.astype(np.float64)
    for q in range(n_peers):
        idx = np.flatnonzero(creator == q)
        if len(idx):
            count += (a64[:, idx] @ s64[idx, :]) > 0
    return 3 * count > 2 * n_peers


def _key(x):
    return getattr(x, "id", x)
