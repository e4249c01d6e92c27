"""Machine-checked properties and invariants over a world.

Every ``check_*`` function returns a list of human-readable
counterexamples; an empty list means the property held on every instance
examined. Quantification is exhaustive over the events or witnesses of the
world unless a docstring says otherwise.
"""
from __future__ import annotations

from .elections import Elections
from .events import supermajor
from .ordering import Consensus, OrderReport, assigned_timestamp
from .world import ProtocolParams, World

MAX_REPORTED = 20


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GraphFacts:
    """Bitset snapshot of ancestry and strongly-seeing for one world."""

    def __init__(self, world: World):
        self.world = world
        k = world._k
        n = len(world)
        self.n = n
        self.creator = [e.creator for e in world.events]
        self.round = [k.round(x) for x in range(n)]
        self.anc = [0] * n
        self.anc_list = [k.ancestors(x) for x in range(n)]
        self.selfanc = [0] * n
        for x in range(n):
            m = 0
            for a in self.anc_list[x]:
                m |= 1 << a
            self.anc[x] = m
            sp = k.self_parent(x)
            self.selfanc[x] = (self.selfanc[sp] if sp >= 0 else 0) | (1 << x)
        self.desc = [0] * n
        for y in range(n):
            bit = 1 << y
            for a in self.anc_list[y]:
                self.desc[a] |= bit
        self.cmask = [0] * world.n_peers
        for x, p in enumerate(self.creator):
            self.cmask[p] |= 1 << x
        self.ss = [0] * n  # ss[y]: events strongly seen by y
        self.ss_list = [k.strongly_seen(y) for y in range(n)]
        for y in range(n):
            m = 0
            for x in self.ss_list[y]:
                m |= 1 << x
            self.ss[y] = m

    def creators(self, mask) -> int:
        return sum(1 for cm in self.cmask if mask & cm)

    def name(self, x) -> str:
        return self.world.name(self.world.events[x].id)


def _cap(out):
    return out[:MAX_REPORTED]


# core graph -------------------------------------------------------------

def check_partial_order(g: GraphFacts) -> list[str]:
    out = []
    for y in range(g.n):
        if not g.anc[y] >> y & 1:
            out.append(f"ancestor not reflexive at {g.name(y)}")
        for x in g.anc_list[y]:
            if x != y and g.anc[x] >> y & 1:
                out.append(f"ancestor not antisymmetric: {g.name(x)}, {g.name(y)}")
            if g.anc[x] & ~g.anc[y]:
                out.append(f"ancestor not transitive below {g.name(y)} via {g.name(x)}")
        if len(out) >= MAX_REPORTED:
            break
    return _cap(out)


def check_strong_seeing(g: GraphFacts) -> list[str]:
    """Strongly-sees implies strict ancestry, and is sticky both ways."""
    out = []
    for y in range(g.n):
        s = g.ss[y]
        bad = s & ~(g.anc[y] & ~(1 << y))
        if bad:
            out.append(f"strong-seeing(ancestor): {g.name(y)} strongly sees non-strict-ancestor {g.name(next(_bits(bad)))}")
        for x in g.ss_list[y]:
            if g.selfanc[x] & ~s:
                out.append(f"strong-seeing(self-ancestor): {g.name(y)} strongly sees {g.name(x)} but not all its self-ancestors")
        for z in g.anc_list[y]:
            if g.ss[z] & ~s:
                out.append(f"strong-seeing(descendant): {g.name(y)} misses events strongly seen by its ancestor {g.name(z)}")
        if len(out) >= MAX_REPORTED:
            break
    return _cap(out)


def check_fork_exclusion(g: GraphFacts, honest) -> list[str]:
    """No two strongly-seen events form a fork (in worlds fork-free on honest peers)."""
    if g.world.honest_forks(honest):
        return []
    seen = 0
    for y in range(g.n):
        seen |= g.ss[y]
    out = []
    for p, cm in enumerate(g.cmask):
        mine = list(_bits(seen & cm))
        for a, b in zip(mine, mine[1:]):
            if not g.selfanc[b] >> a & 1:
                out.append(f"fork-exclusion: strongly-seen fork {g.name(a)} / {g.name(b)} by peer {p}")
    return _cap(out)


def check_honest_forks(world: World, honest) -> list[str]:
    return [f"world_forks: honest fork {world.name(a)} / {world.name(b)}"
            for a, b in world.honest_forks(honest)]


# rounds -----------------------------------------------------------------

def check_rounds(g: GraphFacts, honest) -> list[str]:
    """Round bounds, monotonicity, honest witness uniqueness, round elimination
    and the later-round property."""
    out = []
    world = g.world
    k = world._k
    n_peers = world.n_peers
    wit = [k.witness(x) for x in range(g.n)]
    later_than = {}
    for y in range(g.n):
        e = world.events[y]
        r = g.round[y]
        if e.is_initial:
            if r != 0:
                out.append(f"initial event {g.name(y)} in round {r}")
        else:
            m = max(g.round[world.index[e.self_parent]], g.round[world.index[e.other_parent]])
            if not m <= r <= m + 1:
                out.append(f"round of {g.name(y)} is {r}, parents' max {m}")
        if r not in later_than:
            later_than[r] = sum(1 << x for x in range(g.n) if g.round[x] > r)
        # monotone: no ancestor in a later round
        bad = g.anc[y] & later_than[r]
        if bad:
            out.append(f"round not monotone: {g.name(next(_bits(bad)))} <= {g.name(y)}")
        # round elimination: a supermajority of round-i witnesses strongly seen for each i < r
        for i in range(r):
            ws = sum(1 << w for w in world._witnesses[i]) if i < len(world._witnesses) else 0
            if not supermajor(g.creators(ws & g.ss[y]), n_peers):
                out.append(f"round-elimination: round-{r} {g.name(y)} strongly sees too few round-{i} witnesses")
        # later-round property, only pairs in the same round can violate it
        for x in g.anc_list[y]:
            if g.round[x] != r:
                continue
            if supermajor(g.creators(g.desc[x] & g.ss[y]), n_peers):
                out.append(f"later-round: {g.name(y)} strongly sees a supermajority above {g.name(x)} in the same round")
        if len(out) >= MAX_REPORTED:
            return _cap(out)
    for p in honest:
        per_round = {}
        for x in world.by_creator[p]:
            if wit[x]:
                per_round[g.round[x]] = per_round.get(g.round[x], 0) + 1
        for r, cnt in per_round.items():
            if cnt > 1:
                out.append(f"honest peer {p} has {cnt} witnesses in round {r}")
    return _cap(out)


def check_round_agreement(reference: World, other: World) -> list[str]:
    """Shared events get the same round and witness flag in both worlds."""
    out = []
    for e in other.events:
        if e.id in reference:
            if (other.round_of(e.id), other.is_witness(e.id)) != (reference.round_of(e.id), reference.is_witness(e.id)):
                out.append(f"round of {other.name(e.id)} differs between worlds")
    return _cap(out)


# elections --------------------------------------------------------------

def check_elections(world: World, params: ProtocolParams) -> list[str]:
    """Yes-implies-ancestor, decision-vote agreement, propagation, consistency,
    no late fame, tally conservation and existence, over every (candidate,
    voter) witness pair."""
    el = Elections.of(world, params)
    k = world._k
    N = world.n_peers
    d, c = params.d, params.c
    out = []
    ws = world._witnesses
    name = lambda x: world.name(world.events[x].id)  # noqa: E731
    for i, cands in enumerate(ws):
        for x in cands:
            votes = el._ensure(x, world.max_round)
            decisions: dict[int, bool] = {}
            for y, (v, t, f) in votes.items():
                j = k.round(y)
                if v and not k.is_anc(x, y):
                    out.append(f"yes-implies-ancestor: {name(y)} votes yes on non-ancestor {name(x)}")
                if j > i + d and t + f != len(el.electors_ix(y)):
                    out.append(f"tally: {name(y)} on {name(x)} counts {t}+{f} of {len(el.electors_ix(y))} electors")
                beta = el._decision(x, y)
                if beta is not None:
                    decisions[y] = beta
                if j > i + d and (j - i) % c and not k.is_anc(x, y) and beta is not False:
                    out.append(f"no-late-fame: {name(y)} does not decide no on non-ancestor {name(x)}")
            if len(set(decisions.values())) > 1:
                out.append(f"consistency: conflicting decisions on {name(x)}")
            for y, beta in decisions.items():
                j = k.round(y)
                for other in ws[j]:
                    if votes[other][0] != beta:
                        out.append(f"decision-vote: {name(y)} decides {beta} on {name(x)} but {name(other)} votes {votes[other][0]}")
                for jj in range(j + 1, len(ws)):
                    if (jj - i) % c == 0:
                        continue
                    for z in ws[jj]:
                        if decisions.get(z) != beta:
                            out.append(f"propagation: {name(z)} does not decide {beta} on {name(x)} after {name(y)}")
            if len(out) >= MAX_REPORTED:
                return _cap(out)
    for i in range(len(ws)):
        if i + d + 2 < len(ws) and ws[i + d + 2]:
            if not any(el.fame(world.events[x].id) for x in ws[i]):
                out.append(f"existence: round {i} has no famous witness")
    return _cap(out)


def check_fairness(world: World, params: ProtocolParams, rounds: int | None = None) -> list[str]:
    """Famous-witness creators of every settled round form a supermajority."""
    cons = Consensus(world, params)
    el = cons.elections
    out = []
    upto = cons.settled_rounds if rounds is None else min(rounds, cons.settled_rounds)
    for i in range(upto):
        creators = {world.get(w).creator for w in world.witnesses_in_round(i) if el.fame(w)}
        if not supermajor(len(creators), world.n_peers):
            out.append(f"fairness: round {i} famous witnesses on only {len(creators)} peers")
    return out


# ordering ---------------------------------------------------------------

def check_order(world: World, params: ProtocolParams, report: OrderReport | None = None,
                honest=None) -> list[str]:
    cons = Consensus(world, params)
    rep = report or cons.report()
    out = []
    keys = [(e.round_received, e.consensus_ts, e.event) for e in rep.settled]
    if keys != sorted(keys) or len(set(keys)) != len(keys):
        out.append("order: settled list not strictly sorted")
    if [e.order_index for e in rep.settled] != list(range(len(rep.settled))):
        out.append("order: indices not dense")
    ids = [e.event for e in rep.settled] + [u for u, _ in rep.unsettled]
    if sorted(ids) != sorted(e.id for e in world.events):
        out.append("order: settled and unsettled do not partition the world")
    pos = rep.position()
    for e in rep.settled:
        x = e.event
        if e.round_received < world.round_of(x):
            out.append(f"order: {world.name(x)} received before its own round")
        stamps = {}
        for creator, u in cons.ufws[e.round_received].items():
            stamps[creator] = assigned_timestamp(world, x, u)
        if e.consensus_ts not in stamps.values():
            out.append(f"order: consensus timestamp of {world.name(x)} not an assigned timestamp")
        if honest is not None:
            hs = [t for p, t in stamps.items() if p in honest]
            if not hs or not (min(hs) <= e.consensus_ts <= max(hs)):
                out.append(f"order: consensus timestamp of {world.name(x)} not bracketed by honest timestamps")
        ev = world.get(x)
        for parent in (ev.self_parent, ev.other_parent):
            if parent is not None and parent in pos and pos[parent].round_received > e.round_received:
                out.append(f"order: round received not monotone at {world.name(x)}")
            if parent is not None and parent not in pos:
                out.append(f"order: {world.name(x)} settled before its parent")
        if len(out) >= MAX_REPORTED:
            break
    return _cap(out)


def check_prefix(earlier: OrderReport, later: OrderReport) -> list[str]:
    """Earlier settled entries keep their values and relative order later."""
    out = []
    pos = later.position()
    last = -1
    for e in earlier.settled:
        f = pos.get(e.event)
        if f is None:
            out.append(f"prefix: {e.event.hex()[:8]} no longer settled")
            continue
        if (f.round_received, f.consensus_ts) != (e.round_received, e.consensus_ts):
            out.append(f"prefix: {e.event.hex()[:8]} changed from {(e.round_received, e.consensus_ts)} to {(f.round_received, f.consensus_ts)}")
        if f.order_index <= last:
            out.append(f"prefix: {e.event.hex()[:8]} moved")
        last = f.order_index
    return _cap(out)


def check_agreement(a: OrderReport, b: OrderReport) -> list[str]:
    """Events settled in both reports get equal values and relative order."""
    pa, pb = a.position(), b.position()
    common = [e for e in a.settled if e.event in pb]
    out = []
    for e in common:
        f = pb[e.event]
        if (e.round_received, e.consensus_ts) != (f.round_received, f.consensus_ts):
            out.append(f"agreement: {e.event.hex()[:8]} differs")
    order_b = [e.event for e in b.settled if e.event in pa]
    if [e.event for e in common] != order_b:
        out.append("agreement: relative order differs")
    return _cap(out)


def check_world(world: World, params: ProtocolParams, honest=None) -> dict[str, list[str]]:
    """Run every log-checkable suite; returns suite name -> counterexamples."""
    honest = range(world.n_peers) if honest is None else honest
    g = GraphFacts(world)
    results = {
        "world_forks": check_honest_forks(world, honest),
        "partial_order": check_partial_order(g),
        "strong_seeing": check_strong_seeing(g),
        "fork_exclusion": check_fork_exclusion(g, honest),
        "rounds": check_rounds(g, honest),
    }
    if not results["world_forks"]:
        results["elections"] = check_elections(world, params)
        results["order"] = check_order(world, params)
    return results
