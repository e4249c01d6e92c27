"""Votes, tallies, decisions, fame and unique famous witnesses."""
import itertools

import pytest
from hypothesis import given, settings, strategies as st

from conftest import fig1_world
from hashgraph import Event, coin
from hashgraph.elections import (Elections, NotAWitness, RoundOrderViolation, Unsettled,
                                 election_tally, elector, fame, tally_vote, vote)
from hashgraph.oracle import Oracle
from hashgraph.simnet import AdversarySpec, SimConfig, simulate
from hashgraph.world import ProtocolParams, World

P4 = ProtocolParams(4, 1, 4)


def extend_round_robin(world, until_round):
    """Keep gossiping round-robin until some event reaches ``until_round``."""
    heads = {}
    for e in world.events:
        heads[e.creator] = e
    pairs = itertools.cycle([(s, r) for s in range(world.n_peers) for r in range(world.n_peers) if s != r])
    while True:
        s, r = next(pairs)
        e = Event.create(r, heads[r].id, heads[s].id, heads[r].timestamp + 1, b"")
        world.insert(e)
        heads[r] = e
        if world.round_of(e.id) >= until_round:
            return e


def test_fig1_electors(fig1):
    w, ids = fig1
    assert elector(w, 0, ids["B1"], ids["B5"])
    assert not elector(w, 0, ids["A1"], ids["B4"])
    assert not elector(w, 1, ids["B1"], ids["B5"])
    assert Oracle(w.events, 4).strongly_sees(ids["B5"], ids["B1"])


def test_fig1_votes_and_undecided(fig1):
    w, ids = fig1
    assert vote(w, P4, ids["A1"], ids["B5"]) is True
    assert fame(w, P4, ids["A1"]) is None
    with pytest.raises(NotAWitness):
        vote(w, P4, ids["B3"], ids["B5"])
    with pytest.raises(RoundOrderViolation):
        vote(w, P4, ids["B5"], ids["A1"])
    with pytest.raises(Unsettled):
        Elections(w, P4).unique_famous_witnesses(0)


def test_fig1_extended_tally(kernel):
    w, ids = fig1_world(kernel)
    z = extend_round_robin(w, 2)
    assert w.is_witness(z.id)
    el = Elections(w, P4)
    t, f = el.election_tally(ids["A1"], 1, z.id)
    electors = el.electors(z.id)
    assert ids["B5"] in electors and el.vote(ids["A1"], ids["B5"])
    o = Oracle(w.events, 4)
    assert (t, f) == o.tally(ids["A1"], z.id, 1, 1, 4)
    assert (t, f) == (len(electors), 0)


def test_zero_electors_tally(fig1):
    w, ids = fig1
    # B4 is round 0, so it has no round-1 electors
    assert Elections(w, P4).election_tally(ids["A1"], 1, ids["B4"]) == (0, 0)


def test_tie_votes_yes_and_coin_rounds():
    eid = Event.create(0, None, None, 0, b"").id
    assert tally_vote(2, 0, 0, 4, 4, eid) is True
    assert tally_vote(3, 1, 2, 4, 4, eid) is False
    assert tally_vote(4, 3, 1, 4, 4, eid) is True
    assert tally_vote(4, 0, 3, 4, 4, eid) is False
    assert tally_vote(4, 2, 2, 4, 4, eid) is coin(eid)


def hidden_candidate_world():
    """Peers 0-2 gossip among themselves; peer 3's initial event is withheld."""
    trio = [(s, r) for s in range(3) for r in range(3) if s != r]
    cfg = SimConfig(n_peers=4, seed=0, policy="scripted", trace=tuple(trio * 12))
    sim = simulate(cfg)
    return sim.global_world, sim.spawn[3].id, cfg.params


def test_hidden_candidate_is_not_famous():
    w, d1, params = hidden_candidate_world()
    el = Elections(w, params)
    rec = el.fame_record(d1)
    assert rec.decided is False and rec.decision_round == 2
    y = w.get(rec.decider).id
    electors = el.electors(y)
    assert el.election_tally(d1, 1, y) == (0, len(electors))


def test_well_gossiped_candidate_is_famous_at_first_chance():
    cfg = SimConfig(n_peers=4, seed=1, target_round=5)
    w = simulate(cfg).global_world
    el = Elections(w, cfg.params)
    r1 = w.witnesses_in_round(1)
    x = next(x for x in w.witnesses_in_round(0) if all(w.is_ancestor(x, y) for y in r1))
    for y in w.witnesses_in_round(2):
        assert el.decide(x, y) is True
    assert el.fame_record(x).decision_round == 2


def test_decide_none_in_early_and_coin_rounds():
    cfg = SimConfig(n_peers=4, seed=3, target_round=6)
    w = simulate(cfg).global_world
    el = Elections(w, cfg.params)
    x = w.witnesses_in_round(0)[0]
    for y in w.witnesses_in_round(1) + w.witnesses_in_round(4):
        assert el.decide(x, y) is None


def test_unique_famous_witness_tie_break():
    checked = 0
    for seed in range(10):
        cfg = SimConfig(n_peers=4, honest=(0, 1, 2), seed=seed, adversary=AdversarySpec("forker"),
                        target_round=6)
        w = simulate(cfg).global_world
        el = Elections(w, cfg.params)
        for i in range(3):
            by3 = sorted(x for x in w.witnesses_in_round(i) if el.fame(x) and w.get(x).creator == 3)
            if len(by3) > 1:
                assert el.unique_famous_witnesses(i)[3] == by3[0]
                checked += 1
    assert checked, "forker never had two famous witnesses in one round"


def test_explain_layout():
    cfg = SimConfig(n_peers=4, seed=1, target_round=5)
    w = simulate(cfg).global_world
    el = Elections(w, cfg.params)
    x = w.witnesses_in_round(0)[0]
    rec = el.explain(x)
    assert rec["candidate"] == x.hex() and rec["round"] == 0
    assert rec["fame"] is el.fame(x)
    for r, y, t, f in rec["tallies"]:
        assert el.election_tally(x, r - 1, bytes.fromhex(y)) == (t, f)


def _sim_world(seed, forker):
    n = 4 + seed % 4
    honest = tuple(range(n - 1)) if forker else None
    cfg = SimConfig(n_peers=n, honest=honest, seed=seed, d=1 + seed % 2, c=4 + seed % 2,
                    adversary=AdversarySpec("forker") if forker else None, target_round=5)
    return simulate(cfg).global_world, cfg.params


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**4), st.booleans())
def test_elections_match_recursive_oracle(seed, forker):
    w, params = _sim_world(seed, forker)
    el = Elections(w, params)
    o = Oracle(w.events, w.n_peers)
    d, c = params.d, params.c
    for i in range(w.max_round + 1):
        for x in w.witnesses_in_round(i):
            for j in range(i + 1, w.max_round + 1):
                for y in w.witnesses_in_round(j):
                    assert el.vote(x, y) == o.vote(x, y, d, c)
                    assert el.decide(x, y) == o.decide(x, y, d, c)
