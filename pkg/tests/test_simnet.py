"""Gossip simulator: sync semantics, scheduling, adversaries and audits."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hashgraph.invariants import check_round_agreement
from hashgraph.simnet import (AdversarySpec, ConfigError, Rng, SelfSync, SimConfig, broadcast_delays,
                              fairness_violations, global_world, init, local_world, run, simulate,
                              spawn_violations, step, sync)


def test_init_creates_initial_events():
    sim = init(SimConfig(n_peers=4))
    w = global_world(sim)
    assert [e.creator for e in sim.spawn] == [0, 1, 2, 3]
    assert all(e.is_initial and w.round_of(e.id) == 0 for e in sim.spawn)
    assert all(e.timestamp == 0 for e in sim.spawn)


def test_sync_reproduces_cathy_and_dave():
    sim = init(SimConfig(n_peers=4, policy="scripted", trace=()))
    c1, d1 = sim.spawn[2], sim.spawn[3]
    sync(sim, 3, 2)
    c2 = sim.spawn[-1]
    assert (c2.creator, c2.self_parent, c2.other_parent, c2.timestamp) == (2, c1.id, d1.id, 1)
    sync(sim, 2, 3)
    d2 = sim.spawn[-1]
    assert (d2.creator, d2.self_parent, d2.other_parent) == (3, d1.id, c2.id)
    assert c1.id in local_world(sim, 3)


def test_self_sync_rejected():
    sim = init(SimConfig(n_peers=4))
    with pytest.raises(SelfSync):
        sync(sim, 1, 1)


@pytest.mark.parametrize("kwargs", [
    dict(n_peers=4, honest=(0, 1)),
    dict(n_peers=4, d=1, c=3),
    dict(n_peers=1),
    dict(n_peers=4, honest=(0, 1, 2), adversary=AdversarySpec("teleporter")),
    dict(n_peers=4, adversary=AdversarySpec("forker")),
    dict(n_peers=4, adversary=AdversarySpec("delayer", max_delay=500)),
    dict(n_peers=4, policy="skewed", weights=(1.0, 2.0)),
    dict(n_peers=4, fairness_window=0),
])
def test_config_errors(kwargs):
    with pytest.raises(ConfigError):
        SimConfig(**kwargs)


def test_three_of_four_honest_accepted():
    assert SimConfig(n_peers=4, honest=(0, 1, 2)).dishonest == (3,)


def test_adversary_spec_round_trip():
    for text in ("forker:branches=3", "equivocating-gossiper:branches=2,audience=0+2/1", "delayer:max_delay=7"):
        assert AdversarySpec.parse(text).format() == text
    with pytest.raises(ConfigError):
        AdversarySpec.parse("forker:colour=red")


def test_rng_is_pcg64():
    ref = np.random.PCG64(42)
    r = Rng(42)
    assert [r.raw() for _ in range(5)] == [int(ref.random_raw()) for _ in range(5)]
    assert all(0 <= Rng(s).below(7) < 7 for s in range(50))


def test_determinism():
    cfg = SimConfig(n_peers=5, seed=9, target_round=5, adversary=None)
    a, b = simulate(cfg), simulate(cfg)
    assert [e.id for e in a.spawn] == [e.id for e in b.spawn]
    assert a.trace == b.trace


def test_target_round_progress():
    sim = simulate(SimConfig(n_peers=4, seed=1, target_round=6))
    w = global_world(sim)
    assert sim.steps < sim.config.max_steps
    assert all(w.witnesses_in_round(r) for r in range(7))


def test_fairness_window_over_ten_thousand_steps():
    cfg = SimConfig(n_peers=4, seed=5, max_steps=10_000, fairness_window=24)
    sim = simulate(cfg)
    assert sim.steps == 10_000
    assert fairness_violations(sim.trace, cfg.honest, cfg.fairness_window) == []
    assert fairness_violations(sim.trace, cfg.honest, 3) != []  # the audit does bite


@pytest.mark.parametrize("adversary", [None, AdversarySpec("delayer", max_delay=9)])
def test_scripted_replay(adversary):
    cfg = SimConfig(n_peers=4, seed=3, target_round=4, policy="skewed", weights=(1, 2, 3, 4),
                    adversary=adversary)
    a = simulate(cfg)
    b = simulate(SimConfig(n_peers=4, seed=3, policy="scripted", trace=tuple(a.trace), adversary=adversary))
    assert [e.id for e in a.spawn] == [e.id for e in b.spawn]


def test_local_worlds_are_subsets_and_agree():
    sim = simulate(SimConfig(n_peers=4, seed=2, target_round=5))
    g = global_world(sim)
    for p in range(4):
        w = local_world(sim, p)
        assert all(e.id in g for e in w.events)
        assert check_round_agreement(g, w) == []


def test_honest_events_reach_everyone_within_window():
    cfg = SimConfig(n_peers=4, seed=6, max_steps=600, fairness_window=24)
    sim = simulate(cfg)
    K = cfg.fairness_window
    cutoff = 4 + sim.steps - K  # spawn index of the step K before the end
    for e in sim.spawn[:max(cutoff, 0)]:
        assert all(e.id in local_world(sim, p) for p in cfg.honest)
    delays = broadcast_delays(sim)
    early = [delays[e.id] for e in sim.spawn[:max(cutoff - 2 * K, 0)]]
    assert early and None not in early


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["forker", "equivocating-gossiper", "delayer", None]))
def test_spawn_axioms(seed, kind):
    adv = None
    honest = None
    if kind == "delayer":
        adv = AdversarySpec(kind, max_delay=10)
    elif kind:
        adv = AdversarySpec(kind, branches=2, audience=((0, 2), (1,)) if kind != "forker" else ())
        honest = (0, 1, 2)
    sim = simulate(SimConfig(n_peers=4, honest=honest, seed=seed, adversary=adv, target_round=4))
    assert spawn_violations(sim) == []
    for p in sim.config.honest:
        assert local_world(sim, p).honest_forks(sim.config.honest) == []


def test_forker_creates_forks_only_for_dishonest():
    cfg = SimConfig(n_peers=4, honest=(0, 1, 2), seed=0, adversary=AdversarySpec("forker"), target_round=5)
    sim = simulate(cfg)
    g = global_world(sim)
    assert g.forking_creators() == [3]
    assert g.honest_forks(cfg.honest) == []
    for p in cfg.honest:
        w = local_world(sim, p)
        chain = [w.events[x] for x in w.by_creator[p]]
        assert all(not w.is_fork(a.id, b.id) for a in chain for b in chain)


def test_step_and_until():
    sim = init(SimConfig(n_peers=4, seed=0, max_steps=50))
    step(sim)
    assert sim.steps == 1 and len(sim.spawn) == 5
    run(sim, until_step=10)
    assert sim.steps == 10
