"""Deterministic seeded gossip simulator with Byzantine adversaries.

Every step one (sender, receiver) pair syncs: the receiver learns the
sender's latest event and its missing ancestors, then creates one event
whose self-parent is its own latest event and whose other-parent is the
event it was sent. A fairness window ``K`` forces every ordered pair of
honest peers to sync at least once in any ``K`` consecutive steps.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .events import Event, HashgraphError, supermajor
from .world import ProtocolParams, World

RNG_NAME = "numpy-pcg64"
# independent streams, PCG64(seed) jumped k times, so that replaying a
# recorded schedule reproduces payloads and delays exactly
SCHEDULE, NETWORK, PAYLOAD = 0, 1, 2


class ConfigError(HashgraphError):
    pass


class SelfSync(HashgraphError):
    pass


@dataclass(frozen=True)
class AdversarySpec:
    """Behaviour of the dishonest peers (or, for ``delayer``, of the network).

    forker: each dishonest peer keeps ``branches`` parallel self-chains and
        shows receiver ``r`` branch ``r % branches``.
    equivocating-gossiper: like forker, but branch ``b`` is shown to the
        peers in ``audience[b]`` (unlisted receivers see branch 0).
    delayer: every sync delivers the sender's latest event as of up to
        ``max_delay`` steps earlier.
    """

    kind: str
    branches: int = 2
    audience: tuple[tuple[int, ...], ...] = ()
    max_delay: int = 0

    KINDS = ("forker", "equivocating-gossiper", "delayer")

    @classmethod
    def parse(cls, text: str) -> "AdversarySpec":
        """Parse ``kind[:key=value,...]``, e.g. ``forker:branches=3``.

        Audience partitions use ``audience=0+2/1+3``.
        """
        kind, _, rest = text.partition(":")
        kw = {}
        for item in filter(None, rest.split(",")):
            key, _, val = item.partition("=")
            key = key.strip().replace("-", "_")
            if key == "audience":
                kw[key] = tuple(tuple(int(p) for p in part.split("+") if p)
                                for part in val.split("/"))
            elif key in ("branches", "max_delay"):
                kw[key] = int(val)
            else:
                raise ConfigError(f"unknown adversary parameter {key!r}")
        return cls(kind.strip(), **kw)

    def format(self) -> str:
        if self.kind == "delayer":
            return f"delayer:max_delay={self.max_delay}"
        text = f"{self.kind}:branches={self.branches}"
        if self.audience:
            text += ",audience=" + "/".join("+".join(map(str, a)) for a in self.audience)
        return text


@dataclass(frozen=True)
class SimConfig:
    n_peers: int = 4
    honest: tuple[int, ...] | None = None
    seed: int = 0
    d: int = 1
    c: int = 4
    policy: str = "uniform"
    weights: tuple[float, ...] = ()
    trace: tuple[tuple[int, int], ...] = ()
    fairness_window: int | None = None
    adversary: AdversarySpec | None = None
    max_steps: int = 100_000
    target_round: int | None = None

    def __post_init__(self):
        if self.honest is None:
            object.__setattr__(self, "honest", tuple(range(self.n_peers)))
        object.__setattr__(self, "honest", tuple(sorted(set(self.honest))))
        if self.fairness_window is None:
            object.__setattr__(self, "fairness_window", 8 * self.n_peers ** 2)
        self.validate()

    @property
    def params(self) -> ProtocolParams:
        return ProtocolParams(self.n_peers, self.d, self.c)

    @property
    def dishonest(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.n_peers) if p not in self.honest)

    def validate(self) -> None:
        try:
            self.params
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if any(not 0 <= p < self.n_peers for p in self.honest):
            raise ConfigError("honest peer outside [0, peers)")
        if not supermajor(len(self.honest), self.n_peers):
            raise ConfigError(f"{len(self.honest)} honest of {self.n_peers} peers is not a supermajority")
        if self.policy not in ("uniform", "skewed", "scripted"):
            raise ConfigError(f"unknown sync policy {self.policy!r}")
        if self.policy == "skewed" and (len(self.weights) != self.n_peers or min(self.weights) <= 0):
            raise ConfigError("skewed policy needs one positive weight per peer")
        if self.fairness_window < 1:
            raise ConfigError("fairness window must be positive")
        if self.policy == "scripted":
            for s, r in self.trace:
                if not (0 <= s < self.n_peers and 0 <= r < self.n_peers):
                    raise ConfigError(f"trace pair ({s}, {r}) outside peer range")
        adv = self.adversary
        if adv is not None:
            if adv.kind not in AdversarySpec.KINDS:
                raise ConfigError(f"unknown adversary kind {adv.kind!r}")
            if adv.kind == "delayer":
                if not 0 <= adv.max_delay < self.fairness_window:
                    raise ConfigError("delayer max_delay must be in [0, fairness_window)")
            else:
                if not self.dishonest:
                    raise ConfigError(f"{adv.kind} adversary needs at least one dishonest peer")
                if adv.branches < 2:
                    raise ConfigError("a forking adversary needs at least two branches")
                if adv.kind == "equivocating-gossiper" and len(adv.audience) > adv.branches:
                    raise ConfigError("more audience groups than branches")
        if self.target_round is None and self.policy != "scripted" and self.max_steps <= 0:
            raise ConfigError("no stop condition")


class Rng:
    """Seeded PCG64 stream with unbiased bounded draws by rejection."""

    def __init__(self, seed: int, stream: int = 0):
        bg = np.random.PCG64(seed)
        self._bg = bg.jumped(stream) if stream else bg

    def raw(self) -> int:
        return int(self._bg.random_raw())

    def below(self, n: int) -> int:
        limit = (1 << 64) - (1 << 64) % n
        while True:
            r = self.raw()
            if r < limit:
                return r % n

    def uniform(self) -> float:
        return (self.raw() >> 11) * 2.0 ** -53

    def weighted(self, weights, exclude=None) -> int:
        items = [(i, w) for i, w in enumerate(weights) if i != exclude]
        total = sum(w for _, w in items)
        u = self.uniform() * total
        for i, w in items:
            u -= w
            if u < 0:
                return i
        return items[-1][0]


@dataclass
class SimState:
    config: SimConfig
    rng: Rng
    net_rng: Rng
    payload_rng: Rng
    worlds: list[World]
    global_world: World
    heads: list[list[bytes]]
    clock: list[int]
    spawn: list[Event] = field(default_factory=list)
    trace: list[tuple[int, int]] = field(default_factory=list)
    steps: int = 0
    made: list[int] = field(default_factory=list)
    known: list[int] = field(default_factory=list)
    ganc: list[int] = field(default_factory=list)
    head_history: list[list[tuple[int, bytes]]] = field(default_factory=list)
    last_sync: dict[tuple[int, int], int] = field(default_factory=dict)
    forced_steps: int = 0

    @property
    def n_peers(self) -> int:
        return self.config.n_peers

    def is_honest(self, p: int) -> bool:
        return p in self.config.honest


def init(config: SimConfig) -> SimState:
    n = config.n_peers
    sim = SimState(
        config=config,
        rng=Rng(config.seed, SCHEDULE),
        net_rng=Rng(config.seed, NETWORK),
        payload_rng=Rng(config.seed, PAYLOAD),
        worlds=[World(n) for _ in range(n)],
        global_world=World(n),
        heads=[[] for _ in range(n)],
        clock=[0] * n,
        made=[0] * n,
        known=[0] * n,
        head_history=[[] for _ in range(n)],
    )
    for a in config.honest:
        for b in config.honest:
            if a != b:
                sim.last_sync[(a, b)] = -1
    for p in range(n):
        e = Event.create(p, None, None, sim.clock[p], _payload(sim))
        sim.clock[p] += 1
        _spawn(sim, p, e)
        sim.heads[p] = [e.id]
    return sim


def _payload(sim: SimState) -> bytes:
    return struct.pack(">Q", sim.payload_rng.raw())


def _spawn(sim: SimState, p: int, e: Event) -> None:
    g = sim.global_world.insert(e)
    if e.is_initial:
        sim.ganc.append(1 << g)
    else:
        gi = sim.global_world.index
        sim.ganc.append(sim.ganc[gi[e.self_parent]] | sim.ganc[gi[e.other_parent]] | (1 << g))
    sim.spawn.append(e)
    sim.worlds[p].insert(e)
    sim.known[p] |= 1 << g
    sim.made[p] += 1
    sim.head_history[p].append((g, e.id))


def _adversarial(sim: SimState, p: int) -> bool:
    adv = sim.config.adversary
    return adv is not None and adv.kind != "delayer" and not sim.is_honest(p)


def _shown_head(sim: SimState, sender: int, receiver: int) -> bytes:
    adv = sim.config.adversary
    heads = sim.heads[sender]
    if _adversarial(sim, sender):
        if adv.kind == "forker":
            b = receiver % adv.branches
        else:
            b = next((k for k, group in enumerate(adv.audience) if receiver in group), 0)
        return heads[b] if b < len(heads) else heads[0]
    if adv is not None and adv.kind == "delayer" and adv.max_delay:
        delay = sim.net_rng.below(adv.max_delay + 1)
        cutoff = len(sim.spawn) - 1 - delay
        for g, eid in reversed(sim.head_history[sender]):
            if g <= cutoff:
                return eid
        return sim.head_history[sender][0][1]
    return heads[-1]


def sync(sim: SimState, sender: int, receiver: int) -> SimState:
    if sender == receiver:
        raise SelfSync(f"peer {sender} cannot sync with itself")
    shown = _shown_head(sim, sender, receiver)
    gw = sim.global_world
    world = sim.worlds[receiver]
    missing = sim.ganc[gw.index[shown]] & ~sim.known[receiver]
    sim.known[receiver] |= missing
    while missing:
        low = missing & -missing
        world.insert(sim.spawn[low.bit_length() - 1])
        missing ^= low

    heads = sim.heads[receiver]
    adversarial = _adversarial(sim, receiver)
    b = (sim.made[receiver] - 1) % sim.config.adversary.branches if adversarial else len(heads) - 1
    # a branch index past the end opens a new branch off the initial event
    self_parent = heads[b] if b < len(heads) else sim.head_history[receiver][0][1]
    e = Event.create(receiver, self_parent, shown, sim.clock[receiver], _payload(sim))
    sim.clock[receiver] += 1
    _spawn(sim, receiver, e)
    if b < len(heads):
        heads[b] = e.id
    else:
        heads.append(e.id)
    sim.trace.append((sender, receiver))
    if (sender, receiver) in sim.last_sync:
        sim.last_sync[(sender, receiver)] = sim.steps
    sim.steps += 1
    return sim


def _forced_pair(sim: SimState):
    """Earliest-deadline honest pair, if the fairness window requires it now."""
    if not sim.last_sync:
        return None
    K = sim.config.fairness_window
    s = sim.steps
    due = sorted((last + K, pair) for pair, last in sim.last_sync.items())
    for k, (deadline, _) in enumerate(due, 1):
        if deadline - s + 1 <= k:
            return due[0][1]
        if deadline - s + 1 > len(due):
            break
    return None


def _choose_pair(sim: SimState) -> tuple[int, int]:
    cfg = sim.config
    rng = sim.rng
    n = cfg.n_peers
    if cfg.policy == "skewed":
        s = rng.weighted(cfg.weights)
        r = rng.weighted(cfg.weights, exclude=s)
        return s, r
    s = rng.below(n)
    r = rng.below(n - 1)
    if r >= s:
        r += 1
    return s, r


def step(sim: SimState) -> SimState:
    cfg = sim.config
    if cfg.policy == "scripted":
        sender, receiver = cfg.trace[sim.steps]
        return sync(sim, sender, receiver)
    pair = _forced_pair(sim)
    if pair is not None:
        sim.forced_steps += 1
    else:
        pair = _choose_pair(sim)
    return sync(sim, *pair)


def done(sim: SimState) -> bool:
    cfg = sim.config
    if cfg.policy == "scripted" and sim.steps >= len(cfg.trace):
        return True
    if sim.steps >= cfg.max_steps:
        return True
    if cfg.target_round is None:
        return False
    return all(sim.global_world.round_of(sim.heads[p][-1]) >= cfg.target_round
               for p in cfg.honest)


def run(sim: SimState, until_step: int | None = None) -> SimState:
    """Step until the stop condition (or ``until_step`` steps) is reached."""
    while not done(sim) and (until_step is None or sim.steps < until_step):
        step(sim)
    return sim


def simulate(config: SimConfig) -> SimState:
    return run(init(config))


def local_world(sim: SimState, p: int) -> World:
    return sim.worlds[p]


def global_world(sim: SimState) -> World:
    return sim.global_world


def prefix_world(sim: SimState, n_events: int) -> World:
    """Global world as it stood after the first ``n_events`` spawns."""
    return World.from_events(sim.n_peers, sim.spawn[:n_events])


# audits ------------------------------------------------------------------

def fairness_violations(trace, honest, K: int) -> list[tuple[int, int, int]]:
    """(sender, receiver, step) for every honest pair gap longer than ``K``."""
    last = {(a, b): -1 for a in honest for b in honest if a != b}
    out = []
    for t, pair in enumerate(trace):
        if pair in last:
            if t - last[pair] > K:
                out.append((*pair, t))
            last[pair] = t
    end = len(trace)
    for pair, t in last.items():
        if end - t > K:
            out.append((*pair, end))
    return out


def spawn_violations(sim: SimState) -> list[str]:
    """Check injectivity, parents-first, honest fork-freedom and no orphans."""
    out = []
    seen: set[bytes] = set()
    for k, e in enumerate(sim.spawn):
        if e.id in seen:
            out.append(f"spawn_inj: {e.short()} spawned twice")
        if not e.is_initial and not (e.self_parent in seen and e.other_parent in seen):
            out.append(f"spawn_parent: parent of {e.short()} spawned later")
        seen.add(e.id)
    for a, b in sim.global_world.honest_forks(sim.config.honest):
        out.append(f"spawn_forks: honest fork {a.hex()[:8]} / {b.hex()[:8]}")
    for p, w in enumerate(sim.worlds):
        for e in w.events:
            if e.id not in seen:
                out.append(f"no_orphans: {e.short()} in peer {p} world but never spawned")
    return out


def broadcast_delays(sim: SimState) -> dict[bytes, int | None]:
    """Spawn steps from each honest event x to the first y in whose ancestry
    x has reached every honest peer (some z by that peer with x <= z <= y).

    ``None`` marks events for which the run ended before that happened.
    """
    n = len(sim.spawn)
    gi = sim.global_world.index
    children: list[list[int]] = [[] for _ in range(n)]
    cmask = [0] * sim.n_peers
    for g, e in enumerate(sim.spawn):
        cmask[e.creator] |= 1 << g
        if not e.is_initial:
            children[gi[e.self_parent]].append(g)
            children[gi[e.other_parent]].append(g)
    desc = [0] * n
    for g in range(n - 1, -1, -1):
        m = 1 << g
        for ch in children[g]:
            m |= desc[ch]
        desc[g] = m
    honest = sim.config.honest
    out: dict[bytes, int | None] = {}
    for g, e in enumerate(sim.spawn):
        if e.creator not in honest:
            continue
        out[e.id] = None
        for y in _bits(desc[g]):
            if all(sim.ganc[y] & cmask[a] & desc[g] for a in honest):
                out[e.id] = y - g
                break
    return out


def _bits(mask):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
