"""Random event DAGs for oracle and property tests."""
import random

from hashgraph import Event


def random_events(seed, max_events=200, n_peers=None, fork_rate=0.05, forkers=None):
    """Parents-first list of events over ``n_peers`` creators.

    Each new event picks a creator and usually extends its newest event;
    with probability ``fork_rate`` it extends an older one instead, forking.
    ``forkers`` restricts which creators may fork (default: all).
    """
    rng = random.Random(seed)
    n = n_peers or rng.randint(2, 7)
    size = rng.randint(n, max_events)
    events = [Event.create(p, None, None, 0, rng.randbytes(4)) for p in range(n)]
    chains = [[e] for e in events]
    while len(events) < size:
        p = rng.randrange(n)
        chain = chains[p]
        may_fork = forkers is None or p in forkers
        sp = chain[-1] if not may_fork or rng.random() >= fork_rate else rng.choice(chain)
        q = rng.choice([r for r in range(n) if r != p])
        op = rng.choice(chains[q][-4:])
        e = Event.create(p, sp.id, op.id, sp.timestamp + 1, rng.randbytes(2))
        events.append(e)
        chain.append(e)
    return n, events


def honest_events(seed, max_events=60, n_peers=None):
    return random_events(seed, max_events, n_peers, fork_rate=0.0)
