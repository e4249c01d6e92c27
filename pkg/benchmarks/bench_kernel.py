"""Compare the compiled and pure-Python visibility kernels.

Replays one simulated spawn log into a fresh world per kernel and times
(1) insertion, which computes ancestry, forks, rounds and witnesses,
(2) a full strongly-sees sweep and (3) the consensus order on top.

    python3 benchmarks/bench_kernel.py --peers 10 --target-round 10
"""
import argparse
import time

from hashgraph.kernel import CKernel, PyKernel
from hashgraph.ordering import consensus_order
from hashgraph.simnet import AdversarySpec, SimConfig, simulate
from hashgraph.world import World


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench(kernel, cfg, events, repeat):
    row = {}
    row["insert"], world = best_of(repeat, lambda: World.from_events(cfg.n_peers, events, kernel))
    k = world._k
    row["stsees sweep"], seen = best_of(repeat, lambda: sum(len(k.strongly_seen(y)) for y in range(len(world))))
    row["order"], rep = best_of(repeat, lambda: consensus_order(World.from_events(cfg.n_peers, events, kernel),
                                                                cfg.params))
    return row, (seen, [(e.event, e.consensus_ts) for e in rep.settled])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--peers", type=int, default=10)
    ap.add_argument("--target-round", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--forker", action="store_true", help="run with forking dishonest peers")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    n = args.peers
    honest = tuple(range(n - (n - 1) // 3)) if args.forker else None
    cfg = SimConfig(n_peers=n, honest=honest, seed=args.seed, target_round=args.target_round,
                    adversary=AdversarySpec("forker") if args.forker else None)
    events = simulate(cfg).spawn
    print(f"{len(events)} events, {n} peers, forker={args.forker}, best of {args.repeat}")

    kernels = [("python", PyKernel)]
    if CKernel is not None:
        kernels.append(("cython", CKernel))
    else:
        print("compiled kernel not built; timing the Python kernel only")
    rows = {}
    check = None
    for name, kernel in kernels:
        rows[name], result = bench(kernel, cfg, events, args.repeat)
        if check is None:
            check = result
        elif result != check:
            raise SystemExit(f"{name} kernel disagrees with the Python kernel")

    names = [name for name, _ in kernels]
    print(f"{'phase':<14}" + "".join(f"{nm:>12}" for nm in names) + ("     speedup" if len(names) > 1 else ""))
    for phase in rows["python"]:
        line = f"{phase:<14}" + "".join(f"{rows[nm][phase] * 1e3:>10.1f}ms" for nm in names)
        if len(names) > 1:
            line += f"{rows['python'][phase] / rows['cython'][phase]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
