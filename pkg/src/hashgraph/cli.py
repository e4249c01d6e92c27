"""Command-line entry point: simulate, order, check, export-dot, replay.

Exit codes: 0 success, 1 invariant violation, 2 input or config error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .elections import Elections
from .eventlog import InputError, fixture_path, load_world, write_log
from .events import HashgraphError
from .invariants import check_world
from .manifest import (build_config, config_from_values_json, dumps_manifest,
                       make_manifest, parse_config_text)
from .ordering import Consensus
from .simnet import simulate
from .world import ProtocolParams

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


def _write_text(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# simulate ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    values = {}
    if args.config:
        values.update(parse_config_text(Path(args.config).read_text()))
    flags = {
        "peers": args.peers, "honest": args.honest, "seed": args.seed, "d": args.d, "c": args.c,
        "target-round": args.target_round, "max-steps": args.max_steps,
        "adversary": args.adversary, "fairness-window": args.fairness_window,
        "policy": args.policy, "weights": args.weights,
    }
    from .manifest import parse_value
    for key, val in flags.items():
        if val is not None:
            values[key] = parse_value(key, str(val))
    if "seed" not in values:
        values["seed"] = int(os.environ.get("HASHGRAPH_SEED", "0"))
    cfg = build_config(values)
    sim = simulate(cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _save_run(sim, out)
    print(f"simulated {sim.steps} steps, {len(sim.spawn)} events, max round {sim.global_world.max_round}",
          file=sys.stderr)
    return EXIT_OK


def _save_run(sim, out: Path) -> None:
    with open(out / "events.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        write_log(sim.spawn, fh)
    (out / "manifest.json").write_text(dumps_manifest(make_manifest(sim, "events.jsonl")), encoding="utf-8")


def cmd_replay(args) -> int:
    manifest = json.loads(Path(args.manifest).read_text())
    cfg = config_from_values_json(manifest["config"])
    sim = simulate(cfg)
    got = [e.id.hex() for e in sim.spawn]
    if got != manifest["spawn_order"]:
        print("replay: spawn order differs from manifest", file=sys.stderr)
        return EXIT_VIOLATION
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    _save_run(sim, out)
    return EXIT_OK


# loading helpers ---------------------------------------------------------

def _params_and_world(args):
    manifest = {}
    if getattr(args, "manifest", None):
        manifest = json.loads(Path(args.manifest).read_text())["config"]
    peers = args.peers or manifest.get("peers")
    with open(args.log, encoding="utf-8") as fh:
        world = load_world(fh, peers)
    d = args.d or manifest.get("d") or 1
    c = args.c or manifest.get("c") or 4
    try:
        params = ProtocolParams(world.n_peers, d, c)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    honest = None
    if getattr(args, "honest", None) is not None:
        honest = range(args.honest)
    elif manifest.get("honest") is not None:
        honest = manifest["honest"]
    return params, world, honest


# order ------------------------------------------------------------------

def cmd_order(args) -> int:
    params, world, _ = _params_and_world(args)
    cons = Consensus(world, params)
    rep = cons.report()
    lines = []
    if args.explain:
        el = Elections.of(world, params)
        for i in range(world.max_round + 1):
            for w in world.witnesses_in_round(i):
                lines.append(json.dumps(el.explain(w)))
    if args.format == "tsv":
        lines.append("order_index\tid\tround_received\tconsensus_ts")
        lines += [f"{e.order_index}\t{e.event.hex()}\t{e.round_received}\t{e.consensus_ts}" for e in rep.settled]
        lines.append(f"# settled_count={len(rep.settled)} unsettled_count={len(rep.unsettled)} max_round={rep.max_round}")
    else:
        lines += [json.dumps({"order_index": e.order_index, "id": e.event.hex(),
                              "round_received": e.round_received, "consensus_ts": e.consensus_ts})
                  for e in rep.settled]
        lines.append(json.dumps({"settled_count": len(rep.settled), "unsettled_count": len(rep.unsettled),
                                 "max_round": rep.max_round, "settled_rounds": rep.settled_rounds,
                                 "empty_rounds": rep.empty_rounds}))
    _write_text(args.output, "\n".join(lines) + "\n")
    return EXIT_OK


# check ------------------------------------------------------------------

def cmd_check(args) -> int:
    params, world, honest = _params_and_world(args)
    if args.report:
        rows = [f"{e.id.hex()}\t{e.creator}\t{world.round_of(e.id)}\t{int(world.is_witness(e.id))}"
                for e in world.events]
        _write_text(args.report, "\n".join(rows) + ("\n" if rows else ""))
    results = check_world(world, params, honest)
    failed = False
    for suite, problems in results.items():
        if problems:
            failed = True
            print(f"{suite}: FAIL {problems[0]}")
        else:
            print(f"{suite}: ok")
    return EXIT_VIOLATION if failed else EXIT_OK


# export-dot ---------------------------------------------------------------

def to_dot(world) -> str:
    lines = ["digraph hashgraph {", "  rankdir=BT;", "  node [shape=circle, fontsize=9];"]
    for e in world.events:
        tag = " W" if world.is_witness(e.id) else ""
        label = f"{world.name(e.id)}\\np{e.creator} r{world.round_of(e.id)}{tag}"
        lines.append(f'  "{e.id.hex()[:16]}" [label="{label}"];')
    for e in world.events:
        if e.is_initial:
            continue
        me = e.id.hex()[:16]
        lines.append(f'  "{e.self_parent.hex()[:16]}" -> "{me}" [style=solid, penwidth=2];')
        lines.append(f'  "{e.other_parent.hex()[:16]}" -> "{me}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_export_dot(args) -> int:
    with open(args.log, encoding="utf-8") as fh:
        world = load_world(fh, args.peers)
    _write_text(args.output, to_dot(world))
    return EXIT_OK


def cmd_fixture(args) -> int:
    sys.stdout.write(fixture_path(args.name).read_text())
    return EXIT_OK


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hashgraph", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="run the gossip simulator and write a log + manifest")
    s.add_argument("--config", help="key=value config file; flags override it")
    s.add_argument("--peers", type=int)
    s.add_argument("--honest", help="honest count H (peers 0..H-1) or comma list")
    s.add_argument("--seed", type=int, help="defaults to $HASHGRAPH_SEED or 0")
    s.add_argument("--d", type=int)
    s.add_argument("--c", type=int)
    s.add_argument("--target-round", type=int)
    s.add_argument("--max-steps", type=int)
    s.add_argument("--adversary", help="forker[:branches=B] | equivocating-gossiper:audience=0+2/1+3 | delayer:max_delay=M")
    s.add_argument("--fairness-window", type=int)
    s.add_argument("--policy", choices=["uniform", "skewed", "scripted"])
    s.add_argument("--weights", help="comma-separated per-peer weights for --policy skewed")
    s.add_argument("--out-dir", default=".")
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("replay", help="re-run a manifest and rewrite its log")
    r.add_argument("manifest")
    r.add_argument("--out-dir", default=".")
    r.set_defaults(func=cmd_replay)

    for name, func, helptext in (("order", cmd_order, "emit the consensus order of a log"),
                                 ("check", cmd_check, "run invariant suites over a log")):
        o = sub.add_parser(name, help=helptext)
        o.add_argument("log")
        o.add_argument("--manifest", help="take peers/d/c/honest from a run manifest")
        o.add_argument("--peers", type=int)
        o.add_argument("--d", type=int)
        o.add_argument("--c", type=int)
        o.set_defaults(func=func)
        if name == "order":
            o.add_argument("--format", choices=["jsonl", "tsv"], default="jsonl")
            o.add_argument("--explain", action="store_true", help="prefix election traces")
            o.add_argument("-o", "--output")
        else:
            o.add_argument("--honest", type=int, help="peers 0..H-1 are honest (default: all)")
            o.add_argument("--report", help="write per-event id/creator/round/witness rows (TSV)")

    x = sub.add_parser("export-dot", help="render a log as a Graphviz digraph")
    x.add_argument("log")
    x.add_argument("--peers", type=int)
    x.add_argument("-o", "--output")
    x.set_defaults(func=cmd_export_dot)

    f = sub.add_parser("fixture", help="print a bundled fixture log")
    f.add_argument("name", nargs="?", default="figure1")
    f.set_defaults(func=cmd_fixture)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (HashgraphError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
