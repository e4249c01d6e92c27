"""Flat key=value config files and JSON run manifests."""
from __future__ import annotations

import json

from . import __version__
from .simnet import RNG_NAME, AdversarySpec, ConfigError, SimConfig, SimState

HEADER = f"# hashgraph simulation config; rng={RNG_NAME}"

# flag name -> SimConfig field
KEYS = {
    "peers": "n_peers",
    "honest": "honest",
    "seed": "seed",
    "d": "d",
    "c": "c",
    "policy": "policy",
    "weights": "weights",
    "trace": "trace",
    "fairness-window": "fairness_window",
    "adversary": "adversary",
    "max-steps": "max_steps",
    "target-round": "target_round",
}


def parse_value(key: str, text: str):
    text = text.strip()
    try:
        if key == "honest":
            # a count H means peers 0..H-1; a comma list names them
            if "," in text or text.startswith("["):
                return tuple(int(p) for p in text.strip("[]").split(",") if p.strip())
            return int(text)
        if key == "weights":
            return tuple(float(w) for w in text.split(",") if w.strip())
        if key == "trace":
            return tuple(tuple(int(v) for v in pair.split(">")) for pair in text.split(",") if pair.strip())
        if key == "adversary":
            return None if text in ("", "none") else AdversarySpec.parse(text)
        if key == "policy":
            return text
        if key == "target-round" and text in ("", "none"):
            return None
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {text!r} ({exc})") from None


def parse_config_text(text: str) -> dict:
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or key not in KEYS:
            raise ConfigError(f"config line {n}: unknown or malformed entry {line!r}")
        out[key] = parse_value(key, val)
    return out


def build_config(values: dict) -> SimConfig:
    """Build a SimConfig from flag-named values (missing keys use defaults)."""
    kw = {KEYS[k]: v for k, v in values.items() if v is not None or k in ("adversary", "target-round")}
    n = kw.get("n_peers", 4)
    honest = kw.get("honest")
    if isinstance(honest, int):
        if not 0 < honest <= n:
            raise ConfigError(f"honest count {honest} outside 1..{n}")
        kw["honest"] = tuple(range(honest))
    if kw.get("trace") and "policy" not in kw:
        kw["policy"] = "scripted"
    try:
        return SimConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def config_values(cfg: SimConfig) -> dict:
    out = {
        "peers": cfg.n_peers,
        "honest": list(cfg.honest),
        "seed": cfg.seed,
        "d": cfg.d,
        "c": cfg.c,
        "policy": cfg.policy,
        "fairness-window": cfg.fairness_window,
        "adversary": cfg.adversary.format() if cfg.adversary else None,
        "max-steps": cfg.max_steps,
        "target-round": cfg.target_round,
    }
    if cfg.weights:
        out["weights"] = list(cfg.weights)
    if cfg.trace:
        out["trace"] = [list(p) for p in cfg.trace]
    return out


def config_text(cfg: SimConfig) -> str:
    lines = [HEADER]
    for key, val in config_values(cfg).items():
        if key == "honest":
            val = ",".join(map(str, val))
        elif key == "weights":
            val = ",".join(repr(w) for w in val)
        elif key == "trace":
            val = ",".join(f"{s}>{r}" for s, r in val)
        elif val is None:
            val = "none"
        lines.append(f"{key}={val}")
    return "\n".join(lines) + "\n"


def config_from_values_json(values: dict) -> SimConfig:
    vals = dict(values)
    if vals.get("honest") is not None:
        vals["honest"] = tuple(vals["honest"])
    if vals.get("weights"):
        vals["weights"] = tuple(vals["weights"])
    if vals.get("trace"):
        vals["trace"] = tuple(tuple(p) for p in vals["trace"])
    if vals.get("adversary"):
        vals["adversary"] = AdversarySpec.parse(vals["adversary"])
    return build_config(vals)


def make_manifest(sim: SimState, log_path: str) -> dict:
    return {
        "version": __version__,
        "rng": RNG_NAME,
        "config": config_values(sim.config),
        "seed": sim.config.seed,
        "steps": sim.steps,
        "events": len(sim.spawn),
        "max_round": sim.global_world.max_round,
        "spawn_order": [e.id.hex() for e in sim.spawn],
        "outputs": {"log": log_path},
    }


def dumps_manifest(m: dict) -> str:
    return json.dumps(m, indent=1) + "\n"
