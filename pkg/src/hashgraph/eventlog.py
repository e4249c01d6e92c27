"""JSON-lines event logs.

One event per line, parents before children::

    {"id": hex, "creator": int, "self_parent": hex|null,
     "other_parent": hex|null, "ts": int, "payload": hex}

An ``id`` that is not a 64-digit hex string is taken as a symbolic label;
its digest is computed from the body at load time and parents may refer to
it by label. The bundled Figure-1 log uses this form.
"""
from __future__ import annotations

import json
import re
from importlib import resources

from .events import Event, HashgraphError
from .world import World

_HEX_ID = re.compile(r"^[0-9a-f]{64}$")


class InputError(HashgraphError):
    pass


def event_record(e: Event) -> dict:
    return {
        "id": e.id.hex(),
        "creator": e.creator,
        "self_parent": e.self_parent.hex() if e.self_parent else None,
        "other_parent": e.other_parent.hex() if e.other_parent else None,
        "ts": e.timestamp,
        "payload": e.payload.hex(),
    }


def dumps_event(e: Event) -> str:
    return json.dumps(event_record(e))


def write_log(events, fh) -> None:
    for e in events:
        fh.write(dumps_event(e) + "\n")


def read_records(lines) -> list[dict]:
    out = []
    for n, line in enumerate(lines, 1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {n}: {exc}") from None
        missing = {"id", "creator", "self_parent", "other_parent", "ts"} - rec.keys()
        if missing:
            raise InputError(f"line {n}: missing fields {sorted(missing)}")
        out.append(rec)
    return out


def events_from_records(records) -> tuple[list[Event], dict[bytes, str]]:
    """Decode records into events; returns the events and a digest->label map."""
    by_label: dict[str, bytes] = {}
    labels: dict[bytes, str] = {}
    events = []

    def ref(v):
        if v is None:
            return None
        if _HEX_ID.match(v):
            return bytes.fromhex(v)
        if v in by_label:
            return by_label[v]
        raise InputError(f"unknown parent label {v!r}")

    for rec in records:
        try:
            payload = bytes.fromhex(rec.get("payload") or "")
            creator, ts = int(rec["creator"]), int(rec["ts"])
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad field in {rec.get('id')!r}: {exc}") from None
        sp, op = ref(rec["self_parent"]), ref(rec["other_parent"])
        rid = str(rec["id"])
        if _HEX_ID.match(rid):
            e = Event(bytes.fromhex(rid), creator, sp, op, ts, payload)
        else:
            e = Event.create(creator, sp, op, ts, payload)
            by_label[rid] = e.id
            labels[e.id] = rid
        events.append(e)
    return events, labels


def load_world(lines, n_peers: int | None = None) -> World:
    events, labels = events_from_records(read_records(lines))
    if n_peers is None:
        n_peers = max([e.creator for e in events] + [1]) + 1
    world = World(n_peers)
    world.labels.update(labels)
    for e in events:
        world.insert(e)
    return world


def fixture_path(name: str = "figure1"):
    return resources.files("hashgraph") / "data" / f"{name}.jsonl"


def load_fixture(name: str = "figure1") -> tuple[World, dict[str, bytes]]:
    """Load a bundled fixture; returns the world and a label->id map."""
    text = fixture_path(name).read_text()
    world = load_world(text.splitlines())
    return world, {label: eid for eid, label in world.labels.items()}
