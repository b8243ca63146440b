"""JSON reading and canonical writing for structures, sets and reports."""

from __future__ import annotations

import json
from pathlib import Path

from .states import OPSet, ProductState
from .tiles import PARTY_NAMES, Bipartition, TileStructure


class InputError(ValueError):
    """Unreadable or malformed input; the message says where."""


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def ts_to_json(ts: TileStructure) -> dict:
    return {"dims": list(ts.dims), "tiles": [{"subsets": [list(x) for x in t.subsets]} for t in ts.tiles]}


def ts_from_json(data) -> TileStructure:
    try:
        dims = [int(d) for d in data["dims"]]
        tiles = []
        for t in data["tiles"]:
            subsets = t["subsets"] if isinstance(t, dict) else t
            tiles.append([[int(v) for v in x] for x in subsets])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed tile structure: {exc!r}") from exc
    return TileStructure.from_subsets(dims, tiles)


def opset_from_json(data) -> OPSet:
    try:
        return OPSet.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed product set: {exc!r}") from exc


def states_from_json(data) -> list[ProductState]:
    items = data["states"] if isinstance(data, dict) else data
    try:
        return [ProductState.from_json(x) for x in items]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed product state: {exc!r}") from exc


def parse_bipartition(text: str, n: int) -> Bipartition:
    """Parse labels such as 'AB|C'."""
    try:
        left, right = text.split("|")
        C = tuple(PARTY_NAMES.index(ch) for ch in left.strip())
        D = tuple(PARTY_NAMES.index(ch) for ch in right.strip())
    except ValueError as exc:
        raise InputError(f"bad bipartition {text!r}; expected something like AB|C") from exc
    if sorted(C + D) != list(range(n)) or not C or not D:
        raise InputError(f"bipartition {text!r} does not split {n} parties")
    return Bipartition(C, D)


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad dims {text!r}; expected e.g. 3,3,3") from exc
    if any(d < 1 for d in dims):
        raise InputError(f"dims must be positive: {text!r}")
    return dims
