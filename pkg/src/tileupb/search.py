"""Exhaustive search for box partitions obeying the rectangle condition in every cut.

Depth-first exact cover: the smallest uncovered cell is always covered next,
by each box through it that avoids covered cells.  A placed tile is rejected
as soon as it and earlier tiles already form a rectangle union (other than
the whole grid) in some bipartition flattening.

Symmetry: per-party relabelings and permutations of equal-dimension parties
act on partitions.  Every orbit has a member whose largest tile, under a
key invariant under that action, is a standard box {0..k_1-1} x ... through
cell zero, so the root is restricted to those boxes and no later tile may
have a larger key.  Survivors are deduplicated by canonical_form.

The tree is split into prefix tasks that run independently (optionally in a
process pool); each finished task is recorded in a JSON checkpoint so an
interrupted run resumes where it stopped.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .tiles import MAX_TILES, Tile, TileStructure, all_bipartitions, utile_check_all, validate

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    pass


@dataclass(frozen=True)
class SearchConfig:
    dims: tuple[int, ...]
    min_tiles: int = 5
    max_tiles: int = MAX_TILES
    symmetry_reduction: bool = True
    checkpoint: str | None = None
    workers: int = 1
    # testing switches: disable the incremental filter, or accept every partition
    prune: bool = True
    condition: bool = True
    split_depth: int = 2
    max_tasks: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if not self.dims or any(d < 1 for d in self.dims):
            raise ValueError(f"bad dims {self.dims}")
        if len(self.dims) < 2:
            raise ValueError("need at least two parties")
        if self.min_tiles < 2:
            raise ValueError("min_tiles must be at least 2")
        if self.max_tiles > MAX_TILES:
            raise ValueError(f"max_tiles must be at most {MAX_TILES}")
        if self.min_tiles > self.max_tiles:
            raise ValueError("min_tiles exceeds max_tiles")
        if self.workers < 1 or self.split_depth < 0:
            raise ValueError("workers must be positive and split_depth nonnegative")

    def fingerprint(self) -> str:
        keys = {k: getattr(self, k) for k in
                ("dims", "min_tiles", "max_tiles", "symmetry_reduction", "prune", "condition", "split_depth")}
        return hashlib.sha256(json.dumps(keys, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class SearchResult:
    found: list[TileStructure]
    nodes: int
    prunes: dict[str, int]
    wall_time: float
    complete: bool
    leaves: int = 0
    tasks: int = 0

    def to_json(self) -> dict:
        return {
            "found": [{"dims": list(ts.dims), "tiles": [{"subsets": [list(x) for x in t.subsets]} for t in ts.tiles]}
                      for ts in self.found],
            "nodes": self.nodes,
            "leaves": self.leaves,
            "prunes": dict(sorted(self.prunes.items())),
            "wall_time": self.wall_time,
            "complete": self.complete,
            "tasks": self.tasks,
        }


# -- grid tables ----------------------------------------------------------------


class Grid:
    """Bitmask tables for one set of dimensions."""

    def __init__(self, dims: Sequence[int]):
        self.dims = tuple(dims)
        self.n = len(dims)
        self.cells = list(itertools.product(*map(range, dims)))
        self.N = len(self.cells)
        self.full = (1 << self.N) - 1
        self.cuts = [(bp.C, bp.D) for bp in all_bipartitions(self.n)]
        self.row_cells = []
        self.col_cells = []
        self.row_of = []
        self.col_of = []
        for C, D in self.cuts:
            rows = [self._side(c, C) for c in self.cells]
            cols = [self._side(c, D) for c in self.cells]
            h1 = math.prod(dims[j] for j in C)
            h2 = math.prod(dims[j] for j in D)
            rc = [0] * h1
            cc = [0] * h2
            for i in range(self.N):
                rc[rows[i]] |= 1 << i
                cc[cols[i]] |= 1 << i
            self.row_of.append(rows)
            self.col_of.append(cols)
            self.row_cells.append(rc)
            self.col_cells.append(cc)
        self.boxes: list[tuple[int, ...]] = []  # per-party masks
        self.box_cells: list[int] = []
        self.box_rects: list[list[tuple[int, int]]] = []
        self.box_key: list[tuple] = []
        index = {c: k for k, c in enumerate(self.cells)}
        self.classes = self._party_classes()
        for masks in itertools.product(*(range(1, 1 << d) for d in dims)):
            cm = 0
            for c in itertools.product(*([v for v in range(d) if masks[j] >> v & 1] for j, d in enumerate(dims))):
                cm |= 1 << index[c]
            self.boxes.append(masks)
            self.box_cells.append(cm)
            self.box_rects.append([self._rect(cm, b) for b in range(len(self.cuts))])
            self.box_key.append(self._key(masks))
        self.through = [[b for b, cm in enumerate(self.box_cells) if cm >> i & 1] for i in range(self.N)]

    def _side(self, cell, side) -> int:
        r = 0
        for j in side:
            r = r * self.dims[j] + cell[j]
        return r

    def _rect(self, cm: int, b: int) -> tuple[int, int]:
        r = c = 0
        rows, cols = self.row_of[b], self.col_of[b]
        while cm:
            low = cm & -cm
            i = low.bit_length() - 1
            cm ^= low
            r |= 1 << rows[i]
            c |= 1 << cols[i]
        return r, c

    def _party_classes(self) -> list[list[int]]:
        groups: dict[int, list[int]] = {}
        for j, d in enumerate(self.dims):
            groups.setdefault(d, []).append(j)
        return sorted(groups.values())

    def _key(self, masks) -> tuple:
        """Invariant under relabelings and equal-dimension party swaps."""
        sizes = [bin(m).count("1") for m in masks]
        per_class = tuple(tuple(sorted((sizes[j] for j in cl), reverse=True)) for cl in self.classes)
        return (math.prod(sizes), per_class)

    def rect_cells(self, b: int, R: int, C: int) -> int:
        a = 0
        rc, cc = self.row_cells[b], self.col_cells[b]
        while R:
            low = R & -R
            a |= rc[low.bit_length() - 1]
            R ^= low
        c = 0
        while C:
            low = C & -C
            c |= cc[low.bit_length() - 1]
            C ^= low
        return a & c

    def standard_roots(self) -> list[int]:
        """Boxes {0..k_j-1} per party with sizes descending inside each party class."""
        out = []
        for b, masks in enumerate(self.boxes):
            if any(m & (m + 1) for m in masks):  # not of the form 2^k - 1
                continue
            sizes = [m.bit_length() for m in masks]
            if all(sizes[cl[i]] >= sizes[cl[i + 1]] for cl in self.classes for i in range(len(cl) - 1)):
                out.append(b)
        return out

    def to_structure(self, boxes: Sequence[int]) -> TileStructure:
        tiles = [Tile(tuple(tuple(v for v in range(d) if m >> v & 1) for m, d in zip(self.boxes[b], self.dims)))
                 for b in boxes]
        return TileStructure(self.dims, tuple(tiles))


@lru_cache(maxsize=8)
def grid(dims: tuple[int, ...]) -> Grid:
    return Grid(dims)


# -- rectangle tests ------------------------------------------------------------------


def _closure_prune(g: Grid, placed: Sequence[int], new: int, covered: int) -> bool:
    new_cells = g.box_cells[new]
    for b in range(len(g.cuts)):
        nr, nc = g.box_rects[new][b]
        for x in placed:
            xr, xc = g.box_rects[x][b]
            R, C = nr | xr, nc | xc
            members = new_cells | g.box_cells[x]
            while True:
                B = g.rect_cells(b, R, C)
                if B & ~covered:
                    break
                if B == members:
                    if members != g.full:
                        return True
                    break
                grown = members
                for y in placed:
                    yc = g.box_cells[y]
                    if yc & B and not yc & members:
                        grown |= yc
                        yr, ycc = g.box_rects[y][b]
                        R |= yr
                        C |= ycc
                if grown == members:
                    break  # B reaches cells outside the placed tiles
                members = grown
    return False


def incremental_prune(partial: Sequence, newest, dims: Sequence[int] | None = None) -> bool:
    """True iff the newest tile and some earlier tiles flatten to a rectangle union.

    ``partial`` holds the earlier tiles (Tile objects or per-party subsets);
    the whole grid does not count.
    """
    if dims is None:
        raise ValueError("dims required")
    g = grid(tuple(dims))
    ids = [_box_id(g, t) for t in partial]
    new = _box_id(g, newest)
    covered = g.box_cells[new]
    for b in ids:
        if g.box_cells[b] & covered:
            raise ValueError("tiles overlap")
        covered |= g.box_cells[b]
    return _closure_prune(g, ids, new, covered) if ids else False


def _box_id(g: Grid, t) -> int:
    subsets = t.subsets if isinstance(t, Tile) else t
    masks = tuple(sum(1 << v for v in x) for x in subsets)
    return g.boxes.index(masks)


def has_rectangle_subunion(ts: TileStructure) -> bool:
    """Pairwise-closure route to the rectangle condition, independent of utile_check."""
    g = grid(ts.dims)
    ids = [_box_id(g, t) for t in ts.tiles]
    covered = g.box_cells[ids[0]] if ids else 0
    for k in range(1, len(ids)):
        covered |= g.box_cells[ids[k]]
        if _closure_prune(g, ids[:k], ids[k], covered):
            return True
    return False


# -- canonical form ---------------------------------------------------------------------


@lru_cache(maxsize=8)
def _group(dims: tuple[int, ...]):
    g = grid(dims)
    relabel = [list(itertools.permutations(range(d))) for d in dims]
    party_perms = []
    for combo in itertools.product(*(itertools.permutations(cl) for cl in g.classes)):
        perm = list(range(len(dims)))
        for cl, image in zip(g.classes, combo):
            for src, dst in zip(cl, image):
                perm[dst] = src
        party_perms.append(tuple(perm))
    return relabel, party_perms


def canonical_form(ts) -> tuple:
    """Lexicographically least encoding of ``ts`` over its symmetry group.

    Accepts a TileStructure or a (dims, tiles) pair; partial structures are fine.
    """
    if isinstance(ts, TileStructure):
        dims, tiles = ts.dims, ts.tiles
    else:
        dims, tiles = tuple(ts[0]), [t if isinstance(t, Tile) else Tile(t) for t in ts[1]]
    relabel, party_perms = _group(tuple(dims))
    best = None
    for sigma in itertools.product(*relabel):
        # each party relabeled on its own, then parties permuted
        mapped = [tuple(sum(1 << sigma[j][v] for v in x) for j, x in enumerate(t.subsets)) for t in tiles]
        for perm in party_perms:
            enc = tuple(sorted(tuple(m[perm[j]] for j in range(len(dims))) for m in mapped))
            if best is None or enc < best:
                best = enc
    return (tuple(dims), best)


# -- search ----------------------------------------------------------------------------------


class _Runner:
    def __init__(self, cfg: SearchConfig):
        self.cfg = cfg
        self.g = grid(cfg.dims)
        self.nodes = 0
        self.leaves = 0
        self.prunes = {"rectangle": 0, "symmetry": 0, "size": 0}
        self.found: list[list[int]] = []
        self.root_key = None

    def children(self, placed: list[int], covered: int) -> Iterable[int]:
        g, cfg = self.g, self.cfg
        free = ~covered & g.full
        i = (free & -free).bit_length() - 1
        if not placed and cfg.symmetry_reduction:
            cand = [b for b in g.standard_roots() if g.box_cells[b] >> i & 1]
        else:
            cand = g.through[i]
        for b in cand:
            cm = g.box_cells[b]
            if cm & covered:
                continue
            if placed and self.root_key is not None and g.box_key[b] > self.root_key:
                self.prunes["symmetry"] += 1
                continue
            if cfg.condition and cfg.prune and placed and _closure_prune(g, placed, b, covered | cm):
                self.prunes["rectangle"] += 1
                continue
            yield b

    def enter(self, placed: list[int]):
        if len(placed) == 1 and self.cfg.symmetry_reduction:
            self.root_key = self.g.box_key[placed[0]]

    def leaf(self, placed: list[int]):
        self.leaves += 1
        cfg = self.cfg
        if not cfg.min_tiles <= len(placed) <= cfg.max_tiles:
            return
        if cfg.condition and not cfg.prune and has_rectangle_subunion(self.g.to_structure(placed)):
            return
        self.found.append(list(placed))

    def dfs(self, placed: list[int], covered: int):
        self.nodes += 1
        if covered == self.g.full:
            self.leaf(placed)
            return
        if len(placed) >= self.cfg.max_tiles:
            self.prunes["size"] += 1
            return
        for b in list(self.children(placed, covered)):
            placed.append(b)
            self.enter(placed)
            self.dfs(placed, covered | self.g.box_cells[b])
            placed.pop()

    def expand(self, depth: int) -> list[list[int]]:
        """Prefixes of length <= depth that start independent subtrees, counting nodes above them."""
        out = []

        def walk(placed, covered):
            if len(placed) == depth or covered == self.g.full:
                out.append(list(placed))
                return
            self.nodes += 1
            if len(placed) >= self.cfg.max_tiles:
                self.prunes["size"] += 1
                return
            for b in list(self.children(placed, covered)):
                placed.append(b)
                self.enter(placed)
                walk(placed, covered | self.g.box_cells[b])
                placed.pop()

        walk([], 0)
        return out


def _run_task(args) -> dict:
    cfg, prefix = args
    r = _Runner(cfg)
    covered = 0
    for k in range(len(prefix)):
        r.enter(prefix[: k + 1])
        covered |= r.g.box_cells[prefix[k]]
    r.dfs(list(prefix), covered)
    return {"nodes": r.nodes, "leaves": r.leaves, "prunes": r.prunes, "found": r.found}


def _load_checkpoint(path: str, cfg: SearchConfig) -> dict:
    if not os.path.exists(path):
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"unreadable checkpoint {path}: {exc}") from exc
    if data.get("version") != CHECKPOINT_VERSION or data.get("fingerprint") != cfg.fingerprint():
        raise CheckpointError(f"checkpoint {path} belongs to a different search configuration")
    done = data.get("completed")
    if not isinstance(done, dict):
        raise CheckpointError(f"checkpoint {path} is missing its task table")
    return {int(k): v for k, v in done.items()}


def _save_checkpoint(path: str, cfg: SearchConfig, done: dict, ntasks: int) -> None:
    data = {
        "version": CHECKPOINT_VERSION,
        "fingerprint": cfg.fingerprint(),
        "dims": list(cfg.dims),
        "tasks": ntasks,
        "completed": {str(k): v for k, v in sorted(done.items())},
    }
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=folder, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(data, fh, sort_keys=True)
    os.replace(tmp, path)


def search(cfg: SearchConfig) -> SearchResult:
    start = time.perf_counter()
    top = _Runner(cfg)
    prefixes = top.expand(cfg.split_depth)
    done = _load_checkpoint(cfg.checkpoint, cfg) if cfg.checkpoint else {}
    todo = [k for k in range(len(prefixes)) if k not in done]
    if cfg.max_tasks is not None:
        todo = todo[: cfg.max_tasks]
    log.info("search %s: %d tasks, %d already done", cfg.dims, len(prefixes), len(done))

    def record(k, res):
        done[k] = res
        if cfg.checkpoint:
            _save_checkpoint(cfg.checkpoint, cfg, done, len(prefixes))

    if cfg.workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for k, res in zip(todo, pool.map(_run_task, [(cfg, prefixes[k]) for k in todo])):
                record(k, res)
    else:
        for k in todo:
            record(k, _run_task((cfg, prefixes[k])))

    complete = len(done) == len(prefixes)
    nodes, leaves = top.nodes, 0
    prunes = dict(top.prunes)
    raw = []
    for k in sorted(done):
        res = done[k]
        nodes += res["nodes"]
        leaves += res["leaves"]
        for name, v in res["prunes"].items():
            prunes[name] = prunes.get(name, 0) + v
        raw.extend(res["found"])
    g = grid(cfg.dims)
    found: dict[tuple, TileStructure] = {}
    for boxes in raw:
        ts = g.to_structure(boxes)
        key = canonical_form(ts) if cfg.symmetry_reduction else tuple(sorted(boxes))
        found.setdefault(key, ts)
    structures = [found[k] for k in sorted(found)]
    if cfg.condition:
        for ts in structures:
            _reverify(ts)
    return SearchResult(structures, nodes, prunes, time.perf_counter() - start, complete, leaves, len(prefixes))


def _reverify(ts: TileStructure) -> None:
    if not validate(ts).ok:
        raise AssertionError(f"search produced an invalid structure {ts}")
    if ts.s >= 5 and not all(utile_check_all(ts).values()):
        raise AssertionError(f"search produced a structure failing the rectangle condition {ts}")


def enumerate_partitions(dims: Sequence[int]) -> list[TileStructure]:
    """All box partitions of the grid, with no pruning or symmetry; for small grids only."""
    g = grid(tuple(dims))
    out = []

    def dfs(placed, covered):
        if covered == g.full:
            out.append(g.to_structure(placed))
            return
        free = ~covered & g.full
        i = (free & -free).bit_length() - 1
        for b in g.through[i]:
            if not g.box_cells[b] & covered:
                placed.append(b)
                dfs(placed, covered | g.box_cells[b])
                placed.pop()

    dfs([], 0)
    return out
