"""Tile structures: partitions of a d_1 x ... x d_n grid into combinatorial boxes.

Cells are indexed in mixed radix with party 0 most significant (C order).
Flattening a structure along a bipartition C|D turns every tile into a
combinatorial rectangle of the h1 x h2 grid, where row indices combine the
parties of C (ascending, earlier party most significant) and column indices
combine the parties of D the same way.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAX_TILES = 24
PARTY_NAMES = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


class HypothesisNotMet(ValueError):
    """Raised when the rectangle condition is checked on fewer than five tiles."""


@dataclass(frozen=True)
class Tile:
    subsets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(tuple(sorted(set(x))) for x in self.subsets))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(x) for x in self.subsets)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    def cells(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*self.subsets)

    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in x) for x in self.subsets)


@dataclass(frozen=True)
class TileStructure:
    dims: tuple[int, ...]
    tiles: tuple[Tile, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(
            self, "tiles", tuple(t if isinstance(t, Tile) else Tile(t) for t in self.tiles)
        )

    @classmethod
    def from_subsets(cls, dims: Sequence[int], tiles: Sequence[Sequence[Sequence[int]]]):
        return cls(tuple(dims), tuple(Tile(tuple(tuple(x) for x in t)) for t in tiles))

    @property
    def n(self) -> int:
        return len(self.dims)

    @property
    def s(self) -> int:
        return len(self.tiles)

    @property
    def D(self) -> int:
        return math.prod(self.dims)

    def cell_index(self, cell: Sequence[int]) -> int:
        idx = 0
        for x, d in zip(cell, self.dims):
            idx = idx * d + x
        return idx

    def tile_of_cells(self) -> list[int]:
        """tile id for every cell index (valid structures only)."""
        owner = [-1] * self.D
        for t, tile in enumerate(self.tiles):
            for cell in tile.cells():
                owner[self.cell_index(cell)] = t
        return owner

    def areas(self) -> list[int]:
        return [t.size for t in self.tiles]

    def side_lengths(self) -> set[int]:
        return {k for t in self.tiles for k in t.shape}


@dataclass(frozen=True)
class Bipartition:
    C: tuple[int, ...]
    D: tuple[int, ...]

    def __post_init__(self):
        C, D = tuple(sorted(self.C)), tuple(sorted(self.D))
        if not C or not D or set(C) & set(D):
            raise ValueError(f"invalid bipartition {C}|{D}")
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)

    @property
    def parties(self) -> int:
        return len(self.C) + len(self.D)

    def canonical(self) -> "Bipartition":
        return self if min(self.C + self.D) in self.C else Bipartition(self.D, self.C)

    def swapped(self) -> "Bipartition":
        return Bipartition(self.D, self.C)

    @property
    def label(self) -> str:
        return "".join(PARTY_NAMES[j] for j in self.C) + "|" + "".join(PARTY_NAMES[j] for j in self.D)

    def sizes(self, dims: Sequence[int]) -> tuple[int, int]:
        return math.prod(dims[j] for j in self.C), math.prod(dims[j] for j in self.D)

    def to_json(self) -> dict:
        return {"C": list(self.C), "D": list(self.D)}

    @classmethod
    def from_json(cls, data) -> "Bipartition":
        return cls(tuple(data["C"]), tuple(data["D"]))


def all_bipartitions(n: int) -> list[Bipartition]:
    """The 2^(n-1) - 1 canonical bipartitions (party 0 always on side C)."""
    out = []
    for mask in range(2 ** (n - 1) - 1, -1, -1):
        C = (0,) + tuple(j + 1 for j in range(n - 1) if mask >> j & 1)
        D = tuple(j for j in range(n) if j not in C)
        if D:
            out.append(Bipartition(C, D))
    out.sort(key=lambda b: (len(b.C), b.C))
    return out


@dataclass(frozen=True)
class FlatRect:
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    tile: int

    @property
    def size(self) -> int:
        return len(self.rows) * len(self.cols)


@dataclass
class ValidationReport:
    ok: bool
    overlaps: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)
    uncovered: list[tuple[int, ...]] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "errors": self.errors,
            "overlaps": [{"cell": list(c), "tiles": list(t)} for c, t in self.overlaps],
            "uncovered": [list(c) for c in self.uncovered],
        }


def validate(ts: TileStructure) -> ValidationReport:
    """Check that the tiles are nonempty boxes that partition the grid."""
    errors = []
    if not ts.dims:
        errors.append("no parties")
    for j, d in enumerate(ts.dims):
        if d < 2:
            errors.append(f"party {j} has dimension {d} < 2")
    owners: dict[tuple[int, ...], list[int]] = {}
    for t, tile in enumerate(ts.tiles):
        if len(tile.subsets) != ts.n:
            errors.append(f"tile {t} has {len(tile.subsets)} subsets, expected {ts.n}")
            continue
        bad = False
        for j, x in enumerate(tile.subsets):
            if not x:
                errors.append(f"tile {t} has an empty subset for party {j}")
                bad = True
            elif x[0] < 0 or x[-1] >= ts.dims[j]:
                errors.append(f"tile {t} uses an index outside Z_{ts.dims[j]} for party {j}")
                bad = True
        if bad:
            continue
        for cell in tile.cells():
            owners.setdefault(cell, []).append(t)
    if errors:
        return ValidationReport(False, errors=errors)
    overlaps = sorted((c, tuple(ts_)) for c, ts_ in owners.items() if len(ts_) > 1)
    uncovered = [c for c in itertools.product(*map(range, ts.dims)) if c not in owners]
    return ValidationReport(not overlaps and not uncovered, overlaps, uncovered, [])


def _side_index(cell: Sequence[int], side: Sequence[int], dims: Sequence[int]) -> int:
    idx = 0
    for j in side:
        idx = idx * dims[j] + cell[j]
    return idx


def _side_indices(tile: Tile, side: Sequence[int], dims: Sequence[int]) -> tuple[int, ...]:
    out = []
    for combo in itertools.product(*(tile.subsets[j] for j in side)):
        idx = 0
        for j, x in zip(side, combo):
            idx = idx * dims[j] + x
        out.append(idx)
    return tuple(sorted(out))


def flatten(ts: TileStructure, bp: Bipartition) -> list[FlatRect]:
    if bp.parties != ts.n:
        raise ValueError(f"bipartition over {bp.parties} parties, structure has {ts.n}")
    return [
        FlatRect(_side_indices(t, bp.C, ts.dims), _side_indices(t, bp.D, ts.dims), i)
        for i, t in enumerate(ts.tiles)
    ]


def flat_structure(ts: TileStructure, bp: Bipartition) -> TileStructure:
    """The h1 x h2 two-party structure of the flattening; tile ids preserved."""
    h1, h2 = bp.sizes(ts.dims)
    return TileStructure((h1, h2), tuple(Tile((r.rows, r.cols)) for r in flatten(ts, bp)))


def is_rectangle_union(ts: TileStructure, tile_ids: Iterable[int], bp: Bipartition) -> bool:
    tile_ids = list(tile_ids)
    if not tile_ids:
        raise ValueError("empty tile subset")
    rects = flatten(ts, bp)
    rows: set[int] = set()
    cols: set[int] = set()
    cells = 0
    for t in tile_ids:
        rows.update(rects[t].rows)
        cols.update(rects[t].cols)
        cells += rects[t].size
    return cells == len(rows) * len(cols)


@dataclass(frozen=True)
class UTileVerdict:
    ok: bool
    witness: tuple[int, ...] | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "witness": list(self.witness) if self.witness else None}


def _popcount(arr: np.ndarray) -> np.ndarray:
    if arr.dtype == object:
        return np.array([int(x).bit_count() for x in arr], dtype=np.int64)
    return np.bitwise_count(arr).astype(np.int64)


def _rectangle_masks(rects: Sequence[FlatRect], h1: int, h2: int) -> np.ndarray:
    """Bitmasks (over tiles) of every subset whose flattened union is a rectangle."""
    s = len(rects)
    wide = max(h1, h2) > 62
    dtype = object if wide else np.uint64
    rmask = [sum(1 << r for r in x.rows) for x in rects]
    cmask = [sum(1 << c for c in x.cols) for x in rects]
    size = [x.size for x in rects]
    low = min(s, 16)
    # subset tables over the low tiles, built by doubling
    R = np.zeros(1, dtype=dtype)
    C = np.zeros(1, dtype=dtype)
    S = np.zeros(1, dtype=np.int64)
    for k in range(low):
        R = np.concatenate([R, R | dtype(rmask[k]) if not wide else R | rmask[k]])
        C = np.concatenate([C, C | dtype(cmask[k]) if not wide else C | cmask[k]])
        S = np.concatenate([S, S + size[k]])
    out = []
    base = np.arange(1 << low, dtype=np.int64)
    for high in range(1 << (s - low)):
        hr = hc = hs = 0
        for k in range(s - low):
            if high >> k & 1:
                hr |= rmask[low + k]
                hc |= cmask[low + k]
                hs += size[low + k]
        if wide:
            RR, CC = R | hr, C | hc
        else:
            RR, CC = R | np.uint64(hr), C | np.uint64(hc)
        hit = (S + hs) == _popcount(RR) * _popcount(CC)
        idx = base[hit] | (high << low)
        out.append(idx)
    return np.concatenate(out)


def _lex_min(masks: np.ndarray) -> tuple[int, ...]:
    """Lexicographically smallest sorted tuple among nonempty subset bitmasks."""
    prefix = 0
    chosen: list[int] = []
    cand = masks
    while True:
        if np.any(cand == prefix) and chosen:
            return tuple(chosen)
        rest = cand & ~np.int64(prefix)
        low = rest & -rest
        nxt = int(low[low > 0].min())
        cand = cand[low == nxt]
        prefix |= nxt
        chosen.append(nxt.bit_length() - 1)


def utile_check(ts: TileStructure, bp: Bipartition) -> UTileVerdict:
    """Rectangle condition: no 2..s-1 tiles may flatten to a rectangle union."""
    s = ts.s
    if s < 5:
        raise HypothesisNotMet(f"the rectangle condition needs at least 5 tiles, got {s}")
    if s > MAX_TILES:
        raise ValueError(f"at most {MAX_TILES} tiles supported, got {s}")
    h1, h2 = bp.sizes(ts.dims)
    masks = _rectangle_masks(flatten(ts, bp), h1, h2)
    full = (1 << s) - 1
    counts = np.bitwise_count(masks.astype(np.uint64))
    bad = masks[(counts >= 2) & (masks != full)]
    if bad.size == 0:
        return UTileVerdict(True)
    return UTileVerdict(False, _lex_min(bad))


def utile_check_all(ts: TileStructure) -> dict[Bipartition, UTileVerdict]:
    return {bp: utile_check(ts, bp) for bp in all_bipartitions(ts.n)}


def random_tile_structure(dims: Sequence[int], rng: random.Random, max_side: int | None = None) -> TileStructure:
    """Random partition of the grid into boxes, grown from the smallest uncovered cell."""
    dims = tuple(dims)
    covered = np.zeros(dims, dtype=bool)
    tiles = []
    while not covered.all():
        cell = tuple(int(v) for v in np.argwhere(~covered)[0])
        subsets = []
        for j, d in enumerate(dims):
            others = [v for v in range(d) if v != cell[j]]
            rng.shuffle(others)
            k = rng.randint(0, len(others) if max_side is None else min(len(others), max_side - 1))
            subsets.append(sorted([cell[j]] + others[:k]))
        # shrink until the box avoids covered cells
        while True:
            box = np.ix_(*subsets)
            if not covered[box].any():
                break
            j = max(range(len(dims)), key=lambda q: (len(subsets[q]), rng.random()))
            extra = [v for v in subsets[j] if v != cell[j]]
            subsets[j].remove(rng.choice(extra))
        covered[np.ix_(*subsets)] = True
        tiles.append(Tile(tuple(tuple(x) for x in subsets)))
    return TileStructure(dims, tuple(tiles))
