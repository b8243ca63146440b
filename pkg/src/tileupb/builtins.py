"""Compiled-in instances: the 3x4 six-tile set, the 3x3x3 and 3^4 UPBs,
the five-state Tiles UPB in 3x3 and its 3x3x3 extension W.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cyclotomic import CycNumber
from .states import OPSet, ProductState, build_S
from .tiles import TileStructure

# tile layouts, one tuple of per-party index sets per tile

FIG1_3X4 = ((3, 4), (
    ((0,), (0, 1)),
    ((0,), (2,)),
    ((0, 1), (3,)),
    ((2,), (1, 2, 3)),
    ((1, 2), (0,)),
    ((1,), (1, 2)),
))

# eta = {0,1}, xi = {1,2}
UPB_333 = ((3, 3, 3), (
    ((1, 2), (0,), (0, 1)),
    ((1, 2), (0, 1), (2,)),
    ((2,), (1, 2), (0, 1)),
    ((0, 1), (2,), (1, 2)),
    ((0, 1), (1, 2), (0,)),
    ((0,), (0, 1), (1, 2)),
    ((0,), (0,), (0,)),
    ((1,), (1,), (1,)),
    ((2,), (2,), (2,)),
))

UPB_3333 = ((3, 3, 3, 3), (
    ((1, 2), (0, 1), (0,), (1, 2)),
    ((1, 2), (2,), (0, 1), (0, 1)),
    ((1, 2), (1, 2), (1, 2), (2,)),
    ((1, 2), (2,), (0,), (2,)),
    ((2,), (0, 1), (1, 2), (0, 1)),
    ((2,), (0, 1), (0,), (0,)),
    ((2,), (0,), (1, 2), (2,)),
    ((2,), (2,), (2,), (0, 1)),
    ((0, 1), (1, 2), (2,), (0, 1)),
    ((0, 1), (0,), (1, 2), (1, 2)),
    ((0, 1), (0, 1), (0, 1), (0,)),
    ((0, 1), (0,), (2,), (0,)),
    ((0,), (1, 2), (0, 1), (1, 2)),
    ((0,), (1, 2), (2,), (2,)),
    ((0,), (2,), (0, 1), (0,)),
    ((0,), (0,), (0,), (1, 2)),
    ((1,), (1,), (1,), (1,)),
))

TILES_3X3 = ((3, 3), (
    ((0,), (0, 1)),
    ((0, 1), (2,)),
    ((2,), (1, 2)),
    ((1, 2), (0,)),
    ((1,), (1,)),
))


def _ts(layout) -> TileStructure:
    dims, tiles = layout
    return TileStructure.from_subsets(dims, tiles)


def _basis(d: int, i: int) -> tuple[CycNumber, ...]:
    return tuple(CycNumber.one() if k == i else CycNumber.zero() for k in range(d))


def w_tile_structure() -> TileStructure:
    """Tiles layout on the C=0 layer, singleton cells on layers C=1, 2."""
    tiles = [tuple(t) + ((0,),) for t in TILES_3X3[1]]
    for c in (1, 2):
        for a in range(3):
            for b in range(3):
                tiles.append(((a,), (b,), (c,)))
    return TileStructure.from_subsets((3, 3, 3), tiles)


def w_set() -> OPSet:
    tiles = build_S(_ts(TILES_3X3))
    states = [
        ProductState(st.factors + (_basis(3, 0),), f"A1:{st.label}") for st in tiles
    ]
    for c in (1, 2):
        for a in range(3):
            for b in range(3):
                states.append(
                    ProductState((_basis(3, a), _basis(3, b), _basis(3, c)), f"A{c + 1}:|{a}{b}{c}>")
                )
    return OPSet((3, 3, 3), tuple(states))


@dataclass(frozen=True)
class Instance:
    name: str
    ts: TileStructure
    opset: OPSet
    metadata: dict = field(default_factory=dict)


def _make(name: str) -> Instance:
    if name == "fig1-3x4":
        ts = _ts(FIG1_3X4)
        return Instance(name, ts, build_S(ts), {
            "size": 7, "opb_size": 12, "complement_dim": 5,
            "product_families": 1, "upb": False, "sucpb": True,
        })
    if name == "upb-333":
        ts = _ts(UPB_333)
        return Instance(name, ts, build_S(ts), {
            "size": 19, "opb_size": 27, "complement_dim": 8,
            "families_per_bipartition": 4, "upb": True, "sucpb_every_bipartition": True,
        })
    if name == "upb-3333":
        ts = _ts(UPB_3333)
        return Instance(name, ts, build_S(ts), {
            "size": 65, "opb_size": 81, "complement_dim": 16,
            "product_span_single_party_cut": 12, "families_two_party_cut": 8,
            "upb": True, "sucpb_every_bipartition": True,
        })
    if name == "tiles-3x3":
        ts = _ts(TILES_3X3)
        return Instance(name, ts, build_S(ts), {"size": 5, "complement_dim": 4, "upb": True})
    if name == "w-333":
        return Instance(name, w_tile_structure(), w_set(), {
            "size": 23, "complement_dim": 4, "upb": True, "completable_cut": "AB|C",
        })
    raise KeyError(f"unknown instance {name!r}; choose from {', '.join(NAMES)}")


NAMES = ("fig1-3x4", "upb-333", "upb-3333", "tiles-3x3", "w-333")


def builtin(name: str) -> Instance:
    return _make(name)


def tile_structure(name: str) -> TileStructure:
    return _make(name).ts
