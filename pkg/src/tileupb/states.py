"""Orthogonal product sets generated from tile structures.

Each tile X_1 x ... x X_n carries the prod |X_j| product states built from
row-orthogonal coefficient matrices whose first row is all ones (Fourier by
default).  The member with every coefficient index zero is the tile
indicator; dropping those and adding the all-ones stopper gives the set S
analysed elsewhere.  States are kept unnormalized.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cyclotomic import CycNumber, as_cyc, common_order, embed_root, lcm
from .linalg import inner_product
from .tiles import Bipartition, Tile, TileStructure, validate


class DimensionMismatch(ValueError):
    pass


Matrix = tuple[tuple[CycNumber, ...], ...]


def fourier_matrix(k: int, order: int | None = None) -> Matrix:
    """k x k matrix with entry (a, e) = w_k^(a e)."""
    if k < 1:
        raise ValueError("k must be positive")
    order = order or k
    return tuple(tuple(embed_root(k, a * e, order) for e in range(k)) for a in range(k))


def check_coefficient_matrix(m) -> None:
    k = len(m)
    if any(len(row) != k for row in m):
        raise DimensionMismatch("coefficient matrix must be square")
    if any(x != 1 for x in m[0]):
        raise ValueError("first row of a coefficient matrix must be all ones")
    for a in range(k):
        for b in range(a + 1, k):
            if inner_product(m[a], m[b]):
                raise ValueError(f"rows {a} and {b} of the coefficient matrix are not orthogonal")
        if not any(m[a]):
            raise ValueError(f"row {a} of the coefficient matrix vanishes")


@dataclass(frozen=True)
class CoefficientSpec:
    """Coefficient matrices per (party, side length); Fourier when absent."""

    overrides: Mapping[tuple[int, int], Matrix] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (party, k), m in self.overrides.items():
            m = tuple(tuple(as_cyc(x, common_order(m_ for r in m for m_ in r)) for x in row) for row in m)
            if len(m) != k:
                raise DimensionMismatch(f"override for side length {k} has {len(m)} rows")
            check_coefficient_matrix(m)
            clean[(party, k)] = m
        object.__setattr__(self, "overrides", clean)

    def matrix(self, party: int, k: int) -> Matrix:
        return self.overrides.get((party, k)) or fourier_matrix(k)

    def order(self, ts: TileStructure) -> int:
        """Common field order: lcm of side lengths and override orders."""
        L = lcm(*ts.side_lengths()) if ts.tiles else 1
        for m in self.overrides.values():
            L = lcm(L, common_order(x for row in m for x in row))
        return L


DEFAULT_SPEC = CoefficientSpec()


@dataclass(frozen=True)
class ProductState:
    factors: tuple[tuple[CycNumber, ...], ...]
    label: str = ""

    def __post_init__(self):
        order = common_order(x for f in self.factors for x in f)
        factors = tuple(tuple(as_cyc(x, order) for x in f) for f in self.factors)
        for j, f in enumerate(factors):
            if not any(f):
                raise ValueError(f"factor {j} of {self.label or 'state'} is the zero vector")
        object.__setattr__(self, "factors", factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    @property
    def order(self) -> int:
        return self.factors[0][0].order

    def inner(self, other: "ProductState") -> CycNumber:
        """<self|other>, computed factorwise."""
        if self.dims != other.dims:
            raise DimensionMismatch(f"{self.dims} vs {other.dims}")
        out = CycNumber.one()
        for u, v in zip(self.factors, other.factors):
            ip = inner_product(u, v)
            if not ip:
                return ip
            out = out * ip
        return out

    def vector(self) -> list[CycNumber]:
        out = [CycNumber.one(self.order)]
        for f in self.factors:
            out = [a * b if a and b else CycNumber.zero(self.order) for a in out for b in f]
        return out

    def tile_sum(self, tile: Tile) -> CycNumber:
        """Sum of the amplitudes over the cells of ``tile``."""
        out = CycNumber.one(self.order)
        for f, x in zip(self.factors, tile.subsets):
            part = sum((f[v] for v in x), CycNumber.zero(self.order))
            if not part:
                return part
            out = out * part
        return out

    def to_json(self) -> dict:
        return {"factors": [[x.to_json() for x in f] for f in self.factors], "label": self.label}

    @classmethod
    def from_json(cls, data) -> "ProductState":
        return cls(
            tuple(tuple(CycNumber.from_json(x) for x in f) for f in data["factors"]),
            data.get("label", ""),
        )


@dataclass(frozen=True)
class OPSet:
    dims: tuple[int, ...]
    states: tuple[ProductState, ...]

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __add__(self, other: "OPSet") -> "OPSet":
        if self.dims != other.dims:
            raise DimensionMismatch(f"{self.dims} vs {other.dims}")
        return OPSet(self.dims, self.states + other.states)

    @property
    def labels(self) -> list[str]:
        return [s.label for s in self.states]

    def vectors(self) -> list[list[CycNumber]]:
        return [s.vector() for s in self.states]

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "states": [s.to_json() for s in self.states]}

    @classmethod
    def from_json(cls, data) -> "OPSet":
        if isinstance(data, list):
            states = tuple(ProductState.from_json(x) for x in data)
            if not states:
                raise ValueError("empty OPSet needs explicit dims")
            return cls(states[0].dims, states)
        states = tuple(ProductState.from_json(x) for x in data["states"])
        dims = tuple(data["dims"])
        for st in states:
            if st.dims != dims:
                raise DimensionMismatch(f"state {st.label!r} has dims {st.dims}, expected {dims}")
        return cls(dims, states)


def verify_orthogonality(opset: OPSet) -> bool:
    states = opset.states
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            if states[i].inner(states[j]):
                return False
    return True


def _label(tile_id: int, idx: Sequence[int]) -> str:
    return f"tile:{tile_id},idx:({','.join(map(str, idx))})"


def tile_ops(tile: Tile, dims: Sequence[int], spec: CoefficientSpec = DEFAULT_SPEC,
             tile_id: int = 0, order: int | None = None) -> list[ProductState]:
    """All prod k_j states supported on ``tile``; index (0,...,0) is the tile indicator."""
    if len(tile.subsets) != len(dims):
        raise DimensionMismatch(f"tile has {len(tile.subsets)} parties, grid has {len(dims)}")
    mats = [spec.matrix(j, len(x)) for j, x in enumerate(tile.subsets)]
    for m, x in zip(mats, tile.subsets):
        if len(m) != len(x):
            raise DimensionMismatch("coefficient matrix does not match the tile side length")
    order = order or lcm(*(common_order(v for row in m for v in row) for m in mats))
    out = []
    for idx in itertools.product(*(range(len(x)) for x in tile.subsets)):
        factors = []
        for j, (a, x) in enumerate(zip(idx, tile.subsets)):
            f = [CycNumber.zero(order)] * dims[j]
            for e, pos in enumerate(x):
                f[pos] = as_cyc(mats[j][a][e], order)
            factors.append(tuple(f))
        out.append(ProductState(tuple(factors), _label(tile_id, idx)))
    return out


def _require_valid(ts: TileStructure) -> None:
    report = validate(ts)
    if not report.ok:
        raise ValueError(f"invalid tile structure: {report.to_json()}")


def build_opb(ts: TileStructure, spec: CoefficientSpec = DEFAULT_SPEC) -> OPSet:
    _require_valid(ts)
    order = spec.order(ts)
    states = []
    for t, tile in enumerate(ts.tiles):
        states.extend(tile_ops(tile, ts.dims, spec, t, order))
    return OPSet(ts.dims, tuple(states))


def stopper(dims: Sequence[int], order: int = 1) -> ProductState:
    return ProductState(tuple(tuple(CycNumber.one(order) for _ in range(d)) for d in dims), "stopper")


def build_S(ts: TileStructure, spec: CoefficientSpec = DEFAULT_SPEC, include_stopper: bool = True) -> OPSet:
    """Every non-indicator tile member, plus the stopper."""
    _require_valid(ts)
    order = spec.order(ts)
    states = []
    for t, tile in enumerate(ts.tiles):
        states.extend(tile_ops(tile, ts.dims, spec, t, order)[1:])
    if include_stopper:
        states.append(stopper(ts.dims, order))
    return OPSet(ts.dims, tuple(states))


def tensor_vector(factors: Sequence[Sequence]) -> list:
    out = [1]
    for f in factors:
        out = [a * b for a in out for b in f]
    return out


def flatten_vector(v: Sequence, dims: Sequence[int], bp: Bipartition) -> list[list]:
    """Reshape a full vector into the h1 x h2 matrix of bipartition C|D."""
    if len(v) != math.prod(dims):
        raise DimensionMismatch(f"vector of length {len(v)} for dims {tuple(dims)}")
    h1, h2 = bp.sizes(dims)
    M = [[None] * h2 for _ in range(h1)]
    for k, cell in enumerate(itertools.product(*map(range, dims))):
        r = c = 0
        for j in bp.C:
            r = r * dims[j] + cell[j]
        for j in bp.D:
            c = c * dims[j] + cell[j]
        M[r][c] = v[k]
    return M


def flatten_state(state, bp: Bipartition, dims: Sequence[int] | None = None) -> list[list]:
    if isinstance(state, ProductState):
        return flatten_vector(state.vector(), state.dims, bp)
    if dims is None:
        raise ValueError("dims required for a plain vector")
    return flatten_vector(state, dims, bp)
