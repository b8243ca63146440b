"""The normalized complement projector and its positivity checks.

rho_bar = (I - sum of normalized projectors onto S) / (D - |S|).  Entries
are kept exact and sparse; only eigenvalues go through floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .builtins import TILES_3X3, w_set, w_tile_structure
from .complement import (
    INCONCLUSIVE,
    MULTIPARTITE,
    SUCPB,
    SDescription,
    complement_model,
    complement_span_matrix,
    is_product_across,
    is_upb,
    sucpb_certify,
)
from .cyclotomic import CycNumber
from .linalg import gram_schmidt, inner_product, kernel_basis
from .states import OPSet, build_S, verify_orthogonality
from .tiles import Bipartition, TileStructure, all_bipartitions


class EmptyComplement(ValueError):
    pass


class Inconclusive(RuntimeError):
    def __init__(self, certificate):
        super().__init__(certificate.reason)
        self.certificate = certificate


@dataclass
class DensityMatrix:
    """Sparse exact matrix on a multipartite space; missing entries are zero."""

    dims: tuple[int, ...]
    entries: dict[tuple[int, int], CycNumber]

    @property
    def D(self) -> int:
        return math.prod(self.dims)

    def trace(self) -> CycNumber:
        return sum((self.entries.get((k, k), CycNumber.zero()) for k in range(self.D)), CycNumber.zero())

    def is_hermitian(self) -> bool:
        for (r, c), x in self.entries.items():
            if self.entries.get((c, r), CycNumber.zero()) != x.conjugate():
                return False
        return True

    def to_numpy(self) -> np.ndarray:
        M = np.zeros((self.D, self.D), dtype=complex)
        for (r, c), x in self.entries.items():
            M[r, c] = x.to_complex()
        return M

    def __eq__(self, other) -> bool:
        if not isinstance(other, DensityMatrix) or self.dims != other.dims:
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        z = CycNumber.zero()
        return all(self.entries.get(k, z) == other.entries.get(k, z) for k in keys)


def _add_projector(acc: dict, v: Sequence[CycNumber], weight: CycNumber) -> None:
    nz = [(k, x) for k, x in enumerate(v) if x]
    for r, x in nz:
        xr = x * weight
        for c, y in nz:
            key = (r, c)
            val = acc.get(key, CycNumber.zero()) + xr * y.conjugate()
            if val:
                acc[key] = val
            else:
                acc.pop(key, None)


def rho_bar(opset: OPSet) -> DensityMatrix:
    D = math.prod(opset.dims)
    if len(opset) >= D:
        raise EmptyComplement(f"{len(opset)} states in dimension {D} leave no complement")
    scale = CycNumber.rational(1) / (D - len(opset))
    acc: dict = {(k, k): scale for k in range(D)}
    for st in opset.states:
        v = st.vector()
        _add_projector(acc, v, -scale / inner_product(v, v))
    return DensityMatrix(tuple(opset.dims), acc)


def complement_projector(opset: OPSet) -> DensityMatrix:
    """Same matrix built from an orthogonal basis of the exact kernel instead."""
    D = math.prod(opset.dims)
    basis = gram_schmidt(kernel_basis(complement_span_matrix(opset), D))
    if not basis:
        raise EmptyComplement("complement is zero")
    scale = CycNumber.rational(1) / len(basis)
    acc: dict = {}
    for u in basis:
        _add_projector(acc, u, scale / inner_product(u, u))
    return DensityMatrix(tuple(opset.dims), acc)


def _cell_table(dims: Sequence[int]):
    cells = list(itertools.product(*map(range, dims)))
    index = {c: k for k, c in enumerate(cells)}
    return cells, index


def partial_transpose(rho: DensityMatrix, bp: Bipartition) -> DensityMatrix:
    """Transpose the parties on side D of ``bp``; exact."""
    cells, index = _cell_table(rho.dims)
    side = set(bp.D)
    out = {}
    for (r, c), x in rho.entries.items():
        a, b = list(cells[r]), list(cells[c])
        for j in side:
            a[j], b[j] = b[j], a[j]
        out[(index[tuple(a)], index[tuple(b)])] = x
    return DensityMatrix(rho.dims, out)


def partial_transpose_numpy(M: np.ndarray, dims: Sequence[int], bp: Bipartition) -> np.ndarray:
    n = len(dims)
    T = M.reshape(tuple(dims) * 2)
    perm = list(range(2 * n))
    for j in bp.D:
        perm[j], perm[n + j] = n + j, j
    D = math.prod(dims)
    return T.transpose(perm).reshape(D, D)


def ppt_check(rho: DensityMatrix, bp: Bipartition, tol: float = 1e-9) -> float:
    """Minimum eigenvalue of the partial transpose across ``bp``."""
    M = partial_transpose_numpy(rho.to_numpy(), rho.dims, bp)
    return float(np.linalg.eigvalsh((M + M.conj().T) / 2).min())


@dataclass
class PPTReport:
    bipartition: Bipartition
    min_eigenvalue: float
    tol: float = 1e-9

    @property
    def ok(self) -> bool:
        return self.min_eigenvalue >= -self.tol

    def to_json(self) -> dict:
        return {"bipartition": self.bipartition.to_json(), "min_eigenvalue": self.min_eigenvalue, "tol": self.tol}


def ppt_report(rho: DensityMatrix, tol: float = 1e-9) -> list[PPTReport]:
    n = len(rho.dims)
    bps = all_bipartitions(n) if n > 2 else [Bipartition((0,), (1,))]
    return [PPTReport(bp, ppt_check(rho, bp, tol), tol) for bp in bps]


def entangled_via_range(desc: SDescription) -> bool:
    """True when full product states in the complement fail to span it."""
    cert = sucpb_certify(desc, MULTIPARTITE, complement_model(desc))
    if cert.verdict == SUCPB:
        return True
    if cert.verdict == INCONCLUSIVE and cert.exact:
        return False
    raise Inconclusive(cert)


@dataclass
class WCompletion:
    ok: bool
    states: list[list[CycNumber]]
    orthogonal: bool
    product_across: bool
    multipartite_upb: bool

    @property
    def size(self) -> int:
        return len(self.states)


def w_completion() -> WCompletion:
    ts = TileStructure.from_subsets(*TILES_3X3)
    tiles_s = build_S(ts)
    psi = gram_schmidt(kernel_basis(complement_span_matrix(tiles_s), ts.D))
    zero_c = [CycNumber.one(), CycNumber.zero(), CycNumber.zero()]
    lifted = [[x * z for x in v for z in zero_c] for v in psi]
    W = w_set()
    vectors = lifted + W.vectors()
    orth = all(not inner_product(vectors[i], vectors[j])
               for i in range(len(vectors)) for j in range(i + 1, len(vectors)))
    cut = Bipartition((0, 1), (2,))
    product = all(is_product_across(v, W.dims, cut) for v in vectors)
    upb = is_upb(SDescription(w_tile_structure(), W, "w-333"), MULTIPARTITE).verdict == "UPB"
    ok = orth and product and len(vectors) == math.prod(W.dims) and upb and verify_orthogonality(W)
    return WCompletion(ok, vectors, orth, product, upb)


def verify_w_completion() -> bool:
    return w_completion().ok
