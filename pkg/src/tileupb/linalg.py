"""Exact linear algebra over Q(zeta_L) and integer lattice kernels.

Vectors are plain sequences and matrices are lists of rows.  Entries may be
ints, Fractions or CycNumbers; everything is promoted to one common order
before elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cyclotomic import CycNumber, as_cyc, common_order

CycVector = Sequence[CycNumber]
CycMatrix = Sequence[Sequence[CycNumber]]


def to_cyc_matrix(rows, order: int | None = None) -> list[list[CycNumber]]:
    rows = [list(r) for r in rows]
    if order is None:
        order = common_order(x for r in rows for x in r)
    return [[as_cyc(x, order) for x in r] for r in rows]


def inner_product(u: CycVector, v: CycVector) -> CycNumber:
    """<u|v> = sum conj(u_i) v_i."""
    if len(u) != len(v):
        raise ValueError(f"length mismatch: {len(u)} vs {len(v)}")
    order = common_order(list(u) + list(v))
    total = CycNumber.zero(order)
    for a, b in zip(u, v):
        if a and b:
            total = total + as_cyc(a, order).conjugate() * b
    return total


def rref(rows, ncols: int | None = None) -> tuple[list[list[CycNumber]], list[int]]:
    """Reduced row echelon form.  Returns (nonzero rows, pivot columns)."""
    m = to_cyc_matrix(rows)
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c]), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = m[r][c].inverse()
        row = [x * inv if x else x for x in m[r]]
        m[r] = row
        nz = [j for j in range(c, ncols) if row[j]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                target = m[i]
                for j in nz:
                    target[j] = target[j] - f * row[j]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    rows = [r for r in rows]
    if not rows:
        return 0
    return len(rref(rows)[1])


def kernel_basis(rows, ncols: int | None = None) -> list[list[CycNumber]]:
    """Basis of the right null space {x : M x = 0}."""
    rows = list(rows)
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    order = common_order(x for r in rows for x in r)
    if not rows:
        return [
            [CycNumber.one(order) if j == i else CycNumber.zero(order) for j in range(ncols)]
            for i in range(ncols)
        ]
    red, pivots = rref(rows, ncols)
    order = red[0][0].order if red else order
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [CycNumber.zero(order) for _ in range(ncols)]
        v[f] = CycNumber.one(order)
        for row, p in zip(red, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def same_span(a, b) -> bool:
    a, b = list(a), list(b)
    ra, rb = rank(a), rank(b)
    return ra == rb and rank(a + b) == ra


def in_span(v, rows) -> bool:
    rows = list(rows)
    return rank(rows + [list(v)]) == rank(rows)


def gram_schmidt(vectors) -> list[list[CycNumber]]:
    """Exact orthogonal (unnormalized) basis of span(vectors); zero vectors dropped."""
    out: list[list[CycNumber]] = []
    norms: list[CycNumber] = []
    for v in vectors:
        w = list(v)
        for u, nu in zip(out, norms):
            c = inner_product(u, w) / nu
            if c:
                w = [wi - c * ui for wi, ui in zip(w, u)]
        if any(w):
            out.append(w)
            norms.append(inner_product(w, w))
    return out


def mat_vec(rows, v) -> list[CycNumber]:
    out = []
    for r in rows:
        acc = 0
        for a, b in zip(r, v):
            if a and b:
                acc = a * b + acc
        out.append(as_cyc(acc) if not isinstance(acc, CycNumber) else acc)
    return out


# -- integer lattices -------------------------------------------------------


def smith_normal_form(E: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, D, V) with U*E*V = D diagonal, U and V unimodular.

    The diagonal entries d_1 | d_2 | ... are nonnegative.
    """
    m = len(E)
    n = len(E[0]) if m else 0
    D = [list(map(int, row)) for row in E]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst -= q * row_src
        D[dst] = [a - q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q * col_src
        for row in D:
            row[dst] -= q * row[src]
        for row in V:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, D[i][t] // D[t][t])
                    if D[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, D[t][j] // D[t][t])
                    if D[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # enforce divisibility of the remaining block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad[0], -1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return U, D, V


@dataclass(frozen=True)
class LatticeKernel:
    """Solutions of a^E = 1 on the torus: a = prod_j t_j^(V[:, j]).

    ``kernel`` spans {x in Z^n : E x = 0}.  ``torsion`` lists (d, column)
    pairs whose parameter ranges over the d-th roots of unity.
    """

    kernel: tuple[tuple[int, ...], ...]
    torsion: tuple[tuple[int, tuple[int, ...]], ...]
    rank: int


def integer_lattice_kernel(E: Sequence[Sequence[int]], ncols: int | None = None) -> LatticeKernel:
    E = [list(r) for r in E]
    n = len(E[0]) if E else (ncols or 0)
    if not E:
        ident = tuple(tuple(int(i == j) for i in range(n)) for j in range(n))
        return LatticeKernel(kernel=ident, torsion=(), rank=0)
    _, D, V = smith_normal_form(E)
    diag = [D[i][i] for i in range(min(len(D), n))]
    r = sum(1 for d in diag if d)
    cols = [tuple(V[i][j] for i in range(n)) for j in range(n)]
    torsion = tuple((diag[j], cols[j]) for j in range(r) if diag[j] > 1)
    return LatticeKernel(kernel=tuple(cols[r:]), torsion=torsion, rank=r)
