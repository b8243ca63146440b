"""Product states in the complement of a tile-generated orthogonal product set.

Once every non-indicator member of every tile lies in S, the complement of S
consists of tile-constant tensors  psi = sum_i a_i 1_{t_i}  whose coefficient
vector a obeys one linear condition per remaining state of S (the stopper
gives sum_i |t_i| a_i = 0).  A product state in that space has support equal
to a union of tiles forming a box (a rectangle, for a bipartition), so the
search splits into finitely many supports.  On a fixed support with all
a_i != 0, the product condition is a binomial system in the a_i, solved
exactly through a Smith normal form; the linear conditions are then imposed
on the resulting monomial parametrization.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .cyclotomic import CycNumber, as_cyc, common_order, lcm
from .linalg import integer_lattice_kernel, kernel_basis, rank
from .states import (
    DEFAULT_SPEC,
    CoefficientSpec,
    OPSet,
    ProductState,
    build_S,
    flatten_vector,
    tensor_vector,
)
from .tiles import Bipartition, TileStructure, all_bipartitions, flat_structure

MULTIPARTITE = "multipartite"
Mode = Union[Bipartition, str]

UPB = "UPB"
NOT_UPB = "NOT-UPB"
SUCPB = "SUCPB"
INCONCLUSIVE = "INCONCLUSIVE"


class ModelError(ValueError):
    """The complement of S is not the tile-constant space the model assumes."""


class NotTileConstant(ModelError):
    pass


class DegenerateInput(ValueError):
    pass


# -- problem description ----------------------------------------------------


@dataclass(frozen=True)
class SDescription:
    """A tile structure together with the product set S living on it."""

    ts: TileStructure
    opset: OPSet
    name: str = ""


def is_tile_constant(state: ProductState, ts: TileStructure) -> bool:
    v = state.vector()
    owner = ts.tile_of_cells()
    first: dict[int, CycNumber] = {}
    for k, t in enumerate(owner):
        if t in first:
            if v[k] != first[t]:
                return False
        else:
            first[t] = v[k]
    return True


def describe(ts: TileStructure, extra_states: Sequence[ProductState] = (),
             include_stopper: bool = True, spec: CoefficientSpec = DEFAULT_SPEC,
             name: str = "") -> SDescription:
    for st in extra_states:
        if not is_tile_constant(st, ts):
            raise NotTileConstant(f"extra state {st.label or st!r} is not constant on tiles")
    base = build_S(ts, spec, include_stopper)
    return SDescription(ts, base + OPSet(ts.dims, tuple(extra_states)), name)


def from_instance(inst) -> SDescription:
    return SDescription(inst.ts, inst.opset, inst.name)


# -- the complement model ---------------------------------------------------


@dataclass
class ComplementModel:
    ts: TileStructure
    areas: list[int]
    constraints: list[list[CycNumber]]
    basis: list[list[CycNumber]]
    order: int

    @property
    def s(self) -> int:
        return self.ts.s

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def dead(self) -> frozenset[int]:
        """Tiles whose coefficient vanishes on the whole complement."""
        return frozenset(i for i in range(self.s) if not any(b[i] for b in self.basis))

    def tensor(self, a: Sequence) -> list:
        owner = self.ts.tile_of_cells()
        return [a[t] for t in owner]


def _constraint_row(state: ProductState, ts: TileStructure) -> list[CycNumber]:
    # <state| sum_i a_i 1_{t_i}> = sum_i conj(sum over t_i of state) a_i
    return [state.tile_sum(t).conjugate() for t in ts.tiles]


def complement_span_matrix(opset: OPSet) -> list[list[CycNumber]]:
    """Rows whose right kernel is the orthogonal complement of span(S)."""
    return [[x.conjugate() for x in st.vector()] for st in opset.states]


def complement_model(desc: SDescription, cross_check: bool = True) -> ComplementModel:
    ts = desc.ts
    rows = []
    for st in desc.opset.states:
        if st.dims != ts.dims:
            raise ModelError(f"state {st.label!r} has dims {st.dims}, grid has {ts.dims}")
        row = _constraint_row(st, ts)
        if any(row):
            rows.append(row)
    order = common_order(x for r in rows for x in r)
    if rows:
        basis = kernel_basis(rows, ts.s)
    else:
        basis = [[CycNumber.one(order) if i == j else CycNumber.zero(order) for j in range(ts.s)]
                 for i in range(ts.s)]
    model = ComplementModel(ts, ts.areas(), rows, basis, order)
    if cross_check:
        r = rank(complement_span_matrix(desc.opset)) if len(desc.opset) else 0
        if ts.D - r != model.dim:
            raise ModelError(
                f"complement has dimension {ts.D - r} but the tile-constant model has {model.dim}; "
                "S does not contain every non-indicator tile member"
            )
    return model


# -- supports -----------------------------------------------------------------


def grid_for(ts: TileStructure, mode: Mode) -> TileStructure:
    if mode == MULTIPARTITE:
        return ts
    if isinstance(mode, Bipartition):
        return flat_structure(ts, mode)
    raise ValueError(f"unknown mode {mode!r}")


def _closure(members: int, masks: Sequence[tuple[int, ...]], forbidden: int) -> int | None:
    """Smallest tile set containing ``members`` whose union is a box, or None."""
    n = len(masks[0])
    while True:
        box = [0] * n
        m = members
        while m:
            low = m & -m
            t = low.bit_length() - 1
            m ^= low
            for j in range(n):
                box[j] |= masks[t][j]
        grown = 0
        for t, tm in enumerate(masks):
            if all(tm[j] & box[j] for j in range(n)):
                grown |= 1 << t
        if grown & forbidden:
            return None
        if grown == members:
            return members
        members = grown


def enumerate_supports(ts: TileStructure, mode: Mode = MULTIPARTITE,
                       exclude: Iterable[int] = ()) -> list[tuple[int, ...]]:
    """Tile subsets whose union is a box of the grid (a rectangle for a bipartition).

    Subsets touching an ``exclude``d tile are skipped.
    """
    grid = grid_for(ts, mode)
    masks = [t.masks() for t in grid.tiles]
    forbidden = sum(1 << t for t in exclude)
    seen: set[int] = set()
    frontier = []
    for t in range(grid.s):
        if forbidden >> t & 1:
            continue
        c = _closure(1 << t, masks, forbidden)
        if c is not None and c not in seen:
            seen.add(c)
            frontier.append(c)
    while frontier:
        nxt = []
        for c in frontier:
            for t in range(grid.s):
                if c >> t & 1 or forbidden >> t & 1:
                    continue
                d = _closure(c | 1 << t, masks, forbidden)
                if d is not None and d not in seen:
                    seen.add(d)
                    nxt.append(d)
        frontier = nxt
    out = [tuple(t for t in range(grid.s) if m >> t & 1) for m in seen]
    out.sort(key=lambda x: (len(x), x))
    return out


# -- solution families ----------------------------------------------------------


@dataclass
class Witness:
    """A product state in the complement with its tile coefficients."""

    tile_values: list
    vector: list
    factors: list
    exact: bool
    mode: str

    def to_json(self) -> dict:
        enc = _scalar_json if self.exact else _complex_json
        return {
            "exact": self.exact,
            "mode": self.mode,
            "tile_values": [enc(x) for x in self.tile_values],
            "factors": [[enc(x) for x in f] for f in self.factors],
        }


def _scalar_json(x):
    return as_cyc(x).to_json()


def _complex_json(x):
    x = complex(x)
    return [x.real, x.imag]


@dataclass
class SolutionFamily:
    support: tuple[int, ...]
    kind: str  # "linear" | "toric"
    status: str  # "empty" | "nonempty" | "inconclusive"
    basis: list[list[CycNumber]] = field(default_factory=list)
    span_exact: bool = True
    witness: Witness | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def nonempty(self) -> bool:
        return self.status == "nonempty"

    def to_json(self) -> dict:
        return {
            "support": list(self.support),
            "kind": self.kind,
            "status": self.status,
            "span_exact": self.span_exact,
            "basis": [[_scalar_json(x) for x in b] for b in self.basis],
            "witness": self.witness.to_json() if self.witness else None,
            "diagnostics": self.diagnostics,
        }


def _box_of(grid: TileStructure, support: Sequence[int]) -> list[list[int]]:
    box = [set() for _ in grid.dims]
    for t in support:
        for j, x in enumerate(grid.tiles[t].subsets):
            box[j].update(x)
    return [sorted(x) for x in box]


def binomial_relations(grid: TileStructure, support: Sequence[int]) -> list[tuple[int, ...]]:
    """Exponent rows (over support positions) of the rank-one conditions on the box."""
    pos = {t: k for k, t in enumerate(support)}
    owner = grid.tile_of_cells()
    box = _box_of(grid, support)
    n = grid.n
    parties = [0] if n == 2 else range(n)

    def tile_at(cell):
        return owner[grid.cell_index(cell)]

    rows: set[tuple[int, ...]] = set()
    for j in parties:
        if len(box[j]) < 2:
            continue
        rest = [box[k] for k in range(n) if k != j]
        combos = list(itertools.product(*rest))
        if len(combos) < 2:
            continue
        x0, y0 = box[j][0], combos[0]

        def cell(x, y):
            c = list(y)
            c.insert(j, x)
            return tuple(c)

        for x in box[j][1:]:
            for y in combos[1:]:
                e = [0] * len(support)
                e[pos[tile_at(cell(x, y))]] += 1
                e[pos[tile_at(cell(x0, y0))]] += 1
                e[pos[tile_at(cell(x, y0))]] -= 1
                e[pos[tile_at(cell(x0, y))]] -= 1
                if any(e):
                    rows.add(tuple(e))
    return sorted(rows)


def _nonvanishing_combination(vectors: list[list[CycNumber]], coords: Sequence[int]):
    """An integer combination of ``vectors`` with every listed coordinate nonzero."""
    if not vectors:
        return None
    rng = random.Random(0)
    trials = [[1] * len(vectors), [k + 1 for k in range(len(vectors))], [2 ** k for k in range(len(vectors))]]
    for attempt in itertools.count():
        lam = trials[attempt] if attempt < len(trials) else [rng.randint(1, 50) for _ in vectors]
        v = [sum((l * vec[i] for l, vec in zip(lam, vectors)), CycNumber.zero()) for i in range(len(vectors[0]))]
        if all(v[i] for i in coords):
            return v
        if attempt > 200:
            return None


def _solve_linear(support, classes, model: ComplementModel) -> tuple[str, list, list | None]:
    s = model.s
    cls_rows = [[sum((c[i] for i in g), CycNumber.zero(model.order)) for g in classes]
                for c in model.constraints]
    cls_rows = [r for r in cls_rows if any(r)]
    if cls_rows:
        K = kernel_basis(cls_rows, len(classes))
    else:
        K = [[CycNumber.one(model.order) if a == b else CycNumber.zero(model.order)
              for b in range(len(classes))] for a in range(len(classes))]
    if not K or any(not any(b[g] for b in K) for g in range(len(classes))):
        return "empty", [], None

    def expand(b):
        a = [CycNumber.zero(model.order)] * s
        for g, members in enumerate(classes):
            for i in members:
                a[i] = b[g]
        return a

    comb = _nonvanishing_combination(K, range(len(classes)))
    return "nonempty", [expand(b) for b in K], expand(comb)


def _laurent(model: ComplementModel, support, omega, mono) -> list[dict]:
    """Constraint polynomials in the free torus parameters for one torsion coset."""
    polys = []
    for c in model.constraints:
        p: dict[tuple[int, ...], CycNumber] = {}
        for k, i in enumerate(support):
            if c[i]:
                term = c[i] * omega[k]
                p[mono[k]] = p.get(mono[k], CycNumber.zero()) + term
        p = {m: v for m, v in p.items() if v}
        polys.append(p)
    return polys


def _rational_kth_root(q: Fraction, k: int) -> Fraction | None:
    if q <= 0:
        return None

    def iroot(x):
        r = round(x ** (1.0 / k)) if x < 2 ** 52 else int(x ** (1.0 / k))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand ** k == x:
                return cand
        return None

    a, b = iroot(q.numerator), iroot(q.denominator)
    return None if a is None or b is None else Fraction(a, b)


def _exact_binomial_root(z: CycNumber, k: int) -> CycNumber | None:
    """Some s with s**k == z, when z is a positive rational times a root of unity."""
    L = z.order
    for a in range(2 * L):
        unit = CycNumber.zeta(2 * L, a)
        q = z / unit
        if q.is_rational():
            r = _rational_kth_root(q.as_fraction(), k)
            if r is not None:
                return CycNumber.zeta(2 * L * k, a) * r
    return None


def _univariate(poly: dict, var: int, base: Sequence[int]) -> dict[int, CycNumber]:
    out: dict[int, CycNumber] = {}
    for m, c in poly.items():
        scale = Fraction(1)
        for u, e in enumerate(m):
            if u != var:
                scale *= Fraction(base[u]) ** e
        out[m[var]] = out.get(m[var], CycNumber.zero()) + c * scale
    return {e: c for e, c in out.items() if c}


def _laurent_root(poly: dict, nvars: int):
    """A torus point where a Laurent polynomial with >= 2 terms vanishes.

    Returns (values, exact).  Values are CycNumbers when exact, complex otherwise.
    """
    for base_val in (1, 2, 3, 5):
        for var in range(nvars):
            base = [base_val] * nvars
            uni = _univariate(poly, var, base)
            if len(uni) < 2:
                continue
            lo = min(uni)
            terms = {e - lo: c for e, c in uni.items()}
            deg = max(terms)
            root = None
            if len(terms) == 2:
                z = -terms[0] / terms[deg]
                root = z if deg == 1 else _exact_binomial_root(z, deg)
            if root is not None:
                vals = [as_cyc(base_val) for _ in range(nvars)]
                vals[var] = root
                return vals, True
            coeffs = [terms.get(e, CycNumber.zero()).to_complex() for e in range(deg, -1, -1)]
            roots = [r for r in np.roots(coeffs) if abs(r) > 1e-8]
            if roots:
                vals = [complex(base_val)] * nvars
                vals[var] = complex(min(roots, key=lambda r: abs(abs(r) - 1)))
                return vals, False
    return None, False


def _monomial_value(omega, exps, tvals, exact):
    if exact:
        out = omega
        for e, t in zip(exps, tvals):
            if e:
                out = out * t ** e
        return out
    out = omega.to_complex()
    for e, t in zip(exps, tvals):
        out *= complex(t) ** e
    return out


def _solve_toric(support, lattice, model: ComplementModel):
    """Classify the constraint polynomials coset by coset."""
    s = model.s
    free = lattice.kernel
    tors = lattice.torsion
    mono = [tuple(col[k] for col in free) for k in range(len(support))]
    N = lcm(*(d for d, _ in tors)) if tors else 1
    diagnostics = {"free_parameters": len(free), "torsion": [d for d, _ in tors], "cosets": []}
    span_vectors: list[list[CycNumber]] = []
    span_exact = True
    status = "empty"
    witness = None
    for ks in itertools.product(*(range(d) for d, _ in tors)):
        omega = []
        for k in range(len(support)):
            e = sum(kj * col[k] * (N // d) for kj, (d, col) in zip(ks, tors))
            omega.append(CycNumber.zeta(N, e % N) if N > 1 else CycNumber.one())
        polys = _laurent(model, support, omega, mono)
        live = [p for p in polys if p]
        coset = {"coset": list(ks)}
        if any(len(p) == 1 for p in live):
            coset["status"] = "empty"
            diagnostics["cosets"].append(coset)
            continue
        # monomial-grouped upper bound for the span of this coset
        groups: dict[tuple[int, ...], list[int]] = {}
        for k, m in enumerate(mono):
            groups.setdefault(m, []).append(k)
        gvecs = []
        for m, ks_ in groups.items():
            v = [CycNumber.zero()] * s
            for k in ks_:
                v[support[k]] = omega[k]
            gvecs.append(v)
        crow = [[sum((c[support[k]] * omega[k] for k in ks_), CycNumber.zero()) for ks_ in groups.values()]
                for c in model.constraints]
        crow = [r for r in crow if any(r)]
        betas = kernel_basis(crow, len(gvecs)) if crow else [
            [CycNumber.one() if a == b else CycNumber.zero() for b in range(len(gvecs))] for a in range(len(gvecs))]
        for beta in betas:
            span_vectors.append([sum((b * g[i] for b, g in zip(beta, gvecs)), CycNumber.zero()) for i in range(s)])
        if not live:
            coset["status"] = "nonempty"
            status = "nonempty"
            if witness is None:
                witness = ([CycNumber.zero()] * s, True)
                for k, i in enumerate(support):
                    witness[0][i] = omega[k]
            diagnostics["cosets"].append(coset)
            continue
        span_exact = False
        distinct = [live[0]]
        for p in live[1:]:
            if not _proportional(p, distinct[0]):
                distinct.append(p)
        if len(distinct) > 1:
            coset["status"] = "inconclusive"
            coset["reason"] = f"{len(distinct)} independent constraints on a non-linear family"
            if status == "empty":
                status = "inconclusive"
            diagnostics["cosets"].append(coset)
            continue
        coset["status"] = "nonempty"
        status = "nonempty"
        if witness is None or not witness[1]:
            tvals, exact = _laurent_root(distinct[0], len(free))
            if tvals is not None and (witness is None or exact):
                a = [CycNumber.zero() if exact else 0j] * s
                for k, i in enumerate(support):
                    a[i] = _monomial_value(omega[k], mono[k], tvals, exact)
                witness = (a, exact)
        diagnostics["cosets"].append(coset)
    return status, span_vectors, span_exact, witness, diagnostics


def _proportional(p: dict, q: dict) -> bool:
    if set(p) != set(q):
        return False
    m0 = next(iter(p))
    r = p[m0] / q[m0]
    return all(p[m] == r * q[m] for m in p)


def _classes(support, lattice) -> list[list[int]] | None:
    if lattice.torsion:
        return None
    rows: dict[tuple[int, ...], list[int]] = {}
    for k, i in enumerate(support):
        rows.setdefault(tuple(col[k] for col in lattice.kernel), []).append(i)
    if len(rows) != len(lattice.kernel):
        return None
    return sorted(rows.values())


def solve_support(support: Sequence[int], model: ComplementModel, mode: Mode = MULTIPARTITE,
                  grid: TileStructure | None = None) -> SolutionFamily:
    """Product states of the complement whose support is exactly ``support``."""
    support = tuple(sorted(support))
    grid = grid or grid_for(model.ts, mode)
    E = binomial_relations(grid, support)
    lattice = integer_lattice_kernel(E, ncols=len(support))
    classes = _classes(support, lattice)
    if classes is not None:
        status, basis, a = _solve_linear(support, classes, model)
        fam = SolutionFamily(support, "linear", status, basis, True,
                             diagnostics={"classes": [list(g) for g in classes]})
        if a is not None:
            fam.witness = make_witness(model, a, mode, True)
        return fam
    status, span, span_exact, wit, diag = _solve_toric(support, lattice, model)
    fam = SolutionFamily(support, "toric", status, span, span_exact, diagnostics=diag)
    if status == "empty":
        fam.basis = []
    if wit is not None and status == "nonempty":
        fam.witness = make_witness(model, wit[0], mode, wit[1])
    return fam


def make_witness(model: ComplementModel, a: Sequence, mode: Mode, exact: bool) -> Witness:
    ts = model.ts
    v = model.tensor(a)
    label = MULTIPARTITE if mode == MULTIPARTITE else mode.label
    if exact:
        v = [as_cyc(x) for x in v]
    if mode == MULTIPARTITE:
        factors = _factorize(v, ts.dims, exact)
    else:
        factors = _factorize_matrix(flatten_vector(v, ts.dims, mode), exact)
    return Witness(list(a), v, factors, exact, label)


def _factorize_matrix(M, exact: bool):
    r0, c0 = next((r, c) for r, row in enumerate(M) for c, x in enumerate(row) if x)
    pivot = M[r0][c0]
    u = [row[c0] for row in M]
    w = [x / pivot for x in M[r0]]
    return [u, w]


def _factorize(v, dims, exact: bool):
    k0 = next(k for k, x in enumerate(v) if x)
    x0 = np.unravel_index(k0, dims)
    factors = []
    strides = [math.prod(dims[j + 1:]) for j in range(len(dims))]
    for j, d in enumerate(dims):
        base = k0 - x0[j] * strides[j]
        factors.append([v[base + x * strides[j]] for x in range(d)])
    scale = v[k0] ** (len(dims) - 1)
    factors[0] = [x / scale for x in factors[0]]
    return factors


# -- product test ---------------------------------------------------------------


def is_product_tensor(v: Sequence, dims: Sequence[int]) -> tuple[bool, list | None]:
    """Exact test: every single-party flattening has rank at most one."""
    if len(v) != math.prod(dims):
        raise ValueError(f"vector of length {len(v)} for dims {tuple(dims)}")
    if not any(v):
        raise DegenerateInput("the zero vector is not a state")
    n = len(dims)
    v = [as_cyc(x) for x in v]
    for j in range(n):
        bp = Bipartition((j,), tuple(k for k in range(n) if k != j))
        if rank(flatten_vector(v, dims, bp)) > 1:
            return False, None
    factors = _factorize(v, dims, True)
    if tensor_vector(factors) != v:
        return False, None
    return True, factors


def is_product_across(v: Sequence, dims: Sequence[int], bp: Bipartition) -> bool:
    return rank(flatten_vector([as_cyc(x) for x in v], dims, bp)) <= 1


def verify_witness(desc: SDescription, w: Witness, mode: Mode, tol: float = 1e-9) -> bool:
    """Independent check: nonzero, orthogonal to all of S, product in ``mode``."""
    dims = desc.ts.dims
    if w.exact:
        v = [as_cyc(x) for x in w.vector]
        if not any(v):
            return False
        for st in desc.opset.states:
            sv = st.vector()
            acc = CycNumber.zero()
            for a, b in zip(sv, v):
                if a and b:
                    acc = acc + a.conjugate() * b
            if acc:
                return False
        if mode == MULTIPARTITE:
            return is_product_tensor(v, dims)[0]
        return is_product_across(v, dims, mode)
    v = np.array([complex(x) for x in w.vector])
    if np.linalg.norm(v) < tol:
        return False
    nv = v / np.linalg.norm(v)
    for st in desc.opset.states:
        sv = np.array([x.to_complex() for x in st.vector()])
        if abs(np.vdot(sv, nv)) > tol * max(1.0, np.linalg.norm(sv)):
            return False
    cuts = ([Bipartition((j,), tuple(k for k in range(len(dims)) if k != j)) for j in range(len(dims))]
            if mode == MULTIPARTITE else [mode])
    for bp in cuts:
        M = np.array(flatten_vector(list(nv), dims, bp), dtype=complex)
        sv = np.linalg.svd(M, compute_uv=False)
        if len(sv) > 1 and sv[1] > 1e-7:
            return False
    return True


# -- certificates -----------------------------------------------------------------


@dataclass
class Analysis:
    model: ComplementModel
    mode: Mode
    families: list[SolutionFamily]
    candidates: int

    @property
    def nonempty(self) -> list[SolutionFamily]:
        return [f for f in self.families if f.status == "nonempty"]

    @property
    def inconclusive(self) -> list[SolutionFamily]:
        return [f for f in self.families if f.status == "inconclusive"]


def analyse(desc: SDescription, mode: Mode = MULTIPARTITE, model: ComplementModel | None = None) -> Analysis:
    model = model or complement_model(desc)
    grid = grid_for(desc.ts, mode)
    cands = enumerate_supports(desc.ts, mode, exclude=model.dead) if model.dim else []
    fams = []
    for sup in cands:
        fam = solve_support(sup, model, mode, grid)
        if fam.status != "empty":
            fams.append(fam)
    return Analysis(model, mode, fams, len(cands))


def find_product_states(desc: SDescription, mode: Mode = MULTIPARTITE,
                        model: ComplementModel | None = None) -> list[SolutionFamily]:
    return analyse(desc, mode, model).families


def _mode_label(mode: Mode) -> str:
    return MULTIPARTITE if mode == MULTIPARTITE else mode.label


@dataclass
class Certificate:
    verdict: str
    mode: str
    complement_dim: int
    product_span_dim: int | None = None
    exact: bool = True
    families: list[SolutionFamily] = field(default_factory=list)
    witnesses: list[Witness] = field(default_factory=list)
    reason: str = ""
    product_span_basis: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "mode": self.mode,
            "complement_dim": self.complement_dim,
            "product_span_dim": self.product_span_dim,
            "exact": self.exact,
            "reason": self.reason,
            "families": [f.to_json() for f in self.families],
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def upb_certificate(an: Analysis) -> Certificate:
    label = _mode_label(an.mode)
    found = an.nonempty
    if found:
        wits = [f.witness for f in found if f.witness is not None]
        return Certificate(NOT_UPB, label, an.model.dim, exact=True, families=found,
                           witnesses=wits[:1], reason=f"{len(found)} product-state families in the complement")
    if an.inconclusive:
        return Certificate(INCONCLUSIVE, label, an.model.dim, exact=False, families=an.inconclusive,
                           reason="some supports lead to systems outside the exact solver")
    return Certificate(UPB, label, an.model.dim, product_span_dim=0,
                       reason=f"no product state on any of {an.candidates} candidate supports")


def sucpb_certificate(an: Analysis) -> Certificate:
    label = _mode_label(an.mode)
    fams = an.families
    vectors = [b for f in fams for b in f.basis]
    span_dim = rank(vectors) if vectors else 0
    exact = all(f.span_exact and f.status != "inconclusive" for f in fams)
    if span_dim < an.model.dim:
        wits = [f.witness for f in fams if f.witness is not None]
        return Certificate(SUCPB, label, an.model.dim, span_dim, True, fams, wits,
                           reason=("product states span at most" if not exact else "product states span")
                           + f" {span_dim} of {an.model.dim} dimensions", product_span_basis=vectors)
    if exact:
        return Certificate(INCONCLUSIVE, label, an.model.dim, span_dim, True, fams,
                           [f.witness for f in fams if f.witness is not None],
                           reason="product states span the whole complement; the range criterion is silent")
    return Certificate(INCONCLUSIVE, label, an.model.dim, span_dim, False, fams,
                       reason="upper bound on the product span is not below the complement dimension")


def is_upb(desc: SDescription, mode: Mode = MULTIPARTITE, model: ComplementModel | None = None) -> Certificate:
    return upb_certificate(analyse(desc, mode, model))


def sucpb_certify(desc: SDescription, mode: Mode = MULTIPARTITE, model: ComplementModel | None = None) -> Certificate:
    return sucpb_certificate(analyse(desc, mode, model))


@dataclass
class BipartitionReport:
    multipartite: Certificate
    per_bipartition: dict[Bipartition, dict[str, Certificate]]

    @property
    def sucpb_every_bipartition(self) -> bool:
        return all(v["sucpb"].verdict == SUCPB for v in self.per_bipartition.values())

    @property
    def upb_every_bipartition(self) -> bool:
        return all(v["upb"].verdict == UPB for v in self.per_bipartition.values())

    @property
    def headline(self) -> list[str]:
        out = [f"multipartite: {self.multipartite.verdict}"]
        out.append(("SUCPB" if self.sucpb_every_bipartition else "not SUCPB") + " in every bipartition")
        out.append(("UPB" if self.upb_every_bipartition else "not UPB") + " in every bipartition")
        return out

    def to_json(self) -> dict:
        return {
            "multipartite": self.multipartite.to_json(),
            "bipartitions": [
                {"bipartition": bp.to_json(), "label": bp.label,
                 "upb": v["upb"].to_json(), "sucpb": v["sucpb"].to_json()}
                for bp, v in self.per_bipartition.items()
            ],
            "sucpb_every_bipartition": self.sucpb_every_bipartition,
            "upb_every_bipartition": self.upb_every_bipartition,
            "headline": self.headline,
        }


def check_every_bipartition(desc: SDescription, model: ComplementModel | None = None) -> BipartitionReport:
    if desc.ts.n < 3:
        raise ValueError("every-bipartition analysis needs at least three parties")
    model = model or complement_model(desc)
    multi = is_upb(desc, MULTIPARTITE, model)
    per = {}
    for bp in all_bipartitions(desc.ts.n):
        an = analyse(desc, bp, model)
        per[bp] = {"upb": upb_certificate(an), "sucpb": sucpb_certificate(an)}
    return BipartitionReport(multi, per)
