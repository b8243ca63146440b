"""Independent reference data and small oracles shared by the tests.

The product states below are transcribed by hand as ket strings; nothing
here calls the solver.
"""

import itertools
import json
import math
import re
from functools import lru_cache
from pathlib import Path

import numpy as np

from tileupb.cyclotomic import CycNumber
from tileupb.tiles import Bipartition

SCHEMAS = Path(__file__).resolve().parent.parent / "docs" / "schemas"

_TERM = re.compile(r"([+-]?)(?:(\d+)\*)?(\d+)")


def ket(text: str, dims) -> list:
    """'11+10-4*22' over party dims -> dense integer vector."""
    out = [0] * math.prod(dims)
    for sign, coef, digits in _TERM.findall(text.replace(" ", "")):
        c = int(coef or 1) * (-1 if sign == "-" else 1)
        k = 0
        for d, ch in zip(dims, digits):
            k = k * d + int(ch)
        out[k] += c
    return out


def kron(u, v):
    return [a * b for a in u for b in v]


def product(left: str, right: str, ldims, rdims) -> list:
    """Full vector for (left)_C (right)_D when C precedes D in party order."""
    return kron(ket(left, ldims), ket(right, rdims))


def as_exact(v):
    return [CycNumber.rational(x) for x in v]


# Listed product states of the 3x3x3 complement, cut A|BC.
UPB333_A_BC = [
    ("1+2", "00+01-02-12"),
    ("2", "11+10+20+21-4*22"),
    ("0+1", "10+20-21-22"),
    ("0", "01+02+12+11-4*00"),
]

# Listed product states of the 3^4 complement, cut AB|CD.
UPB3333_AB_CD = [
    ("10+11+20+21-4*00", "01+02"),
    ("12+22", "00+01+10+11-4*02"),
    ("11+12+21+22-4*20", "12+22"),
    ("20+21", "10+11+20+21-4*00"),
    ("01+02+11+12-4*22", "20+21"),
    ("00+10", "11+12+21+22-4*20"),
    ("00+01+10+11-4*02", "00+10"),
    ("01+02", "01+02+11+12-4*22"),
]

# The four subspaces for cut A|BCD: A factor, BCD patterns, linear condition.
# The first pattern of the first family and the last pattern of the fourth
# use cell 001 where the printed list shows 000 (000 lies in another tile).
UPB3333_A_BCD = [
    ("1+2", ["001+002+101+102", "200+210+201+211", "122+222+112+212", "202"], [4, 4, 4, 1]),
    ("2", ["111+020+010+110+011+021+120+121", "000+100", "012+022", "220+221"], [4, 1, 1, 1]),
    ("0+1", ["221+220+121+120", "022+012+021+011", "100+000+110+010", "020"], [4, 4, 4, 1]),
    ("0", ["111+202+212+112+211+201+102+101", "222+122", "210+200", "001+002"], [4, 1, 1, 1]),
]


def o_space_basis():
    """Integer basis of the sum of the four listed subspaces, as full 81-vectors."""
    out = []
    for a, patterns, cond in UPB3333_A_BCD:
        A = ket(a, (3,))
        vecs = [kron(A, ket(p, (3, 3, 3))) for p in patterns]
        # kernel of the single condition: pair the last coordinate with each other one
        for k in range(len(cond) - 1):
            w = [cond[-1] * x - cond[k] * y for x, y in zip(vecs[k], vecs[-1])]
            out.append(w)
    return out


# -- symmetries -------------------------------------------------------------------


def automorphisms(dims, tiles):
    """(perm, relabel) pairs mapping the tile set onto itself; brute force."""
    n = len(dims)
    T = {tuple(tuple(sorted(x)) for x in t) for t in tiles}
    out = []
    for perm in itertools.permutations(range(n)):
        if any(dims[perm[j]] != dims[j] for j in range(n)):
            continue
        for sig in itertools.product(*(list(itertools.permutations(range(d))) for d in dims)):
            img = set()
            for t in T:
                new = [None] * n
                for j in range(n):
                    new[perm[j]] = tuple(sorted(sig[j][v] for v in t[j]))
                img.add(tuple(new))
            if img == T:
                out.append((perm, sig))
    return out


def transport(v, dims, perm, sig):
    """Push a full vector through a party permutation and relabeling."""
    out = [0] * len(v)
    for k, cell in enumerate(itertools.product(*map(range, dims))):
        new = [None] * len(dims)
        for j in range(len(dims)):
            new[perm[j]] = sig[j][cell[j]]
        idx = 0
        for d, x in zip(dims, new):
            idx = idx * d + x
        out[idx] = v[k]
    return out


def transport_cut(bp: Bipartition, perm) -> Bipartition:
    C = tuple(sorted(perm[j] for j in bp.C))
    D = tuple(sorted(perm[j] for j in bp.D))
    return Bipartition(C, D).canonical()


# -- numeric helpers ----------------------------------------------------------------


def numeric(v):
    return np.array([complex(x.to_complex()) if isinstance(x, CycNumber) else complex(x) for x in v])


def numeric_rank(rows, tol=1e-8):
    if not rows:
        return 0
    M = np.array([numeric(r) for r in rows])
    s = np.linalg.svd(M, compute_uv=False)
    return int((s > tol * max(1.0, s[0])).sum())


# -- schemas ------------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _registry():
    from referencing import Registry, Resource

    reg = Registry()
    for path in SCHEMAS.glob("*.schema.json"):
        data = json.loads(path.read_text())
        reg = reg.with_resource(path.name, Resource.from_contents(data))
    return reg


def validate_schema(obj, name: str) -> None:
    import jsonschema

    schema = json.loads((SCHEMAS / f"{name}.schema.json").read_text())
    jsonschema.Draft202012Validator(schema, registry=_registry()).validate(obj)


# -- random corpus --------------------------------------------------------------------

CORPUS_DIMS = [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (4, 4), (3, 5), (4, 5), (2, 2, 2),
               (2, 2, 3), (2, 3, 3), (3, 3, 3), (2, 3, 4), (2, 2, 4), (3, 3, 4)]


def _relabel(ts, rng):
    from tileupb.tiles import TileStructure

    n = len(ts.dims)
    perm = list(range(n))
    rng.shuffle(perm)
    dims = [ts.dims[perm[j]] for j in range(n)]
    sigma = [rng.sample(range(d), d) for d in ts.dims]
    tiles = []
    for t in ts.tiles:
        subsets = [sorted(sigma[j][v] for v in t.subsets[j]) for j in range(n)]
        tiles.append([subsets[perm[j]] for j in range(n)])
    return TileStructure.from_subsets(dims, tiles)


@lru_cache(maxsize=1)
def _search_hits():
    from tileupb.search import SearchConfig, search

    return [ts for dims in [(3, 3), (3, 4), (3, 5)] for ts in search(SearchConfig(dims)).found]


def random_corpus(count: int, seed: int, hits: int = 0):
    """Random tile structures with at most three parties and D <= 36.

    ``hits`` of them are randomly relabeled search results, so that the
    rectangle condition actually holds somewhere in the corpus.
    """
    import random

    from tileupb.tiles import random_tile_structure

    rng = random.Random(seed)
    out = [_relabel(rng.choice(_search_hits()), rng) for _ in range(hits)]
    while len(out) < count:
        dims = rng.choice(CORPUS_DIMS)
        side = rng.choice([None, 2, 3])
        out.append(random_tile_structure(dims, rng, side))
    rng.shuffle(out)
    return out


def product_oracle(basis: np.ndarray, h1: int, h2: int, starts: int, rng, iters: int = 300, tol=1e-9):
    """Alternating projection between a subspace and the rank-one matrices.

    ``basis`` has orthonormal columns. Drives the second singular value to zero
    from many random starts at once and returns the converged unit vectors.
    """
    k = basis.shape[1]
    c = rng.normal(size=(starts, k)) + 1j * rng.normal(size=(starts, k))
    for _ in range(iters):
        v = c @ basis.T
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        M = v.reshape(starts, h1, h2)
        U, s, Vh = np.linalg.svd(M)
        r1 = s[:, :1, None] * U[:, :, :1] @ Vh[:, :1, :]
        c = r1.reshape(starts, -1) @ basis.conj()
    v = c @ basis.T
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    s = np.linalg.svd(v.reshape(starts, h1, h2), compute_uv=False)
    return v[s[:, 1] < tol]


# -- property checks shared by the property and acceptance suites ---------------------


def cuts(n):
    from tileupb.tiles import all_bipartitions

    return all_bipartitions(n) if n > 2 else [Bipartition((0,), (1,))]


def check_model(ts):
    """Exact kernel of the reduced set equals the tile-constant model, of dimension s-1."""
    from tileupb.complement import complement_model, complement_span_matrix, describe
    from tileupb.linalg import kernel_basis, same_span

    d = describe(ts)
    m = complement_model(d, cross_check=False)
    K = kernel_basis(complement_span_matrix(d.opset), ts.D)
    return m.dim == ts.s - 1 and same_span(K, [m.tensor(b) for b in m.basis])


def check_rectangle_condition(ts):
    """Cuts passing the rectangle condition carry no product family. Returns the number of such cuts."""
    from tileupb.complement import analyse, complement_model, describe
    from tileupb.tiles import utile_check

    if not 5 <= ts.s <= 24:
        return 0
    d = describe(ts)
    m = complement_model(d)
    passed = 0
    for bp in cuts(ts.n):
        if utile_check(ts, bp):
            passed += 1
            an = analyse(d, bp, m)
            assert not an.families, (ts, bp)
    return passed


def _to_matrix_order(V, dims, bp):
    n = len(dims)
    perm = list(bp.C) + list(bp.D)
    return V.reshape(*dims, -1).transpose(*perm, n).reshape(math.prod(dims), -1)


def cross_oracle(ts, bp, rng, starts=1000, tol=1e-6):
    """Numeric product states across ``bp`` that no enumerated family explains.

    Returns (number found, worst distance to the nearest family span).
    """
    from tileupb.complement import analyse, complement_model, complement_span_matrix, describe

    d = describe(ts)
    m = complement_model(d)
    fams = analyse(d, bp, m).nonempty
    rows = np.array([numeric(r) for r in complement_span_matrix(d.opset)])
    _, sv, Vh = np.linalg.svd(rows)
    r = int((sv > 1e-9).sum())
    Q = _to_matrix_order(Vh[r:].conj().T, ts.dims, bp)
    if Q.shape[1] == 0:
        return 0, 0.0
    h1, h2 = bp.sizes(ts.dims)
    hits = product_oracle(Q, h1, h2, starts, rng)
    spans = []
    for f in fams:
        B = np.array([numeric(m.tensor(b)) for b in f.basis]).T
        spans.append(np.linalg.qr(_to_matrix_order(B, ts.dims, bp))[0])
    worst = 0.0
    for v in hits:
        dist = min((np.linalg.norm(v - q @ (q.conj().T @ v)) for q in spans), default=1.0)
        worst = max(worst, dist)
    return len(hits), worst
