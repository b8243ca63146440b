import random

import pytest

from tileupb.builtins import FIG1_3X4, UPB_333, UPB_3333, builtin
from tileupb.cyclotomic import CycNumber, embed_root
from tileupb.linalg import rank, same_span
from tileupb.states import (
    CoefficientSpec,
    DimensionMismatch,
    OPSet,
    ProductState,
    build_opb,
    build_S,
    flatten_state,
    fourier_matrix,
    stopper,
    tile_ops,
    verify_orthogonality,
)
from tileupb.tiles import Bipartition, Tile, TileStructure, random_tile_structure

from helpers import kron

FIG1 = TileStructure.from_subsets(*FIG1_3X4)
AB = Bipartition((0,), (1,))


def test_fourier_examples():
    assert fourier_matrix(1) == ((1,),)
    assert fourier_matrix(2) == ((1, 1), (1, -1))
    w = embed_root(3, 1, 3)
    F = fourier_matrix(3)
    assert F[1] == (1, w, w * w)
    assert F[2] == (1, w * w, w)


def test_tile_ops_fig1_tile():
    # {2}_A x {1,2,3}_B carries (|1> + w^b |2> + w^2b |3>) on row 2
    states = tile_ops(FIG1.tiles[3], FIG1.dims, tile_id=3, order=6)
    w = embed_root(3, 1, 6)
    assert len(states) == 3
    for b, st in enumerate(states):
        assert st.factors[0] == (0, 0, 1)
        assert st.factors[1] == (0, 1, w ** b, w ** (2 * b))
    assert states[0].label == "tile:3,idx:(0,0)"


def test_tile_ops_small_cases():
    (only,) = tile_ops(Tile(((1,), (0,))), (2, 2))
    assert only.vector() == [0, 0, 1, 0]
    ts = TileStructure.from_subsets(*UPB_333)
    states = tile_ops(ts.tiles[0], ts.dims, tile_id=0)
    # xi_i on A, |0> on B, eta_k on C
    expect = [((0, 1, s), (1, 0, 0), (1, t, 0)) for s in (1, -1) for t in (1, -1)]
    assert [st.factors for st in states] == expect


def test_tile_ops_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tile_ops(Tile(((0,), (0,))), (3, 3, 3))


def test_build_sizes():
    for layout, s_size in [(FIG1_3X4, 7), (UPB_333, 19), (UPB_3333, 65)]:
        ts = TileStructure.from_subsets(*layout)
        assert len(build_opb(ts)) == ts.D
        assert len(build_S(ts)) == s_size == ts.D - ts.s + 1


def test_single_tile_is_fourier_basis():
    ts = TileStructure.from_subsets((2, 3), [[[0, 1], [0, 1, 2]]])
    B = build_opb(ts)
    assert len(B) == 6 and verify_orthogonality(B)
    assert [st.label for st in build_S(ts)] == [f"tile:0,idx:{i}" for i in
                                                ["(0,1)", "(0,2)", "(1,0)", "(1,1)", "(1,2)"]] + ["stopper"]


def test_stopper():
    assert stopper((3, 4)).vector() == [1] * 12
    assert stopper((3, 3, 3)).vector() == [1] * 27
    assert stopper((2,)).factors == ((1, 1),)


def test_builtins():
    assert len(builtin("upb-333").opset) == 19 and builtin("upb-333").ts.dims == (3, 3, 3)
    assert len(builtin("w-333").opset) == 23
    t = builtin("tiles-3x3").opset
    assert len(t) == 5 and verify_orthogonality(t)
    with pytest.raises(KeyError):
        builtin("nope")


def test_removed_member_is_indicator():
    for layout in (FIG1_3X4, UPB_333):
        ts = TileStructure.from_subsets(*layout)
        owner = ts.tile_of_cells()
        for t, tile in enumerate(ts.tiles):
            first = tile_ops(tile, ts.dims, tile_id=t)[0]
            assert first.vector() == [1 if o == t else 0 for o in owner]


def test_flatten_state_examples():
    J = flatten_state(stopper((3, 4)), AB)
    assert J == [[1] * 4] * 3 and rank(J) == 1
    psi = tile_ops(FIG1.tiles[0], FIG1.dims)[1]
    M = flatten_state(psi, AB)
    assert M[0] == [1, -1, 0, 0] and rank(M) == 1
    for st in build_S(TileStructure.from_subsets(*UPB_333)):
        for bp in (Bipartition((0,), (1, 2)), Bipartition((0, 2), (1,))):
            assert rank(flatten_state(st, bp)) == 1


def test_orthogonality_on_random_structures():
    rng = random.Random(3)
    for _ in range(15):
        ts = random_tile_structure(rng.choice([(3, 3), (2, 4), (2, 2, 3), (3, 4)]), rng)
        B = build_opb(ts)
        assert len(B) == ts.D and verify_orthogonality(B)
        assert len(build_S(ts)) == ts.D - ts.s + 1


def test_other_coefficients_keep_the_span():
    # rows (1,1),(3,-3) and (1,1,1),(1,-1,0),(1,1,-2): orthogonal, first row all ones
    spec = CoefficientSpec({(j, 2): ((1, 1), (3, -3)) for j in range(3)}
                           | {(j, 3): ((1, 1, 1), (1, -1, 0), (1, 1, -2)) for j in range(3)})
    for layout in (FIG1_3X4, UPB_333):
        ts = TileStructure.from_subsets(*layout)
        a, b = build_S(ts), build_S(ts, spec)
        assert verify_orthogonality(b)
        assert same_span(a.vectors(), b.vectors())


def test_bad_coefficient_spec():
    with pytest.raises(ValueError):
        CoefficientSpec({(0, 2): ((1, 1), (1, 0))})
    with pytest.raises(ValueError):
        CoefficientSpec({(0, 2): ((1, 2), (1, -1))})


def test_product_state_checks():
    with pytest.raises(ValueError):
        ProductState(((0, 0), (1, 0)))
    a = ProductState(((1, 0), (1, 1)))
    b = ProductState(((0, 1), (1, -1)))
    assert not a.inner(b)
    assert a.vector() == kron([1, 0], [1, 1])
    with pytest.raises(DimensionMismatch):
        a.inner(ProductState(((1, 0, 0), (1, 1))))


def test_opset_json_round_trip():
    S = builtin("fig1-3x4").opset
    back = OPSet.from_json(S.to_json())
    assert back.vectors() == S.vectors() and back.labels == S.labels
    assert OPSet.from_json(S.to_json()["states"]).dims == (3, 4)
    w = ProductState(((CycNumber.zeta(3, 1), 1), (1, 1)))
    assert ProductState.from_json(w.to_json()) == w
