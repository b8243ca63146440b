import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tileupb.builtins import builtin
from tileupb.cyclotomic import CycNumber, embed_root
from tileupb.linalg import (
    gram_schmidt,
    in_span,
    inner_product,
    integer_lattice_kernel,
    kernel_basis,
    mat_vec,
    rank,
    same_span,
    smith_normal_form,
)
from tileupb.states import fourier_matrix

from helpers import numeric, numeric_rank


def test_inner_product_examples():
    assert inner_product([1, 1], [1, -1]) == 0
    F = fourier_matrix(4)
    for a in range(4):
        for b in range(4):
            assert bool(inner_product(F[a], F[b])) == (a == b)
    w = embed_root(3, 1, 3)
    v = [CycNumber.one(3), w, w * w]
    assert inner_product(v, v) == 3
    assert abs(np.vdot(numeric(v), numeric(v)) - 3) < 1e-12


def test_inner_product_length_mismatch():
    with pytest.raises(ValueError):
        inner_product([1, 2], [1])


def test_rank_examples():
    assert rank([[1] * 4 for _ in range(3)]) == 1
    assert rank([[int(i == j) for j in range(3)] for i in range(3)]) == 3
    # the stopper of the 3x4 example as a matrix
    J = [[CycNumber.one(6)] * 4 for _ in range(3)]
    assert rank(J) == 1


def test_kernel_examples():
    assert kernel_basis([[1, 0], [0, 1]]) == []
    (v,) = kernel_basis([[1, 1]])
    assert v[0] == -v[1] and v[0]
    S = builtin("fig1-3x4").opset
    rows = [[x.conjugate() for x in r] for r in S.vectors()]
    K = kernel_basis(rows, 12)
    assert len(K) == 5
    for k in K:
        assert not any(mat_vec(rows, k))


def test_same_span_and_in_span():
    a = [[1, 1, 0], [0, 1, 1]]
    b = [[1, 2, 1], [1, 0, -1]]
    assert same_span(a, b)
    assert in_span([2, 3, 1], a)
    assert not in_span([1, 0, 0], a)


def test_gram_schmidt_is_orthogonal():
    w = embed_root(3, 1, 3)
    vs = [[1, w, 0], [1, 1, 1], [0, w * w, 2], [2, 2, 2]]
    out = gram_schmidt(vs)
    assert len(out) == 3
    for i in range(3):
        for j in range(i + 1, 3):
            assert not inner_product(out[i], out[j])
    assert same_span(out, vs)


@st.composite
def small_matrix(draw):
    m = draw(st.integers(1, 5))
    n = draw(st.integers(1, 5))
    L = draw(st.sampled_from([1, 3, 4]))
    cells = draw(st.lists(st.tuples(st.integers(-2, 2), st.integers(0, L - 1)), min_size=m * n, max_size=m * n))
    M = [[CycNumber.zeta(L, k) * c for c, k in cells[i * n:(i + 1) * n]] for i in range(m)]
    # make some rows dependent on purpose
    if m > 2 and draw(st.booleans()):
        M[2] = [a + b for a, b in zip(M[0], M[1])]
    return M


@settings(max_examples=80, deadline=None)
@given(small_matrix())
def test_rank_matches_svd(M):
    assert rank(M) == numeric_rank(M)
    K = kernel_basis(M, len(M[0]))
    assert len(K) == len(M[0]) - rank(M)
    for k in K:
        assert not any(mat_vec(M, k))


def test_lattice_kernel_examples():
    lk = integer_lattice_kernel([[1, -1]])
    assert lk.torsion == () and len(lk.kernel) == 1
    assert abs(lk.kernel[0][0]) == 1 and lk.kernel[0][0] == lk.kernel[0][1]
    lk = integer_lattice_kernel([[2]])
    assert lk.kernel == () and [d for d, _ in lk.torsion] == [2]
    lk = integer_lattice_kernel([[1, 1, -1, -1]])
    assert len(lk.kernel) == 3 and lk.torsion == ()
    lk = integer_lattice_kernel([], ncols=3)
    assert len(lk.kernel) == 3


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 4), st.integers(1, 5), st.data())
def test_smith_normal_form(m, n, data):
    E = [[data.draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(m)]
    U, D, V = smith_normal_form(E)
    assert _matmul(_matmul(U, E), V) == D
    assert round(abs(np.linalg.det(np.array(U, dtype=float)))) == 1
    assert round(abs(np.linalg.det(np.array(V, dtype=float)))) == 1
    diag = [D[i][i] for i in range(min(m, n))]
    for i in range(m):
        for j in range(n):
            if i != j:
                assert D[i][j] == 0
    assert all(d >= 0 for d in diag)
    nz = [d for d in diag if d]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    # kernel columns really solve E x = 0
    lk = integer_lattice_kernel(E, ncols=n)
    for col in lk.kernel:
        assert all(sum(e * x for e, x in zip(row, col)) == 0 for row in E)
    assert len(lk.kernel) == n - np.linalg.matrix_rank(np.array(E, dtype=float))
