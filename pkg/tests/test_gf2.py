from __future__ import annotations

import gc
import weakref

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import naive_rank
from involcode.config import EngineSettings
from involcode.errors import InputError
from involcode.gf2 import (
    Gf2Matrix,
    Gf2Vector,
    QuotientMap,
    choose_path,
    nullspace_basis,
    quotient_coordinates,
    rank,
    row_space_contains,
    rref,
    solve,
)


@st.composite
def matrices(draw, max_rows=8, max_cols=8):
    rows = draw(st.integers(0, max_rows))
    cols = draw(st.integers(0, max_cols))
    data = draw(st.lists(st.integers(0, (1 << cols) - 1), min_size=rows, max_size=rows))
    return Gf2Matrix(rows, cols, tuple(data))


@st.composite
def matrix_and_vector(draw):
    m = draw(matrices())
    x = draw(st.integers(0, (1 << m.cols) - 1))
    return m, Gf2Vector(m.cols, x)


def test_rref_examples():
    assert rref(Gf2Matrix.identity(3)) == (Gf2Matrix.identity(3), [0, 1, 2])
    assert rref(Gf2Matrix.zeros(2, 2)) == (Gf2Matrix.zeros(2, 2), [])
    reduced, pivots = rref(Gf2Matrix.from_rows([[1, 1], [1, 1]]))
    assert reduced.to_lists() == [[1, 1], [0, 0]]
    assert pivots == [0]


def test_rank_examples():
    assert rank(Gf2Matrix.identity(5)) == 5
    assert rank(Gf2Matrix.zeros(3, 4)) == 0
    assert rank(Gf2Matrix.from_rows([[1, 1], [1, 1]])) == 1


def test_nullspace_examples():
    assert nullspace_basis(Gf2Matrix.identity(2)).rows == 0
    assert nullspace_basis(Gf2Matrix.from_rows([[1, 1]])).to_lists() == [[1, 1]]
    assert nullspace_basis(Gf2Matrix.zeros(2, 2)).to_lists() == [[1, 0], [0, 1]]


def test_solve_examples():
    assert solve(Gf2Matrix.identity(2), Gf2Vector.from_list([1, 0])) == Gf2Vector.from_list([1, 0])
    # Free variables are set to zero.
    assert solve(Gf2Matrix.from_rows([[1, 1]]), Gf2Vector.from_list([1])) == Gf2Vector.from_list([1, 0])
    assert solve(Gf2Matrix.from_rows([[1], [1]]), Gf2Vector.from_list([1, 0])) is None


def test_solve_rejects_length_mismatch():
    with pytest.raises(InputError):
        solve(Gf2Matrix.identity(2), Gf2Vector.from_list([1, 0, 1]))


def test_quotient_examples():
    identity = Gf2Matrix.identity(2)
    v = Gf2Vector.from_list([1, 1])
    assert quotient_coordinates(identity, identity, v).length == 0
    assert quotient_coordinates(identity, Gf2Matrix.zeros(0, 2), v) == v

    diagonal = Gf2Matrix.from_rows([[1, 1]])
    a = quotient_coordinates(identity, diagonal, Gf2Vector.from_list([1, 0]))
    b = quotient_coordinates(identity, diagonal, Gf2Vector.from_list([0, 1]))
    assert a == b
    assert a.weight() == 1


def test_quotient_rejects_vectors_outside_the_space():
    space = Gf2Matrix.from_rows([[1, 0, 0]])
    with pytest.raises(InputError, match="outside ambient space"):
        QuotientMap(space, Gf2Matrix.zeros(0, 3)).coordinates(Gf2Vector.from_list([0, 1, 0]))


def test_malformed_entries_rejected():
    with pytest.raises(InputError):
        Gf2Vector.from_bitstring("10x")
    with pytest.raises(InputError):
        Gf2Matrix.from_rows([[1, 0], [1]])
    with pytest.raises(InputError):
        Gf2Matrix(1, 2, (0b100,))


@given(matrices())
def test_rref_is_idempotent(m):
    reduced, pivots = rref(m)
    assert rref(reduced) == (reduced, pivots)


@given(matrices())
def test_rref_is_reduced(m):
    reduced, pivots = rref(m)
    assert pivots == sorted(set(pivots))
    for i, p in enumerate(pivots):
        row = reduced.data[i]
        assert row & -row == 1 << p
        for j, other in enumerate(reduced.data):
            if j != i:
                assert not (other >> p) & 1
    assert all(row == 0 for row in reduced.data[len(pivots) :])


@given(matrices())
def test_dense_and_sparse_paths_agree(m):
    assert rref(m, path="dense") == rref(m, path="sparse")


@given(matrices())
def test_rank_nullity(m):
    null = nullspace_basis(m)
    assert rank(m) + null.rows == m.cols
    for i in range(null.rows):
        assert m.mul_vector(null.row_vector(i)).bits == 0


@given(matrices())
def test_rank_matches_oracle(m):
    assert rank(m) == naive_rank(m.to_array())


@given(matrix_and_vector())
def test_solve_recovers_consistent_systems(args):
    m, x = args
    b = m.mul_vector(x)
    found = solve(m, b)
    assert found is not None
    assert m.mul_vector(found) == b


@given(matrices(max_rows=6, max_cols=6), st.data())
def test_quotient_is_linear_and_kills_the_subspace(space, data):
    sub_masks = data.draw(st.lists(st.integers(0, (1 << space.rows) - 1), max_size=4))

    def combine(mask):
        out = 0
        for i in range(space.rows):
            if (mask >> i) & 1:
                out ^= space.data[i]
        return Gf2Vector(space.cols, out)

    sub = Gf2Matrix.from_vectors([combine(mask) for mask in sub_masks], space.cols)
    q = QuotientMap(space, sub)
    for i in range(sub.rows):
        assert q.coordinates(sub.row_vector(i)).bits == 0
    u = combine(data.draw(st.integers(0, (1 << space.rows) - 1)))
    v = combine(data.draw(st.integers(0, (1 << space.rows) - 1)))
    assert q.coordinates(u ^ v) == q.coordinates(u) ^ q.coordinates(v)
    assert q.dimension == rank(space.stack(sub)) - rank(sub)


def test_row_space_contains():
    m = Gf2Matrix.from_rows([[1, 1, 0], [0, 1, 1]])
    assert row_space_contains(m, Gf2Vector.from_list([1, 0, 1]))
    assert not row_space_contains(m, Gf2Vector.from_list([1, 0, 0]))


def test_choose_path_follows_settings():
    sparse = Gf2Matrix.identity(50)
    assert choose_path(sparse) == "dense"
    tuned = EngineSettings(sparse_min_entries=100, sparse_threshold=0.05)
    assert choose_path(sparse, tuned) == "sparse"
    dense = Gf2Matrix.from_ints([(1 << 50) - 1] * 50, 50)
    assert choose_path(dense, tuned) == "dense"


def test_transpose_and_matmul():
    a = Gf2Matrix.from_rows([[1, 0, 1], [0, 1, 1]])
    assert a.transpose().to_lists() == [[1, 0], [0, 1], [1, 1]]
    assert (a @ a.transpose()).to_lists() == [[0, 1], [1, 0]]


def test_reduction_keeps_no_reference_to_its_input():
    m = Gf2Matrix.identity(40)
    ref = weakref.ref(m)
    assert rank(m) == 40
    assert sorted(rref(m)[1]) == list(range(40))
    del m
    gc.collect()
    assert ref() is None
