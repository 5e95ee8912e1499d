from hypothesis import given, settings
from hypothesis import strategies as st

from rlcmoments.gf2core import (
    BitMatrix,
    bits_to_int,
    int_to_bits,
    kernel_basis,
    matvec,
    parity,
    projected_dim,
    rank,
    rref,
    span_elements,
    transpose,
    weight,
)


@st.composite
def matrices(draw, max_rows=7, max_cols=9):
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.integers(0, (1 << c) - 1), max_size=max_rows))
    return BitMatrix(tuple(rows), c)


def test_bits_roundtrip():
    assert bits_to_int([1, 0, 1, 1]) == 0b1101
    assert int_to_bits(0b1101, 4) == [1, 0, 1, 1]
    assert weight(0b1101) == 3 and parity(0b1101) == 1


def test_rref_example():
    M = BitMatrix.from_lists([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rank(M) == 2
    assert rref(M).to_lists() == [[1, 0, 1], [0, 1, 1]]


def test_kernel_of_even_check():
    # the all-ones check has the even-weight vectors as kernel
    M = BitMatrix((0b1111,), 4)
    ker = kernel_basis(M)
    assert len(ker) == 3
    assert sorted(span_elements(ker)) == [v for v in range(16) if bin(v).count("1") % 2 == 0]


def test_bad_rows_rejected():
    import pytest

    with pytest.raises(ValueError):
        BitMatrix((0b100,), 2)
    with pytest.raises(ValueError):
        BitMatrix.from_lists([[1, 0], [1]])


@given(matrices())
def test_rank_nullity(M):
    assert rank(M) + len(kernel_basis(M)) == M.ncols


@given(matrices())
def test_kernel_vectors_annihilated(M):
    for x in kernel_basis(M):
        assert matvec(M, x) == 0


@given(matrices())
def test_rref_idempotent_and_same_span(M):
    R = rref(M)
    assert rref(R) == R
    combos = {matvec(transpose(M), y) for y in range(1 << len(M.rows))}
    assert sorted(span_elements(R.rows)) == sorted(combos)


@given(matrices())
def test_row_rank_equals_column_rank(M):
    assert rank(M) == rank(transpose(M))
    assert transpose(transpose(M)) == M


@settings(max_examples=50)
@given(matrices(), st.sets(st.integers(0, 8)))
def test_projected_dim_bounds(M, coords):
    coords = [c for c in coords if c < M.ncols]
    d = projected_dim(M, coords)
    assert 0 <= d <= min(rank(M), len(coords))
