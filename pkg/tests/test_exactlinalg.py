import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gorhom.exactlinalg import (
    GF,
    RATIONAL,
    FieldSpec,
    Matrix,
    RowBasis,
    RowSpace,
    Scalar,
    ShapeError,
    FieldMismatch,
    left_nullspace,
    nullspace_basis,
    rank,
    rref,
    solve,
)

GF2 = GF(2)
GF3 = GF(3)


def det_oracle(field, entries):
    """Determinant by cofactor expansion along the first row."""
    n = len(entries)
    if n == 0:
        return field.one
    if n == 1:
        return entries[0][0]
    total = field.zero
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in entries[1:]]
        term = field.mul(entries[0][j], det_oracle(field, minor))
        total = field.add(total, term) if j % 2 == 0 else field.sub(total, term)
    return total


def rank_oracle(field, entries):
    """Largest k with a nonsingular k x k submatrix (brute force, dims <= 7)."""
    rows, cols = len(entries), len(entries[0]) if entries else 0
    for k in range(min(rows, cols), 0, -1):
        for ri in itertools.combinations(range(rows), k):
            for ci in itertools.combinations(range(cols), k):
                sub = [[entries[r][c] for c in ci] for r in ri]
                if det_oracle(field, sub) != field.zero:
                    return k
    return 0


def random_matrix(field, rows, cols, rng):
    if field.is_prime_field:
        data = [[rng.randrange(field.p) for _ in range(cols)] for _ in range(rows)]
    else:
        data = [[Fraction(rng.randrange(-4, 5), rng.randrange(1, 4))
                 for _ in range(cols)] for _ in range(rows)]
    return Matrix(field, data)


def test_fieldspec_rejects_nonprime():
    with pytest.raises(Exception):
        FieldSpec("prime", 6)
    with pytest.raises(Exception):
        FieldSpec("prime", 1)


def test_scalar_arithmetic_and_canonical_form():
    a = Scalar(5, GF3)
    assert a.value == 2
    assert (a + 1).value == 0
    assert (a * a).value == 1
    assert (-a).value == 1
    assert a.inverse().value == 2
    q = Scalar(Fraction(2, 4), RATIONAL)
    assert q.value == Fraction(1, 2)
    with pytest.raises(FieldMismatch):
        a + q


def test_rref_identity_gf2():
    m = Matrix.identity(GF2, 2)
    red, rk, piv = rref(m)
    assert red == m
    assert rk == 2
    assert piv == [0, 1]


def test_rref_proportional_rows_rational():
    m = Matrix(RATIONAL, [[1, 2], [2, 4]])
    red, rk, piv = rref(m)
    assert red.entries == ((Fraction(1), Fraction(2)), (Fraction(0), Fraction(0)))
    assert rk == 1


def test_rref_rank_matches_minor_expansion_oracle():
    rng = random.Random(7)
    for _ in range(12):
        m = random_matrix(GF3, 5, 7, rng)
        assert rank(m) == rank_oracle(GF3, [list(r) for r in m.entries])


def test_rref_idempotent():
    rng = random.Random(11)
    for field in (GF2, GF3, RATIONAL):
        for _ in range(8):
            m = random_matrix(field, 4, 6, rng)
            red, _, _ = rref(m)
            red2, _, _ = rref(red)
            assert red2 == red


def test_rank_of_transpose_agrees():
    rng = random.Random(3)
    for field in (GF2, GF3, RATIONAL):
        for _ in range(10):
            r, c = rng.randrange(1, 9), rng.randrange(1, 9)
            m = random_matrix(field, r, c, rng)
            assert rank(m) == rank(m.T)


def test_nullspace_identity_and_zero():
    assert nullspace_basis(Matrix.identity(GF2, 3)).rows == 0
    z = nullspace_basis(Matrix.zeros(GF3, 3, 4))
    assert z.rows == 4
    assert rank(z) == 4


def test_nullspace_forced_row_gf2():
    ns = nullspace_basis(Matrix(GF2, [[1, 1]]))
    assert ns.entries == ((1, 1),)


def test_nullspace_rows_annihilate():
    rng = random.Random(5)
    for field in (GF2, GF3, RATIONAL):
        for _ in range(8):
            m = random_matrix(field, 4, 6, rng)
            ns = nullspace_basis(m)
            assert ns.rows == m.cols - rank(m)
            if ns.rows:
                prod = m @ ns.T
                assert prod.is_zero()


def test_left_nullspace_rows_annihilate():
    rng = random.Random(9)
    m = random_matrix(GF3, 5, 3, rng)
    ln = left_nullspace(m)
    assert ln.rows == m.rows - rank(m)
    if ln.rows:
        assert (ln @ m).is_zero()


def test_solve_identity():
    b = Matrix(GF3, [[1], [2], [0]])
    x = solve(Matrix.identity(GF3, 3), b)
    assert x == b


def test_solve_free_variable_convention():
    x = solve(Matrix(GF2, [[1, 1]]), Matrix(GF2, [[1]]))
    assert x.entries == ((1,), (0,))


def test_solve_inconsistent_returns_none():
    assert solve(Matrix(GF2, [[1], [1]]), Matrix(GF2, [[0], [1]])) is None


def test_solve_shape_mismatch_is_distinct_error():
    with pytest.raises(ShapeError):
        solve(Matrix(GF2, [[1, 0]]), Matrix(GF2, [[1], [0]]))


def test_solve_exactness_random():
    rng = random.Random(13)
    for field in (GF2, GF3, RATIONAL):
        for _ in range(10):
            m = random_matrix(field, 4, 5, rng)
            rhs = random_matrix(field, 4, 2, rng)
            x = solve(m, rhs)
            if x is not None:
                assert m @ x == rhs


def test_zero_shaped_matrices_are_legal():
    a = Matrix.zeros(GF2, 0, 4)
    b = Matrix.zeros(GF2, 4, 0)
    assert (a @ b).shape == (0, 0)
    assert (b @ a).shape == (4, 4)
    assert rank(a) == 0
    red, rk, piv = rref(b)
    assert rk == 0


def test_matmul_exact_mod_p():
    m = Matrix(GF3, [[1, 2], [2, 2]])
    sq = m @ m
    assert sq.entries == ((2, 0), (0, 2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.randoms(use_true_random=False))
def test_rref_row_space_preserved(r, c, rnd):
    m = random_matrix(GF2, r, c, rnd)
    red, rk, piv = rref(m)
    sp1 = RowSpace.from_rows(GF2, m.arr)
    for i in range(rk):
        assert sp1.contains(red.arr[i])
    sp2 = RowSpace.from_rows(GF2, red.arr)
    for i in range(m.rows):
        assert sp2.contains(m.arr[i])


def test_rowbasis_matches_rref_big_gf2():
    rng = np.random.default_rng(42)
    a = rng.integers(0, 2, size=(40, 300)).astype(np.int8)
    rb = RowBasis(GF2, 300)
    for row in a:
        rb.insert(row)
    red, rk, piv = rref(Matrix(GF2, a))
    assert rb.rank == rk
    assert rb.pivots_sorted() == piv
    assert np.array_equal(rb.rows_array(), red.arr[:rk])


def test_rowbasis_matches_rref_gf3_and_rational():
    rng = random.Random(21)
    for field in (GF3, RATIONAL):
        m = random_matrix(field, 8, 6, rng)
        rb = RowBasis(field, 6)
        for i in range(8):
            rb.insert(m.arr[i])
        red, rk, piv = rref(m)
        assert rb.rank == rk
        assert rb.pivots_sorted() == piv
        got = Matrix(field, rb.rows_array())
        assert got == Matrix(field, red.arr[:rk])


def test_packed_rref_agrees_with_dense():
    rng = np.random.default_rng(5)
    a = rng.integers(0, 2, size=(70, 520)).astype(np.int8)  # crosses pack threshold
    big = np.tile(a, (4, 1))
    red_big, rk_big, piv_big = rref(Matrix(GF2, big))
    red_small, rk_small, piv_small = rref(Matrix(GF2, a))
    assert rk_big == rk_small
    assert piv_big == piv_small
    assert np.array_equal(red_big.arr[:rk_big], red_small.arr[:rk_small])


def test_rowspace_coords_roundtrip():
    m = Matrix(GF3, [[1, 0, 2], [0, 1, 1]])
    sp = RowSpace.from_rows(GF3, m.arr)
    v = (m.arr[0].astype(np.int64) * 2 + m.arr[1]) % 3
    co = sp.coords(v.astype(np.int8))
    back = (co.astype(np.int64) @ sp.rows.astype(np.int64)) % 3
    assert np.array_equal(back, v)


def test_matrix_immutability_and_equality():
    m = Matrix(GF2, [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        m.arr[0, 0] = 0
    assert m == Matrix.identity(GF2, 2)
    assert m != Matrix.zeros(GF2, 2, 2)
    assert hash(m) == hash(Matrix.identity(GF2, 2))
