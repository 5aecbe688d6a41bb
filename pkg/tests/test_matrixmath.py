import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st

import matrixmath
from algebra.fields import PrimeField, ResidueField

F7 = PrimeField(7, 3)

matrices = st.integers(1, 4).flatmap(
    lambda rows: st.integers(1, 4).flatmap(
        lambda columns: st.lists(st.lists(st.integers(0, 6), min_size=columns, max_size=columns),
                                 min_size=rows, max_size=rows)))


def test_rank_and_nullspace():
    a = F7.array([[1, 2], [2, 4]])
    assert matrixmath.rank(F7, a) == 1
    kernel = matrixmath.nullspace(F7, a)
    assert kernel.tolist() == [[5, 1]]


@settings(derandomize=True, max_examples=60)
@given(matrices)
def test_rank_nullity(rows):
    a = F7.array(rows)
    kernel = matrixmath.nullspace(F7, a)
    assert matrixmath.rank(F7, a) + kernel.shape[0] == a.shape[1]
    if kernel.shape[0]:
        assert not F7.matmul(a, kernel.T).any()


@settings(derandomize=True, max_examples=60)
@given(matrices)
def test_row_reduce_is_idempotent(rows):
    reduced, pivots = matrixmath.row_reduce(F7, F7.array(rows))
    again, pivots_again = matrixmath.row_reduce(F7, reduced)
    assert pivots == pivots_again
    assert F7.equal(reduced, again)


def test_solve():
    a = F7.array([[1, 1], [0, 1]])
    assert matrixmath.solve(F7, a, F7.vector([3, 1])).tolist() == [2, 1]
    singular = F7.array([[1, 1], [1, 1]])
    assert matrixmath.solve(F7, singular, F7.vector([1, 0])) is None
    assert matrixmath.inverse(F7, singular) is None
    inverse = matrixmath.inverse(F7, a)
    assert F7.equal(F7.matmul(a, inverse), F7.identity(2))


def test_solve_without_rows():
    empty = F7.zeros((0, 3))
    assert matrixmath.solve(F7, empty, F7.zeros(0)).tolist() == [0, 0, 0]


def test_span():
    vectors = F7.array([[1, 0, 2], [0, 1, 1]])
    assert matrixmath.in_row_span(F7, vectors, F7.vector([2, 3, 0]))
    assert not matrixmath.in_row_span(F7, vectors, F7.vector([0, 0, 1]))
    reduced, pivots = matrixmath.row_space(F7, vectors)
    residue = matrixmath.reduce_vector(F7, reduced, pivots, F7.vector([1, 1, 4]))
    assert residue.tolist() == [0, 0, 1]


def test_power_and_products():
    shift = F7.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert not matrixmath.matrix_power(F7, shift, 3).any()
    assert F7.equal(matrixmath.matrix_power(F7, shift, 2),
                    matrixmath.multiply_matrices(F7, [shift, shift], 3))
    assert F7.equal(matrixmath.matrix_power(F7, shift, 0), F7.identity(3))


def test_blocks():
    block = F7.array([[1, 2], [3, 4]])
    total = matrixmath.direct_sum(F7, [block, F7.identity(1)])
    assert total.shape == (3, 3)
    assert total[2, 2] == 1 and total[0, 2] == 0
    stacked = matrixmath.stack_columns(F7, [block, F7.zeros((2, 0)), block], 2)
    assert stacked.shape == (2, 4)
    assert matrixmath.stack_columns(F7, [], 2).shape == (2, 0)


def test_rank_over_cyclotomic():
    field = ResidueField.cyclotomic(3)
    zeta = field.zeta
    a = field.array([[zeta, 1], [field.mul(zeta, zeta), zeta]])
    assert matrixmath.rank(field, a) == 1
    kernel = matrixmath.nullspace(field, a)
    assert not field.nonzero_mask(field.matmul(a, kernel.T)).any()
    assert np.asarray(kernel).shape == (1, 2)
