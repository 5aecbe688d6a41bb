import pytest

from algebra.kernelalg import MINUS, PLUS
from checks import cohomlite


@pytest.fixture(scope="module")
def a1_betti(a1_context):
    return cohomlite.minimal_resolution(a1_context, PLUS, 6)


def test_generator_weights(a1_betti):
    assert a1_betti.degrees == [[(0,)], [(1,)], [(3,)], [(4,)], [(6,)], [(7,)], [(9,)]]
    assert a1_betti.betti_numbers() == [1] * 7
    assert a1_betti.to_record()["weights"][2] == ["3α1"]


def test_negative_side(a1_context):
    betti = cohomlite.minimal_resolution(a1_context, MINUS, 3)
    assert betti.degrees == [[(0,)], [(-1,)], [(-3,)], [(-4,)]]
    assert cohomlite.strict_grading(betti)


def test_lattice(a1_context, a2_context):
    assert cohomlite.in_ell_lattice(a1_context, (3,))
    assert not cohomlite.in_ell_lattice(a1_context, (1,))
    assert cohomlite.in_ell_lattice(a2_context, (1, 2))
    assert not cohomlite.in_ell_lattice(a2_context, (1, 1))


def test_borel_cohomology(a1_context, a1_betti):
    dims = cohomlite.borel_cohomology_dims(a1_context, PLUS, 6, a1_betti)
    assert dims == [1, 0, 1, 0, 1, 0, 1]
    assert dims == cohomlite.expected_borel_dims(a1_context, 6)
    assert cohomlite.strict_grading(a1_betti)
    assert cohomlite.torus_invariance_check(a1_context, a1_betti) == []


def test_borel_cohomology_l5(a1_l5_context):
    assert cohomlite.borel_cohomology_dims(a1_l5_context, PLUS, 4) == [1, 0, 1, 0, 1]


def test_expected_dims(a2_context):
    assert cohomlite.expected_borel_dims(a2_context, 4) == [1, 0, 3, 0, 6]


@pytest.mark.slow
def test_a2_resolution(a2_context):
    betti = cohomlite.minimal_resolution(a2_context, PLUS, 2)
    assert betti.betti_numbers()[:2] == [1, 2]
    assert cohomlite.strict_grading(betti)
    assert cohomlite.torus_invariance_check(a2_context, betti) == []
