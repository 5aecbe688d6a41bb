import numpy as np
import pytest

from algebra.kernelalg import MINUS, PLUS, AlgebraDescriptor, AlgebraKind, integral
from checks import inject
from checks.inject import free_over_local
from reps import qmodules
from reps.qmodules import Character, LiftFlags
import matrixmath


@pytest.fixture(scope="module")
def a1_verma(a1_context):
    return qmodules.verma(a1_context, (0,))


def test_lift_flags():
    a = LiftFlags(True, True, False, True)
    b = LiftFlags(True, False, False, True)
    assert a.meet(b) == LiftFlags(True, False, False, True)


def test_character_algebra():
    left = Character({(1,): 1})
    right = Character({(1,): 1, (-1,): 1})
    assert left.times(right) == Character({(2,): 1, (0,): 1})
    assert right.shifted((3,)) == Character({(4,): 1, (2,): 1})
    assert left.negated() == Character({(-1,): 1})
    assert left.times(right).dimension() == 2


def test_verma(a1_verma):
    assert a1_verma.dim == 3
    assert a1_verma.weights == [(0,), (-2,), (-4,)]
    assert a1_verma.provenance == "verma(0)"
    assert a1_verma.relation_defects() == []
    assert a1_verma.check_grading()
    assert a1_verma.flags.borel_minus and a1_verma.flags.borel_plus


def test_verma_a2(a2_context):
    module = qmodules.verma(a2_context, (1, 0))
    assert module.dim == 27
    assert module.relation_defects() == []
    with pytest.raises(ValueError):
        qmodules.verma(a2_context, (1,))


def test_verma_higher_kernel(higher_context):
    module = qmodules.verma(higher_context, (0,))
    assert module.dim == 21
    assert module.weights[-1] == (-40,)
    assert module.has("E")
    assert module.relation_defects() == []


def test_coverma(a1_context):
    module = qmodules.coverma(a1_context, (1,))
    assert module.dim == 3
    assert module.weights == [(1,), (-1,), (-3,)]
    assert module.relation_defects() == []


def test_onedim(a1_context, higher_context):
    assert qmodules.onedim(a1_context, (3,)).flags.full_u
    assert not qmodules.onedim(a1_context, (1,)).flags.full_u
    assert qmodules.onedim(higher_context, (21,)).flags.full_u
    assert qmodules.trivial(a1_context).provenance == "trivial"


@pytest.mark.parametrize("weight, dimension", [((0,), 1), ((1,), 2), ((2,), 3)])
def test_simple_a1(a1_context, weight, dimension):
    module = qmodules.simple(a1_context, weight)
    assert module.dim == dimension
    assert module.flags.full_u
    assert module.relation_defects() == []


@pytest.mark.parametrize("weight, dimension", [((0, 0), 1), ((1, 0), 3), ((0, 1), 3), ((2, 2), 27)])
def test_simple_a2(a2_context, weight, dimension):
    assert qmodules.simple(a2_context, weight).dim == dimension


def test_radical(a1_verma):
    basis, pivots = qmodules.radical_below(a1_verma, (0,))
    assert len(pivots) == 2
    assert qmodules.submodule(a1_verma, basis, pivots, "rad").relation_defects() == []


def test_dual(a1_context):
    module = qmodules.dual(qmodules.verma(a1_context, (1,)))
    assert module.weights == [(-1,), (1,), (3,)]
    assert module.provenance == "dual(verma(1))"
    assert module.relation_defects() == []


def test_tensor(a1_context):
    standard = qmodules.simple(a1_context, (1,))
    product = qmodules.tensor(standard, standard)
    assert product.dim == 4
    assert Character.of(product) == Character({(2,): 1, (0,): 2, (-2,): 1})
    assert product.relation_defects() == []


def test_direct_sum(a1_context, a1_verma):
    total = qmodules.direct_sum(a1_verma, qmodules.trivial(a1_context))
    assert total.dim == 4
    assert total.provenance == "sum(verma(0),trivial)"
    assert total.relation_defects() == []


def test_twist(a1_verma):
    twisted = qmodules.twist(a1_verma, (3,))
    assert twisted.weights == [(3,), (1,), (-1,)]
    assert not twisted.flags.full_u
    assert twisted.relation_defects() == []
    with pytest.raises(ValueError):
        qmodules.twist(a1_verma, (1,))


def test_restrict(a1_verma):
    lower = qmodules.restrict(a1_verma, MINUS)
    assert lower.has("F") and not lower.has("E")
    assert lower.flags.borel_minus and not lower.flags.borel_plus
    upper = qmodules.restrict(a1_verma, PLUS)
    assert upper.has("E") and not upper.has("F")
    with pytest.raises(ValueError):
        qmodules.restrict(a1_verma, "up")


def test_omega_twist(a1_verma):
    module = qmodules.omega_twist(a1_verma)
    assert module.weights == [(0,), (2,), (4,)]
    assert module.relation_defects() == []


def test_random_submodules(a1_verma, rng):
    sub = qmodules.randsub(a1_verma, rng)
    assert sub.dim in (2, 3)
    assert sub.relation_defects() == []
    assert sub.check_grading()
    assert qmodules.quot(a1_verma, rng).relation_defects() == []


def test_cyclic_drops_grading(a1_context, rng):
    module = qmodules.cyclic(qmodules.verma(a1_context, (1,)), rng)
    assert module.weights is None
    assert not module.flags.torus_compatible
    with pytest.raises(ValueError):
        Character.of(module)


def test_verma_character_test(a1_context, a2_context):
    assert qmodules.verma_character_test(a1_context, qmodules.verma(a1_context, (1,)))
    assert qmodules.verma_character_test(a1_context, qmodules.simple(a1_context, (2,)))
    assert not qmodules.verma_character_test(a1_context, qmodules.simple(a1_context, (0,)))
    assert qmodules.verma_character_test(a2_context, qmodules.simple(a2_context, (2, 2)))


def test_weight_basis_over_am(a1_context, a1_verma):
    assert len(qmodules.weight_basis_over_am(a1_context, a1_verma, 1)) == 1
    assert qmodules.weight_basis_over_am(a1_context, qmodules.simple(a1_context, (1,)), 1) is None


@pytest.mark.parametrize("m, size", [(1, 9), (2, 3), (3, 1)])
def test_weight_basis_over_am_a2(a2_context, m, size):
    module = qmodules.verma(a2_context, (0, 0))
    field = a2_context.field
    vectors = qmodules.weight_basis_over_am(a2_context, module, m)
    assert vectors.shape == (size, module.dim)
    for row in vectors:
        support = np.flatnonzero(field.nonzero_mask(row))
        assert len({module.weights[int(a)] for a in support}) == 1
    algebra = a2_context.algebra(AlgebraDescriptor(AlgebraKind.A_M, m=m, side=MINUS))
    (key,) = integral(algebra)
    top = algebra.module_basis_action(module, key)
    assert matrixmath.rank(field, field.matmul(top, vectors.T.copy())) == size


@pytest.mark.parametrize("weight", [(0, 0), (1, 1), (2, 2), (2, 0)])
def test_weight_basis_agrees_with_nakayama(a2_context, weight):
    module = qmodules.simple(a2_context, weight)
    for m in range(1, 4):
        algebra = a2_context.algebra(AlgebraDescriptor(AlgebraKind.A_M, m=m, side=MINUS))
        vectors = qmodules.weight_basis_over_am(a2_context, module, m)
        assert (vectors is not None) == free_over_local(algebra, module).verdict


def test_intertwiners(a1_context, a1_verma, rng):
    standard = qmodules.simple(a1_context, (1,))
    assert len(qmodules.intertwiners(standard, standard)) == 1
    assert qmodules.isomorphic(a1_verma, qmodules.verma(a1_context, (0,)), rng)
    assert not qmodules.isomorphic(a1_verma, qmodules.verma(a1_context, (3,)), rng)


@pytest.mark.parametrize("fixture, weight", [("a1_context", (0,)), ("a1_context", (2,)), ("a1_l5_context", (1,))])
def test_zdual(request, rng, fixture, weight):
    report = qmodules.zdual_check(request.getfixturevalue(fixture), weight, rng)
    assert all(report.values()), report


def test_projective_cover(a1_context, a2_context):
    for context, weight in ((a1_context, (0,)), (a2_context, (1, 0))):
        report = qmodules.projective_cover_check(context, weight)
        assert report == {"head_dimension": 1, "socle_dimension": 1, "socle_weight_ok": True,
                          "e_socle_dimension": 1, "e_socle_weight_ok": True}


def test_export(a1_verma):
    text = qmodules.export_module(a1_verma)
    assert text.startswith("# verma(0)\ndim 3\nfield Q(z3) ell 3 r 0\nweights 0 -2 -4\n")
    assert "action F 1 1\n" in text
    assert "action K 1 1\n" in text


@pytest.mark.parametrize("fixture, weight, descriptor, dimension", [
    ("a1_context", (1,), "g", 9),
    ("a1_context", (0,), "b-", 3),
    ("a1_f7_context", (4,), "b+", 3),
    ("higher_context", (5,), "g", 441),
    ("higher_context", (-2,), "b-", 21),
])
def test_projective_module(request, fixture, weight, descriptor, dimension):
    context = request.getfixturevalue(fixture)
    module = qmodules.projective_module(context, weight, AlgebraDescriptor.parse(descriptor))
    assert module.dim == dimension
    assert module.check_grading()
    assert module.relation_defects() == []
    assert weight in module.weights


def test_projective_module_is_projective(a1_context):
    module = qmodules.projective_module(a1_context, (1,))
    assert module.provenance == "proj(1;g)"
    assert inject.projective_trace_test(a1_context, module)
    assert inject.projective_split_test(a1_context.algebra("g"), module)
