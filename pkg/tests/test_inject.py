import pytest

from algebra.kernelalg import MINUS, PLUS
from checks import inject
from checks.inject import BudgetExceededError
from reps import qmodules
from reps.modulespec import realize


@pytest.fixture(scope="module")
def steinberg(a1_context):
    return qmodules.simple(a1_context, (2,))


@pytest.fixture(scope="module")
def trivial(a1_context):
    return qmodules.trivial(a1_context)


def test_free_over_local(a1_context):
    lower = a1_context.algebra("u-")
    report = inject.free_over_local(lower, qmodules.verma(a1_context, (0,)))
    assert (report.verdict, report.top_dim, report.dim_a, report.rank) == (True, 1, 3, 1)
    assert report.to_record()["free"] is True
    report = inject.free_over_local(lower, qmodules.simple(a1_context, (1,)))
    assert not report.verdict
    assert report.rank is None
    with pytest.raises(ValueError):
        inject.free_over_local(a1_context.algebra("g"), qmodules.verma(a1_context, (0,)))


def test_free_over_root_a2(a2_context):
    verma = qmodules.verma(a2_context, (0, 0))
    for root in a2_context.order.gammas:
        assert inject.free_over_root(a2_context, verma, root).verdict
    assert not inject.free_over_root(a2_context, verma, (1, 1), PLUS).verdict


def test_split_test(a1_context, steinberg):
    lower = a1_context.algebra("u-")
    assert inject.projective_split_test(lower, qmodules.verma(a1_context, (0,)))
    assert not inject.projective_split_test(lower, qmodules.simple(a1_context, (1,)))
    assert inject.projective_split_test(a1_context.algebra("g"), steinberg)


def test_split_budget(a1_context, steinberg):
    with pytest.raises(BudgetExceededError) as info:
        inject.projective_split_test(a1_context.algebra("g"), steinberg, budget=10)
    assert info.value.oracle == "split"
    assert info.value.cost == 81


def test_trace_test(a1_context, steinberg, trivial):
    assert inject.projective_trace_test(a1_context, steinberg)
    assert not inject.projective_trace_test(a1_context, trivial)
    with pytest.raises(BudgetExceededError):
        inject.projective_trace_test(a1_context, steinberg, budget=5)


def test_full_oracle(a1_context, steinberg):
    assert inject.full_oracle(a1_context, steinberg) == (True, "split")
    assert inject.full_oracle(a1_context, steinberg, split_budget=1) == (True, "trace")
    with pytest.raises(ValueError):
        inject.full_oracle(a1_context, qmodules.restrict(steinberg, MINUS))


def test_borel_oracle(a1_context):
    assert inject.borel_oracle(a1_context, qmodules.verma(a1_context, (1,))) == {"unipotent": True, "borel": True}
    assert inject.borel_oracle(a1_context, qmodules.simple(a1_context, (0,))) == {"unipotent": False,
                                                                                    "borel": False}


@pytest.mark.parametrize("weight, injective", [((0,), False), ((1,), False), ((2,), True)])
def test_root_criterion_a1(a1_context, weight, injective):
    record = inject.verify_root_criterion(a1_context, qmodules.simple(a1_context, weight))
    assert record.agree
    assert record.oracle is injective
    assert record.details["mode"] == "equivalence"
    assert "module" not in record.details


def test_root_criterion_without_grading(a1_context, steinberg, rng):
    module = qmodules.cyclic(steinberg, rng)
    record = inject.verify_root_criterion(a1_context, module)
    assert record.details["mode"] == "unconditional"
    assert record.agree


def test_root_criterion_higher_kernel(higher_context):
    record = inject.verify_root_criterion(higher_context, qmodules.verma(higher_context, (20,)))
    assert record.agree
    assert record.details["via"] == "split"


@pytest.mark.parametrize("side", [MINUS, PLUS])
def test_borel_criterion(a1_context, side):
    record = inject.verify_borel_criterion(a1_context, qmodules.verma(a1_context, (0,)), side)
    assert record.agree
    assert record.oracle is (side == MINUS)


def test_reduction_borel(a1_context, steinberg, trivial):
    assert inject.verify_reduction_borel(a1_context, steinberg).agree
    record = inject.verify_reduction_borel(a1_context, trivial)
    assert record.agree
    assert record.details == {"minus": False, "plus": False, "via": "split"}


def test_skeleton(a1_context, a2_context, steinberg, trivial):
    assert inject.support_skeleton(a1_context, steinberg).roots_in_skeleton == []
    assert inject.support_skeleton(a1_context, trivial).roots_in_skeleton == [(1,)]
    report = inject.support_skeleton(a2_context, qmodules.trivial(a2_context))
    assert sorted(report.roots_in_skeleton) == [(0, 1), (1, 0), (1, 1)]
    assert report.to_record()["side"] == MINUS
    assert inject.skeleton_closure(a2_context, qmodules.trivial(a2_context)) == []


def test_highest_root(a1_context, steinberg):
    record = inject.highest_root_test(a1_context, qmodules.simple(a1_context, (1,)))
    assert record.agree and record.oracle is False
    assert record.details["skeleton"] == [record.details["highest_root"]]
    assert inject.highest_root_test(a1_context, steinberg).oracle
    with pytest.raises(ValueError):
        inject.highest_root_test(a1_context, qmodules.verma(a1_context, (0,)))


@pytest.mark.slow
def test_highest_root_a2(a2_context):
    record = inject.highest_root_test(a2_context, qmodules.simple(a2_context, (2, 2)))
    assert record.agree
    assert record.oracle
    assert record.details["via"] == "split"


def test_tensor_injectivity(a1_context):
    record = inject.verify_tensor_injectivity(a1_context, (0,), (1,))
    assert record.agree
    assert record.details["via"] == "split"


def test_filtration_character(a1_context, trivial):
    record = inject.verify_filtration_character(a1_context, qmodules.coverma(a1_context, (1,)))
    assert record.oracle and record.agree
    record = inject.verify_filtration_character(a1_context, trivial)
    assert not record.oracle and record.agree


def test_agreement_record(a1_context, steinberg):
    record = inject.verify_root_criterion(a1_context, steinberg).to_record(a1_context)
    assert record["check"] == "root_criterion"
    assert record["spec"] == "simple(2)"
    assert record["field"] == "Q(z3)"
    assert record["oracle"] is True
    assert record["per_root"] == {"minus:α1": True, "plus:α1": True}


@pytest.mark.parametrize("spec", ["simple(0)", "simple(1)", "simple(2)", "verma(1)", "coverma(0)",
                                  "sum(simple(2),simple(0))"])
def test_graded_split_agrees_with_dense(a1_context, rng, spec):
    module = realize(spec, a1_context)
    algebra = a1_context.algebra("g")
    graded = inject.projective_split_test(algebra, module)
    shuffled = qmodules.cyclic(module, rng)
    assert shuffled.dim == module.dim
    assert graded == inject.projective_split_test(algebra, shuffled)
    assert graded == inject.projective_trace_test(a1_context, module)


@pytest.mark.parametrize("descriptor", ["u-", "u+"])
@pytest.mark.parametrize("spec", ["simple(1)", "simple(2)", "verma(0)", "coverma(0)"])
def test_local_graded_split_agrees_with_dense(a1_context, rng, descriptor, spec):
    module = realize(spec, a1_context)
    algebra = a1_context.algebra(descriptor)
    graded = inject.projective_split_test(algebra, module)
    assert graded == inject.projective_split_test(algebra, qmodules.cyclic(module, rng))
    assert graded == inject.free_over_local(algebra, module).verdict


def test_local_graded_split_a2_roots(a2_context):
    module = qmodules.verma(a2_context, (1, 1))
    record = inject.verify_local_oracles(a2_context, module)
    assert record.agree
    assert record.details["split"] == record.per_root
    minus = [verdict for label, verdict in record.per_root.items() if not label.endswith("plus")]
    plus = [verdict for label, verdict in record.per_root.items() if label.endswith("plus")]
    assert len(minus) == len(plus) == 6
    assert all(minus)
    assert not all(plus)


@pytest.mark.parametrize("weight, projective", [((20,), True), ((0,), False), ((5,), False)])
def test_full_oracle_higher_kernel(higher_context, weight, projective):
    module = qmodules.verma(higher_context, weight)
    assert inject.full_oracle(higher_context, module) == (projective, "split")
    assert inject.projective_trace_test(higher_context, module) is projective


def test_borel_oracle_higher_kernel(higher_context):
    verdict = inject.borel_oracle(higher_context, qmodules.verma(higher_context, (3,)))
    assert verdict == {"unipotent": True, "borel": True}
    verdict = inject.borel_oracle(higher_context, qmodules.simple(higher_context, (3,)))
    assert verdict == {"unipotent": False, "borel": False}


@pytest.mark.slow
@pytest.mark.parametrize("spec, projective", [("simple(2,2)", True), ("trivial", False), ("verma(1,0)", False)])
def test_full_oracle_a2(a2_context, spec, projective):
    module = realize(spec, a2_context)
    assert inject.full_oracle(a2_context, module) == (projective, "split")
    assert inject.projective_trace_test(a2_context, module) is projective


def test_non_graded_split_budget(a2_context, rng):
    module = qmodules.cyclic(qmodules.simple(a2_context, (1, 1)), rng)
    with pytest.raises(BudgetExceededError) as info:
        inject.projective_split_test(a2_context.algebra("g"), module)
    assert info.value.cost == 6561 ** 2
