import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from knobs import Knob, KnobGroup, betti_knob, budget_knobs, height_knob, samples_knob


def test_knob_clamps():
    knob = Knob(5, 0, 10, "grau")
    knob.value = 12
    assert knob.value == 10
    knob.value = -3
    assert knob.value == 0
    knob.value = 8
    assert knob.value == 8
    assert knob.default_value == 5
    knob.value = 2.6
    assert knob.value == 3
    assert str(knob) == "grau: 3"


@pytest.mark.parametrize("factor, split, trace", [
    (1, 200_000, 1_000_000),
    (0, 2_000, 10_000),
    (2, 20_000_000, 200_000_000),
    (1.5, 10_100_000, 100_500_000),
    (7, 20_000_000, 200_000_000),
])
def test_budget_factor(factor, split, trace):
    group = budget_knobs()
    group.value = factor
    assert group.values() == {"split_budget": split, "trace_budget": trace}


@settings(derandomize=True, max_examples=50)
@given(st.floats(0, 2), st.floats(0, 2))
def test_budget_is_monotone(a, b):
    low, high = budget_knobs(), budget_knobs()
    low.value, high.value = min(a, b), max(a, b)
    for label in ("split_budget", "trace_budget"):
        assert low[label].min_value <= low[label].value <= high[label].value <= high[label].max_value


def test_group_lists_knobs():
    group = KnobGroup("grupo", [Knob(3, 1, 5, "a")])
    group.add_knob(Knob(10, 0, 20, "b"))
    group.value = 0
    assert group.values() == {"a": 1, "b": 0}
    assert str(group) == "grupo ×0.00: a: 1, b: 0"


def test_defaults():
    assert height_knob(2).value == 4
    assert height_knob(10).value == 8
    assert betti_knob("a1").value == 6
    assert betti_knob("B2").value == 4
    assert samples_knob().value == 20
