import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from reps.modulespec import SpecNode, SpecSyntaxError, parse_module_spec, realize


def test_canonical_form():
    node = parse_module_spec(" tensor( simple(1) ,  dual(verma(0)) ) ")
    assert str(node) == "tensor(simple(1),dual(verma(0)))"
    assert node.depth() == 3
    assert [child.name for child in node.children] == ["simple", "dual"]
    assert node.children[1].parent is node


@pytest.mark.parametrize("text, attribute, value", [
    ("onedim(1,-2)", "weight", (1, -2)),
    ("twist(verma(1),3)", "weight", (3,)),
    ("randsub(verma(0),17)", "seed", 17),
    ("res(coverma(1),plus)", "side", "plus"),
])
def test_arguments(text, attribute, value):
    node = parse_module_spec(text)
    assert getattr(node, attribute) == value
    assert str(node) == text


def test_equality():
    assert parse_module_spec("sum(trivial,trivial)") == parse_module_spec("sum( trivial , trivial )")
    assert len({parse_module_spec("verma(0)"), parse_module_spec("verma( 0 )")}) == 1
    assert parse_module_spec("verma(0)") != SpecNode("verma", weight=(1,))


@pytest.mark.parametrize("text, position", [
    ("foo(1)", 0),
    ("verma(1", 7),
    ("verma(1))", 8),
    ("res(verma(0),left)", 13),
    ("verma(1;2)", 7),
    ("sum(trivial)", 11),
    ("", 0),
])
def test_syntax_errors(text, position):
    with pytest.raises(SpecSyntaxError) as info:
        parse_module_spec(text)
    assert info.value.position == position
    assert isinstance(info.value, ValueError)


_weights = st.integers(-4, 4).map(lambda c: f"verma({c})")


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(["dual", "omega"]), children).map(lambda t: f"{t[0]}({t[1]})"),
        st.tuples(st.sampled_from(["tensor", "sum"]), children, children).map(lambda t: f"{t[0]}({t[1]},{t[2]})"),
        st.tuples(children, st.integers(0, 9)).map(lambda t: f"randsub({t[0]},{t[1]})"),
    )


@settings(derandomize=True, max_examples=60)
@given(st.recursive(st.one_of(st.just("trivial"), _weights), _extend, max_leaves=5), st.data())
def test_whitespace_is_ignored(text, data):
    spaced = "".join(c + " " * data.draw(st.integers(0, 2)) if c in "(,)" else c for c in text)
    assert str(parse_module_spec(spaced)) == text


def test_realize(a1_context):
    module = realize("tensor(simple(1),simple(1))", a1_context)
    assert module.dim == 4
    assert module.provenance == "tensor(simple(1),simple(1))"
    assert realize("twist(verma(1),3)", a1_context).weights[0] == (4,)
    assert not realize("res(verma(0),plus)", a1_context).has("F")
    assert realize("omega(trivial)", a1_context).provenance == "omega(trivial)"


def test_realize_is_deterministic(a1_context):
    first = realize("quot(verma(0),7)", a1_context)
    second = realize(parse_module_spec("quot(verma(0),7)"), a1_context)
    assert first.dim == second.dim
    assert first.weights == second.weights


def test_realize_errors(a1_context):
    with pytest.raises(ValueError):
        realize("twist(verma(0),1)", a1_context)
    with pytest.raises(ValueError):
        realize("verma(1,1)", a1_context)
