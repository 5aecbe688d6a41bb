import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from algebra.rootdata import (InvalidWordError, UnsupportedTypeError, all_reduced_w0_words, build_root_datum,
                              convex_order, default_w0_word, flip_check, format_root, order_functional)


@pytest.mark.parametrize("label, n_positive, coxeter", [("A1", 1, 2), ("A2", 3, 3), ("B2", 4, 4), ("G2", 6, 6)])
def test_counts(label, n_positive, coxeter):
    datum = build_root_datum(label)
    assert datum.n_positive == n_positive
    assert datum.coxeter_number == coxeter


def test_unknown_type():
    with pytest.raises(UnsupportedTypeError):
        build_root_datum("E8")


def test_lowercase_label():
    assert build_root_datum("a2").type_label == "A2"


def test_b2_long_root():
    datum = build_root_datum("B2")
    assert datum.d_alpha == (2, 1)
    assert datum.highest_long_root == (1, 2)
    assert datum.inner((1, 2), (1, 2)) == 4


def test_reduced_words():
    assert all_reduced_w0_words(build_root_datum("A2")) == [(1, 2, 1), (2, 1, 2)]
    assert all_reduced_w0_words(build_root_datum("B2")) == [(1, 2, 1, 2), (2, 1, 2, 1)]
    assert default_w0_word(build_root_datum("A2")) == (1, 2, 1)


def test_a2_order():
    order = convex_order(build_root_datum("A2"), (1, 2, 1))
    assert order.gammas == ((1, 0), (1, 1), (0, 1))
    assert order.index_of((1, 1)) == 2
    assert order.simple_positions() == {1: 1, 2: 3}


@pytest.mark.parametrize("label", ["A2", "B2"])
def test_every_word_is_convex_with_functionals(label):
    datum = build_root_datum(label)
    for word in all_reduced_w0_words(datum):
        order = convex_order(datum, word)
        assert order.is_convex()
        for m in range(order.n + 1):
            assert order_functional(order, m).has_sign_pattern()
        assert flip_check(order)


def test_invalid_word():
    with pytest.raises(InvalidWordError):
        convex_order(build_root_datum("A2"), (1, 1, 2))
    with pytest.raises(InvalidWordError):
        convex_order(build_root_datum("A2"), (1, 2))


def test_format_root():
    assert format_root((1, 2)) == "α1+2α2"
    assert format_root((0, -1)) == "-α2"
    assert format_root((0, 0)) == "0"


def test_weight_coordinates():
    datum = build_root_datum("A2")
    assert datum.to_weight((1, 0)) == (2, -1)
    assert datum.to_weight((1, 1)) == (1, 1)


@settings(derandomize=True, max_examples=50)
@given(st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_weight_round_trip(weight):
    datum = build_root_datum("B2")
    assert datum.to_weight(datum.from_weight(weight)) == weight


def test_table_marks_highest_root():
    text = build_root_datum("A2").table()
    assert "α1+α2" in text
    assert "(highest)" in text
