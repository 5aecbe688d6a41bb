import numpy as np
import pytest

from algebra.fields import build_field
from algebra.kernelalg import get_context
from algebra.rootdata import build_root_datum, convex_order, default_w0_word


def make_context(type_label: str, kind: str, ell: int, p: int | None = None, r: int = 0):
    datum = build_root_datum(type_label)
    order = convex_order(datum, default_w0_word(datum))
    return get_context(order, build_field(kind, ell, p), r)


@pytest.fixture(scope="session")
def a1_context():
    return make_context("A1", "cyclo", 3)


@pytest.fixture(scope="session")
def a1_f7_context():
    return make_context("A1", "fq", 3, 7)


@pytest.fixture(scope="session")
def a1_l5_context():
    return make_context("A1", "fq", 5, 11)


@pytest.fixture(scope="session")
def a2_context():
    return make_context("A2", "fq", 3, 7)


@pytest.fixture(scope="session")
def higher_context():
    return make_context("A1", "fq", 3, 7, r=1)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
