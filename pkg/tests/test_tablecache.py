import os

import pytest

from algebra import tablecache
from algebra.genericuq import E_SIDE, build_structure_table
from algebra.rootdata import build_root_datum, convex_order
from algebra.tablecache import TableFormatError


@pytest.fixture(scope="module")
def a2_table():
    return build_structure_table(convex_order(build_root_datum("A2"), (1, 2, 1)))


@pytest.fixture(autouse=True)
def fresh_cache(monkeypatch):
    monkeypatch.setattr(tablecache, "loaded_tables", {})


def test_cache_path(tmp_path):
    assert tablecache.cache_path("A2", (2, 1, 2), str(tmp_path)) == os.path.join(str(tmp_path), "A2_212.table")


def test_serialization_is_stable(a2_table):
    text = tablecache.serialize_table(a2_table)
    assert text.startswith("format_version 1\ntype A2\nw0 1,2,1\n")
    assert text.endswith("end\n")
    parsed = tablecache.parse_table(text)
    assert tablecache.serialize_table(parsed) == text
    assert parsed.entry(E_SIDE, 1, 3).tail == a2_table.entry(E_SIDE, 1, 3).tail
    assert parsed.omega_units == a2_table.omega_units


def test_save_and_load(a2_table, tmp_path):
    path = str(tmp_path / "sub" / "A2_121.table")
    tablecache.save_table(a2_table, path)
    assert [name for name in os.listdir(tmp_path / "sub")] == ["A2_121.table"]
    tablecache.loaded_tables.clear()
    loaded = tablecache.load_table(path)
    assert tablecache.load_table(path) is loaded
    assert tablecache.describe_table(loaded) == tablecache.describe_table(a2_table)


def test_describe(a2_table):
    summary = tablecache.describe_table(a2_table)
    assert summary["type"] == "A2"
    assert summary["w0"] == "1,2,1"
    assert summary["pairs"] == 3
    assert summary["tail_terms"] == 1
    assert summary["s_denominator"] is False
    assert set(summary["units"]) == {1, 2, 3}


def _broken(text: str, old: str, new: str) -> str:
    assert old in text
    return text.replace(old, new, 1)


def test_version_mismatch(a2_table):
    text = _broken(tablecache.serialize_table(a2_table), "format_version 1", "format_version 2")
    with pytest.raises(TableFormatError, match="Versão"):
        tablecache.parse_table(text)


def test_truncated(a2_table):
    text = tablecache.serialize_table(a2_table).replace("end\n", "")
    with pytest.raises(TableFormatError, match="truncado"):
        tablecache.parse_table(text)


def test_unknown_line(a2_table):
    text = tablecache.serialize_table(a2_table) + "extra 1\n"
    with pytest.raises(TableFormatError, match="desconhecida"):
        tablecache.parse_table(text)


def test_malformed_entry(a2_table):
    text = _broken(tablecache.serialize_table(a2_table), "E 1 3 ->", "E 1 x ->")
    with pytest.raises(TableFormatError, match="Linha"):
        tablecache.parse_table(text)


def test_missing_header():
    with pytest.raises(TableFormatError):
        tablecache.parse_table("end\n")


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        tablecache.load_table(str(tmp_path / "nada.table"))
