import argparse
import logging

import pytest

from algebra import tablecache
from algebra.fields import PrimeField
from algebra.genericuq import build_structure_table
from runconfig import ConfigError, RunConfig


def namespace(**overrides) -> argparse.Namespace:
    values = {"type": "A1", "ell": 3, "p": None, "r": 0, "w0": None, "field": None, "seed": 0, "jobs": 1,
              "budget": 1.0, "height_bound": None, "n_max": None, "samples": None, "strict": True,
              "long_running": False, "timings": False, "cache_dir": None}
    values.update(overrides)
    return argparse.Namespace(**values)


def test_defaults():
    config = RunConfig.from_args(namespace(type="a2"))
    assert config.type_label == "A2"
    assert config.w0_word == (1, 2, 1)
    assert config.field_kind == "cyclo"
    assert config.height_bound == 4
    assert config.betti_degree == 4
    assert config.split_budget == 200_000
    assert config.cache_file == tablecache.cache_path("A2", (1, 2, 1))


def test_field_follows_characteristic():
    config = RunConfig.from_args(namespace(p=7))
    assert config.field_kind == "fq"
    assert isinstance(config.field, PrimeField)
    assert RunConfig.from_args(namespace(p=7, r=1)).r == 1


def test_knob_flags():
    config = RunConfig.from_args(namespace(budget=0, height_bound=20, n_max=3, samples=0))
    assert config.split_budget == 2_000
    assert config.height_bound == 8
    assert config.betti_degree == 3
    assert config.relation_samples == 1


@pytest.mark.parametrize("overrides", [
    {"ell": 4},
    {"ell": 1},
    {"field": "cyclo", "p": 7},
    {"field": "fq"},
    {"field": "cyclo", "r": 1},
    {"r": -1},
    {"ell": 3, "p": 3},
    {"type": "G2", "ell": 7},
    {"type": "A2", "w0": "1,1,2"},
    {"type": "A2", "w0": "1,x"},
    {"type": "B2", "ell": 3},
    {"ell": 3, "p": 2, "strict": True},
])
def test_rejected(overrides):
    with pytest.raises(ConfigError):
        RunConfig.from_args(namespace(**overrides))


def test_permissive_relaxes(caplog):
    with caplog.at_level(logging.WARNING, logger="runconfig"):
        config = RunConfig.from_args(namespace(type="B2", ell=3, strict=False))
    assert config.type_label == "B2"
    assert "ℓ=3 < h=4" in caplog.text


def test_long_running_g2():
    config = RunConfig.from_args(namespace(type="G2", ell=7, long_running=True))
    assert config.datum.coxeter_number == 6


def test_describe():
    record = RunConfig.from_args(namespace(type="A2", w0="2,1,2", seed=5)).describe()
    assert record["w0_word"] == "2,1,2"
    assert record["seed"] == 5
    assert "cache_dir" not in record


def test_table_prefers_cache(tmp_path, monkeypatch):
    monkeypatch.setattr(tablecache, "loaded_tables", {})
    config = RunConfig.from_args(namespace(cache_dir=str(tmp_path)))
    table = build_structure_table(config.order)
    tablecache.save_table(table, config.cache_file)
    assert config.table() is table


def test_context():
    config = RunConfig.from_args(namespace())
    context = config.context()
    assert context.r == 0
    assert context.field.label == "Q(z3)"
