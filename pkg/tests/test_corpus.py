from dataclasses import replace

import pytest

from algebra.kernelalg import MINUS, PLUS
from checks import corpus
from checks.manifest import CorpusCase
from runconfig import RunConfig


@pytest.fixture
def config(tmp_path):
    return RunConfig(cache_dir=str(tmp_path))


def test_default_manifests():
    manifests = corpus.default_manifests()
    assert set(manifests) == {"a1-l3", "a1-l5", "a2-l3", "a1-r1-p7"}
    assert manifests["a2-l3"].p == 7
    assert manifests["a1-r1-p7"].r == 1
    expected = {case.case_id: case.expect.get("injective") for case in manifests["a1-l3"].cases}
    assert expected["simple-2"] is True
    assert expected["simple-0"] is False
    assert expected["coverma-0"] is None


def test_manifest_for(config):
    assert corpus.manifest_for(config) is not None
    assert corpus.manifest_for(config).name == "a1-l3"
    assert len(corpus.manifest_for(config).cases) == len(corpus.default_manifests()["a1-l3"].cases)
    generated = corpus.manifest_for(replace(config, field_kind="fq", p=7))
    assert generated.field_kind == "fq"
    assert [case.spec for case in generated.cases] == ["trivial", "verma(0)", "simple(2)"]
    other = corpus.manifest_for(replace(config, ell=7))
    assert other.cases[-1].spec == "simple(6)"


def test_tasks_for(config):
    manifest = corpus.default_manifests()["a1-l3"]
    tasks = corpus.tasks_for(config, manifest, ("rootcrit", "betti", "tensor", "zdual"))
    kinds = [kind for kind, _ in tasks]
    assert kinds.count("case") == len(manifest.cases) == 24
    assert [argument for kind, argument in tasks if kind == "betti"] == [PLUS, MINUS]
    assert kinds.count("tensor") == 4
    assert [argument for kind, argument in tasks if kind == "zdual"] == [(0,), (1,), (2,)]
    assert corpus.tasks_for(config, manifest, ("betti",)) == [("betti", PLUS), ("betti", MINUS)]


def test_run_case(config):
    records = corpus.run_case(config, CorpusCase("st", "simple(2)", {"injective": True}), corpus.MODULE_SUITES)
    assert {record["suite"] for record in records} == set(corpus.MODULE_SUITES)
    assert len(records) == 7
    assert all(record["case"] == "st" and record["agree"] for record in records)


def test_run_case_against_expectation(config):
    records = corpus.run_case(config, CorpusCase("errado", "simple(0)", {"injective": True}), ("rootcrit",))
    (record,) = records
    assert record["expected"] is True
    assert record["agree"] is False


def test_suites_that_do_not_apply(config):
    records = corpus.run_case(config, CorpusCase("r", "res(verma(0),minus)", {}), corpus.MODULE_SUITES)
    assert [record["suite"] for record in records] == ["borel", "local"]
    assert records[0]["side"] == MINUS


def test_budget_skip(config):
    starved = replace(config, split_budget=1, trace_budget=1)
    (record,) = corpus.run_case(starved, CorpusCase("st", "simple(2)", {}), ("rootcrit",))
    assert record["skipped"] is True
    assert record["agree"] is None


def test_global_tasks(config):
    (betti,) = corpus.run_task(config, ("betti", PLUS))
    assert betti["agree"]
    assert betti["dims"] == [1, 0, 1, 0, 1, 0, 1]
    (zdual,) = corpus.run_task(config, ("zdual", (1,)))
    assert zdual["agree"]
    assert zdual["case"] == "zdual:1"
    (tensor,) = corpus.run_task(config, ("tensor", ((0,), (2,))))
    assert tensor["agree"]
    assert tensor["case"] == "tensor:0:2"


def test_timings(config):
    (record,) = corpus.run_task(replace(config, timings=True), ("betti", MINUS))
    assert record["wall_time"] >= 0


@pytest.mark.parametrize("spec, free", [("simple(2)", True), ("simple(1)", False)])
def test_local_oracles_record(config, spec, free):
    (record,) = corpus.run_case(config, CorpusCase("loc", spec, {}), ("local",))
    assert record["check"] == "local_oracles"
    assert set(record["per_root"]) == {"root:1:minus", "root:1:plus", "Am:1", "Am:1:plus"}
    assert record["per_root"] == record["split"]
    assert all(verdict is free for verdict in record["per_root"].values())
    assert record["mismatches"] == []
    assert record["agree"]


@pytest.mark.slow
def test_local_oracles_a2(config):
    a2 = replace(config, type_label="A2", field_kind="fq", p=7)
    for spec in ("simple(2,2)", "simple(1,0)", "verma(1,1)"):
        (record,) = corpus.run_case(a2, CorpusCase("loc", spec, {}), ("local",))
        assert len(record["per_root"]) == 12
        assert record["per_root"] == record["split"]
        assert record["agree"]
