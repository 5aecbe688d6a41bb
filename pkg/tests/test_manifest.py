import pytest

from checks import manifest as manifests
from checks.manifest import CorpusManifest, load_manifest, parse_manifest
from reps.modulespec import SpecSyntaxError
from runconfig import ConfigError, RunConfig

SAMPLE = """
# corpus de teste
name pequeno
type a2
ell 3
p 7
case st simple(2,2) injective=true
case triv  trivial   injective=false   # comentário
"""


def test_parse():
    manifest = parse_manifest(SAMPLE)
    assert (manifest.name, manifest.type_label, manifest.ell) == ("pequeno", "A2", 3)
    assert (manifest.field_kind, manifest.p, manifest.r) == ("fq", 7, 0)
    assert [case.case_id for case in manifest.cases] == ["st", "triv"]
    assert manifest.cases[0].expect == {"injective": True}
    assert manifest.cases[1].expect == {"injective": False}


def test_case_specs_are_canonical():
    manifest = CorpusManifest("m", "A1", 3)
    manifest.add_case("t", "tensor( simple(1), simple(1) )")
    assert manifest.cases[0].spec == "tensor(simple(1),simple(1))"
    assert manifest.cases[0].expect == {}


def test_serialize():
    manifest = CorpusManifest("m", "A1", 5, "fq", 11)
    manifest.add_case("st", "simple(4)", injective=True)
    manifest.add_case("v", "verma(0)")
    text = manifest.serialize()
    assert text == "name m\ntype A1\nell 5\nfield fq\np 11\nr 0\ncase st simple(4) injective=true\ncase v verma(0)\n"
    assert parse_manifest(text).serialize() == text


def test_default_name():
    assert parse_manifest("type A1\nell 3\n", name="arquivo.txt").name == "arquivo.txt"
    assert parse_manifest("type A1\nell 3\n").field_kind == "cyclo"


@pytest.mark.parametrize("text", [
    "ell 3\n",
    "type A1\n",
    "type A1\nell tres\n",
    "type A1\nell 3\nfoo 1\n",
    "type A1\nell 3\ncase x verma(0) injective=yes\n",
    "type A1\nell 3\ncase x verma(0)\ncase x verma(1)\n",
])
def test_rejected(text):
    with pytest.raises(ConfigError):
        parse_manifest(text)


def test_bad_case_spec():
    with pytest.raises(SpecSyntaxError, match="caso x") as info:
        parse_manifest("type A1\nell 3\ncase x verma(0\n")
    assert info.value.position == 7


def test_configure():
    manifest = parse_manifest(SAMPLE)
    config = manifest.configure(RunConfig(seed=3))
    assert (config.type_label, config.ell, config.field_kind, config.p) == ("A2", 3, "fq", 7)
    assert config.w0_word == (1, 2, 1)
    assert config.seed == 3
    with pytest.raises(ConfigError):
        parse_manifest("type B2\nell 3\n").configure(RunConfig())


def test_load_caches(tmp_path, monkeypatch):
    monkeypatch.setattr(manifests, "loaded_manifests", {})
    path = tmp_path / "corpus.txt"
    path.write_text(SAMPLE, encoding="utf-8")
    first = load_manifest(str(path))
    assert load_manifest(str(path)) is first
    with pytest.raises(FileNotFoundError):
        load_manifest(str(tmp_path / "nada.txt"))
