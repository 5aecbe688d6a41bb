"""
Manifestos de corpus: a configuração algébrica e a lista de casos (especificação de módulo e
expectativas opcionais). Formato em texto, uma diretiva por linha:

    # comentário
    name a1-l3
    type A1
    ell 3
    field fq
    p 7
    r 0
    case a1-steinberg simple(2) injective=true
"""
from dataclasses import dataclass, field, replace
import logging

from reps.modulespec import SpecSyntaxError, parse_module_spec
from runconfig import ConfigError, RunConfig
from algebra.rootdata import build_root_datum, default_w0_word

logger = logging.getLogger(__name__)

loaded_manifests = {}


@dataclass(frozen=True)
class CorpusCase:
    case_id: str
    spec: str
    expect: dict = field(default_factory=dict)


@dataclass
class CorpusManifest:
    name: str
    type_label: str
    ell: int
    field_kind: str = "cyclo"
    p: int | None = None
    r: int = 0
    cases: list = field(default_factory=list)

    def add_case(self, case_id: str, spec: str, **expect):
        if any(case.case_id == case_id for case in self.cases):
            raise ConfigError(f"Caso repetido no manifesto {self.name}: {case_id}")
        node = parse_module_spec(spec)
        self.cases.append(CorpusCase(case_id, str(node), dict(expect)))

    def configure(self, config: RunConfig) -> RunConfig:
        """Configuração da execução com os parâmetros algébricos do manifesto."""
        w0_word = config.w0_word
        if self.type_label != config.type_label:
            w0_word = default_w0_word(build_root_datum(self.type_label))
        configured = replace(config, type_label=self.type_label, ell=self.ell, field_kind=self.field_kind,
                             p=self.p, r=self.r, w0_word=w0_word)
        configured.validate()
        return configured

    def serialize(self) -> str:
        lines = [f"name {self.name}", f"type {self.type_label}", f"ell {self.ell}", f"field {self.field_kind}"]
        if self.p is not None:
            lines.append(f"p {self.p}")
        lines.append(f"r {self.r}")
        for case in self.cases:
            flags = " ".join(f"{key}={str(value).lower()}" for key, value in sorted(case.expect.items()))
            lines.append(f"case {case.case_id} {case.spec} {flags}".rstrip())
        return "\n".join(lines) + "\n"


def _parse_flag(text: str) -> tuple:
    key, _, value = text.partition("=")
    if value not in ("true", "false"):
        raise ConfigError(f"Expectativa inválida {text!r} (use chave=true|false)")
    return key, value == "true"


def parse_manifest(text: str, name: str = "manifest") -> CorpusManifest:
    settings = {"name": name}
    cases = []
    for number, line in enumerate(text.splitlines(), start=1):
        values = line.split("#", 1)[0].strip().split()
        if not values:
            continue
        key = values[0]
        if key in ("name", "type", "field") and len(values) == 2:
            settings[key] = values[1]
        elif key in ("ell", "p", "r") and len(values) == 2:
            try:
                settings[key] = int(values[1])
            except ValueError as error:
                raise ConfigError(f"Linha {number}: {key} precisa ser inteiro") from error
        elif key == "case" and len(values) >= 3:
            cases.append((values[1], values[2], dict(_parse_flag(flag) for flag in values[3:])))
        else:
            raise ConfigError(f"Linha {number} do manifesto não reconhecida: {line.strip()!r}")
    if "type" not in settings or "ell" not in settings:
        raise ConfigError("Manifesto sem 'type' ou 'ell'")
    manifest = CorpusManifest(settings["name"], settings["type"].upper(), settings["ell"],
                              settings.get("field", "fq" if "p" in settings else "cyclo"),
                              settings.get("p"), settings.get("r", 0))
    for case_id, spec, expect in cases:
        try:
            manifest.add_case(case_id, spec, **expect)
        except SpecSyntaxError as error:
            raise SpecSyntaxError(f"caso {case_id}: {error}", error.position) from error
    logger.debug("manifesto %s: %d casos", manifest.name, len(manifest.cases))
    return manifest


def load_manifest(path: str) -> CorpusManifest:
    if path not in loaded_manifests:
        with open(path, "r", encoding="utf-8") as file:
            loaded_manifests[path] = parse_manifest(file.read(), name=path)
    return loaded_manifests[path]
