"""
Configuração de uma execução, montada a partir das flags da linha de comando.
"""
from dataclasses import asdict, dataclass
from functools import cached_property
from math import gcd
import logging
import os

from algebra.fields import build_field
from algebra.genericuq import StructureTable, build_structure_table
from algebra.kernelalg import KernelContext, get_context
from algebra.rootdata import InvalidWordError, RootDatum, build_root_datum, convex_order, default_w0_word
from algebra import tablecache
import knobs

logger = logging.getLogger(__name__)

FIELD_KINDS = ("cyclo", "fq")


class ConfigError(ValueError):
    """Combinação de parâmetros que viola as hipóteses da execução."""


@dataclass(frozen=True)
class RunConfig:
    type_label: str = "A1"
    ell: int = 3
    field_kind: str = "cyclo"
    p: int | None = None
    r: int = 0
    w0_word: tuple = ()
    seed: int = 0
    jobs: int = 1
    strict: bool = True
    long_running: bool = False
    timings: bool = False
    split_budget: int = 200_000
    trace_budget: int = 1_000_000
    height_bound: int = 3
    betti_degree: int = 6
    relation_samples: int = 20
    cache_dir: str = tablecache.CACHE_SUB_FOLDER

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        type_label = getattr(args, "type", "A1").upper()
        datum = build_root_datum(type_label)
        budget = knobs.budget_knobs()
        budget.value = getattr(args, "budget", 1.0)
        height = knobs.height_knob(max(sum(root) for root in datum.positive_roots))
        if getattr(args, "height_bound", None) is not None:
            height.value = args.height_bound
        betti = knobs.betti_knob(type_label)
        if getattr(args, "n_max", None) is not None:
            betti.value = args.n_max
        samples = knobs.samples_knob()
        if getattr(args, "samples", None) is not None:
            samples.value = args.samples

        p = getattr(args, "p", None)
        r = getattr(args, "r", 0)
        field_kind = getattr(args, "field", None) or ("fq" if p is not None or r else "cyclo")
        w0 = getattr(args, "w0", None)
        try:
            word = tuple(int(i) for i in w0.split(",")) if w0 else default_w0_word(datum)
        except ValueError as error:
            raise ConfigError(f"Palavra w0 inválida: {w0!r}") from error

        config = cls(
            type_label=type_label,
            ell=getattr(args, "ell", 3),
            field_kind=field_kind,
            p=p,
            r=r,
            w0_word=word,
            seed=getattr(args, "seed", 0),
            jobs=max(1, getattr(args, "jobs", 1)),
            strict=getattr(args, "strict", True),
            long_running=getattr(args, "long_running", False),
            timings=getattr(args, "timings", False),
            split_budget=budget["split_budget"].value,
            trace_budget=budget["trace_budget"].value,
            height_bound=height.value,
            betti_degree=betti.value,
            relation_samples=samples.value,
            cache_dir=getattr(args, "cache_dir", None) or tablecache.CACHE_SUB_FOLDER,
        )
        config.validate()
        return config

    def validate(self):
        """Hipóteses sobre ℓ e p; no modo permissivo só as necessárias para construir o corpo."""
        datum = self.datum
        ell, p = self.ell, self.p
        if ell < 3 or ell % 2 == 0:
            raise ConfigError(f"ℓ={ell} precisa ser ímpar e ≥ 3")
        if self.field_kind not in FIELD_KINDS:
            raise ConfigError(f"Corpo desconhecido: {self.field_kind}")
        if self.field_kind == "fq" and p is None:
            raise ConfigError("--field fq requer --p")
        if self.field_kind == "cyclo" and p is not None:
            raise ConfigError("--p só faz sentido com --field fq")
        if self.r < 0:
            raise ConfigError(f"r={self.r} negativo")
        if self.r >= 1 and self.field_kind != "fq":
            raise ConfigError("r ≥ 1 requer --field fq")
        if p is not None and p % ell == 0:
            raise ConfigError(f"p={p} divide ℓ={ell}")
        if datum.type_label == "G2" and not self.long_running:
            raise ConfigError("G2 requer --long-running")
        try:
            convex_order(datum, self.w0_word)
        except InvalidWordError as error:
            raise ConfigError(str(error)) from error

        relaxed = []
        if datum.type_label == "G2" and gcd(ell, 3) != 1:
            relaxed.append(f"ℓ={ell} não é primo com 3")
        if ell < datum.coxeter_number:
            relaxed.append(f"ℓ={ell} < h={datum.coxeter_number}")
        if p == 2 or (p == 3 and datum.type_label == "G2"):
            relaxed.append(f"p={p} não é bom para {datum.type_label}")
        if relaxed and self.strict:
            raise ConfigError("; ".join(relaxed) + " (use --permissive)")
        for message in relaxed:
            logger.warning("modo permissivo: %s", message)

    @cached_property
    def datum(self) -> RootDatum:
        return build_root_datum(self.type_label)

    @cached_property
    def order(self):
        return convex_order(self.datum, self.w0_word)

    @cached_property
    def field(self):
        return build_field(self.field_kind, self.ell, self.p)

    @property
    def cache_file(self) -> str:
        return tablecache.cache_path(self.type_label, self.w0_word, self.cache_dir)

    def table(self) -> StructureTable:
        """Tabela do cache quando existe; senão calculada com o limite de altura configurado."""
        if os.path.exists(self.cache_file):
            return tablecache.load_table(self.cache_file)
        return build_structure_table(self.order, self.height_bound)

    def context(self, table: StructureTable | None = None) -> KernelContext:
        return get_context(self.order, self.field, self.r, table if table is not None else self.table())

    def describe(self) -> dict:
        record = asdict(self)
        record["w0_word"] = ",".join(str(i) for i in self.w0_word)
        record.pop("cache_dir")
        return record
