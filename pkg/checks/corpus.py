"""
Manifestos embutidos e execução das verificações por caso.
"""
from itertools import product
import logging
import time

import numpy as np

from algebra.kernelalg import MINUS, PLUS
from checks import cohomlite, inject
from checks.inject import BudgetExceededError
from checks.manifest import CorpusCase, CorpusManifest
from reps import qmodules
from reps.modulespec import realize
from runconfig import RunConfig

logger = logging.getLogger(__name__)

MODULE_SUITES = ("rootcrit", "borel", "reduction", "highest", "filtration", "local")
GLOBAL_SUITES = ("betti", "tensor", "zdual")
SUITES = MODULE_SUITES + GLOBAL_SUITES
CORE_SUITES = ("rootcrit", "borel", "reduction", "highest", "local", "betti")
INJECTIVE_CHECKS = ("root_criterion", "reduction_borel", "highest_root")


def _a1_manifest(ell: int) -> CorpusManifest:
    top = ell - 1
    manifest = CorpusManifest(f"a1-l{ell}", "A1", ell)
    manifest.add_case("trivial", "trivial", injective=False)
    manifest.add_case("onedim-l", f"onedim({ell})", injective=False)
    for lam in range(ell):
        manifest.add_case(f"verma-{lam}", f"verma({lam})", **({"injective": True} if lam == top else {}))
        manifest.add_case(f"simple-{lam}", f"simple({lam})", injective=lam == top)
    for lam in (0, 1):
        manifest.add_case(f"coverma-{lam}", f"coverma({lam})")
    manifest.add_case("dual-verma", "dual(verma(0))")
    manifest.add_case("dual-simple", "dual(simple(1))")
    manifest.add_case("tensor-simples", "tensor(simple(1),simple(1))")
    manifest.add_case("tensor-steinberg", f"tensor(simple({top}),simple(1))", injective=True)
    manifest.add_case("tensor-standard", "tensor(verma(0),coverma(0))", injective=True)
    manifest.add_case("sum", f"sum(simple(0),simple({top}))", injective=False)
    manifest.add_case("twist", f"twist(verma(1),{ell})")
    manifest.add_case("omega", "omega(verma(0))")
    manifest.add_case("randsub", "randsub(verma(0),1)")
    manifest.add_case("quot-0", "quot(verma(0),7)")
    manifest.add_case("quot-1", "quot(coverma(1),2)")
    manifest.add_case("cyclic", "cyclic(tensor(simple(1),simple(1)),5)")
    manifest.add_case("res-minus", "res(verma(0),minus)")
    manifest.add_case("res-plus", "res(coverma(1),plus)")
    return manifest


def _a2_manifest() -> CorpusManifest:
    manifest = CorpusManifest("a2-l3", "A2", 3, field_kind="fq", p=7)
    manifest.add_case("trivial", "trivial", injective=False)
    for a, b in product(range(3), repeat=2):
        manifest.add_case(f"simple-{a}{b}", f"simple({a},{b})", injective=(a, b) == (2, 2))
    for weight in ("0,0", "1,0", "2,2"):
        manifest.add_case(f"verma-{weight.replace(',', '')}", f"verma({weight})",
                          **({"injective": True} if weight == "2,2" else {}))
    for weight in ("0,0", "1,1"):
        manifest.add_case(f"coverma-{weight.replace(',', '')}", f"coverma({weight})")
    manifest.add_case("dual-simple", "dual(simple(1,0))")
    manifest.add_case("tensor-simples", "tensor(simple(1,0),simple(0,1))")
    manifest.add_case("sum", "sum(simple(1,0),simple(0,1))")
    manifest.add_case("omega", "omega(simple(1,0))")
    manifest.add_case("twist", "twist(simple(1,0),3,0)")
    manifest.add_case("randsub", "randsub(verma(0,0),1)")
    manifest.add_case("quot", "quot(verma(1,0),2)")
    manifest.add_case("res-minus", "res(verma(0,0),minus)")
    manifest.add_case("cyclic", "cyclic(simple(1,1),3)")
    return manifest


def _higher_manifest() -> CorpusManifest:
    manifest = CorpusManifest("a1-r1-p7", "A1", 3, field_kind="fq", p=7, r=1)
    top = 3 * 7 - 1
    manifest.add_case("trivial", "trivial", injective=False)
    manifest.add_case("onedim-bound", "onedim(21)", injective=False)
    for lam in (0, 5, top):
        manifest.add_case(f"verma-{lam}", f"verma({lam})", **({"injective": True} if lam == top else {}))
    for lam in (2, 3, top):
        manifest.add_case(f"simple-{lam}", f"simple({lam})", injective=lam == top)
    for lam in (0, 10):
        manifest.add_case(f"coverma-{lam}", f"coverma({lam})")
    manifest.add_case("dual-verma", "dual(verma(4))")
    manifest.add_case("sum", "sum(simple(1),simple(2))")
    manifest.add_case("randsub", "randsub(verma(3),1)")
    manifest.add_case("quot", "quot(verma(7),2)")
    return manifest


def default_manifests() -> dict:
    manifests = [_a1_manifest(3), _a1_manifest(5), _a2_manifest(), _higher_manifest()]
    return {manifest.name: manifest for manifest in manifests}


def manifest_for(config: RunConfig) -> CorpusManifest:
    """Manifesto embutido com os parâmetros da configuração, ou um mínimo gerado."""
    for manifest in default_manifests().values():
        if (manifest.type_label, manifest.ell, manifest.r) == (config.type_label, config.ell, config.r) \
                and (manifest.field_kind == config.field_kind or config.field_kind == "cyclo"):
            return manifest
    rank = config.datum.rank
    bound = config.ell * (config.p ** config.r if config.r else 1)
    steinberg = ",".join([str(bound - 1)] * rank)
    zero = ",".join(["0"] * rank)
    manifest = CorpusManifest(f"{config.type_label.lower()}-l{config.ell}", config.type_label, config.ell,
                              config.field_kind, config.p, config.r)
    manifest.add_case("trivial", "trivial", injective=False)
    manifest.add_case("verma-0", f"verma({zero})")
    manifest.add_case("steinberg", f"simple({steinberg})", injective=True)
    return manifest


# Execução

def _applies(suite: str, module) -> bool:
    full = module.has("E") and module.has("F")
    if suite in ("rootcrit", "reduction"):
        return full
    if suite == "highest":
        return full and module.flags.full_u
    if suite == "filtration":
        return module.has("E") and module.weights is not None
    if suite in ("borel", "local"):
        return module.has("E") or module.has("F")
    return False


def _module_records(config: RunConfig, context, module, suite: str) -> list:
    budgets = {"split_budget": config.split_budget, "trace_budget": config.trace_budget}
    if suite == "rootcrit":
        return [inject.verify_root_criterion(context, module, **budgets)]
    if suite == "reduction":
        return [inject.verify_reduction_borel(context, module, **budgets)]
    if suite == "highest":
        return [inject.highest_root_test(context, module, **budgets)]
    if suite == "filtration":
        return [inject.verify_filtration_character(context, module, config.split_budget)]
    if suite == "local":
        return [inject.verify_local_oracles(context, module, config.split_budget)]
    sides = [side for side, letter in ((MINUS, "F"), (PLUS, "E")) if module.has(letter)]
    return [inject.verify_borel_criterion(context, module, side, **budgets) for side in sides]


def _skipped(case_id: str, suite: str, spec: str, error: BudgetExceededError) -> dict:
    logger.warning("%s [%s] pulado: %s", case_id, suite, error)
    return {"case": case_id, "suite": suite, "check": suite, "spec": spec, "skipped": True,
            "reason": str(error), "agree": None}


def run_case(config: RunConfig, case: CorpusCase, suites) -> list:
    context = config.context()
    module = realize(case.spec, context)
    records = []
    for suite in suites:
        if suite not in MODULE_SUITES or not _applies(suite, module):
            continue
        start = time.perf_counter()
        try:
            results = [result.to_record(context) for result in _module_records(config, context, module, suite)]
        except BudgetExceededError as error:
            records.append(_skipped(case.case_id, suite, case.spec, error))
            continue
        for record in results:
            record["case"] = case.case_id
            record["suite"] = suite
            expected = case.expect.get("injective")
            if expected is not None and record["check"] in INJECTIVE_CHECKS and record["oracle"] != expected:
                logger.error("%s: oráculo %s contraria a expectativa %s", case.case_id, record["oracle"], expected)
                record["expected"] = expected
                record["agree"] = False
            if config.timings:
                record["wall_time"] = round(time.perf_counter() - start, 3)
        records.extend(results)
    logger.info("caso %s (%s): %d registros", case.case_id, case.spec, len(records))
    return records


def _context_record(context, check: str, case_id: str, agree: bool, details: dict) -> dict:
    return {"case": case_id, "suite": check, "check": check, "spec": "", "type": context.datum.type_label,
            "ell": context.ell, "p": context.field.characteristic, "r": context.r,
            "field": context.field.label, "agree": agree, **details}


def run_betti(config: RunConfig, side: str) -> list:
    context = config.context()
    if context.r != 0:
        return []
    n_max = config.betti_degree
    betti = cohomlite.minimal_resolution(context, side, n_max)
    dims = cohomlite.borel_cohomology_dims(context, side, n_max, betti)
    expected = cohomlite.expected_borel_dims(context, n_max)
    mismatches = cohomlite.torus_invariance_check(context, betti)
    graded = cohomlite.strict_grading(betti)
    agree = dims == expected and graded and not mismatches
    details = {**betti.to_record(), "dims": dims, "expected": expected, "strict_grading": graded,
               "torus_mismatches": len(mismatches)}
    return [_context_record(context, "betti", f"betti:{side}", agree, details)]


def run_zdual(config: RunConfig, weight: tuple) -> list:
    context = config.context()
    rng = np.random.default_rng(config.seed)
    report = qmodules.zdual_check(context, weight, rng)
    cover = qmodules.projective_cover_check(context, weight)
    agree = all(report.values()) and cover["head_dimension"] == 1 and cover["socle_dimension"] == 1 \
        and cover["e_socle_dimension"] == 1 and cover["socle_weight_ok"] and cover["e_socle_weight_ok"]
    label = ",".join(str(c) for c in weight)
    return [_context_record(context, "zdual", f"zdual:{label}", agree, {**report, **cover})]


def run_tensor(config: RunConfig, lam: tuple, mu: tuple) -> list:
    context = config.context()
    record = inject.verify_tensor_injectivity(context, lam, mu, config.split_budget,
                                              config.trace_budget).to_record(context)
    label = ",".join(str(c) for c in lam) + ":" + ",".join(str(c) for c in mu)
    record.update({"case": f"tensor:{label}", "suite": "tensor"})
    return [record]


def tasks_for(config: RunConfig, manifest: CorpusManifest, suites) -> list:
    """Lista de tarefas independentes: (tipo, argumento)."""
    tasks = []
    module_suites = [suite for suite in suites if suite in MODULE_SUITES]
    if module_suites:
        tasks.extend(("case", (case, tuple(module_suites))) for case in manifest.cases)
    if "betti" in suites:
        tasks.extend(("betti", side) for side in (PLUS, MINUS))
    rank = config.datum.rank
    bound = config.ell * (config.p ** config.r if config.r else 1)
    if "tensor" in suites:
        corners = [(0,) * rank, (bound - 1,) * rank]
        tasks.extend(("tensor", pair) for pair in product(corners, repeat=2))
    if "zdual" in suites:
        limit = min(2, bound - 1)
        tasks.extend(("zdual", weight) for weight in product(range(limit + 1), repeat=rank))
    return tasks


def run_task(config: RunConfig, task: tuple) -> list:
    """Executa uma tarefa; erros de orçamento viram registros pulados."""
    kind, argument = task
    start = time.perf_counter()
    if kind == "case":
        return run_case(config, *argument)
    try:
        if kind == "betti":
            records = run_betti(config, argument)
        elif kind == "tensor":
            records = run_tensor(config, *argument)
        else:
            records = run_zdual(config, argument)
    except BudgetExceededError as error:
        return [_skipped(f"{kind}:{argument}", kind, "", error)]
    if config.timings:
        for record in records:
            record["wall_time"] = round(time.perf_counter() - start, 3)
    return records
