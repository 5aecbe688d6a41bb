import argparse
import dataclasses
import itertools
import logging
import sys
from multiprocessing import Pool

import numpy as np

from algebra import tablecache
from algebra.genericuq import E_SIDE, F_SIDE, HeightBoundError, PBWBasis, QuantumGroup, StructureTableError
from algebra.kernelalg import (MINUS, PLUS, AlgebraDescriptor, AlgebraKind, InternalInconsistencyError,
                               UnsupportedKernelError, associativity_check)
from algebra.rootdata import InvalidWordError, UnsupportedTypeError, format_root
from algebra.scalars import NotInLocalizationError, VanishingDenominatorError
from checks import cohomlite, corpus, inject, reporter
from checks.inject import BudgetExceededError
from checks.manifest import load_manifest
from reps import qmodules
from reps.modulespec import SpecSyntaxError, realize
from runconfig import ConfigError, RunConfig

logger = logging.getLogger(__name__)

EXIT_DISAGREE = 1
EXIT_USAGE = 2
EXIT_STRUCTURE = 3


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--type", default="A1", help="tipo de Lie: A1, A2, B2 ou G2")
    parser.add_argument("--ell", type=int, default=3, help="ordem da raiz da unidade ζ")
    parser.add_argument("--p", type=int, default=None, help="característica do corpo finito")
    parser.add_argument("--r", type=int, default=0, help="núcleo de Frobenius-Lusztig U_ζ(G_r)")
    parser.add_argument("--w0", default=None, help="palavra reduzida de w0, índices separados por vírgula")
    parser.add_argument("--field", choices=("cyclo", "fq"), default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--budget", type=float, default=1.0, help="fator 0..2 sobre os orçamentos dos oráculos")
    parser.add_argument("--height-bound", type=int, default=None)
    parser.add_argument("--n-max", type=int, default=None, help="grau máximo da resolução")
    parser.add_argument("--samples", type=int, default=None, help="triplas aleatórias na checagem de associatividade")
    parser.add_argument("--strict", dest="strict", action="store_true", default=True)
    parser.add_argument("--permissive", dest="strict", action="store_false")
    parser.add_argument("--long-running", action="store_true")
    parser.add_argument("--timings", action="store_true")
    parser.add_argument("--cache-dir", default=None)
    parser.add_argument("--out", default=None)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="main.py", description="Injetividade sobre núcleos de Frobenius-Lusztig")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("roots", parents=[common], help="sistema de raízes e ordem convexa")
    commands.add_parser("build", parents=[common], help="calcula e grava a tabela de estrutura")

    relations = commands.add_parser("relations", parents=[common], help="expansão de um par de vetores de raiz")
    relations.add_argument("i", type=int)
    relations.add_argument("j", type=int)
    relations.add_argument("--side", choices=(E_SIDE, F_SIDE), default=E_SIDE)

    module = commands.add_parser("module", parents=[common], help="constrói e inspeciona um módulo")
    module.add_argument("spec")
    module.add_argument("--algebra", default=None, help="g|b-|b+|u-|u+|Am:<m>|root:<α>:<lado>")
    module.add_argument("--export", action="store_true")

    verify = commands.add_parser("verify", parents=[common], help="executa as verificações sobre um corpus")
    verify.add_argument("--suite", choices=corpus.SUITES + ("all",), default="all")
    verify.add_argument("--manifest", default=None)

    skeleton = commands.add_parser("skeleton", parents=[common], help="esqueleto de suporte de um módulo")
    skeleton.add_argument("spec")
    skeleton.add_argument("--side", choices=(MINUS, PLUS), default=MINUS)

    betti = commands.add_parser("betti", parents=[common], help="resolução minimal e H^n(u_ζ(b±), k)")
    betti.add_argument("--side", choices=(MINUS, PLUS), default=PLUS)

    info = commands.add_parser("cache-info", parents=[common], help="resumo de um arquivo de cache")
    info.add_argument("path", nargs="?", default=None)

    listing = commands.add_parser("corpus", parents=[common], help="lista os manifestos embutidos")
    listing.add_argument("--show", default=None)
    return parser


def _configure_logging(verbosity: int):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", force=True)


def _format_monomial(side: str, exponents: tuple) -> str:
    factors = []
    for s, a in enumerate(exponents, start=1):
        if a:
            factors.append(f"{side}_γ{s}" + (f"^{a}" if a > 1 else ""))
    return "·".join(factors) or "1"


# Subcomandos

def cmd_roots(config: RunConfig, args) -> int:
    print(config.datum.table())
    print("w0 " + config.order.label())
    for s, gamma in enumerate(config.order.gammas, start=1):
        print(f"  γ{s} = {format_root(gamma)}")
    return 0


def _validate_basis(basis: PBWBasis):
    """Dimensões por peso, coideais e bases permutadas; falha vira StructureTableError."""
    height = basis.group.height_bound
    for record in basis.validate_dimensions(height):
        if not record["dimension"] == record["kostant"] == record["pbw_rank"]:
            raise StructureTableError(f"Componente {record['weight']}: dimensão {record['dimension']}, "
                                      f"Kostant {record['kostant']}, posto PBW {record['pbw_rank']}")
    for m in range(1, basis.n + 1):
        if not basis.coideal_membership(m) or not basis.twisted_coideal_membership(m):
            raise StructureTableError(f"Δ(E_γ{m}) fora do coideal esperado", (m, m))
    orders = _reorderings(basis.n)
    for order in orders:
        if not basis.reorder_basis_check(order, height):
            raise StructureTableError(f"Monômios na ordem {order} não formam base")
    print(f"validação até altura {height}: dimensões = Kostant, coideais ok, {len(orders)} ordens de monômios ok")


def _reorderings(n: int) -> list:
    """Todas as permutações até n = 4; acima disso a inversa e as rotações."""
    if n <= 4:
        return list(itertools.permutations(range(1, n + 1)))
    identity = tuple(range(1, n + 1))
    return [identity[::-1]] + [identity[k:] + identity[:k] for k in range(1, n)]


def cmd_build(config: RunConfig, args) -> int:
    basis = PBWBasis(QuantumGroup(config.datum, config.height_bound), config.order)
    table = basis.structure_table()
    _validate_basis(basis)
    path = tablecache.save_table(table, args.out or config.cache_file)
    summary = tablecache.describe_table(table)
    print(f"tabela {summary['type']} w0={summary['w0']}: {summary['pairs']} pares, "
          f"{summary['tail_terms']} termos de cauda, denominadores em S: {summary['s_denominator']}")
    print(f"gravada em {path}")
    return 0


def cmd_relations(config: RunConfig, args) -> int:
    table = config.table()
    if not 1 <= args.i < args.j <= table.order.n:
        raise ConfigError(f"Par ({args.i},{args.j}) precisa de 1 ≤ i < j ≤ {table.order.n}")
    entry = table.entry(args.side, args.i, args.j)
    side = args.side
    pair = (_format_monomial(side, tuple(1 if s == args.i else 0 for s in range(1, table.order.n + 1))),
            _format_monomial(side, tuple(1 if s == args.j else 0 for s in range(1, table.order.n + 1))))
    terms = [f"({entry.leading})·{pair[1]}{pair[0]}"]
    terms += [f"({c})·{_format_monomial(side, m)}" for m, c in entry.tail.items()]
    print(f"{pair[0]}{pair[1]} = " + " + ".join(terms))

    context = config.context(table)
    field = context.field
    print(f"em q = ζ ({field.label}): líder {field.format(entry.leading.evaluate(field))}")
    for m, c in entry.tail.items():
        print(f"  {_format_monomial(side, m)}: {field.format(c.evaluate(field))}")
    rng = np.random.default_rng(config.seed)
    for kind in (AlgebraKind.U_MINUS, AlgebraKind.U_PLUS):
        algebra = context.algebra(AlgebraDescriptor(kind))
        count = associativity_check(algebra, rng, config.relation_samples)
        print(f"associatividade em {algebra.descriptor}: {count} triplas")
    return 0


def cmd_module(config: RunConfig, args) -> int:
    context = config.context()
    module = realize(args.spec, context)
    flags = module.flags
    print(f"{module.provenance}: dimensão {module.dim}")
    print(f"  compatível com o toro: {flags.torus_compatible}, b⁻: {flags.borel_minus}, b⁺: {flags.borel_plus}, "
          f"U_ζ: {flags.full_u}")
    if module.weights is not None:
        character = qmodules.Character.of(module)
        print("  caráter: " + ", ".join(f"{','.join(map(str, w))}:{c}" for w, c in sorted(character.items())))
    if module.has("E") and module.has("F"):
        defects = module.relation_defects()
        print("  relações: " + ("ok" if not defects else "; ".join(defects)))
    if args.algebra:
        algebra = context.algebra(AlgebraDescriptor.parse(args.algebra))
        if algebra.is_local:
            report = inject.free_over_local(algebra, module)
            print(f"  livre sobre {report.algebra}: {report.verdict} (topo {report.top_dim}, dim A {report.dim_a})")
        else:
            verdict = inject.projective_split_test(algebra, module, config.split_budget)
            print(f"  projetivo sobre {algebra.descriptor}: {verdict}")
    if args.export:
        text = qmodules.export_module(module)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="\n") as file:
                file.write(text)
        else:
            sys.stdout.write(text)
    return 0


def cmd_verify(config: RunConfig, args) -> int:
    manifest = load_manifest(args.manifest) if args.manifest else corpus.manifest_for(config)
    config = manifest.configure(config)
    suites = corpus.SUITES if args.suite == "all" else (args.suite,)
    tasks = corpus.tasks_for(config, manifest, suites)
    logger.info("manifesto %s: %d tarefas, %d processos", manifest.name, len(tasks), config.jobs)
    if config.jobs > 1:
        with Pool(processes=config.jobs) as pool:
            results = pool.starmap(corpus.run_task, [(dataclasses.replace(config), task) for task in tasks])
    else:
        results = [corpus.run_task(config, task) for task in tasks]
    records = [record for result in results for record in result]
    reporter.write_report(records, args.out)
    if args.out:
        reporter.print_summary(records)
    summary = reporter.summarize(records)
    return EXIT_DISAGREE if summary["disagree"] else 0


def cmd_skeleton(config: RunConfig, args) -> int:
    context = config.context()
    module = realize(args.spec, context)
    report = inject.support_skeleton(context, module, args.side)
    roots = [format_root(root) for root in report.roots_in_skeleton]
    print(f"esqueleto de {module.provenance} ({args.side}): {{{', '.join(roots)}}}")
    for root, freeness in sorted(report.per_root.items()):
        print(f"  {format_root(root):<12} livre: {freeness.verdict}  topo {freeness.top_dim}")
    if module.flags.full_u:
        violations = inject.skeleton_closure(context, module, args.side)
        print("  fechado por soma de raízes: " + ("sim" if not violations else
              ", ".join(f"{format_root(a)}+{format_root(b)}" for a, b in violations)))
    return 0


def cmd_betti(config: RunConfig, args) -> int:
    context = config.context()
    n_max = config.betti_degree
    betti = cohomlite.minimal_resolution(context, args.side, n_max)
    dims = cohomlite.borel_cohomology_dims(context, args.side, n_max, betti)
    expected = cohomlite.expected_borel_dims(context, n_max)
    print(f"{'n':>3} {'betti':>6} {'H^n':>4} {'esperado':>9}  pesos")
    for n, weights in enumerate(betti.degrees):
        print(f"{n:>3} {len(weights):>6} {dims[n]:>4} {expected[n]:>9}  " + " ".join(format_root(w) for w in weights))
    if args.out:
        record = {**betti.to_record(), "dims": dims, "expected": expected, "type": context.datum.type_label,
                  "ell": context.ell}
        reporter.write_report([record], args.out)
    return 0 if dims == expected else EXIT_DISAGREE


def cmd_cache_info(config: RunConfig, args) -> int:
    path = args.path or config.cache_file
    summary = tablecache.describe_table(tablecache.load_table(path))
    print(f"{path}: formato {tablecache.FORMAT_VERSION}")
    for key, value in summary.items():
        print(f"  {key}: {value}")
    return 0


def cmd_corpus(config: RunConfig, args) -> int:
    manifests = corpus.default_manifests()
    if args.show:
        if args.show not in manifests:
            raise ConfigError(f"Manifesto desconhecido: {args.show}")
        sys.stdout.write(manifests[args.show].serialize())
        return 0
    for name, manifest in manifests.items():
        field = manifest.field_kind + (f" p={manifest.p}" if manifest.p else "")
        print(f"{name:<10} {manifest.type_label} ℓ={manifest.ell} r={manifest.r} {field}: {len(manifest.cases)} casos")
    return 0


COMMANDS = {
    "roots": cmd_roots,
    "build": cmd_build,
    "relations": cmd_relations,
    "module": cmd_module,
    "verify": cmd_verify,
    "skeleton": cmd_skeleton,
    "betti": cmd_betti,
    "cache-info": cmd_cache_info,
    "corpus": cmd_corpus,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = RunConfig.from_args(args)
        if not config.strict:
            print("AVISO: modo permissivo, hipóteses sobre ℓ e p relaxadas", file=sys.stderr)
        return COMMANDS[args.command](config, args)
    except (StructureTableError, HeightBoundError, NotInLocalizationError, VanishingDenominatorError,
            tablecache.TableFormatError, InternalInconsistencyError) as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_STRUCTURE
    except (ConfigError, SpecSyntaxError, UnsupportedTypeError, InvalidWordError, UnsupportedKernelError,
            BudgetExceededError, ValueError) as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_USAGE
    except FileNotFoundError as error:
        logger.error("arquivo não encontrado: %s", error.filename)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
