"""
Oráculos de liberdade e projetividade, esqueletos de suporte e a verificação dos critérios
de injetividade por subálgebras de raiz.
"""
from collections import defaultdict
from dataclasses import dataclass, field as dataclass_field
import logging

import numpy as np

from algebra.kernelalg import (MINUS, PLUS, AlgebraDescriptor, AlgebraKind, InternalInconsistencyError,
                               KernelAlgebra, KernelContext, hopf_integral, integral)
from algebra.rootdata import format_root
from reps import qmodules
from reps.qmodules import WeightedModule
import matrixmath

logger = logging.getLogger(__name__)

DEFAULT_SPLIT_BUDGET = 200_000
DEFAULT_TRACE_BUDGET = 1_000_000


class BudgetExceededError(RuntimeError):
    """Custo estimado de um oráculo acima do orçamento configurado."""

    def __init__(self, oracle: str, cost: int, budget: int):
        super().__init__(f"{oracle}: custo {cost} acima do orçamento {budget}")
        self.oracle = oracle
        self.cost = cost
        self.budget = budget


@dataclass
class FreenessReport:
    algebra: str
    dim_m: int
    dim_a: int
    top_dim: int
    verdict: bool
    rank: int | None = None

    def to_record(self) -> dict:
        return {"algebra": self.algebra, "dim": self.dim_m, "top": self.top_dim, "free": self.verdict,
                "rank": self.rank}


@dataclass
class SkeletonReport:
    side: str
    roots_in_skeleton: list
    per_root: dict

    def to_record(self) -> dict:
        return {"side": self.side, "skeleton": [format_root(r) for r in self.roots_in_skeleton]}


@dataclass
class AgreementRecord:
    """Resultado de uma verificação; discordância é dado, nunca exceção."""
    check: str
    spec: str
    per_root: dict
    oracle: bool | None
    agree: bool
    details: dict = dataclass_field(default_factory=dict)

    def to_record(self, context: KernelContext) -> dict:
        return {
            "check": self.check,
            "spec": self.spec,
            "type": context.datum.type_label,
            "ell": context.ell,
            "p": context.field.characteristic,
            "r": context.r,
            "field": context.field.label,
            "per_root": self.per_root,
            "oracle": self.oracle,
            "agree": self.agree,
            **self.details,
        }


# Fechos lineares

def _closure(field, operators, vectors, reduced=None, pivots=None) -> tuple[np.ndarray, list]:
    """Menor subespaço contendo os vetores e estável pelos operadores (base escalonada)."""
    size = operators[0].shape[0] if operators else len(vectors[0])
    if reduced is None:
        reduced, pivots = field.zeros((0, size)), []
    pending = []
    for vector in vectors:
        rest = matrixmath.reduce_vector(field, reduced, pivots, vector) if pivots else np.array(vector)
        if field.nonzero_mask(rest).any():
            reduced, pivots = matrixmath.row_reduce(field, np.vstack([reduced, rest]))
            pending.append(rest)
    while pending:
        vector = pending.pop()
        for operator in operators:
            image = field.matmul(operator, vector.reshape(-1, 1))[:, 0]
            rest = matrixmath.reduce_vector(field, reduced, pivots, image)
            if field.nonzero_mask(rest).any():
                reduced, pivots = matrixmath.row_reduce(field, np.vstack([reduced, rest]))
                pending.append(rest)
    return reduced, pivots


def _unit(field, size: int, index: int) -> np.ndarray:
    vector = field.zeros(size)
    vector[index] = field.one
    return vector


def _radical_images(algebra: KernelAlgebra, module: WeightedModule) -> np.ndarray:
    field = module.field
    images = [algebra.module_generator_action(module, symbol) for symbol in algebra.generators()]
    return matrixmath.stack_columns(field, images, module.dim)


# Liberdade sobre álgebras locais

def free_over_local(algebra: KernelAlgebra, module: WeightedModule) -> FreenessReport:
    """Nakayama: M livre ⇔ dim M = dim A · dim(M/rad(A)M), rad(A)M gerado pelas imagens dos geradores."""
    if not algebra.is_local:
        raise ValueError(f"{algebra.descriptor} não é local")
    field = module.field
    images = _radical_images(algebra, module)
    top = module.dim - matrixmath.rank(field, images)
    verdict = module.dim == algebra.dimension * top
    return FreenessReport(str(algebra.descriptor), module.dim, algebra.dimension, top, verdict,
                          top if verdict else None)


def free_over_root(context: KernelContext, module: WeightedModule, root: tuple, side: str = MINUS) -> FreenessReport:
    """
    Liberdade sobre a subálgebra da raiz γ, com o atalho dim A·rank ρ(∫) = dim M
    (para r = 0: ℓ·rank(X_γ^{ℓ−1}) = dim M) conferido contra Nakayama.
    """
    algebra = context.algebra(AlgebraDescriptor(AlgebraKind.ROOT, root=tuple(root), side=side))
    report = free_over_local(algebra, module)
    (key,) = integral(algebra)
    shortcut = algebra.module_basis_action(module, key)
    verdict = algebra.dimension * matrixmath.rank(module.field, shortcut) == module.dim
    if verdict != report.verdict:
        raise InternalInconsistencyError(
            f"Atalho da integral discorda de Nakayama em {format_root(root)} ({side}) para {module.provenance}")
    return report


# Teste de cisão

def _cover_generators(algebra: KernelAlgebra, module: WeightedModule, operators) -> list:
    """Vetores da base que geram M: complemento do radical (local) ou redução gulosa."""
    field = module.field
    chosen = []
    if algebra.is_local:
        images = _radical_images(algebra, module)
        reduced, pivots = matrixmath.row_space(field, images.T.copy())
        for b in range(module.dim):
            if len(pivots) == module.dim:
                break
            unit = _unit(field, module.dim, b)
            rest = matrixmath.reduce_vector(field, reduced, pivots, unit) if pivots else unit
            if field.nonzero_mask(rest).any():
                reduced, pivots = matrixmath.row_reduce(field, np.vstack([reduced, rest]))
                chosen.append(b)
        return chosen
    reduced, pivots = None, None
    for b in range(module.dim):
        if pivots is not None and len(pivots) == module.dim:
            break
        unit = _unit(field, module.dim, b)
        if pivots and not field.nonzero_mask(matrixmath.reduce_vector(field, reduced, pivots, unit)).any():
            continue
        reduced, pivots = _closure(field, operators, [unit], reduced, pivots)
        chosen.append(b)
    return chosen


def _cover_block(field, matrices: list, size: int, rows: list, columns: list) -> np.ndarray:
    """Bloco (rows, columns) de ⊕_k ρ_{P(λ_k)}, sem montar a soma direta."""
    row_cover, row_local = np.divmod(np.asarray(rows), size)
    column_cover, column_local = np.divmod(np.asarray(columns), size)
    block = field.zeros((len(rows), len(columns)))
    for k in np.intersect1d(row_cover, column_cover):
        r = np.flatnonzero(row_cover == k)
        c = np.flatnonzero(column_cover == k)
        block[np.ix_(r, c)] = matrices[k][np.ix_(row_local[r], column_local[c])]
    return block


def _graded_split(algebra: KernelAlgebra, module: WeightedModule, generators: list) -> bool:
    """
    Cobertura graduada π: ⊕_k P(λ_k) → M, e_{λ_k} ↦ y_k, e busca de s de grau 0 com
    s·ρ_M(g) = ρ_P(g)·s para os geradores E, F e π∘s = id. O toro comuta com s pela graduação.
    Numa álgebra local P(λ) = A, graduada a partir de λ.
    """
    context = algebra.context
    field = module.field
    basis = algebra.projective_basis()
    size = len(basis)
    tops = [module.weights[y] for y in generators]
    cover_weights = [w for top in tops for w in algebra.projective_weights(top)]
    pi = field.zeros((module.dim, len(cover_weights)))
    on_basis = {}
    for k, (y, top) in enumerate(zip(generators, tops)):
        for b, (f, e) in enumerate(basis):
            key = algebra.weight_vector_key(f, e, top)
            if key not in on_basis:
                on_basis[key] = algebra.module_basis_action(module, key)
            pi[:, k * size + b] = on_basis[key][:, y]
    cover_blocks, module_blocks = defaultdict(list), defaultdict(list)
    for b, weight in enumerate(cover_weights):
        cover_blocks[weight].append(b)
    for m, weight in enumerate(module.weights):
        module_blocks[weight].append(m)
    # incógnitas s[b, m] com peso(b) = peso(m)
    start, total = [], 0
    for weight in module.weights:
        start.append(total)
        total += len(cover_blocks.get(weight, []))
    if not total:
        return False
    blocks, rhs = [], []
    for symbol in algebra.generators():
        letter, s, n = symbol
        if letter == "K":
            continue
        on_module = algebra.module_generator_action(module, symbol)
        by_top = {}
        for top in tops:
            if top not in by_top:
                by_top[top] = algebra.projective_action(symbol, top)
        on_cover = [by_top[top] for top in tops]
        shift = context.datum.to_weight(context.order.gammas[s - 1])
        sign = 1 if letter == "E" else -1
        for m, weight in enumerate(module.weights):
            target = tuple(a + sign * n * b for a, b in zip(weight, shift))
            rows = cover_blocks.get(target, [])
            if not rows:
                continue
            block = field.zeros((len(rows), total))
            span = np.arange(len(rows))
            for source in np.flatnonzero(field.nonzero_mask(on_module[:, m])):
                block[span, start[source] + span] = on_module[source, m]
            columns = cover_blocks.get(weight, [])
            if columns:
                piece = _cover_block(field, on_cover, size, rows, columns)
                block[:, start[m]:start[m] + len(columns)] = field.normalize(
                    block[:, start[m]:start[m] + len(columns)] + field.scale(piece, field.neg(field.one)))
            blocks.append(block)
            rhs.append(field.zeros(len(rows)))
    for m, weight in enumerate(module.weights):
        rows = module_blocks[weight]
        columns = cover_blocks.get(weight, [])
        block = field.zeros((len(rows), total))
        block[:, start[m]:start[m] + len(columns)] = pi[np.ix_(rows, columns)]
        blocks.append(block)
        target = field.zeros(len(rows))
        target[rows.index(m)] = field.one
        rhs.append(target)
    solution = matrixmath.solve(field, np.concatenate(blocks, axis=0), np.concatenate(rhs))
    logger.debug("cisão graduada %s sobre %s: t=%d, %d incógnitas, %s", module.provenance, algebra.descriptor,
                 len(generators), total, solution is not None)
    return solution is not None


def projective_split_test(algebra: KernelAlgebra, module: WeightedModule,
                          budget: int = DEFAULT_SPLIT_BUDGET) -> bool:
    """
    Cobertura livre π: A^t → M, π(a_1..a_t) = Σ a_k y_k, e busca de s A-linear com π∘s = id:
    σ_{k,l} = s(y_k)_l, com Σ_l σ_{k,l}·y_l = y_k e Σ_k z_k σ_{k,l} = 0 para geradores z de ker π.
    Módulos com pesos usam a cobertura graduada por A·e_λ (A, se A é local).
    """
    field = module.field
    size_a, size_m = algebra.dimension, module.dim
    cost = size_a * size_m
    if cost > budget:
        raise BudgetExceededError("split", cost, budget)
    symbols = algebra.generators()
    operators = [algebra.module_generator_action(module, symbol) for symbol in symbols]
    generators = _cover_generators(algebra, module, operators)
    if _graded(module):
        return _graded_split(algebra, module, generators)
    if not algebra.is_local and size_a * size_a > budget:
        raise BudgetExceededError("split", size_a * size_a, budget)
    t = len(generators)
    actions = [algebra.module_basis_action(module, key) for key in algebra.basis]
    cover = field.zeros((size_m, t * size_a))
    for k, y in enumerate(generators):
        for b, matrix in enumerate(actions):
            cover[:, k * size_a + b] = matrix[:, y]
    kernel = matrixmath.nullspace(field, cover)
    left = [field.kron(field.identity(t), algebra.left_matrix(symbol)) for symbol in symbols]
    relations = []
    if kernel.shape[0]:
        reduced, pivots = None, None
        for row in kernel:
            if pivots and not field.nonzero_mask(matrixmath.reduce_vector(field, reduced, pivots, row)).any():
                continue
            reduced, pivots = _closure(field, left, [row], reduced, pivots)
            relations.append(row)
            if len(pivots) == kernel.shape[0]:
                break
    unknowns = t * t * size_a
    blocks, rhs = [], []
    for k, y in enumerate(generators):
        rows = field.zeros((size_m, unknowns))
        rows[:, k * t * size_a:(k + 1) * t * size_a] = cover
        blocks.append(rows)
        rhs.append(_unit(field, size_m, y))
    for z in relations:
        pieces = [algebra.element_left_matrix(algebra.element(z[k * size_a:(k + 1) * size_a])) for k in range(t)]
        for l in range(t):
            rows = field.zeros((size_a, unknowns))
            for k in range(t):
                start = (k * t + l) * size_a
                rows[:, start:start + size_a] = pieces[k]
            blocks.append(rows)
            rhs.append(field.zeros(size_a))
    matrix = np.concatenate(blocks, axis=0)
    vector = np.concatenate(rhs)
    solution = matrixmath.solve(field, matrix, vector)
    logger.debug("cisão %s sobre %s: t=%d, %d relações, %s", module.provenance, algebra.descriptor, t,
                 len(relations), solution is not None)
    return solution is not None


# Critério do traço de Higman

def projective_trace_test(context: KernelContext, module: WeightedModule, borel: bool = False,
                          budget: int = DEFAULT_TRACE_BUDGET) -> bool:
    """M projetivo ⇔ id_M ∈ Λ·End_k(M), com End_k(M) ≅ M ⊗ M* e Λ a integral à esquerda."""
    field = module.field
    cost = module.dim ** 3
    if cost > budget:
        raise BudgetExceededError("trace", cost, budget)
    working = qmodules.restrict(module, MINUS) if borel else module
    endomorphisms = qmodules.tensor(working, qmodules.dual(working))
    image = hopf_integral(context, borel).action(endomorphisms)
    identity = field.zeros(endomorphisms.dim)
    for a in range(module.dim):
        identity[a * module.dim + a] = field.one
    return matrixmath.solve(field, image, identity) is not None


def full_oracle(context: KernelContext, module: WeightedModule, split_budget: int = DEFAULT_SPLIT_BUDGET,
                trace_budget: int = DEFAULT_TRACE_BUDGET) -> tuple[bool, str]:
    """Projetividade sobre u_ζ(g) (U_ζ(G_r) para r ≥ 1): cisão se couber no orçamento, senão traço de Higman."""
    if not (module.has("E") and module.has("F")):
        raise ValueError(f"{module.provenance} não tem ação de u_ζ(g)")
    try:
        return projective_split_test(context.algebra(AlgebraDescriptor(AlgebraKind.G)), module, split_budget), "split"
    except BudgetExceededError as error:
        logger.warning("%s; usando o critério do traço", error)
    return projective_trace_test(context, module, False, trace_budget), "trace"


def borel_oracle(context: KernelContext, module: WeightedModule, split_budget: int = DEFAULT_SPLIT_BUDGET,
                 trace_budget: int = DEFAULT_TRACE_BUDGET) -> dict:
    """Projetividade sobre u_ζ(u⁻) (cisão) e sobre u_ζ(b⁻) (cisão se couber, senão traço)."""
    unipotent = projective_split_test(context.algebra(AlgebraDescriptor(AlgebraKind.U_MINUS)), module, split_budget)
    result = {"unipotent": unipotent}
    try:
        result["borel"] = projective_split_test(context.algebra(AlgebraDescriptor(AlgebraKind.B_MINUS)),
                                                module, split_budget)
        return result
    except BudgetExceededError as error:
        logger.warning("%s; usando o critério do traço", error)
    result["borel"] = projective_trace_test(context, module, True, trace_budget)
    return result


# Verificações

def _all_roots_free(context: KernelContext, module: WeightedModule, sides) -> dict:
    result = {}
    for side in sides:
        for root in context.order.gammas:
            report = free_over_root(context, module, root, side)
            result[f"{side}:{format_root(root)}"] = report.verdict
    return result


def _graded(module: WeightedModule) -> bool:
    return module.weights is not None and module.flags.torus_compatible


def verify_root_criterion(context: KernelContext, module: WeightedModule, split_budget: int = DEFAULT_SPLIT_BUDGET,
                          trace_budget: int = DEFAULT_TRACE_BUDGET) -> AgreementRecord:
    """
    Injetivo sobre o núcleo ⇔ livre sobre toda subálgebra de raiz (α ∈ Φ). Sem graduação
    só a direção incondicional (injetivo ⇒ livre) é exigida.
    """
    per_root = _all_roots_free(context, module, (MINUS, PLUS))
    all_free = all(per_root.values())
    oracle, via = full_oracle(context, module, split_budget, trace_budget)
    graded = _graded(module)
    if graded:
        agree = oracle == all_free
    else:
        agree = all_free or not oracle
        logger.info("%s sem graduação: oráculo %s, raízes %s", module.provenance, oracle, all_free)
    if not agree:
        logger.error("discordância no critério de raízes para %s", module.provenance)
    details = {"all_roots_free": all_free, "via": via, "mode": "equivalence" if graded else "unconditional"}
    if not agree:
        details["module"] = qmodules.export_module(module)
    return AgreementRecord("root_criterion", module.provenance, per_root, oracle, agree, details)


def verify_borel_criterion(context: KernelContext, module: WeightedModule, side: str = MINUS,
                           split_budget: int = DEFAULT_SPLIT_BUDGET,
                           trace_budget: int = DEFAULT_TRACE_BUDGET) -> AgreementRecord:
    """Injetivo sobre u_ζ(b) ⇔ livre sobre as subálgebras de raiz de Φ⁺; o lado plus passa por ω."""
    working = module if side == MINUS else qmodules.omega_twist(module)
    per_root = _all_roots_free(context, working, (MINUS,))
    all_free = all(per_root.values())
    verdicts = borel_oracle(context, working, split_budget, trace_budget)
    agree = verdicts["unipotent"] == verdicts["borel"] == all_free
    if not agree:
        logger.error("discordância no critério de Borel (%s) para %s", side, module.provenance)
    details = {"side": side, "all_roots_free": all_free, "unipotent": verdicts["unipotent"]}
    if not agree:
        details["module"] = qmodules.export_module(module)
    return AgreementRecord("borel_criterion", module.provenance, per_root, verdicts["borel"], agree, details)


def verify_reduction_borel(context: KernelContext, module: WeightedModule, split_budget: int = DEFAULT_SPLIT_BUDGET,
                           trace_budget: int = DEFAULT_TRACE_BUDGET) -> AgreementRecord:
    """M injetivo sobre o núcleo ⇔ M|b⁻ e M|b⁺ injetivos."""
    unipotent = context.algebra(AlgebraDescriptor(AlgebraKind.U_MINUS))
    minus = projective_split_test(unipotent, module, split_budget)
    plus = projective_split_test(unipotent, qmodules.omega_twist(module), split_budget)
    oracle, via = full_oracle(context, module, split_budget, trace_budget)
    agree = (minus and plus) == oracle
    details = {"minus": minus, "plus": plus, "via": via}
    if not agree:
        logger.error("discordância na redução às Borel para %s", module.provenance)
        details["module"] = qmodules.export_module(module)
    return AgreementRecord("reduction_borel", module.provenance, {}, oracle, agree, details)


def support_skeleton(context: KernelContext, module: WeightedModule, side: str = MINUS) -> SkeletonReport:
    """Raízes γ ∈ Φ⁺ sobre cuja subálgebra (f_γ ou e_γ) M não é livre."""
    per_root = {root: free_over_root(context, module, root, side) for root in context.order.gammas}
    skeleton = [root for root in context.datum.positive_roots if not per_root[root].verdict]
    return SkeletonReport(side, skeleton, per_root)


def skeleton_closure(context: KernelContext, module: WeightedModule, side: str = MINUS) -> list:
    """Violações de α ∈ esqueleto, α + β ∈ Φ⁺ ⇒ α + β ∈ esqueleto (vazia se fechado)."""
    skeleton = set(support_skeleton(context, module, side).roots_in_skeleton)
    positive = set(context.datum.positive_roots)
    violations = []
    for alpha in sorted(skeleton):
        for beta in sorted(positive):
            total = tuple(a + b for a, b in zip(alpha, beta))
            if total in positive and total not in skeleton:
                violations.append((alpha, beta))
    return violations


def highest_root_test(context: KernelContext, module: WeightedModule, split_budget: int = DEFAULT_SPLIT_BUDGET,
                      trace_budget: int = DEFAULT_TRACE_BUDGET) -> AgreementRecord:
    """Para U_ζ-módulos: injetivo ⇔ livre sobre u_ζ(f_{α_h}); esqueleto não vazio contém α_h."""
    if not module.flags.full_u:
        raise ValueError(f"{module.provenance} não se estende a U_ζ")
    highest = context.datum.highest_long_root
    skeleton = support_skeleton(context, module, MINUS)
    highest_free = skeleton.per_root[highest].verdict
    oracle, via = full_oracle(context, module, split_budget, trace_budget)
    contains = not skeleton.roots_in_skeleton or highest in skeleton.roots_in_skeleton
    agree = (oracle == highest_free) and contains
    per_root = {format_root(root): report.verdict for root, report in skeleton.per_root.items()}
    details = {"highest_root": format_root(highest), "highest_free": highest_free, "via": via,
               "skeleton": [format_root(root) for root in skeleton.roots_in_skeleton]}
    if not agree:
        logger.error("discordância no teste da raiz mais alta para %s", module.provenance)
        details["module"] = qmodules.export_module(module)
    return AgreementRecord("highest_root", module.provenance, per_root, oracle, agree, details)


def verify_local_oracles(context: KernelContext, module: WeightedModule,
                         split_budget: int = DEFAULT_SPLIT_BUDGET) -> AgreementRecord:
    """Nakayama contra o teste de cisão em cada subálgebra de raiz e em cada A_m dos lados presentes."""
    sides = [side for side, letter in ((MINUS, "F"), (PLUS, "E")) if module.has(letter)]
    descriptors = []
    for side in sides:
        descriptors += [AlgebraDescriptor(AlgebraKind.ROOT, root=tuple(root), side=side)
                        for root in context.order.gammas]
        descriptors += [AlgebraDescriptor(AlgebraKind.A_M, m=m, side=side) for m in range(1, context.order.n + 1)]
    per_root, split, mismatches = {}, {}, []
    for descriptor in descriptors:
        algebra = context.algebra(descriptor)
        label = str(descriptor)
        per_root[label] = free_over_local(algebra, module).verdict
        split[label] = projective_split_test(algebra, module, split_budget)
        if per_root[label] != split[label]:
            mismatches.append(label)
    if mismatches:
        logger.error("Nakayama e cisão discordam em %s para %s", ", ".join(mismatches), module.provenance)
    return AgreementRecord("local_oracles", module.provenance, per_root, None, not mismatches,
                           {"split": split, "mismatches": mismatches})


def verify_tensor_injectivity(context: KernelContext, lam, mu, split_budget: int = DEFAULT_SPLIT_BUDGET,
                              trace_budget: int = DEFAULT_TRACE_BUDGET) -> AgreementRecord:
    """Ẑ(λ) ⊗ Ẑ'(μ) é injetivo sobre o núcleo inteiro."""
    module = qmodules.tensor(qmodules.verma(context, lam), qmodules.coverma(context, mu))
    unipotent = context.algebra(AlgebraDescriptor(AlgebraKind.U_MINUS))
    try:
        oracle, via = full_oracle(context, module, split_budget, trace_budget)
    except BudgetExceededError as error:
        logger.warning("%s; usando as duas Borel", error)
        minus = free_over_local(unipotent, module).verdict
        plus = free_over_local(unipotent, qmodules.omega_twist(module)).verdict
        oracle, via = minus and plus, "borel"
    return AgreementRecord("tensor_injectivity", module.provenance, {}, oracle, bool(oracle), {"via": via})


def verify_filtration_character(context: KernelContext, module: WeightedModule,
                                split_budget: int = DEFAULT_SPLIT_BUDGET) -> AgreementRecord:
    """Injetivo sobre u_ζ(b⁺) ⇒ o caráter é soma de caracteres de Ẑ(λ)."""
    upper = context.algebra(AlgebraDescriptor(AlgebraKind.U_PLUS))
    injective = projective_split_test(upper, module, split_budget)
    character = qmodules.verma_character_test(context, module)
    agree = character or not injective
    details = {"character_test": character}
    if not agree:
        logger.error("caráter incompatível com filtração para %s", module.provenance)
        details["module"] = qmodules.export_module(module)
    return AgreementRecord("filtration_character", module.provenance, {}, injective, agree, details)
