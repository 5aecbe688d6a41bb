"""
Especialização em q ↦ ζ e construção das álgebras de dimensão finita:
u_ζ(u±), u_ζ(b±), u_ζ(g), A_m, subálgebras de raiz e núcleos superiores (A1).
"""
from dataclasses import dataclass
from enum import Enum
from itertools import product as cartesian
import logging
import threading

import numpy as np

from algebra.genericuq import E_SIDE, F_SIDE, StructureTable, build_structure_table, specialize_generic
from algebra.rootdata import ConvexOrder, format_root
from algebra.scalars import LaurentScalar, q_binomial, q_factorial, q_integer
import matrixmath

logger = logging.getLogger(__name__)

MINUS = "minus"
PLUS = "plus"
SIDE_OF = {MINUS: F_SIDE, PLUS: E_SIDE}
LETTER_OF = {MINUS: "F", PLUS: "E"}


class UnsupportedKernelError(ValueError):
    """Combinação de tipo, r e corpo para a qual a álgebra não é construída."""


class InternalInconsistencyError(AssertionError):
    """Falha de uma autoverificação interna (ciclo de reescrita, associatividade, certificação)."""


class AlgebraKind(Enum):
    U_MINUS = "u-"
    """u_ζ(u⁻): monômios PBW nos F_γ."""
    U_PLUS = "u+"
    """u_ζ(u⁺): monômios PBW nos E_γ."""
    B_MINUS = "b-"
    """u_ζ(b⁻) = u_ζ⁰·u_ζ(u⁻)."""
    B_PLUS = "b+"
    """u_ζ(b⁺) = u_ζ⁰·u_ζ(u⁺)."""
    G = "g"
    """u_ζ(g) com decomposição triangular F·K·E."""
    A_M = "Am"
    """A_m: monômios suportados em γ_1..γ_m."""
    ROOT = "root"
    """Subálgebra de raiz gerada por um vetor de raiz."""


@dataclass(frozen=True)
class AlgebraDescriptor:
    kind: AlgebraKind
    m: int | None = None
    root: tuple | None = None
    side: str = MINUS

    @property
    def is_local(self) -> bool:
        return self.kind in (AlgebraKind.U_MINUS, AlgebraKind.U_PLUS, AlgebraKind.A_M, AlgebraKind.ROOT)

    @property
    def effective_side(self) -> str:
        if self.kind in (AlgebraKind.U_PLUS, AlgebraKind.B_PLUS):
            return PLUS
        if self.kind in (AlgebraKind.U_MINUS, AlgebraKind.B_MINUS):
            return MINUS
        return self.side

    def __str__(self):
        if self.kind == AlgebraKind.A_M:
            return f"Am:{self.m}" + ("" if self.side == MINUS else ":plus")
        if self.kind == AlgebraKind.ROOT:
            return f"root:{','.join(str(c) for c in self.root)}:{self.side}"
        return self.kind.value

    @staticmethod
    def parse(text: str) -> "AlgebraDescriptor":
        parts = text.strip().split(":")
        head = parts[0]
        try:
            if head == "Am":
                side = parts[2] if len(parts) > 2 else MINUS
                return AlgebraDescriptor(AlgebraKind.A_M, m=int(parts[1]), side=_check_side(side))
            if head == "root":
                root = tuple(int(c) for c in parts[1].split(","))
                side = parts[2] if len(parts) > 2 else MINUS
                return AlgebraDescriptor(AlgebraKind.ROOT, root=root, side=_check_side(side))
            return AlgebraDescriptor(AlgebraKind(head))
        except (IndexError, ValueError) as error:
            raise ValueError(f"Descritor de álgebra inválido: {text!r}") from error


def _check_side(side: str) -> str:
    if side not in (MINUS, PLUS):
        raise ValueError(f"Lado inválido: {side}")
    return side


# Tabela especializada

@dataclass
class SpecializedTable:
    """Regras de troca X_{γj}X_{γi} (j > i) em monômios divididos, com escalares no corpo."""
    swaps: dict
    leading: dict
    root_words: dict
    omega_units: dict


def specialize_table(table: StructureTable, field) -> SpecializedTable:
    """
    Reescreve X_{γi}X_{γj} = L·X_{γj}X_{γi} + Σ t_m X^m como
    X_{γj}X_{γi} = L⁻¹X_{γi}X_{γj} − L⁻¹ Σ t_m ∏[a_s]! X^{(m)} e especializa.
    """
    order = table.order
    n = order.n
    swaps, leading = {}, {}
    for side, entries in ((E_SIDE, table.e_entries), (F_SIDE, table.f_entries)):
        for (i, j), entry in entries.items():
            value = entry.leading.evaluate(field)
            inverse = field.inv(value)
            rule = {tuple(1 if s in (i, j) else 0 for s in range(1, n + 1)): inverse}
            for exponents, t in entry.tail.items():
                factorials = LaurentScalar.one()
                for s, a in enumerate(exponents, start=1):
                    if a:
                        factorials = factorials * q_factorial(a, order.d(s))
                c = field.mul(field.neg(inverse), (t * factorials).evaluate(field))
                if not field.is_zero(c):
                    rule[exponents] = c
            swaps[(side, i, j)] = rule
            leading[(side, i, j)] = value
    root_words = {
        key: {word: specialize_generic(c, field) for word, c in words.items()}
        for key, words in table.root_words.items()
    }
    units = {s: field.mul(field.from_int(sign), field.zeta_power(a)) for s, (sign, a) in table.omega_units.items()}
    return SpecializedTable(swaps, leading, root_words, units)


# Elementos esparsos

def accumulate(field, target: dict, source: dict, c=None):
    for key, v in source.items():
        value = v if c is None else field.mul(c, v)
        target[key] = field.add(target[key], value) if key in target else value


def prune(field, element: dict) -> dict:
    return {key: v for key, v in element.items() if not field.is_zero(v)}


def scale(field, element: dict, c) -> dict:
    return prune(field, {key: field.mul(c, v) for key, v in element.items()})


class PBWStraightener:
    """Reescrita de produtos de potências divididas X_{γs}^{(a)} para a forma normal PBW."""

    def __init__(self, context: "KernelContext", side: str):
        self.context = context
        self.side = side
        self.field = context.field
        self.n = context.order.n
        self._normal = {}
        self._pairs = {}
        self._active = set()

    def factors(self, exponents: tuple) -> tuple:
        return tuple((s, a) for s, a in enumerate(exponents, start=1) if a)

    def exponents(self, factors: tuple) -> tuple:
        result = [0] * self.n
        for s, a in factors:
            result[s - 1] = a
        return tuple(result)

    def normal(self, factors: tuple) -> dict:
        factors = tuple(f for f in factors if f[1])
        if factors in self._normal:
            return self._normal[factors]
        if factors in self._active or len(self._active) > 400:
            raise InternalInconsistencyError(f"Reescrita PBW não termina em {factors}")
        self._active.add(factors)
        try:
            result = self._rewrite(factors)
        finally:
            self._active.discard(factors)
        self._normal[factors] = result
        return result

    def _rewrite(self, factors: tuple) -> dict:
        field = self.field
        for k in range(len(factors) - 1):
            (j, b), (i, a) = factors[k], factors[k + 1]
            if j < i:
                continue
            prefix, suffix = factors[:k], factors[k + 2:]
            if j == i:
                c = self.context.q_binomial(a + b, a, self.context.order.d(i))
                if field.is_zero(c):
                    return {}
                if a + b >= self.context.bound:
                    raise InternalInconsistencyError(f"Expoente {a + b} fora do núcleo com coeficiente não nulo")
                return scale(field, self.normal(prefix + ((i, a + b),) + suffix), c)
            result = {}
            for exponents, c in self.pair(j, b, i, a).items():
                accumulate(field, result, self.normal(prefix + self.factors(exponents) + suffix), c)
            return prune(field, result)
        return {self.exponents(factors): field.one}

    def pair(self, j: int, b: int, i: int, a: int) -> dict:
        """Forma normal de X_{γj}^{(b)}X_{γi}^{(a)} com j > i."""
        key = (j, b, i, a)
        if key in self._pairs:
            return self._pairs[key]
        field = self.field
        result = {}
        if a == 1 and b == 1:
            result = dict(self.context.specialized.swaps[(self.side, i, j)])
        elif b > 1:
            for exponents, c in self.pair(j, b - 1, i, a).items():
                accumulate(field, result, self.normal(((j, 1),) + self.factors(exponents)), c)
            result = scale(field, result, field.inv(self.context.q_integer(b, self.context.order.d(j))))
        else:
            for exponents, c in self.pair(j, 1, i, a - 1).items():
                accumulate(field, result, self.normal(self.factors(exponents) + ((i, 1),)), c)
            result = scale(field, result, field.inv(self.context.q_integer(a, self.context.order.d(i))))
        self._pairs[key] = prune(field, result)
        return self._pairs[key]

    def multiply(self, left: tuple, right: tuple) -> dict:
        return self.normal(self.factors(left) + self.factors(right))

    def weight(self, exponents: tuple) -> tuple:
        """Soma Σ a_s γ_s (positiva) em coordenadas de raízes simples."""
        gammas = self.context.order.gammas
        return tuple(sum(a * gamma[k] for a, gamma in zip(exponents, gammas))
                     for k in range(self.context.datum.rank))


class KernelContext:
    """Dados compartilhados: sistema, ordem, corpo, r, tabela genérica e especializada, caches."""

    def __init__(self, order: ConvexOrder, field, r: int = 0, table: StructureTable | None = None):
        datum = order.datum
        if r < 0:
            raise UnsupportedKernelError(f"r={r} negativo")
        if r >= 1 and field.characteristic == 0:
            raise UnsupportedKernelError("Núcleos superiores exigem característica p > 0")
        if r >= 1 and datum.rank != 1:
            raise UnsupportedKernelError("Núcleos superiores só são construídos para A1")
        self.order = order
        self.datum = datum
        self.field = field
        self.r = r
        self.ell = field.ell
        self.p = field.characteristic
        self.bound = self.ell * (self.p ** r if r else 1)
        self.table = table if table is not None else build_structure_table(order)
        self.specialized = specialize_table(self.table, field)
        self.straighteners = {MINUS: PBWStraightener(self, F_SIDE), PLUS: PBWStraightener(self, E_SIDE)}
        self._algebras = {}
        self._lock = threading.Lock()
        self._scalars = {}
        self._decompositions = {}
        self._commutators = {}
        logger.info("contexto %s ℓ=%d r=%d corpo %s", datum.type_label, self.ell, r, field.label)

    # escalares especializados

    def q_integer(self, n: int, d: int = 1):
        key = ("int", n, d)
        if key not in self._scalars:
            self._scalars[key] = q_integer(n, d).evaluate(self.field)
        return self._scalars[key]

    def q_binomial(self, a: int, b: int, d: int = 1):
        key = ("binom", a, b, d)
        if key not in self._scalars:
            self._scalars[key] = q_binomial(a, b, d).evaluate(self.field)
        return self._scalars[key]

    def zeta(self, k: int):
        return self.field.zeta_power(k)

    def divided_steps(self) -> list:
        """Expoentes das potências divididas geradoras: 1 e p^iℓ para i < r."""
        return [1] + [self.ell * self.p ** i for i in range(self.r)]

    def digits(self, n: int) -> list:
        """n = n0 + ℓ(n1 + p n2 + ...): devolve [n0, n1, ...] com r+1 dígitos."""
        digits = [n % self.ell]
        rest = n // self.ell
        for _ in range(self.r):
            digits.append(rest % self.p)
            rest //= self.p
        if rest:
            raise ValueError(f"Expoente {n} fora do núcleo (limite {self.bound})")
        return digits

    def simple_position(self, i: int) -> int:
        return self.order.simple_positions()[i]

    def weight_of_root_coords(self, root: tuple) -> tuple:
        return self.datum.to_weight(root)

    # álgebras

    def algebra(self, descriptor: AlgebraDescriptor) -> "KernelAlgebra":
        if isinstance(descriptor, str):
            descriptor = AlgebraDescriptor.parse(descriptor)
        with self._lock:
            if descriptor not in self._algebras:
                self._algebras[descriptor] = KernelAlgebra(self, descriptor)
            return self._algebras[descriptor]

    # decomposição X = Σ_j X_j·y_j, usada nos comutadores [E_i, f]

    def decomposition(self, side: str, exponents: tuple, right: bool = False) -> dict:
        """
        Para um monômio do lado dado: {j: elemento y_j} com monômio = Σ_j X_{α_j}·y_j
        (ou Σ_j y_j·X_{α_j} se right).
        """
        key = (side, exponents, right)
        if key in self._decompositions:
            return self._decompositions[key]
        algebra = self.algebra(AlgebraDescriptor(AlgebraKind.U_MINUS if side == MINUS else AlgebraKind.U_PLUS))
        straightener = self.straighteners[side]
        field = self.field
        weight = straightener.weight(exponents)
        targets = [k for k in algebra.basis if straightener.weight(k) == weight]
        sources = []
        for i in range(1, self.datum.rank + 1):
            lower = tuple(c - (1 if k == i - 1 else 0) for k, c in enumerate(weight))
            if any(c < 0 for c in lower):
                continue
            sources.extend((i, k) for k in algebra.basis if straightener.weight(k) == lower)
        index = {k: t for t, k in enumerate(targets)}
        matrix = field.zeros((len(targets), len(sources)))
        for column, (i, k) in enumerate(sources):
            letter = ((self.simple_position(i), 1),)
            factors = straightener.factors(k) + letter if right else letter + straightener.factors(k)
            for result, c in straightener.normal(factors).items():
                matrix[index[result], column] = c
        solution = matrixmath.solve(field, matrix, field.identity(len(targets)))
        if solution is None:
            raise InternalInconsistencyError(f"Geradores simples não geram o peso {weight}")
        for t, target in enumerate(targets):
            pieces = {}
            for column, (i, k) in enumerate(sources):
                c = solution[column, t]
                if not field.is_zero(c):
                    pieces.setdefault(i, {})[k] = c
            self._decompositions[(side, target, right)] = pieces
        return self._decompositions[key]

    def commutator(self, i: int, exponents: tuple) -> tuple[dict, dict]:
        """
        [E_i, f] = X⁺(f)K_i + X⁻(f)K_i⁻¹ para f monômio de u⁻, com
        X±(F_j y) = F_j X±(y) ± δ_ij ζ^{∓(α_i,|y|)}/(ζ_i − ζ_i⁻¹)·y.
        """
        key = (i, exponents)
        if key in self._commutators:
            return self._commutators[key]
        field = self.field
        straightener = self.straighteners[MINUS]
        plus, minus = {}, {}
        if any(exponents):
            d = self.datum.d_alpha[i - 1]
            alpha = self.datum.simple_root(i)
            denominator = field.inv(field.sub(self.zeta(d), self.zeta(-d)))
            for j, y in self.decomposition(MINUS, exponents).items():
                position = ((self.simple_position(j), 1),)
                for k, c in y.items():
                    inner_plus, inner_minus = self.commutator(i, k)
                    for target, source in ((plus, inner_plus), (minus, inner_minus)):
                        for term, v in source.items():
                            accumulate(field, target, straightener.normal(position + straightener.factors(term)),
                                       field.mul(c, v))
                    if j == i:
                        x = self.datum.inner(alpha, straightener.weight(k))
                        accumulate(field, plus, {k: field.mul(c, field.mul(self.zeta(-x), denominator))})
                        accumulate(field, minus, {k: field.neg(field.mul(c, field.mul(self.zeta(x), denominator)))})
        self._commutators[key] = (prune(field, plus), prune(field, minus))
        return self._commutators[key]


loaded_contexts = {}
_contexts_lock = threading.Lock()


def get_context(order: ConvexOrder, field, r: int = 0, table: StructureTable | None = None) -> KernelContext:
    """Contexto compartilhado por (tipo, palavra, corpo, r)."""
    key = (order.datum.type_label, order.w0_word, field.label, field.ell, r)
    with _contexts_lock:
        if key not in loaded_contexts:
            loaded_contexts[key] = KernelContext(order, field, r, table)
        return loaded_contexts[key]


class KernelAlgebra:
    """
    Álgebra de dimensão finita com base PBW enumerada.

    Chaves da base: expoentes (álgebras locais), (toro, expoentes) em b±,
    e (f, toro, e) em u_ζ(g). Para r = 0 o toro tem expoentes de K_i módulo ℓ; para r ≥ 1
    (posto 1) é gerado pelos idempotentes de peso e_μ, μ módulo p^rℓ, e a chave guarda μ.
    """

    def __init__(self, context: KernelContext, descriptor: AlgebraDescriptor):
        self.context = context
        self.descriptor = descriptor
        self.field = context.field
        kind = descriptor.kind
        self.idempotent_torus = not descriptor.is_local and context.r >= 1
        n, bound = context.order.n, context.bound
        self.side = descriptor.effective_side
        self.positions = self._positions()
        self.local = list(cartesian(*[range(bound) if s in self.positions else range(1) for s in range(1, n + 1)]))
        self.torus_modulus = bound if self.idempotent_torus else context.ell
        self.torus = list(cartesian(*[range(self.torus_modulus)] * context.datum.rank))
        if descriptor.is_local:
            self.basis = list(self.local)
        elif kind in (AlgebraKind.B_MINUS, AlgebraKind.B_PLUS):
            self.basis = [(k, f) for k in self.torus for f in self.local]
        else:
            self.basis = [(f, k, e) for f in self.local for k in self.torus for e in self.local]
        self.index = {key: t for t, key in enumerate(self.basis)}
        self._left = {}
        self._right = {}
        self._actions = {}
        self._words = {}
        logger.debug("álgebra %s de dimensão %d", descriptor, len(self.basis))

    def _positions(self) -> set:
        d = self.descriptor
        n = self.context.order.n
        if d.kind == AlgebraKind.A_M:
            if not 0 <= d.m <= n:
                raise ValueError(f"m={d.m} fora de 0..{n}")
            return set(range(1, d.m + 1))
        if d.kind == AlgebraKind.ROOT:
            if tuple(d.root) not in self.context.order.gammas:
                raise ValueError(f"{format_root(d.root)} não é raiz positiva")
            return {self.context.order.index_of(d.root)}
        return set(range(1, n + 1))

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def is_local(self) -> bool:
        return self.descriptor.is_local

    @property
    def straightener(self) -> PBWStraightener:
        return self.context.straighteners[self.side]

    def unit_key(self):
        zero = (0,) * self.context.order.n
        if self.is_local:
            return zero
        if self.idempotent_torus:
            raise ValueError(f"Em {self.descriptor} a unidade é a soma dos idempotentes e_μ")
        return self._key(zero, (0,) * self.context.datum.rank, zero)

    def unit(self) -> dict:
        if self.is_local:
            return {self.unit_key(): self.field.one}
        zero = (0,) * self.context.order.n
        return self._pure(zero, zero)

    def _key(self, lower: tuple, torus: tuple, upper: tuple):
        """Chave de F^{(lower)}·T·E^{(upper)} (o lado ausente em b± é ignorado)."""
        kind = self.descriptor.kind
        if kind == AlgebraKind.B_MINUS:
            return (torus, lower)
        if kind == AlgebraKind.B_PLUS:
            return (torus, upper)
        return (lower, torus, upper)

    def _parts(self, key) -> tuple:
        zero = (0,) * self.context.order.n
        kind = self.descriptor.kind
        if kind == AlgebraKind.B_MINUS:
            return key[1], key[0], zero
        if kind == AlgebraKind.B_PLUS:
            return zero, key[0], key[1]
        return key

    def _pure(self, lower: tuple, upper: tuple) -> dict:
        """F^{(lower)}E^{(upper)} sem parte de toro (1 = Σ_μ e_μ quando o toro é de idempotentes)."""
        if self.idempotent_torus:
            return {self._key(lower, mu, upper): self.field.one for mu in self.torus}
        return {self._key(lower, (0,) * self.context.datum.rank, upper): self.field.one}

    def _label(self, weight) -> tuple:
        return tuple(c % self.torus_modulus for c in weight)

    def _shift(self, side: str, exponents: tuple) -> tuple:
        """Peso (pesos fundamentais) da soma de raízes de um monômio."""
        return self.context.datum.to_weight(self.context.straighteners[side].weight(exponents))

    def weight(self, key) -> tuple:
        """Peso (coordenadas de raízes simples) de um vetor da base."""
        straightener = self.straightener
        kind = self.descriptor.kind
        if kind == AlgebraKind.G:
            f, _, e = key
            lower = self.context.straighteners[MINUS].weight(f)
            upper = self.context.straighteners[PLUS].weight(e)
            return tuple(u - v for u, v in zip(upper, lower))
        exponents = key if self.is_local else key[1]
        total = straightener.weight(exponents)
        return total if self.side == PLUS else tuple(-c for c in total)

    # geradores

    def generators(self) -> list:
        """Símbolos (letra, índice, n): vetores de raiz ('F'|'E', s, n) ou toro ('K', i, 1)."""
        steps = self.context.divided_steps()
        if self.is_local:
            letter = LETTER_OF[self.side]
            return [(letter, s, n) for s in sorted(self.positions) for n in steps]
        rank = self.context.datum.rank
        simple = [self.context.simple_position(i) for i in range(1, rank + 1)]
        result = [("K", i, 1) for i in range(1, rank + 1)]
        if self.descriptor.kind in (AlgebraKind.B_MINUS, AlgebraKind.G):
            result += [("F", s, n) for s in simple for n in steps]
        if self.descriptor.kind in (AlgebraKind.B_PLUS, AlgebraKind.G):
            result += [("E", s, n) for s in simple for n in steps]
        return result

    def generator_element(self, symbol) -> dict:
        letter, index, n = symbol
        zero_n = (0,) * self.context.order.n
        rank = self.context.datum.rank
        if letter == "K":
            if self.idempotent_torus:
                d = self.context.datum.d_alpha[index - 1]
                return {self._key(zero_n, mu, zero_n): self.context.zeta(d * mu[index - 1]) for mu in self.torus}
            torus = tuple(1 if k == index - 1 else 0 for k in range(rank))
            return {self._key(zero_n, torus, zero_n): self.field.one}
        exponents = tuple(n if s == index else 0 for s in range(1, self.context.order.n + 1))
        if self.is_local:
            return {exponents: self.field.one}
        if letter == "F":
            return self._pure(exponents, zero_n)
        return self._pure(zero_n, exponents)

    def augmentation(self, symbol):
        return self.field.one if symbol[0] == "K" else self.field.zero

    # produtos

    def _torus_pairing(self, torus: tuple, weight: tuple) -> int:
        return self.context.datum.inner(torus, weight)

    def multiply_keys(self, left, right) -> dict:
        field = self.field
        kind = self.descriptor.kind
        if self.is_local:
            result = self.straightener.multiply(left, right)
        elif self.idempotent_torus:
            result = self._multiply_idempotent(left, right)
        elif kind in (AlgebraKind.B_MINUS, AlgebraKind.B_PLUS):
            (k1, x1), (k2, x2) = left, right
            pairing = self._torus_pairing(k2, self.straightener.weight(x1))
            c = self.context.zeta(pairing if kind == AlgebraKind.B_MINUS else -pairing)
            torus = tuple((a + b) % self.context.ell for a, b in zip(k1, k2))
            result = {(torus, x): field.mul(c, v) for x, v in self.straightener.multiply(x1, x2).items()}
        else:
            result = self._multiply_triangular(left, right)
        result = prune(field, result)
        for key in result:
            if key not in self.index:
                raise InternalInconsistencyError(f"Produto saiu da álgebra {self.descriptor}: {key}")
        return result

    def _multiply_triangular(self, left, right) -> dict:
        field = self.field
        f1, k1, e1 = left
        current = {right: field.one}
        # E-parte: e1 = Σ_j E_j y_j, aplicada recursivamente
        current = self._apply_e_monomial(e1, current)
        # toro: K_k f = ζ^{−(k,|f|)} f K_k
        lower = self.context.straighteners[MINUS]
        shifted = {}
        for (f, k, e), v in current.items():
            c = self.context.zeta(-self._torus_pairing(k1, lower.weight(f)))
            torus = tuple((a + b) % self.context.ell for a, b in zip(k1, k))
            accumulate(field, shifted, {(f, torus, e): field.mul(c, v)})
        result = {}
        for (f, k, e), v in shifted.items():
            for g, c in lower.multiply(f1, f).items():
                accumulate(field, result, {(g, k, e): field.mul(c, v)})
        return result

    def _multiply_idempotent(self, left, right) -> dict:
        """e_μF^{(a)} = F^{(a)}e_{μ+|a|}, E^{(c)}e_ν = e_{ν+|c|}E^{(c)} e e_μe_ν = δ_{μν}e_μ."""
        field = self.field
        kind = self.descriptor.kind
        lower = self.context.straighteners[MINUS]
        upper = self.context.straighteners[PLUS]
        if kind == AlgebraKind.B_MINUS:
            (mu1, f1), (mu2, f2) = left, right
            if mu1 != self._label(a - b for a, b in zip(mu2, self._shift(MINUS, f1))):
                return {}
            return {(mu1, g): c for g, c in lower.multiply(f1, f2).items()}
        if kind == AlgebraKind.B_PLUS:
            (mu1, e1), (mu2, e2) = left, right
            if mu1 != self._label(a + b for a, b in zip(mu2, self._shift(PLUS, e1))):
                return {}
            return {(mu1, g): c for g, c in upper.multiply(e1, e2).items()}
        f1, mu1, e1 = left
        current = self._raise_divided(e1, {right: field.one})
        result = {}
        for (f, mu, e), v in current.items():
            if self._label(a + b for a, b in zip(mu1, self._shift(MINUS, f))) != mu:
                continue
            for g, c in lower.multiply(f1, f).items():
                accumulate(field, result, {(g, mu, e): field.mul(c, v)})
        return result

    def _raise_divided(self, exponents: tuple, element: dict) -> dict:
        """
        E^{(m)}·F^{(a)}e_μE^{(c)} = Σ_t [μ' + 2t − m − a; t]·F^{(a−t)}e_{μ'}E^{(m−t)}E^{(c)},
        μ' = μ + 2(m − t), com [ν; t] o binômio quantizado avaliado em ζ.
        """
        (m,) = exponents
        if not m:
            return element
        field = self.field
        context = self.context
        upper = context.straighteners[PLUS]
        (shift,) = context.datum.to_weight(context.datum.simple_root(1))
        result = {}
        for ((a,), (mu,), e), v in element.items():
            for t in range(min(m, a) + 1):
                target = mu + shift * (m - t)
                c = context.q_binomial(target + shift * t - m - a, t)
                if field.is_zero(c):
                    continue
                for g, w in upper.multiply((m - t,), e).items():
                    accumulate(field, result, {((a - t,), self._label((target,)), g): field.mul(field.mul(c, w), v)})
        return prune(field, result)

    def _apply_e_monomial(self, exponents: tuple, element: dict) -> dict:
        if not any(exponents):
            return element
        field = self.field
        result = {}
        for j, y in self.context.decomposition(PLUS, exponents).items():
            for k, c in y.items():
                inner = self._apply_e_monomial(k, element)
                accumulate(field, result, self._apply_simple_e(j, inner), c)
        return prune(field, result)

    def _apply_simple_e(self, i: int, element: dict) -> dict:
        """E_i·(f K_k e) = ζ^{−(k,α_i)} f K_k E_i e + X⁺(f)K_{k+α_i}e + X⁻(f)K_{k−α_i}e."""
        field = self.field
        context = self.context
        upper = context.straighteners[PLUS]
        alpha = context.datum.simple_root(i)
        position = ((context.simple_position(i), 1),)
        ell = context.ell
        result = {}
        for (f, k, e), v in element.items():
            c = field.mul(v, context.zeta(-self._torus_pairing(k, alpha)))
            for g, w in upper.normal(position + upper.factors(e)).items():
                accumulate(field, result, {(f, k, g): field.mul(c, w)})
            plus, minus = context.commutator(i, f)
            up = tuple((a + b) % ell for a, b in zip(k, alpha))
            down = tuple((a - b) % ell for a, b in zip(k, alpha))
            for g, w in plus.items():
                accumulate(field, result, {(g, up, e): field.mul(v, w)})
            for g, w in minus.items():
                accumulate(field, result, {(g, down, e): field.mul(v, w)})
        return prune(field, result)

    def multiply(self, x: dict, y: dict) -> dict:
        field = self.field
        result = {}
        for a, u in x.items():
            for b, v in y.items():
                accumulate(field, result, self.multiply_keys(a, b), field.mul(u, v))
        return prune(field, result)

    def left_action(self, symbol, key) -> dict:
        cache_key = (symbol, key)
        if cache_key not in self._actions:
            generator = self.generator_element(symbol)
            self._actions[cache_key] = self.multiply(generator, {key: self.field.one})
        return self._actions[cache_key]

    def left_matrix(self, symbol) -> np.ndarray:
        if symbol not in self._left:
            self._left[symbol] = self._matrix_of(lambda key: self.left_action(symbol, key))
        return self._left[symbol]

    def right_matrix(self, symbol) -> np.ndarray:
        if symbol not in self._right:
            generator = self.generator_element(symbol)
            self._right[symbol] = self._matrix_of(lambda key: self.multiply({key: self.field.one}, generator))
        return self._right[symbol]

    def element_left_matrix(self, element: dict) -> np.ndarray:
        """Matriz da multiplicação à esquerda por um elemento qualquer."""
        return self._matrix_of(lambda key: self.multiply(element, {key: self.field.one}))

    def _matrix_of(self, image) -> np.ndarray:
        matrix = self.field.zeros((self.dimension, self.dimension))
        for column, key in enumerate(self.basis):
            for target, c in image(key).items():
                matrix[self.index[target], column] = c
        return matrix

    def vector(self, element: dict) -> np.ndarray:
        result = self.field.zeros(self.dimension)
        for key, c in element.items():
            result[self.index[key]] = c
        return result

    def element(self, vector) -> dict:
        return prune(self.field, {key: vector[t] for t, key in enumerate(self.basis)})

    # ação em módulos

    def module_generator_action(self, module, symbol) -> np.ndarray:
        letter, index, n = symbol
        if letter == "K":
            return module.action("K", index, 1)
        side = PLUS if letter == "E" else MINUS
        return module.root_action(self.context, side, index, n)

    def module_basis_action(self, module, key) -> np.ndarray:
        """ρ_M de um vetor da base: produto ordenado das ações das potências divididas."""
        field = self.field
        kind = self.descriptor.kind

        def monomial(side, exponents):
            result = field.identity(module.dim)
            for s, a in enumerate(exponents, start=1):
                if a:
                    result = field.matmul(result, module.root_action(self.context, side, s, a))
            return result

        def torus(k):
            if self.idempotent_torus:
                if module.weights is None:
                    raise ValueError(f"{module.provenance}: sem pesos não há ação de e_μ")
                result = field.zeros((module.dim, module.dim))
                for t, weight in enumerate(module.weights):
                    if self._label(weight) == tuple(k):
                        result[t, t] = field.one
                return result
            result = field.identity(module.dim)
            for i, power in enumerate(k, start=1):
                if power:
                    result = field.matmul(result, matrixmath.matrix_power(field, module.action("K", i, 1), power))
            return result

        if self.is_local:
            return monomial(self.side, key)
        if kind in (AlgebraKind.B_MINUS, AlgebraKind.B_PLUS):
            k, x = key
            return field.matmul(torus(k), monomial(self.side, x))
        f, k, e = key
        return field.matmul(field.matmul(monomial(MINUS, f), torus(k)), monomial(PLUS, e))

    # projetivos A·e_λ

    def projective_basis(self) -> list:
        """
        Pares (f, e) indexando a base {F^{(f)}E^{(e)}e_λ} de A·e_λ; numa álgebra local
        e_λ = 1 e a base é a dos monômios de A.
        """
        zero = (0,) * self.context.order.n
        kind = self.descriptor.kind
        if self.is_local:
            return [(x, zero) if self.side == MINUS else (zero, x) for x in self.local]
        lower = self.local if kind in (AlgebraKind.G, AlgebraKind.B_MINUS) else [zero]
        upper = self.local if kind in (AlgebraKind.G, AlgebraKind.B_PLUS) else [zero]
        return [(f, e) for f in lower for e in upper]

    def projective_weights(self, weight: tuple) -> list:
        """Pesos λ + |e| − |f| da base de A·e_λ."""
        return [tuple(a + b - c for a, b, c in zip(weight, self._shift(PLUS, e), self._shift(MINUS, f)))
                for f, e in self.projective_basis()]

    def _weight_below(self, lower: tuple, upper: tuple, weight: tuple) -> tuple:
        """Peso em que o toro age em F^{(f)}·T·E^{(e)}e_λ."""
        nu = tuple(a + b for a, b in zip(weight, self._shift(PLUS, upper)))
        if self.descriptor.kind == AlgebraKind.B_MINUS:
            nu = tuple(a - b for a, b in zip(nu, self._shift(MINUS, lower)))
        return nu

    def weight_vector_key(self, lower: tuple, upper: tuple, weight: tuple):
        """Chave x da base com x·e_λ = F^{(f)}E^{(e)}e_λ."""
        if self.is_local:
            return lower if self.side == MINUS else upper
        if self.idempotent_torus:
            return self._key(lower, self._label(self._weight_below(lower, upper, weight)), upper)
        return self._key(lower, (0,) * self.context.datum.rank, upper)

    def on_weight_vector(self, element: dict, weight: tuple) -> dict:
        """Coordenadas de x·e_λ na base {F^{(f)}E^{(e)}e_λ}."""
        field = self.field
        if self.is_local:
            zero = (0,) * self.context.order.n
            return {((key, zero) if self.side == MINUS else (zero, key)): c for key, c in element.items()}
        d = self.context.datum.d_alpha
        result = {}
        for key, c in element.items():
            lower, k, upper = self._parts(key)
            nu = self._weight_below(lower, upper, weight)
            if self.idempotent_torus:
                if self._label(nu) != k:
                    continue
                factor = field.one
            else:
                factor = self.context.zeta(sum(a * d[i] * b for i, (a, b) in enumerate(zip(k, nu))))
            accumulate(field, result, {(lower, upper): field.mul(c, factor)})
        return prune(field, result)

    def projective_action(self, symbol, weight: tuple) -> np.ndarray:
        """Matriz de um gerador em A·e_λ, na base de projective_basis."""
        basis = self.projective_basis()
        index = {pair: t for t, pair in enumerate(basis)}
        matrix = self.field.zeros((len(basis), len(basis)))
        for column, (f, e) in enumerate(basis):
            image = self.left_action(symbol, self.weight_vector_key(f, e, weight))
            for pair, c in self.on_weight_vector(image, weight).items():
                matrix[index[pair], column] = c
        return matrix


def build_algebra(kind, r: int, field, order: ConvexOrder, table: StructureTable | None = None) -> KernelAlgebra:
    descriptor = kind if isinstance(kind, AlgebraDescriptor) else AlgebraDescriptor.parse(str(kind))
    return get_context(order, field, r, table).algebra(descriptor)


# Integrais e verificações

def integral(algebra: KernelAlgebra) -> dict:
    """∫_m = ∏ X_{γs}^{(p^rℓ−1)} sobre as posições da álgebra local."""
    if not algebra.is_local:
        raise ValueError(f"Integral de monômio só para álgebras locais, não {algebra.descriptor}")
    top = algebra.context.bound - 1
    key = tuple(top if s in algebra.positions else 0 for s in range(1, algebra.context.order.n + 1))
    return {key: algebra.field.one}


@dataclass
class SocleReport:
    left_dimension: int
    right_dimension: int
    spanned_by_integral: bool


def _invariants(algebra: KernelAlgebra, matrices) -> np.ndarray:
    field = algebra.field
    blocks = [field.normalize(m - field.scale(field.identity(algebra.dimension), algebra.augmentation(symbol)))
              for symbol, m in matrices]
    return matrixmath.nullspace(field, np.concatenate(blocks, axis=0))


def socle_check(algebra: KernelAlgebra) -> SocleReport:
    """Invariantes à esquerda {x : g·x = ε(g)x} e à direita, comparados com a integral."""
    field = algebra.field
    symbols = algebra.generators()
    left = _invariants(algebra, [(s, algebra.left_matrix(s)) for s in symbols])
    right = _invariants(algebra, [(s, algebra.right_matrix(s)) for s in symbols])
    spanned = False
    if algebra.is_local and left.shape[0] == 1:
        spanned = matrixmath.in_row_span(field, left, algebra.vector(integral(algebra)))
        spanned = spanned and matrixmath.in_row_span(field, right, algebra.vector(integral(algebra)))
    logger.info("socle de %s: esquerda %d, direita %d", algebra.descriptor, left.shape[0], right.shape[0])
    return SocleReport(left.shape[0], right.shape[0], spanned)


def normality_check(context: KernelContext, m: int, side: str = MINUS) -> bool:
    """span(A_{m+1}·A_m⁺) == span(A_m⁺·A_{m+1}): A_m é normal em A_{m+1}."""
    small = context.algebra(AlgebraDescriptor(AlgebraKind.A_M, m=m, side=side))
    large = context.algebra(AlgebraDescriptor(AlgebraKind.A_M, m=m + 1, side=side))
    field = context.field
    augmentation = [key for key in small.basis if any(key)]
    left_rows, right_rows = [], []
    for a in large.basis:
        for b in augmentation:
            left_rows.append(large.vector(large.multiply_keys(a, b)))
            right_rows.append(large.vector(large.multiply_keys(b, a)))
    if not augmentation:
        return True
    left = np.array(left_rows, dtype=field.dtype)
    right = np.array(right_rows, dtype=field.dtype)
    rank_left = matrixmath.rank(field, left)
    rank_right = matrixmath.rank(field, right)
    joint = matrixmath.rank(field, np.concatenate([left, right], axis=0))
    return rank_left == rank_right == joint


def associativity_check(algebra: KernelAlgebra, rng, samples: int = 20) -> int:
    """(xy)z = x(yz) em triplas aleatórias da base; aborta na primeira falha."""
    field = algebra.field
    size = algebra.dimension
    for _ in range(samples):
        a, b, c = (algebra.basis[int(t)] for t in rng.integers(size, size=3))
        x, y, z = ({key: field.one} for key in (a, b, c))
        left = algebra.vector(algebra.multiply(algebra.multiply(x, y), z))
        right = algebra.vector(algebra.multiply(x, algebra.multiply(y, z)))
        if not field.equal(left, right):
            raise InternalInconsistencyError(f"Produto não associativo em {algebra.descriptor}: {a}, {b}, {c}")
    return samples


def omega_algebra(algebra: KernelAlgebra) -> KernelAlgebra:
    """ω(u⁻) = u⁺, ω(b⁻) = b⁺, lados trocados em A_m e subálgebras de raiz; ω(u_ζ(g)) = u_ζ(g)."""
    d = algebra.descriptor
    swapped = {AlgebraKind.U_MINUS: AlgebraKind.U_PLUS, AlgebraKind.U_PLUS: AlgebraKind.U_MINUS,
               AlgebraKind.B_MINUS: AlgebraKind.B_PLUS, AlgebraKind.B_PLUS: AlgebraKind.B_MINUS}
    if d.kind in swapped:
        mirrored = AlgebraDescriptor(swapped[d.kind])
    elif d.kind == AlgebraKind.G:
        mirrored = d
    else:
        mirrored = AlgebraDescriptor(d.kind, d.m, d.root, PLUS if d.side == MINUS else MINUS)
    return algebra.context.algebra(mirrored)


def _omega_monomial(context: KernelContext, exponents: tuple, from_side: str):
    """ω(X^{(a)}) = c·Y^{(a)}: ω(E_γ) = c_γF_γ e ω(F_γ) = c_γ⁻¹E_γ."""
    field = context.field
    c = field.one
    for s, a in enumerate(exponents, start=1):
        if a:
            unit = context.specialized.omega_units[s]
            factor = field.power(unit, a) if from_side == PLUS else field.power(field.inv(unit), a)
            c = field.mul(c, factor)
    return c


def omega_map(algebra: KernelAlgebra, x: dict) -> dict:
    """Transporta ω: A → ω(A) nas bases PBW."""
    context = algebra.context
    target = omega_algebra(algebra)
    field = algebra.field
    kind = algebra.descriptor.kind
    modulus = algebra.torus_modulus
    zero = (0,) * context.order.n
    result = {}
    for key, v in x.items():
        if algebra.is_local:
            accumulate(field, result, {key: field.mul(v, _omega_monomial(context, key, algebra.side))})
        elif kind in (AlgebraKind.B_MINUS, AlgebraKind.B_PLUS):
            k, e = key
            torus = tuple((-a) % modulus for a in k)
            accumulate(field, result, {(torus, e): field.mul(v, _omega_monomial(context, e, algebra.side))})
        else:
            f, k, e = key
            torus = tuple((-a) % modulus for a in k)
            c = field.mul(_omega_monomial(context, f, MINUS), _omega_monomial(context, e, PLUS))
            middle = {(zero, torus, zero): field.one}
            image = target.multiply(target.multiply(target._pure(zero, f), middle), target._pure(e, zero))
            accumulate(field, result, image, field.mul(v, c))
    return prune(field, result)


def regular_module(algebra: KernelAlgebra):
    """A como módulo à esquerda sobre si mesmo, com os pesos PBW."""
    from reps.qmodules import WeightedModule, LiftFlags

    context = algebra.context
    datum = context.datum
    if algebra.idempotent_torus:
        raise UnsupportedKernelError(f"Módulo regular de {algebra.descriptor} não tem pesos inteiros para r ≥ 1")
    weights = [datum.to_weight(algebra.weight(key)) for key in algebra.basis]
    module = WeightedModule(context.field, context.ell, datum, weights, {},
                            flags=LiftFlags(torus_compatible=True), provenance=f"regular({algebra.descriptor})",
                            r=context.r)
    simple_of = {s: i for i, s in context.order.simple_positions().items()}
    for symbol in algebra.generators():
        letter, index, n = symbol
        matrix = algebra.left_matrix(symbol)
        if letter == "K":
            module.actions[("K", index, 1)] = matrix
            continue
        module.root_actions[(PLUS if letter == "E" else MINUS, index, n)] = matrix
        if not algebra.is_local and index in simple_of:
            module.actions[(letter, simple_of[index], n)] = matrix
    module.fill_torus()
    return module


class HopfIntegral:
    """
    Integral à esquerda Λ = F_top·e·E_top de u_ζ(g) (U_ζ(G_r) em A1), ou Λ_b = F_top·e
    da Borel negativa; e projeta nos pesos ν com ⟨ν, α_i^∨⟩ ≡ −2 (mod p^rℓ).
    """

    def __init__(self, context: KernelContext, borel: bool = False):
        self.context = context
        self.borel = borel

    def selects(self, weight: tuple) -> bool:
        bound = self.context.bound
        return all((c + 2) % bound == 0 for c in weight)

    def projection(self, module) -> np.ndarray:
        context = self.context
        field = context.field
        if module.weights is not None:
            projection = field.zeros((module.dim, module.dim))
            for t, weight in enumerate(module.weights):
                if self.selects(weight):
                    projection[t, t] = field.one
            return projection
        if context.r:
            raise ValueError("Módulo sem pesos: a projeção de toro só é definida para r = 0")
        # e = ∏_i (1/ℓ) Σ_t (c_i⁻¹K_i)^t, c_i = ζ^{−2d_i}
        projection = field.identity(module.dim)
        weight = field.inv(field.from_int(context.ell))
        for i in range(1, context.datum.rank + 1):
            step = field.scale(module.action("K", i, 1), context.zeta(2 * context.datum.d_alpha[i - 1]))
            total = field.zeros((module.dim, module.dim))
            power = field.identity(module.dim)
            for _ in range(context.ell):
                total = field.normalize(total + power)
                power = field.matmul(power, step)
            projection = field.matmul(projection, field.scale(total, weight))
        return projection

    def action(self, module) -> np.ndarray:
        context = self.context
        field = context.field
        top = context.bound - 1
        projection = self.projection(module)
        result = field.identity(module.dim)
        for s in range(1, context.order.n + 1):
            result = field.matmul(result, module.root_action(context, MINUS, s, top))
        result = field.matmul(result, projection)
        if not self.borel:
            for s in range(1, context.order.n + 1):
                result = field.matmul(result, module.root_action(context, PLUS, s, top))
        return result


def hopf_integral(context: KernelContext, borel: bool = False) -> HopfIntegral:
    return HopfIntegral(context, borel)
