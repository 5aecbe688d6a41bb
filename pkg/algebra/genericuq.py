"""
Maquinário genérico de U_q(g) sobre Q(q): palavras nos geradores módulo as
relações de Serre, automorfismos de trança T_i, vetores de raiz, expansão PBW
triangular, coproduto do lado E e extração das constantes de estrutura.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
import logging

import sympy
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from algebra.rootdata import RootDatum, ConvexOrder
from algebra.scalars import (LaurentScalar, LocalizedScalar, VanishingDenominatorError,
                             q_binomial, q_factorial, q_integer, s_degrees_for)

logger = logging.getLogger(__name__)

Q_DOMAIN = QQ.frac_field(sympy.Symbol("q"))
RATIONAL_FUNCTIONS = Q_DOMAIN.field
Q = RATIONAL_FUNCTIONS.gens[0]
ZERO = RATIONAL_FUNCTIONS.zero
ONE = RATIONAL_FUNCTIONS.one

E_SIDE = "E"
F_SIDE = "F"
MIXED = "mixed"


class HeightBoundError(ValueError):
    """Peso acima do limite de altura configurado."""


class StructureTableError(RuntimeError):
    """Violação de um invariante da tabela de estrutura; carrega o par ofensor."""

    def __init__(self, message: str, pair=None):
        super().__init__(message if pair is None else f"{message} (par {pair})")
        self.pair = pair


# Conversões entre Q(q), polinômios de Laurent e 𝒜

@lru_cache(maxsize=None)
def q_power(k: int):
    return Q ** k


def generic_from_laurent(x: LaurentScalar):
    result = ZERO
    for e, c in x.terms().items():
        result = result + q_power(e) * QQ(c.numerator, c.denominator)
    return result


@lru_cache(maxsize=None)
def generic_q_integer(n: int, d: int = 1):
    return generic_from_laurent(q_integer(n, d))


@lru_cache(maxsize=None)
def generic_q_factorial(n: int, d: int = 1):
    return generic_from_laurent(q_factorial(n, d))


def _poly_to_laurent(poly) -> LaurentScalar:
    return LaurentScalar.from_terms({
        monomial[0]: Fraction(int(c.numerator), int(c.denominator)) for monomial, c in poly.terms()
    })


def laurent_pair(x) -> tuple[LaurentScalar, LaurentScalar]:
    """Numerador e denominador de um elemento de Q(q) como polinômios de Laurent."""
    return _poly_to_laurent(x.numer), _poly_to_laurent(x.denom)


def to_localized(x, s_degrees: tuple) -> LocalizedScalar:
    numerator, denominator = laurent_pair(x)
    return LocalizedScalar.from_fraction(numerator, denominator, s_degrees)


def from_localized(x: LocalizedScalar):
    return generic_from_laurent(x.numerator) * ONE / generic_from_laurent(x.denominator())


def serialize_generic(x) -> str:
    numerator, denominator = laurent_pair(x)
    return f"{numerator.serialize()}|{denominator.serialize()}"


def parse_generic(text: str):
    numerator, _, denominator = text.partition("|")
    return generic_from_laurent(LaurentScalar.parse(numerator)) / generic_from_laurent(LaurentScalar.parse(denominator))


def specialize_generic(x, field):
    """Especializa um elemento de Q(q) em q ↦ ζ; falha se o denominador se anula."""
    numerator, denominator = laurent_pair(x)
    value = denominator.evaluate(field)
    if field.is_zero(value):
        raise VanishingDenominatorError(f"Denominador {denominator} se anula em ζ (ℓ={field.ell})")
    return field.div(numerator.evaluate(field), value)


def _unit_exponent(x) -> tuple[int, int] | None:
    """Se x = ±q^a devolve (sinal, a)."""
    numerator, denominator = laurent_pair(x)
    if not numerator.is_monomial() or not denominator.is_monomial():
        return None
    c = numerator.coefficients[0] / denominator.coefficients[0]
    if abs(c) != 1:
        return None
    return (1 if c > 0 else -1), numerator.lowest - denominator.lowest


def _rows_of(matrix: DomainMatrix) -> list:
    rows, columns = matrix.shape
    return [[matrix[i, j].element for j in range(columns)] for i in range(rows)]


class FreeWordElement:
    """
    Combinação linear com coeficientes em Q(q).

    Lado E/F: chaves são palavras (tuplas de índices simples a partir de 1).
    Lado misto: chaves (palavra F, vetor do toro, palavra E) para F·K_μ·E.
    """
    __slots__ = ("side", "terms")

    def __init__(self, side: str, terms: dict | None = None):
        self.side = side
        self.terms = {key: c for key, c in (terms or {}).items() if c}

    @classmethod
    def generator(cls, side: str, i: int) -> "FreeWordElement":
        return cls(side, {(i,): ONE})

    @classmethod
    def torus(cls, mu: tuple) -> "FreeWordElement":
        return cls(MIXED, {((), tuple(mu), ()): ONE})

    def is_zero(self) -> bool:
        return not self.terms

    def as_mixed(self, rank: int) -> "FreeWordElement":
        if self.side == MIXED:
            return self
        zero = (0,) * rank
        if self.side == E_SIDE:
            return FreeWordElement(MIXED, {((), zero, w): c for w, c in self.terms.items()})
        return FreeWordElement(MIXED, {(w, zero, ()): c for w, c in self.terms.items()})

    def single_side(self, rank: int) -> "FreeWordElement":
        """Converte um elemento misto que está em U⁺ ou U⁻ para o lado correspondente."""
        if self.side != MIXED:
            return self
        zero = (0,) * rank
        if all(f == () and k == zero for f, k, _ in self.terms):
            return FreeWordElement(E_SIDE, {e: c for (_, _, e), c in self.terms.items()})
        if all(e == () and k == zero for _, k, e in self.terms):
            return FreeWordElement(F_SIDE, {f: c for (f, _, _), c in self.terms.items()})
        raise StructureTableError("Elemento misto não pertence a U⁺ nem a U⁻")

    def __add__(self, other: "FreeWordElement") -> "FreeWordElement":
        if self.side != other.side:
            raise ValueError("Soma de elementos de lados diferentes")
        terms = dict(self.terms)
        for key, c in other.terms.items():
            terms[key] = terms.get(key, ZERO) + c
        return FreeWordElement(self.side, terms)

    def __neg__(self):
        return FreeWordElement(self.side, {key: -c for key, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FreeWordElement":
        return FreeWordElement(self.side, {key: c * v for key, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, FreeWordElement):
            return NotImplemented
        return self.side == other.side and self.terms == other.terms

    def __hash__(self):
        return hash((self.side, frozenset(self.terms)))

    def __repr__(self):
        return f"FreeWordElement({self.side}, {len(self.terms)} termos)"


def serre_relations(datum: RootDatum) -> list[FreeWordElement]:
    """Relatores quânticos de Serre nos E's: Σ_s (−1)^s [1−a, s]_{q_i} E_i^{1−a−s} E_j E_i^s."""
    relators = []
    for i in range(1, datum.rank + 1):
        for j in range(1, datum.rank + 1):
            if i == j:
                continue
            a = datum.cartan[j - 1][i - 1]
            n = 1 - a
            d = datum.d_alpha[i - 1]
            terms = {}
            for s in range(n + 1):
                coefficient = generic_from_laurent(q_binomial(n, s, d))
                terms[(i,) * (n - s) + (j,) + (i,) * s] = coefficient if s % 2 == 0 else -coefficient
            relators.append(FreeWordElement(E_SIDE, terms))
    return relators


def _sub_vectors(bound: tuple):
    if not bound:
        yield ()
        return
    for head in range(bound[0] + 1):
        for tail in _sub_vectors(bound[1:]):
            yield (head,) + tail


class WordSpace:
    """Componente de peso ν: palavras de peso ν módulo o ideal bilateral dos relatores."""

    def __init__(self, group: "QuantumGroup", nu: tuple):
        self.nu = nu
        self.words = group.words_of_weight(nu)
        index = {w: k for k, w in enumerate(self.words)}
        rows = group._relator_rows(nu, index)
        self.reductions = {}
        if rows:
            reduced, pivots = DomainMatrix(rows, (len(rows), len(self.words)), Q_DOMAIN).rref()
            pivot_set = set(pivots)
            matrix = _rows_of(reduced)
            for k, c in enumerate(pivots):
                self.reductions[self.words[c]] = {
                    self.words[col]: -matrix[k][col]
                    for col in range(len(self.words)) if col not in pivot_set and matrix[k][col]
                }
        self.standard = [w for w in self.words if w not in self.reductions]
        self.standard_index = {w: k for k, w in enumerate(self.standard)}

    @property
    def dimension(self) -> int:
        return len(self.standard)

    def reduce_word(self, word: tuple) -> dict:
        if word in self.reductions:
            return self.reductions[word]
        return {word: ONE}

    def vector(self, terms: dict) -> list:
        """Coordenadas nas palavras padrão de uma combinação já canônica."""
        result = [ZERO] * len(self.standard)
        for w, c in terms.items():
            result[self.standard_index[w]] = c
        return result


class QuantumGroup:
    """U_q(g) genérico para um sistema de raízes: palavras, produtos, T_i, τ, ω e coproduto."""

    def __init__(self, datum: RootDatum, height_bound: int | None = None):
        self.datum = datum
        self.rank = datum.rank
        self.height_bound = height_bound or max(sum(root) for root in datum.positive_roots) + 2
        # limite interno para cálculos intermediários (guarda de não terminação)
        self.guard = 3 * self.height_bound + 4
        self.relators = serre_relations(datum)
        self._relator_weights = [self.word_weight(next(iter(r.terms))) for r in self.relators]
        self._spaces = {}
        self._words = {}
        self._ef_cache = {}
        self._braid_cache = {}
        self.zero_torus = (0,) * self.rank

    # palavras e pesos

    def word_weight(self, word: tuple) -> tuple:
        counts = [0] * self.rank
        for letter in word:
            counts[letter - 1] += 1
        return tuple(counts)

    def words_of_weight(self, nu: tuple) -> list:
        nu = tuple(nu)
        if nu not in self._words:
            if not any(nu):
                self._words[nu] = [()]
            else:
                words = []
                for i, count in enumerate(nu):
                    if count:
                        rest = tuple(c - 1 if k == i else c for k, c in enumerate(nu))
                        words.extend((i + 1,) + w for w in self.words_of_weight(rest))
                self._words[nu] = sorted(words)
        return self._words[nu]

    def _relator_rows(self, nu: tuple, index: dict) -> list:
        rows = []
        for relator, weight in zip(self.relators, self._relator_weights):
            rest = tuple(a - b for a, b in zip(nu, weight))
            if any(c < 0 for c in rest):
                continue
            for left in _sub_vectors(rest):
                right = tuple(a - b for a, b in zip(rest, left))
                for u in self.words_of_weight(left):
                    for v in self.words_of_weight(right):
                        row = [ZERO] * len(index)
                        for w, c in relator.terms.items():
                            row[index[u + w + v]] = c
                        rows.append(row)
        return rows

    def space(self, nu: tuple, external: bool = False) -> WordSpace:
        nu = tuple(nu)
        height = sum(nu)
        if external and height > self.height_bound:
            raise HeightBoundError(f"Peso {nu} com altura {height} acima do limite {self.height_bound}")
        if height > self.guard:
            raise HeightBoundError(f"Cálculo intermediário atingiu altura {height} (guarda {self.guard})")
        if nu not in self._spaces:
            self._spaces[nu] = WordSpace(self, nu)
            logger.debug("componente %s: %d palavras, dimensão %d",
                         nu, len(self._spaces[nu].words), self._spaces[nu].dimension)
        return self._spaces[nu]

    def weight_basis(self, nu: tuple) -> list:
        """Palavras padrão formando uma base da componente de peso ν de U_q⁺."""
        return list(self.space(nu, external=True).standard)

    def reduce_word(self, word: tuple) -> dict:
        return self.space(self.word_weight(word)).reduce_word(word)

    @lru_cache(maxsize=None)
    def kostant_count(self, nu: tuple) -> int:
        """Número de maneiras de escrever ν como ℕ-combinação de raízes positivas."""
        roots = self.datum.positive_roots

        @lru_cache(maxsize=None)
        def count(rest, k):
            if not any(rest):
                return 1
            if k == len(roots):
                return 0
            total = 0
            current = rest
            while all(c >= 0 for c in current):
                total += count(current, k + 1)
                current = tuple(a - b for a, b in zip(current, roots[k]))
            return total

        return count(tuple(nu), 0)

    # forma canônica

    def canonical(self, x: FreeWordElement) -> FreeWordElement:
        terms = {}
        if x.side == MIXED:
            for (f, k, e), c in x.terms.items():
                for fs, a in self.reduce_word(f).items():
                    for es, b in self.reduce_word(e).items():
                        key = (fs, k, es)
                        terms[key] = terms.get(key, ZERO) + c * a * b
        else:
            for w, c in x.terms.items():
                for s, a in self.reduce_word(w).items():
                    terms[s] = terms.get(s, ZERO) + c * a
        return FreeWordElement(x.side, terms)

    # produtos

    def inner(self, mu: tuple, nu: tuple) -> int:
        return self.datum.inner(mu, nu)

    def _e_letter_times_f(self, i: int, fword: tuple) -> dict:
        """E_i·F_w = F_w·E_i + Σ prefixo·sufixo·[q^{−x}K_i − q^{x}K_i⁻¹]/(q_i − q_i⁻¹)."""
        alpha = self.datum.simple_root(i)
        minus = tuple(-c for c in alpha)
        d = self.datum.d_alpha[i - 1]
        denominator = q_power(d) - q_power(-d)
        result = {(fword, self.zero_torus, (i,)): ONE}
        for s, letter in enumerate(fword):
            if letter != i:
                continue
            prefix, suffix = fword[:s], fword[s + 1:]
            x = self.inner(alpha, self.word_weight(suffix))
            word = prefix + suffix
            for key, c in (((word, alpha, ()), q_power(-x) / denominator),
                           ((word, minus, ()), -q_power(x) / denominator)):
                result[key] = result.get(key, ZERO) + c
        return result

    def _ef(self, eword: tuple, fword: tuple) -> dict:
        """Forma triangular de E_e·F_f como dicionário (f, μ, e) → coeficiente."""
        if not eword or not fword:
            return {(fword, self.zero_torus, eword): ONE}
        key = (eword, fword)
        if key in self._ef_cache:
            return self._ef_cache[key]
        rest, i = eword[:-1], eword[-1]
        result = {}
        for (f1, k1, e1), c1 in self._e_letter_times_f(i, fword).items():
            for (f2, k2, e2), c2 in self._ef(rest, f1).items():
                coefficient = c1 * c2 * q_power(-self.inner(k1, self.word_weight(e2)))
                torus = tuple(a + b for a, b in zip(k2, k1))
                target = (f2, torus, e2 + e1)
                result[target] = result.get(target, ZERO) + coefficient
        result = {k: c for k, c in result.items() if c}
        self._ef_cache[key] = result
        return result

    def multiply(self, x: FreeWordElement, y: FreeWordElement) -> FreeWordElement:
        """Produto (não canonicalizado) de dois elementos."""
        if x.side == y.side and x.side in (E_SIDE, F_SIDE):
            terms = {}
            for u, a in x.terms.items():
                for v, b in y.terms.items():
                    terms[u + v] = terms.get(u + v, ZERO) + a * b
            return FreeWordElement(x.side, terms)
        x, y = x.as_mixed(self.rank), y.as_mixed(self.rank)
        terms = {}
        for (f1, k1, e1), a in x.terms.items():
            for (f2, k2, e2), b in y.terms.items():
                for (f, k, e), c in self._ef(e1, f2).items():
                    exponent = -(self.inner(k1, self.word_weight(f)) + self.inner(k2, self.word_weight(e)))
                    key = (f1 + f, tuple(p + r + s for p, r, s in zip(k1, k, k2)), e + e2)
                    terms[key] = terms.get(key, ZERO) + a * b * c * q_power(exponent)
        return FreeWordElement(MIXED, terms)

    def product(self, *factors: FreeWordElement) -> FreeWordElement:
        result = factors[0]
        for factor in factors[1:]:
            result = self.canonical(self.multiply(result, factor))
        return self.canonical(result)

    def normal_order(self, x: FreeWordElement) -> FreeWordElement:
        """Forma triangular F·K·E canônica de uma expressão mista qualquer."""
        if x.side != MIXED:
            return self.canonical(x)
        result = FreeWordElement(MIXED)
        for (f, k, e), c in x.terms.items():
            factors = [FreeWordElement(F_SIDE, {f: ONE}) if f else None,
                       FreeWordElement.torus(k),
                       FreeWordElement(E_SIDE, {e: ONE}) if e else None]
            term = self.product(*[factor for factor in factors if factor is not None])
            result = result + term.as_mixed(self.rank).scale(c)
        return self.canonical(result)

    def word_product(self, letters) -> FreeWordElement:
        """Produto de símbolos ('E', i), ('F', i) ou ('K', μ) em ordem qualquer, normalizado."""
        factors = []
        for kind, value in letters:
            if kind == "K":
                factors.append(FreeWordElement.torus(value))
            else:
                factors.append(FreeWordElement.generator(kind, value))
        result = FreeWordElement.torus(self.zero_torus)
        for factor in factors:
            result = self.canonical(self.multiply(result, factor))
        return result

    # automorfismos

    def divided_word(self, side: str, i: int, n: int) -> dict:
        """E_i^{(n)} como palavra com coeficiente 1/[n]_i!."""
        return {(i,) * n: ONE / generic_q_factorial(n, self.datum.d_alpha[i - 1])}

    def _braid_letter(self, i: int, side: str, j: int, inverse: bool) -> FreeWordElement:
        key = (i, side, j, inverse)
        if key in self._braid_cache:
            return self._braid_cache[key]
        d = self.datum.d_alpha[i - 1]
        alpha = self.datum.simple_root(i)
        minus = tuple(-c for c in alpha)
        if i == j:
            if side == E_SIDE:
                # T(E) = −F K ; T⁻¹(E) = −K⁻¹F = −q^{2d} F K⁻¹
                terms = {((i,), minus, ()): -q_power(2 * d)} if inverse else {((i,), alpha, ()): -ONE}
            else:
                # T(F) = −K⁻¹E ; T⁻¹(F) = −E K = −q^{−2d} K E
                terms = {((), alpha, (i,)): -q_power(-2 * d)} if inverse else {((), minus, (i,)): -ONE}
            image = FreeWordElement(MIXED, terms)
        else:
            r = -self.datum.cartan[j - 1][i - 1]
            terms = {}
            for s in range(r + 1):
                sign = -ONE if s % 2 else ONE
                coefficient = sign / (generic_q_factorial(r - s, d) * generic_q_factorial(s, d))
                if side == E_SIDE:
                    coefficient = coefficient * q_power(-d * s)
                    word = (i,) * s + (j,) + (i,) * (r - s) if inverse else (i,) * (r - s) + (j,) + (i,) * s
                    terms[((), self.zero_torus, word)] = terms.get(((), self.zero_torus, word), ZERO) + coefficient
                else:
                    coefficient = coefficient * q_power(d * s)
                    word = (i,) * (r - s) + (j,) + (i,) * s if inverse else (i,) * s + (j,) + (i,) * (r - s)
                    terms[(word, self.zero_torus, ())] = terms.get((word, self.zero_torus, ()), ZERO) + coefficient
            image = self.canonical(FreeWordElement(MIXED, terms))
        self._braid_cache[key] = image
        return image

    def braid(self, i: int, x: FreeWordElement, inverse: bool = False) -> FreeWordElement:
        """T_i(x) (ou T_i⁻¹(x)), em forma canônica mista."""
        x = x.as_mixed(self.rank)
        result = FreeWordElement(MIXED)
        for (f, k, e), c in x.terms.items():
            reflected = self.datum.reflect(i, k)
            factors = [self._braid_letter(i, F_SIDE, letter, inverse) for letter in f]
            factors.append(FreeWordElement.torus(reflected))
            factors.extend(self._braid_letter(i, E_SIDE, letter, inverse) for letter in e)
            term = factors[0]
            for factor in factors[1:]:
                term = self.canonical(self.multiply(term, factor))
            result = result + term.scale(c)
        return self.canonical(result)

    def braid_word(self, word, x: FreeWordElement, inverse: bool = False) -> FreeWordElement:
        """T_w = T_{w1}∘⋯∘T_{wk}: aplica a letra mais à direita primeiro."""
        for i in reversed(tuple(word)):
            x = self.braid(i, x, inverse)
        return x

    def tau(self, x: FreeWordElement) -> FreeWordElement:
        """Anti-automorfismo τ: fixa E e F, K_μ ↦ K_{−μ}."""
        if x.side != MIXED:
            return self.canonical(FreeWordElement(x.side, {w[::-1]: c for w, c in x.terms.items()}))
        result = FreeWordElement(MIXED)
        for (f, k, e), c in x.terms.items():
            term = self.multiply(FreeWordElement(E_SIDE, {e[::-1]: ONE}),
                                 FreeWordElement.torus(tuple(-v for v in k)))
            term = self.multiply(term, FreeWordElement(F_SIDE, {f[::-1]: ONE}))
            result = result + term.scale(c)
        return self.canonical(result)

    def omega(self, x: FreeWordElement) -> FreeWordElement:
        """Automorfismo ω: E_i ↔ F_i, K_μ ↦ K_{−μ}."""
        if x.side == E_SIDE:
            return FreeWordElement(F_SIDE, dict(x.terms))
        if x.side == F_SIDE:
            return FreeWordElement(E_SIDE, dict(x.terms))
        result = FreeWordElement(MIXED)
        for (f, k, e), c in x.terms.items():
            term = self.multiply(FreeWordElement(E_SIDE, {f: ONE}), FreeWordElement.torus(tuple(-v for v in k)))
            term = self.multiply(term, FreeWordElement(F_SIDE, {e: ONE}))
            result = result + term.scale(c)
        return self.canonical(result)

    def comultiply_word(self, word: tuple) -> dict:
        """
        Δ(E_{w1}⋯E_{wk}) = Σ_S q^{−Σ(α_{w_t'}, α_{w_t})} K_{μ_S}E_{w|Sᶜ} ⊗ E_{w|S},
        soma sobre t' < t com t' ∉ S e t ∈ S.
        """
        result = {}
        positions = range(len(word))
        for size in range(len(word) + 1):
            for chosen in combinations(positions, size):
                chosen_set = set(chosen)
                exponent = 0
                for t in chosen:
                    for t_prime in range(t):
                        if t_prime not in chosen_set:
                            exponent -= self.inner(self.datum.simple_root(word[t_prime]),
                                                   self.datum.simple_root(word[t]))
                torus = self.word_weight(tuple(word[t] for t in chosen))
                left = tuple(word[t] for t in positions if t not in chosen_set)
                right = tuple(word[t] for t in chosen)
                key = (torus, left, right)
                result[key] = result.get(key, ZERO) + q_power(exponent)
        return result


def kostant_partitions(datum: RootDatum, nu: tuple) -> int:
    return QuantumGroup(datum).kostant_count(tuple(nu))


@dataclass
class TableEntry:
    """Expansão E_{γi}E_{γj} = líder·E_{γj}E_{γi} + Σ cauda (monômios PBW simples)."""
    i: int
    j: int
    leading: LocalizedScalar
    tail: dict = field(default_factory=dict)


@dataclass
class StructureTable:
    """Constantes de estrutura de Levendorskii–Soibelman para uma ordem convexa."""
    order: ConvexOrder
    s_degrees: tuple
    e_entries: dict
    f_entries: dict
    omega_units: dict
    root_words: dict

    @property
    def datum(self) -> RootDatum:
        return self.order.datum

    def entry(self, side: str, i: int, j: int) -> TableEntry:
        if i >= j:
            raise ValueError(f"Par ({i},{j}) precisa de i < j")
        entries = self.e_entries if side == E_SIDE else self.f_entries
        return entries[(i, j)]

    def has_s_denominator(self) -> bool:
        return any(not c.is_laurent() for entry in self.e_entries.values() for c in entry.tail.values())


class PBWBasis:
    """Vetores de raiz E_{γi} = T_{w_i}(E_{β_i}), monômios PBW e expansões em cada componente de peso."""

    def __init__(self, group: QuantumGroup, order: ConvexOrder):
        self.group = group
        self.order = order
        self.datum = order.datum
        self.n = order.n
        self._roots = {}
        self._powers = {}
        self._matrices = {}
        self._word_expansions = {}

    def gamma_weight(self, s: int) -> tuple:
        return self.order.gammas[s - 1]

    def root_vector(self, i: int, side: str = E_SIDE) -> FreeWordElement:
        key = (i, side)
        if key not in self._roots:
            word = self.order.w0_word
            x = FreeWordElement.generator(side, word[i - 1]).as_mixed(self.group.rank)
            for k in range(i - 2, -1, -1):
                x = self.group.braid(word[k], x)
            self._roots[key] = x.single_side(self.group.rank)
            if self._roots[key].side != side:
                raise StructureTableError(f"Vetor de raiz {i} mudou de lado", (i, i))
            logger.debug("vetor de raiz %s_%d com %d palavras", side, i, len(self._roots[key].terms))
        return self._roots[key]

    def monomials(self, nu: tuple) -> list:
        """Expoentes a ∈ ℕ^N com Σ a_s γ_s = ν."""
        nu = tuple(nu)
        result = []

        def extend(s, rest, prefix):
            if s == self.n:
                if not any(rest):
                    result.append(tuple(prefix))
                return
            gamma = self.gammas[s]
            a = 0
            current = rest
            while all(c >= 0 for c in current):
                extend(s + 1, current, prefix + [a])
                a += 1
                current = tuple(x - y for x, y in zip(current, gamma))

        extend(0, nu, [])
        return sorted(result)

    @property
    def gammas(self) -> tuple:
        return self.order.gammas

    def monomial_weight(self, exponents: tuple) -> tuple:
        return tuple(sum(a * gamma[k] for a, gamma in zip(exponents, self.gammas)) for k in range(self.group.rank))

    def _power(self, s: int, a: int, side: str) -> FreeWordElement:
        key = (s, a, side)
        if key not in self._powers:
            if a == 0:
                self._powers[key] = FreeWordElement(side, {(): ONE})
            else:
                previous = self._power(s, a - 1, side)
                self._powers[key] = self.group.canonical(self.group.multiply(previous, self.root_vector(s, side)))
        return self._powers[key]

    def monomial(self, exponents: tuple, side: str = E_SIDE, divided: bool = False) -> FreeWordElement:
        result = FreeWordElement(side, {(): ONE})
        scale = ONE
        for s, a in enumerate(exponents, start=1):
            if a:
                result = self.group.canonical(self.group.multiply(result, self._power(s, a, side)))
                if divided:
                    scale = scale / generic_q_factorial(a, self.order.d(s))
        return result.scale(scale)

    def ordered_monomial(self, letters, side: str = E_SIDE) -> FreeWordElement:
        """Produto de potências de vetores de raiz em ordem arbitrária [(s, a), ...]."""
        result = FreeWordElement(side, {(): ONE})
        for s, a in letters:
            if a:
                result = self.group.canonical(self.group.multiply(result, self._power(s, a, side)))
        return result

    def _pbw_matrix(self, side: str, nu: tuple, divided: bool):
        key = (side, nu, divided)
        if key not in self._matrices:
            space = self.group.space(nu)
            monomials = self.monomials(nu)
            if len(monomials) != space.dimension:
                raise StructureTableError(
                    f"Peso {nu}: {len(monomials)} monômios PBW para dimensão {space.dimension}")
            if not monomials:
                self._matrices[key] = ([], [])
                return self._matrices[key]
            rows = [space.vector(self.monomial(m, side, divided).terms) for m in monomials]
            matrix = DomainMatrix(rows, (len(rows), len(rows)), Q_DOMAIN)
            try:
                inverse = _rows_of(matrix.inv())
            except Exception as error:
                raise StructureTableError(f"Monômios PBW de peso {nu} não formam base: {error}") from error
            self._matrices[key] = (monomials, inverse)
        return self._matrices[key]

    def expand(self, x: FreeWordElement, divided: bool = False) -> dict:
        """Coordenadas PBW (expoentes → coeficiente em Q(q)) de um elemento de um só lado."""
        if x.side == MIXED:
            x = x.single_side(self.group.rank)
        x = self.group.canonical(x)
        by_weight = {}
        for w, c in x.terms.items():
            by_weight.setdefault(self.group.word_weight(w), {})[w] = c
        result = {}
        for nu, terms in by_weight.items():
            monomials, inverse = self._pbw_matrix(x.side, nu, divided)
            vector = self.group.space(nu).vector(terms)
            for k, m in enumerate(monomials):
                c = ZERO
                for t, v in enumerate(vector):
                    if v:
                        c = c + v * inverse[t][k]
                if c:
                    result[m] = c
        return result

    def expand_word(self, side: str, word: tuple, divided: bool = False) -> dict:
        key = (side, word, divided)
        if key not in self._word_expansions:
            self._word_expansions[key] = self.expand(FreeWordElement(side, {word: ONE}), divided)
        return self._word_expansions[key]

    def omega_unit(self, i: int) -> tuple[int, int]:
        """(sinal, a) com ω(E_{γi}) = ±q^a F_{γi}."""
        image = self.group.omega(self.root_vector(i, E_SIDE))
        target = self.root_vector(i, F_SIDE)
        word = next(iter(target.terms))
        ratio = image.terms.get(word, ZERO) / target.terms[word]
        if image != target.scale(ratio):
            raise StructureTableError(f"ω(E_γ{i}) não é múltiplo de F_γ{i}", (i, i))
        unit = _unit_exponent(ratio)
        if unit is None:
            raise StructureTableError(f"ω(E_γ{i}) = {ratio}·F_γ{i} não é ±q^a", (i, i))
        return unit

    def pair_expansion(self, side: str, i: int, j: int) -> tuple:
        """Expansão de X_{γi}X_{γj} = líder·X_{γj}X_{γi} + cauda, em Q(q)."""
        product = self.group.canonical(self.group.multiply(self.root_vector(j, side), self.root_vector(i, side)))
        coefficients = self.expand(product)
        ordered = tuple(1 if s in (i, j) else 0 for s in range(1, self.n + 1))
        c = coefficients.pop(ordered, ZERO)
        if not c:
            raise StructureTableError("Coeficiente líder nulo", (i, j))
        leading = ONE / c
        tail = {m: -v / c for m, v in coefficients.items()}
        return leading, tail

    def structure_table(self) -> StructureTable:
        s_degrees = s_degrees_for(self.datum.type_label)
        tables = {}
        for side in (E_SIDE, F_SIDE):
            entries = {}
            for i in range(1, self.n + 1):
                for j in range(i + 1, self.n + 1):
                    leading, tail = self.pair_expansion(side, i, j)
                    expected = q_power(self.datum.inner(self.gammas[i - 1], self.gammas[j - 1]))
                    if leading != expected:
                        raise StructureTableError(f"Coeficiente líder {leading} ≠ {expected}", (i, j))
                    for m in tail:
                        support = [s + 1 for s, a in enumerate(m) if a]
                        if any(not i < s < j for s in support):
                            raise StructureTableError(f"Cauda com suporte {support} fora de ({i},{j})", (i, j))
                    try:
                        entry = TableEntry(i, j, to_localized(leading, s_degrees),
                                           {m: to_localized(v, s_degrees) for m, v in sorted(tail.items())})
                    except ArithmeticError as error:
                        raise StructureTableError(f"Coeficiente fora de 𝒜: {error}", (i, j)) from error
                    entries[(i, j)] = entry
                    logger.debug("par %s (%d,%d): cauda com %d monômios", side, i, j, len(tail))
            tables[side] = entries

        units = {i: self.omega_unit(i) for i in range(1, self.n + 1)}
        self._check_mirror(tables, units)
        root_words = {}
        for side in (E_SIDE, F_SIDE):
            for i in range(1, self.n + 1):
                root_words[(side, i)] = dict(sorted(self.root_vector(i, side).terms.items()))
        logger.info("tabela de estrutura %s palavra %s: %d pares", self.datum.type_label,
                    self.order.label(), len(tables[E_SIDE]))
        return StructureTable(self.order, s_degrees, tables[E_SIDE], tables[F_SIDE], units, root_words)

    def _check_mirror(self, tables: dict, units: dict):
        """ω leva a tabela do lado E na do lado F, termo a termo, a menos das unidades ±q^a."""
        def unit_value(i, power=1):
            sign, a = units[i]
            return (ONE * sign * q_power(a)) ** power

        for (i, j), entry in tables[E_SIDE].items():
            mirrored = tables[F_SIDE][(i, j)]
            if entry.leading != mirrored.leading:
                raise StructureTableError("Coeficiente líder do lado F difere do lado E", (i, j))
            if set(entry.tail) != set(mirrored.tail):
                raise StructureTableError("Suportes das caudas E e F diferem", (i, j))
            for m, value in entry.tail.items():
                factor = ONE
                for s, a in enumerate(m, start=1):
                    if a:
                        factor = factor * unit_value(s, a)
                factor = factor / (unit_value(i) * unit_value(j))
                if from_localized(value) * factor != from_localized(mirrored.tail[m]):
                    raise StructureTableError("Tabela do lado F não espelha a do lado E via ω", (i, j))

    def reorder_basis_check(self, permutation, height: int) -> bool:
        """Monômios permutados até a altura dada são linearmente independentes e geram cada componente."""
        permutation = tuple(permutation)
        if sorted(permutation) != list(range(1, self.n + 1)):
            raise ValueError(f"Permutação inválida {permutation}")
        for nu in _weights_up_to(self.group.rank, height):
            space = self.group.space(nu)
            rows = []
            for m in self.monomials(nu):
                letters = [(s, m[s - 1]) for s in permutation]
                rows.append(space.vector(self.ordered_monomial(letters).terms))
            if not rows:
                continue
            if len(rows) != space.dimension:
                return False
            matrix = DomainMatrix(rows, (len(rows), space.dimension), Q_DOMAIN)
            if matrix.rank() != space.dimension:
                return False
        return True

    def validate_dimensions(self, height: int) -> list:
        """Para cada ν de altura ≤ height: (ν, dimensão, contagem de Kostant, posto PBW)."""
        records = []
        for nu in _weights_up_to(self.group.rank, height):
            dimension = len(self.group.weight_basis(nu))
            kostant = self.group.kostant_count(nu)
            monomials = self.monomials(nu)
            if monomials:
                space = self.group.space(nu)
                rows = [space.vector(self.monomial(m).terms) for m in monomials]
                pbw_rank = DomainMatrix(rows, (len(rows), space.dimension), Q_DOMAIN).rank() if space.dimension else 0
            else:
                pbw_rank = 0
            records.append({"weight": nu, "dimension": dimension, "kostant": kostant, "pbw_rank": pbw_rank})
        return records

    # coproduto

    def comultiply_E(self, i: int, twisted: bool = False) -> dict:
        """
        Δ(E_{γi}) (ou ᵗΔ = (τ⊗τ)∘Δ∘τ) como dicionário
        (μ, monômio PBW esquerdo, monômio PBW direito) → coeficiente, com
        o termo esquerdo K_μ·E^a e o direito E^b.
        """
        group = self.group
        root = self.root_vector(i, E_SIDE)
        if twisted:
            root = group.tau(root)
        raw = {}
        for word, c in root.terms.items():
            for (torus, left, right), a in group.comultiply_word(word).items():
                if twisted:
                    # τ(K_μ E_u) = E_{ū} K_{−μ} = q^{(μ, wt u)} K_{−μ} E_{ū}
                    factor = q_power(group.inner(torus, group.word_weight(left)))
                    torus = tuple(-v for v in torus)
                    left, right = left[::-1], right[::-1]
                    a = a * factor
                key = (torus, left, right)
                raw[key] = raw.get(key, ZERO) + c * a
        result = {}
        for (torus, left, right), c in raw.items():
            if not c:
                continue
            for ls, a in group.reduce_word(left).items():
                for rs, b in group.reduce_word(right).items():
                    for lm, x in self.expand_word(E_SIDE, ls).items():
                        for rm, y in self.expand_word(E_SIDE, rs).items():
                            key = (torus, lm, rm)
                            result[key] = result.get(key, ZERO) + c * a * b * x * y
        return {key: c for key, c in result.items() if c}

    def coideal_membership(self, m: int) -> bool:
        """Δ(E_{γm}) ∈ V_m ⊗ W_m: suporte esquerdo em {1..m}, direito em {m..N}."""
        for (_, left, right) in self.comultiply_E(m):
            if any(a and s > m for s, a in enumerate(left, start=1)):
                return False
            if any(a and s < m for s, a in enumerate(right, start=1)):
                return False
        return True

    def twisted_coideal_membership(self, m: int) -> bool:
        """ᵗΔ(E_{γm}) ∈ V'_m ⊗ W'_m: suporte esquerdo em {m..N}, direito em {1..m}."""
        for (_, left, right) in self.comultiply_E(m, twisted=True):
            if any(a and s < m for s, a in enumerate(left, start=1)):
                return False
            if any(a and s > m for s, a in enumerate(right, start=1)):
                return False
        return True


def _weights_up_to(rank: int, height: int):
    def extend(prefix, remaining):
        if len(prefix) == rank:
            yield tuple(prefix)
            return
        for c in range(remaining + 1):
            yield from extend(prefix + [c], remaining - c)

    return [nu for nu in extend([], height) if any(nu)]


def build_structure_table(order: ConvexOrder, height_bound: int | None = None) -> StructureTable:
    group = QuantumGroup(order.datum, height_bound)
    return PBWBasis(group, order).structure_table()
