from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
import logging

import sympy

logger = logging.getLogger(__name__)

# Produto interno das raízes simples, normalizado com (α,α) = 2 para raízes curtas.
# Rotulação de Bourbaki: em B2 a raiz α1 é longa, em G2 a raiz α1 é curta.
SIMPLE_PAIRINGS = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "B2": ((4, -2), (-2, 2)),
    "G2": ((2, -3), (-3, 6)),
}

# Matrizes de Cartan publicadas, na convenção cartan[i][j] = ⟨α_i, α_j^∨⟩,
# usadas para conferir a tabela acima.
PUBLISHED_CARTAN = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "B2": ((2, -2), (-1, 2)),
    "G2": ((2, -1), (-3, 2)),
}


class UnsupportedTypeError(ValueError):
    """Tipo de sistema de raízes fora da lista suportada."""


class InvalidWordError(ValueError):
    """Palavra que não é uma expressão reduzida do elemento mais longo w0."""


Vector = tuple


@dataclass(frozen=True)
class RootDatum:
    """
    Sistema de raízes finito e irredutível de posto pequeno.

    Raízes são guardadas em coordenadas de raízes simples; pesos em
    coordenadas de pesos fundamentais (inteiros).
    """
    type_label: str
    rank: int
    pairing: tuple
    cartan: tuple
    d_alpha: tuple
    positive_roots: tuple
    simple_roots: tuple = field(repr=False)

    @property
    def n_positive(self) -> int:
        return len(self.positive_roots)

    @property
    def coxeter_number(self) -> int:
        return 2 * self.n_positive // self.rank

    @cached_property
    def highest_long_root(self) -> Vector:
        return max(self.positive_roots, key=lambda root: (sum(root), root))

    @cached_property
    def rho(self) -> Vector:
        """Meia soma das raízes positivas (coordenadas de raízes simples)."""
        return tuple(Fraction(sum(root[i] for root in self.positive_roots), 2) for i in range(self.rank))

    @cached_property
    def fundamental_weights(self) -> tuple:
        """Pesos fundamentais ϖ_i em coordenadas de raízes simples (linhas de C⁻¹)."""
        inverse = sympy.Matrix(self.cartan).inv()
        return tuple(
            tuple(Fraction(int(inverse[i, j].p), int(inverse[i, j].q)) for j in range(self.rank))
            for i in range(self.rank)
        )

    def inner(self, x: Vector, y: Vector):
        """Produto interno (x,y) de vetores em coordenadas de raízes simples."""
        return sum(x[i] * self.pairing[i][j] * y[j] for i in range(self.rank) for j in range(self.rank) if x[i] and y[j])

    def coroot_pairing(self, x: Vector, i: int):
        """⟨x, α_i^∨⟩ para i indexado a partir de 0."""
        return sum(x[k] * self.cartan[k][i] for k in range(self.rank))

    def reflect(self, i: int, x: Vector) -> Vector:
        """Reflexão simples s_i (i a partir de 1) aplicada a x."""
        c = self.coroot_pairing(x, i - 1)
        return tuple(x[k] - c if k == i - 1 else x[k] for k in range(self.rank))

    def simple_root(self, i: int) -> Vector:
        return self.simple_roots[i - 1]

    def height(self, x: Vector):
        return sum(x)

    def is_root(self, x: Vector) -> bool:
        x = tuple(x)
        return x in self.all_roots

    @cached_property
    def all_roots(self) -> frozenset:
        return frozenset(self.positive_roots) | frozenset(tuple(-c for c in root) for root in self.positive_roots)

    def root_length_squared(self, x: Vector) -> int:
        return self.inner(x, x)

    def d_of(self, root: Vector) -> int:
        """d_γ = (γ,γ)/2 para uma raiz γ."""
        return self.inner(root, root) // 2

    # Conversões entre reticulados

    def to_weight(self, x: Vector) -> Vector:
        """Coordenadas de raízes simples → coordenadas de pesos fundamentais."""
        return tuple(self.coroot_pairing(x, i) for i in range(self.rank))

    def from_weight(self, weight: Vector) -> Vector:
        """Coordenadas de pesos fundamentais → coordenadas (racionais) de raízes simples."""
        result = [Fraction(0)] * self.rank
        for i, coefficient in enumerate(weight):
            for j in range(self.rank):
                result[j] += coefficient * self.fundamental_weights[i][j]
        return tuple(result)

    def weight_root_pairing(self, weight: Vector, root: Vector) -> int:
        """(λ, β) com λ em pesos fundamentais e β em raízes simples."""
        return sum(root[j] * self.d_alpha[j] * weight[j] for j in range(self.rank))

    @cached_property
    def rho_weight(self) -> Vector:
        return tuple(1 for _ in range(self.rank))

    def table(self) -> str:
        """Tabela em texto simples com os dados do sistema."""
        lines = [f"type {self.type_label}  rank {self.rank}  N {self.n_positive}  h {self.coxeter_number}"]
        lines.append("cartan " + " | ".join(" ".join(f"{c:>2}" for c in row) for row in self.cartan))
        lines.append("d " + " ".join(str(d) for d in self.d_alpha))
        for root in self.positive_roots:
            marker = "  (highest)" if root == self.highest_long_root else ""
            lines.append(f"  {format_root(root):<14} (γ,γ)={self.inner(root, root)}{marker}")
        return "\n".join(lines)


def format_root(root: Vector) -> str:
    """Formata uma raiz como combinação de raízes simples, por exemplo α1+2α2."""
    parts = []
    for i, c in enumerate(root):
        if c == 0:
            continue
        coefficient = "" if abs(c) == 1 else str(abs(c))
        sign = "-" if c < 0 else ("+" if parts else "")
        parts.append(f"{sign}{coefficient}α{i + 1}")
    return "".join(parts) or "0"


def build_root_datum(type_label: str) -> RootDatum:
    """Constrói o sistema de raízes do tipo dado, fechando as raízes simples sob reflexões."""
    label = type_label.upper()
    if label not in SIMPLE_PAIRINGS:
        raise UnsupportedTypeError(f"Tipo não suportado: {type_label}")

    pairing = SIMPLE_PAIRINGS[label]
    rank = len(pairing)
    cartan = tuple(tuple(2 * pairing[i][j] // pairing[j][j] for j in range(rank)) for i in range(rank))
    if cartan != PUBLISHED_CARTAN[label]:
        raise UnsupportedTypeError(f"Matriz de Cartan inconsistente para {label}")
    d_alpha = tuple(pairing[i][i] // 2 for i in range(rank))
    simple_roots = tuple(tuple(1 if k == i else 0 for k in range(rank)) for i in range(rank))

    # órbita das raízes simples sob as reflexões simples
    def reflect(i, x):
        c = sum(x[k] * cartan[k][i] for k in range(rank))
        return tuple(x[k] - c if k == i else x[k] for k in range(rank))

    roots = set(simple_roots)
    frontier = list(simple_roots)
    while frontier:
        root = frontier.pop()
        for i in range(rank):
            image = reflect(i, root)
            if image not in roots:
                roots.add(image)
                frontier.append(image)

    positive = sorted((root for root in roots if all(c >= 0 for c in root)), key=lambda root: (sum(root), root))
    datum = RootDatum(label, rank, pairing, cartan, d_alpha, tuple(positive), simple_roots)
    if any(datum.inner(root, root) not in (2, 4, 6) for root in positive):
        raise UnsupportedTypeError(f"Normalização de comprimentos inválida para {label}")
    if min(datum.inner(root, root) for root in positive) != 2:
        raise UnsupportedTypeError(f"Raízes curtas sem comprimento 2 em {label}")
    logger.debug("sistema de raízes %s com %d raízes positivas", label, len(positive))
    return datum


def weyl_apply(datum: RootDatum, word, vector: Vector) -> Vector:
    """Aplica w = s_{w1}⋯s_{wk} ao vetor (a reflexão mais à direita primeiro)."""
    result = tuple(vector)
    for i in reversed(tuple(word)):
        result = datum.reflect(i, result)
    return result


@dataclass(frozen=True)
class ConvexOrder:
    """Ordenação convexa γ1..γN das raízes positivas associada a uma palavra reduzida de w0."""
    datum: RootDatum
    w0_word: tuple
    gammas: tuple

    @property
    def n(self) -> int:
        return len(self.gammas)

    def prefix_word(self, i: int) -> tuple:
        """w_i = s_{β1}⋯s_{β_{i−1}} (i a partir de 1)."""
        return self.w0_word[: i - 1]

    def index_of(self, root: Vector) -> int:
        """Posição (a partir de 1) de uma raiz positiva na ordem."""
        return self.gammas.index(tuple(root)) + 1

    def simple_positions(self) -> dict:
        """Mapa índice simple i → posição s com γ_s = α_i."""
        return {i + 1: self.index_of(self.datum.simple_roots[i]) for i in range(self.datum.rank)}

    def d(self, s: int) -> int:
        return self.datum.d_of(self.gammas[s - 1])

    def is_convex(self) -> bool:
        for i in range(self.n):
            for j in range(i + 1, self.n):
                total = tuple(a + b for a, b in zip(self.gammas[i], self.gammas[j]))
                if total in self.gammas and not (i < self.gammas.index(total) < j):
                    return False
        return True

    def label(self) -> str:
        return ",".join(str(i) for i in self.w0_word)


def convex_order(datum: RootDatum, w0_word) -> ConvexOrder:
    word = tuple(int(i) for i in w0_word)
    if len(word) != datum.n_positive or any(not 1 <= i <= datum.rank for i in word):
        raise InvalidWordError(f"Palavra {word} não tem comprimento {datum.n_positive} sobre índices simples")

    gammas = []
    for i in range(1, len(word) + 1):
        gammas.append(weyl_apply(datum, word[: i - 1], datum.simple_root(word[i - 1])))
    if sorted(gammas) != sorted(datum.positive_roots):
        raise InvalidWordError(f"Palavra {word} não é uma expressão reduzida de w0")

    order = ConvexOrder(datum, word, tuple(gammas))
    if not order.is_convex():
        raise InvalidWordError(f"Ordenação não convexa para a palavra {word}")
    return order


def all_reduced_w0_words(datum: RootDatum) -> list:
    """Enumera todas as palavras reduzidas de w0 por busca exaustiva, em ordem lexicográfica."""
    words = []

    def extend(prefix):
        if len(prefix) == datum.n_positive:
            words.append(prefix)
            return
        for i in range(1, datum.rank + 1):
            # w s_i é mais longo que w sse w(α_i) é positiva
            image = weyl_apply(datum, prefix, datum.simple_root(i))
            if all(c >= 0 for c in image):
                extend(prefix + (i,))

    extend(())
    return sorted(words)


def default_w0_word(datum: RootDatum) -> tuple:
    return all_reduced_w0_words(datum)[0]


@dataclass(frozen=True)
class OrderFunctional:
    """Funcional v com (v,γ_i) > 0 para i ≤ m e (v,γ_i) < 0 para i > m."""
    order: ConvexOrder
    m: int
    vector: Vector

    def value(self, root: Vector):
        return self.order.datum.inner(self.vector, root)

    def positive_system(self) -> frozenset:
        datum = self.order.datum
        return frozenset(root for root in datum.all_roots if self.value(root) > 0)

    def weight(self) -> Vector:
        """O vetor em coordenadas de pesos fundamentais."""
        return self.order.datum.to_weight(self.vector)

    def has_sign_pattern(self) -> bool:
        datum = self.order.datum
        if any(self.value(root) == 0 for root in datum.all_roots):
            return False
        return all((self.value(gamma) > 0) == (i < self.m) for i, gamma in enumerate(self.order.gammas))


def order_functional(order: ConvexOrder, m: int) -> OrderFunctional:
    """
    Constrói o funcional pela inversão sucessiva: v_m = −w_{m+1}(ρ), com
    w_{m+1} = s_{β1}⋯s_{βm}. Cada passo troca o sinal exatamente de γ_{m+1}.
    """
    if not 0 <= m <= order.n:
        raise ValueError(f"m={m} fora de 0..{order.n}")
    datum = order.datum
    image = weyl_apply(datum, order.w0_word[:m], datum.rho)
    return OrderFunctional(order, m, tuple(-c for c in image))


def flip_check(order: ConvexOrder) -> bool:
    """Confere que o sistema positivo em m+1 é s_{γ_{m+1}} aplicado ao sistema em m."""
    datum = order.datum
    for m in range(order.n):
        current = order_functional(order, m).positive_system()
        following = order_functional(order, m + 1).positive_system()
        gamma = order.gammas[m]
        c = lambda x: Fraction(2 * datum.inner(x, gamma), datum.inner(gamma, gamma))
        flipped = frozenset(tuple(x[k] - c(x) * gamma[k] for k in range(datum.rank)) for x in current)
        if flipped != following:
            return False
    return True
