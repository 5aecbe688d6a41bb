"""
Módulos de dimensão finita com pesos: matrizes das potências divididas E_i^{(n)}, F_i^{(n)}
e dos K_i num corpo especializado, mais as construções usuais.
"""
from collections import Counter
from dataclasses import dataclass, replace
import logging

import numpy as np

from algebra.kernelalg import (LETTER_OF, MINUS, PLUS, SIDE_OF, AlgebraDescriptor, AlgebraKind,
                               InternalInconsistencyError, KernelContext, accumulate, prune)
from algebra.scalars import q_binomial, q_integer
import matrixmath

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LiftFlags:
    """Até onde a ação de um módulo se estende."""
    torus_compatible: bool = True
    borel_minus: bool = False
    borel_plus: bool = False
    full_u: bool = False

    def meet(self, other: "LiftFlags") -> "LiftFlags":
        return LiftFlags(*(a and b for a, b in zip(
            (self.torus_compatible, self.borel_minus, self.borel_plus, self.full_u),
            (other.torus_compatible, other.borel_minus, other.borel_plus, other.full_u))))


class Character(Counter):
    """Caráter formal: peso (pesos fundamentais) → multiplicidade."""

    @classmethod
    def of(cls, module: "WeightedModule") -> "Character":
        if module.weights is None:
            raise ValueError(f"{module.provenance}: módulo sem pesos não tem caráter")
        return cls(module.weights)

    def shifted(self, weight: tuple) -> "Character":
        return Character({tuple(a + b for a, b in zip(mu, weight)): c for mu, c in self.items()})

    def negated(self) -> "Character":
        return Character({tuple(-a for a in mu): c for mu, c in self.items()})

    def times(self, other: "Character") -> "Character":
        result = Character()
        for mu, a in self.items():
            for nu, b in other.items():
                result[tuple(x + y for x, y in zip(mu, nu))] += a * b
        return result

    def dimension(self) -> int:
        return sum(self.values())


class WeightedModule:
    """
    Módulo dado por matrizes: actions[(letra, i, n)] para E_i^{(n)}, F_i^{(n)} (n em
    {1, ℓ, pℓ, ...}) e K_i; root_actions[(lado, s, n)] guarda ações de vetores de raiz.
    """

    def __init__(self, field, ell: int, datum, weights, actions: dict, flags: LiftFlags | None = None,
                 provenance: str = "", r: int = 0, dim: int | None = None):
        self.field = field
        self.ell = ell
        self.datum = datum
        self.weights = [tuple(w) for w in weights] if weights is not None else None
        self.actions = dict(actions)
        self.root_actions = {}
        self.flags = flags or LiftFlags()
        self.provenance = provenance
        self.r = r
        if dim is None:
            if self.weights is None:
                dim = next(iter(self.actions.values())).shape[0]
            else:
                dim = len(self.weights)
        self.dim = dim
        self._divided = {}

    def __repr__(self):
        return f"WeightedModule({self.provenance or '?'}, dim={self.dim})"

    @property
    def bound(self) -> int:
        return self.ell * self.field.characteristic ** self.r if self.r else self.ell

    def steps(self) -> list:
        return [1] + [self.ell * self.field.characteristic ** k for k in range(self.r)]

    def digits(self, n: int) -> list:
        digits = [n % self.ell]
        rest = n // self.ell
        for _ in range(self.r):
            digits.append(rest % self.field.characteristic)
            rest //= self.field.characteristic
        if rest:
            raise ValueError(f"Potência dividida {n} fora do núcleo (limite {self.bound})")
        return digits

    def fill_torus(self):
        """Completa as ações de K_i a partir dos pesos: K_i age por ζ^{d_i λ_i}."""
        if self.weights is None:
            return
        field = self.field
        for i in range(1, self.datum.rank + 1):
            if ("K", i, 1) in self.actions:
                continue
            d = self.datum.d_alpha[i - 1]
            matrix = field.zeros((self.dim, self.dim))
            for t, weight in enumerate(self.weights):
                matrix[t, t] = field.zeta_power(d * weight[i - 1])
            self.actions[("K", i, 1)] = matrix

    def generator_keys(self) -> list:
        return sorted(self.actions)

    def has(self, letter: str) -> bool:
        return any(key[0] == letter for key in self.actions)

    def action(self, letter: str, i: int, n: int = 1) -> np.ndarray:
        """Matriz de E_i^{(n)}, F_i^{(n)} ou K_i^n."""
        field = self.field
        if letter == "K":
            base = self.actions[("K", i, 1)]
            if n >= 0:
                return matrixmath.matrix_power(field, base, n)
            inverse = matrixmath.inverse(field, base)
            if inverse is None:
                raise InternalInconsistencyError(f"K_{i} não invertível em {self.provenance}")
            return matrixmath.matrix_power(field, inverse, -n)
        key = (letter, i, n)
        if key in self.actions:
            return self.actions[key]
        if key not in self._divided:
            d = self.datum.d_alpha[i - 1]
            self._divided[key] = self._compose_divided(lambda step: self.actions[(letter, i, step)], n, d)
        return self._divided[key]

    def _compose_divided(self, base, n: int, d: int) -> np.ndarray:
        """X^{(n0 + ℓ n1 + ...)} = X^{(n0)}·∏_k (X^{(p^kℓ)})^{n_{k+1}}/n_{k+1}!."""
        field = self.field
        digits = self.digits(n)
        result = field.identity(self.dim)
        if digits[0]:
            factorial = field.one
            for k in range(1, digits[0] + 1):
                factorial = field.mul(factorial, q_integer(k, d).evaluate(field))
            power = matrixmath.matrix_power(field, base(1), digits[0])
            result = field.scale(power, field.inv(factorial))
        for k, count in enumerate(digits[1:]):
            if not count:
                continue
            step = self.ell * field.characteristic ** k
            factorial = field.from_int(1)
            for c in range(1, count + 1):
                factorial = field.mul(factorial, field.from_int(c))
            power = field.scale(matrixmath.matrix_power(field, base(step), count), field.inv(factorial))
            result = field.matmul(result, power)
        return result

    def root_action(self, context: KernelContext, side: str, s: int, n: int = 1) -> np.ndarray:
        """Ação de X_{γs}^{(n)}, via palavras especializadas nos geradores simples."""
        key = (side, s, n)
        if key in self.root_actions:
            return self.root_actions[key]
        field = self.field
        order = context.order
        gamma = order.gammas[s - 1]
        letter = LETTER_OF[side]
        simple = {position: i for i, position in order.simple_positions().items()}
        if n == 0:
            return field.identity(self.dim)
        if s in simple and (letter, simple[s], 1) in self.actions:
            matrix = self.action(letter, simple[s], n)
        elif n == 1:
            words = context.specialized.root_words[(SIDE_OF[side], s)]
            matrix = field.zeros((self.dim, self.dim))
            for word, c in words.items():
                product = field.identity(self.dim)
                for letter_index in word:
                    product = field.matmul(product, self.action(letter, letter_index, 1))
                matrix = field.normalize(matrix + field.scale(product, c))
        else:
            matrix = self._compose_divided(lambda step: self.root_action(context, side, s, step), n,
                                           order.datum.d_of(gamma))
        self.root_actions[key] = matrix
        return matrix

    # verificações

    def check_grading(self) -> bool:
        """Cada ação leva o espaço de peso λ em λ ± nα_i; K_i é diagonal com ζ^{d_iλ_i}."""
        if self.weights is None:
            return False
        field = self.field
        datum = self.datum
        for (letter, i, n), matrix in self.actions.items():
            if letter == "K":
                d = datum.d_alpha[i - 1]
                expected = field.zeros((self.dim, self.dim))
                for t, weight in enumerate(self.weights):
                    expected[t, t] = field.zeta_power(d * weight[i - 1])
                if not field.equal(field.normalize(matrix), expected):
                    return False
                continue
            shift = datum.to_weight(datum.simple_root(i))
            sign = 1 if letter == "E" else -1
            rows, columns = np.nonzero(field.nonzero_mask(matrix))
            for row, column in zip(rows, columns):
                target = tuple(a + sign * n * b for a, b in zip(self.weights[column], shift))
                if self.weights[row] != target:
                    return False
        return True

    def relation_defects(self) -> list:
        """Relações de u_ζ(g) que falham nas matrizes simples (vazia se o módulo é válido)."""
        field = self.field
        datum = self.datum
        rank = datum.rank
        defects = []
        for i in range(1, rank + 1):
            for j in range(1, rank + 1):
                alpha_i, alpha_j = datum.simple_root(i), datum.simple_root(j)
                k_i = self.action("K", i, 1)
                k_inverse = self.action("K", i, -1)
                pairing = datum.inner(alpha_i, alpha_j)
                for letter, sign in (("E", 1), ("F", -1)):
                    if (letter, j, 1) not in self.actions:
                        continue
                    x = self.actions[(letter, j, 1)]
                    left = field.matmul(field.matmul(k_i, x), k_inverse)
                    if not field.equal(left, field.scale(x, field.zeta_power(sign * pairing))):
                        defects.append(f"K{i}{letter}{j}")
                if ("E", i, 1) in self.actions and ("F", j, 1) in self.actions:
                    e, f = self.actions[("E", i, 1)], self.actions[("F", j, 1)]
                    bracket = field.normalize(field.matmul(e, f) - field.matmul(f, e))
                    expected = field.zeros((self.dim, self.dim))
                    if i == j:
                        d = datum.d_alpha[i - 1]
                        c = field.inv(field.sub(field.zeta_power(d), field.zeta_power(-d)))
                        expected = field.scale(field.normalize(k_i - k_inverse), c)
                    if not field.equal(bracket, expected):
                        defects.append(f"[E{i},F{j}]")
                if i != j:
                    for letter in ("E", "F"):
                        if (letter, i, 1) in self.actions and (letter, j, 1) in self.actions:
                            if not self._serre_holds(letter, i, j):
                                defects.append(f"Serre{letter}{i}{j}")
            if self.r == 0:
                for letter in ("E", "F"):
                    if (letter, i, 1) in self.actions:
                        power = matrixmath.matrix_power(field, self.actions[(letter, i, 1)], self.ell)
                        if field.nonzero_mask(power).any():
                            defects.append(f"{letter}{i}^ℓ")
        return defects

    def _serre_holds(self, letter: str, i: int, j: int) -> bool:
        field = self.field
        datum = self.datum
        n = 1 - datum.cartan[j - 1][i - 1]
        d = datum.d_alpha[i - 1]
        x_i, x_j = self.actions[(letter, i, 1)], self.actions[(letter, j, 1)]
        total = field.zeros((self.dim, self.dim))
        for s in range(n + 1):
            c = q_binomial(n, s, d).evaluate(field)
            if s % 2:
                c = field.neg(c)
            term = field.matmul(field.matmul(matrixmath.matrix_power(field, x_i, n - s), x_j),
                                matrixmath.matrix_power(field, x_i, s))
            total = field.normalize(total + field.scale(term, c))
        return not field.nonzero_mask(total).any()


def _new_module(context: KernelContext, weights, actions, flags, provenance) -> WeightedModule:
    module = WeightedModule(context.field, context.ell, context.datum, weights, actions, flags=flags,
                            provenance=provenance, r=context.r)
    module.fill_torus()
    return module


def _lowering(context: KernelContext, exponents: tuple) -> tuple:
    """|f| em coordenadas de raízes simples."""
    return context.straighteners[MINUS].weight(exponents)


def _weight_minus(context: KernelContext, weight: tuple, root: tuple) -> tuple:
    shift = context.datum.to_weight(root)
    return tuple(a - b for a, b in zip(weight, shift))


def _check_weight(context: KernelContext, weight) -> tuple:
    weight = tuple(int(c) for c in weight)
    if len(weight) != context.datum.rank:
        raise ValueError(f"Peso {weight} tem posto errado para {context.datum.type_label}")
    return weight


# Módulos de Verma (bebê) e coinduzidos

def verma(context: KernelContext, weight) -> WeightedModule:
    """Ẑ(λ) = u_ζ(g) ⊗_{u_ζ(b⁺)} λ, com base f·v_λ para f monômio PBW de u_ζ(u⁻)."""
    weight = _check_weight(context, weight)
    field = context.field
    lower = context.algebra(AlgebraDescriptor(AlgebraKind.U_MINUS))
    weights = [_weight_minus(context, weight, _lowering(context, f)) for f in lower.basis]
    actions = {}
    rank = context.datum.rank
    for i in range(1, rank + 1):
        s = context.simple_position(i)
        for step in context.divided_steps():
            actions[("F", i, step)] = lower.left_matrix(("F", s, step))
    if context.r:
        # A1: E^{(a)}F^{(b)}v = [λ − b + a, a] F^{(b−a)}v
        for step in context.divided_steps():
            matrix = field.zeros((lower.dimension, lower.dimension))
            for column, (b,) in enumerate(lower.basis):
                if b >= step:
                    matrix[lower.index[(b - step,)], column] = context.q_binomial(weight[0] - b + step, step)
            actions[("E", 1, step)] = matrix
    else:
        for i in range(1, rank + 1):
            d = context.datum.d_alpha[i - 1]
            up = context.zeta(d * weight[i - 1])
            down = context.zeta(-d * weight[i - 1])
            matrix = field.zeros((lower.dimension, lower.dimension))
            for column, f in enumerate(lower.basis):
                if not any(f):
                    continue
                plus, minus = context.commutator(i, f)
                for g, c in plus.items():
                    matrix[lower.index[g], column] = field.add(matrix[lower.index[g], column], field.mul(c, up))
                for g, c in minus.items():
                    matrix[lower.index[g], column] = field.add(matrix[lower.index[g], column], field.mul(c, down))
            actions[("E", i, 1)] = field.normalize(matrix)
    flags = LiftFlags(torus_compatible=True, borel_minus=True, borel_plus=True)
    return _new_module(context, weights, actions, flags, f"verma({','.join(map(str, weight))})")


def _right_derivation(context: KernelContext, weight: tuple, i: int, exponents: tuple, cache: dict) -> dict:
    """
    D_i(e) ∈ u_ζ(u⁺) com e·F_i ≡ D_i(e) módulo b⁻ agindo por λ:
    D_i(y E_j) = D_i(y)E_j + δ_ij [⟨λ − |y|, α_i^∨⟩]_{ζ_i} y.
    """
    key = (i, exponents)
    if key in cache:
        return cache[key]
    field = context.field
    upper = context.straighteners[PLUS]
    result = {}
    if any(exponents):
        d = context.datum.d_alpha[i - 1]
        for j, y in context.decomposition(PLUS, exponents, right=True).items():
            letter = ((context.simple_position(j), 1),)
            for k, c in y.items():
                for term, v in _right_derivation(context, weight, i, k, cache).items():
                    accumulate(field, result, upper.normal(upper.factors(term) + letter), field.mul(c, v))
                if j == i:
                    x = weight[i - 1] - context.datum.coroot_pairing(upper.weight(k), i - 1)
                    accumulate(field, result, {k: field.mul(c, context.q_integer(x, d))})
    cache[key] = prune(field, result)
    return cache[key]


def coverma(context: KernelContext, weight) -> WeightedModule:
    """
    Ẑ'(λ) = Hom_{u_ζ(b⁻)}(u_ζ(g), λ): funções na base PBW de u_ζ(u⁺), ação induzida pela
    multiplicação à direita. O vetor dual δ_e tem peso λ − |e|.
    """
    weight = _check_weight(context, weight)
    field = context.field
    upper = context.algebra(AlgebraDescriptor(AlgebraKind.U_PLUS))
    straightener = context.straighteners[PLUS]
    weights = [_weight_minus(context, weight, straightener.weight(e)) for e in upper.basis]
    actions = {}
    size = upper.dimension
    if context.r:
        # A1: (E^{(a)}φ)(E^{(c)}) = [c+a, a]φ(E^{(c+a)}), (F^{(a)}φ)(E^{(c)}) = [λ+a−c, a]φ(E^{(c−a)})
        for step in context.divided_steps():
            raising = field.zeros((size, size))
            lowering = field.zeros((size, size))
            for (c,) in upper.basis:
                if c + step < context.bound:
                    raising[upper.index[(c,)], upper.index[(c + step,)]] = context.q_binomial(c + step, step)
                if c >= step:
                    lowering[upper.index[(c,)], upper.index[(c - step,)]] = \
                        context.q_binomial(weight[0] + step - c, step)
            actions[("E", 1, step)] = raising
            actions[("F", 1, step)] = lowering
    else:
        for i in range(1, context.datum.rank + 1):
            s = context.simple_position(i)
            actions[("E", i, 1)] = upper.right_matrix(("E", s, 1)).T.copy()
            cache = {}
            derivation = field.zeros((size, size))
            for column, e in enumerate(upper.basis):
                for g, c in _right_derivation(context, weight, i, e, cache).items():
                    derivation[upper.index[g], column] = c
            actions[("F", i, 1)] = derivation.T.copy()
    flags = LiftFlags(torus_compatible=True, borel_minus=True, borel_plus=True)
    return _new_module(context, weights, actions, flags, f"coverma({','.join(map(str, weight))})")


def onedim(context: KernelContext, weight) -> WeightedModule:
    """Módulo de dimensão 1 de peso λ, com E e F agindo por zero."""
    weight = _check_weight(context, weight)
    field = context.field
    actions = {}
    for i in range(1, context.datum.rank + 1):
        for step in context.divided_steps():
            actions[("E", i, step)] = field.zeros((1, 1))
            actions[("F", i, step)] = field.zeros((1, 1))
    lifts = all(c % context.bound == 0 for c in weight)
    flags = LiftFlags(torus_compatible=True, borel_minus=True, borel_plus=True, full_u=lifts)
    return _new_module(context, [weight], actions, flags, f"onedim({','.join(map(str, weight))})")


def trivial(context: KernelContext) -> WeightedModule:
    module = onedim(context, (0,) * context.datum.rank)
    module.provenance = "trivial"
    return module


def projective_module(context: KernelContext, weight, descriptor: AlgebraDescriptor | None = None) -> WeightedModule:
    """
    P(λ) = A·e_λ para A = u_ζ(g) ou u_ζ(b±) (U_ζ(G_r), U_ζ(B_r^±) se r ≥ 1), com base
    F^{(f)}E^{(e)}e_λ de peso λ + |e| − |f|. Somando P(λ_k) sobre geradores de peso de M
    obtém-se uma cobertura projetiva graduada de M.
    """
    weight = _check_weight(context, weight)
    algebra = context.algebra(descriptor or AlgebraDescriptor(AlgebraKind.G))
    if algebra.is_local:
        raise ValueError(f"{algebra.descriptor} é local: A·1 = A não é módulo de u_ζ(g)")
    simple_of = {s: i for i, s in context.order.simple_positions().items()}
    actions = {}
    for symbol in algebra.generators():
        letter, s, n = symbol
        if letter != "K":
            actions[(letter, simple_of[s], n)] = algebra.projective_action(symbol, weight)
    kind = algebra.descriptor.kind
    flags = LiftFlags(torus_compatible=True, borel_minus=kind != AlgebraKind.B_PLUS,
                      borel_plus=kind != AlgebraKind.B_MINUS)
    logger.debug("P(%s) sobre %s: dim %d", weight, algebra.descriptor, algebra.dimension)
    return _new_module(context, algebra.projective_weights(weight), actions, flags,
                       f"proj({','.join(map(str, weight))};{algebra.descriptor})")


# Construções

def _same_setting(*modules: WeightedModule):
    first = modules[0]
    for module in modules[1:]:
        if module.field is not first.field or module.datum != first.datum or module.r != first.r:
            raise ValueError(f"{first.provenance} e {module.provenance} vivem em contextos diferentes")


def dual(module: WeightedModule) -> WeightedModule:
    """M*: ρ*(x) = ρ(S(x))ᵀ, S(E^{(n)}) = (−1)^n ζ_i^{n(n−1)}K_i^{−n}E^{(n)}, S(F^{(n)}) = (−1)^n ζ_i^{−n(n−1)}F^{(n)}K_i^n."""
    field = module.field
    actions = {}
    for (letter, i, n), matrix in module.actions.items():
        if letter == "K":
            actions[(letter, i, n)] = module.action("K", i, -1).T.copy()
            continue
        d = module.datum.d_alpha[i - 1]
        if letter == "E":
            c = field.zeta_power(d * n * (n - 1))
            image = field.matmul(module.action("K", i, -n), matrix)
        else:
            c = field.zeta_power(-d * n * (n - 1))
            image = field.matmul(matrix, module.action("K", i, n))
        if n % 2:
            c = field.neg(c)
        actions[(letter, i, n)] = field.scale(image, c).T.copy()
    weights = None if module.weights is None else [tuple(-c for c in w) for w in module.weights]
    return WeightedModule(field, module.ell, module.datum, weights, actions, flags=module.flags,
                          provenance=f"dual({module.provenance})", r=module.r, dim=module.dim)


def tensor(left: WeightedModule, right: WeightedModule) -> WeightedModule:
    """
    M ⊗ N com Δ(E^{(n)}) = Σ_t ζ_i^{t(n−t)} E^{(n−t)}K^t ⊗ E^{(t)},
    Δ(F^{(n)}) = Σ_t ζ_i^{−t(n−t)} F^{(t)} ⊗ K^{−t}F^{(n−t)} e Δ(K) = K ⊗ K.
    """
    _same_setting(left, right)
    field = left.field
    actions = {}
    keys = set(left.actions) & set(right.actions)
    for letter, i, n in sorted(keys):
        if letter == "K":
            actions[(letter, i, n)] = field.kron(left.actions[(letter, i, n)], right.actions[(letter, i, n)])
            continue
        d = left.datum.d_alpha[i - 1]
        total = field.zeros((left.dim * right.dim, left.dim * right.dim))
        for t in range(n + 1):
            if letter == "E":
                c = field.zeta_power(d * t * (n - t))
                a = field.matmul(left.action("E", i, n - t), left.action("K", i, t))
                b = right.action("E", i, t)
            else:
                c = field.zeta_power(-d * t * (n - t))
                a = left.action("F", i, t)
                b = field.matmul(right.action("K", i, -t), right.action("F", i, n - t))
            total = field.normalize(total + field.scale(field.kron(a, b), c))
        actions[(letter, i, n)] = total
    weights = None
    if left.weights is not None and right.weights is not None:
        weights = [tuple(a + b for a, b in zip(u, v)) for u in left.weights for v in right.weights]
    return WeightedModule(field, left.ell, left.datum, weights, actions, flags=left.flags.meet(right.flags),
                          provenance=f"tensor({left.provenance},{right.provenance})", r=left.r,
                          dim=left.dim * right.dim)


def direct_sum(*modules: WeightedModule) -> WeightedModule:
    _same_setting(*modules)
    field = modules[0].field
    keys = set.intersection(*(set(m.actions) for m in modules))
    actions = {key: matrixmath.direct_sum(field, [m.actions[key] for m in modules]) for key in keys}
    weights = None
    if all(m.weights is not None for m in modules):
        weights = [w for m in modules for w in m.weights]
    flags = modules[0].flags
    for m in modules[1:]:
        flags = flags.meet(m.flags)
    return WeightedModule(field, modules[0].ell, modules[0].datum, weights, actions, flags=flags,
                          provenance=f"sum({','.join(m.provenance for m in modules)})", r=modules[0].r,
                          dim=sum(m.dim for m in modules))


def twist(module: WeightedModule, weight) -> WeightedModule:
    """M ⊗ μ para μ ∈ p^rℓX: mesmas matrizes, pesos deslocados por μ."""
    weight = tuple(int(c) for c in weight)
    if any(c % module.bound for c in weight):
        raise ValueError(f"Torção {weight} não está em {module.bound}X")
    if module.weights is None:
        raise ValueError("Torção exige módulo com pesos")
    weights = [tuple(a + b for a, b in zip(w, weight)) for w in module.weights]
    flags = module.flags if not any(weight) else replace(module.flags, full_u=False)
    twisted = WeightedModule(module.field, module.ell, module.datum, weights, module.actions, flags=flags,
                             provenance=f"twist({module.provenance},{','.join(map(str, weight))})",
                             r=module.r, dim=module.dim)
    return twisted


def restrict(module: WeightedModule, side: str) -> WeightedModule:
    """Restrição a u_ζ(b⁻) (minus) ou u_ζ(b⁺) (plus)."""
    if side not in (MINUS, PLUS):
        raise ValueError(f"Lado inválido: {side}")
    kept = "F" if side == MINUS else "E"
    actions = {key: m for key, m in module.actions.items() if key[0] in (kept, "K")}
    flags = LiftFlags(torus_compatible=module.flags.torus_compatible,
                      borel_minus=side == MINUS,
                      borel_plus=side == PLUS)
    return WeightedModule(module.field, module.ell, module.datum, module.weights, actions, flags=flags,
                          provenance=f"res({module.provenance},{side})", r=module.r, dim=module.dim)


def omega_twist(module: WeightedModule) -> WeightedModule:
    """Pull-back pelo automorfismo ω: E ↔ F, K ↦ K⁻¹."""
    swap = {"E": "F", "F": "E"}
    actions = {}
    for (letter, i, n), matrix in module.actions.items():
        if letter == "K":
            actions[(letter, i, n)] = module.action("K", i, -1)
        else:
            actions[(swap[letter], i, n)] = matrix
    weights = None if module.weights is None else [tuple(-c for c in w) for w in module.weights]
    flags = replace(module.flags, borel_minus=module.flags.borel_plus, borel_plus=module.flags.borel_minus)
    return WeightedModule(module.field, module.ell, module.datum, weights, actions, flags=flags,
                          provenance=f"omega({module.provenance})", r=module.r, dim=module.dim)


# Submódulos e quocientes

def closure(module: WeightedModule, vectors) -> tuple[np.ndarray, list]:
    """Submódulo gerado: base escalonada reduzida (linhas) e colunas pivô."""
    field = module.field
    reduced, pivots = matrixmath.row_space(field, np.atleast_2d(np.asarray(vectors, dtype=field.dtype)))
    operators = list(module.actions.values())
    pending = list(reduced)
    while pending:
        vector = pending.pop()
        for operator in operators:
            image = field.matmul(operator, vector.reshape(-1, 1))[:, 0]
            rest = matrixmath.reduce_vector(field, reduced, pivots, image)
            if field.nonzero_mask(rest).any():
                reduced, pivots = matrixmath.row_reduce(field, np.vstack([reduced, rest]))
                pending.append(rest)
    return reduced, pivots


def submodule(module: WeightedModule, basis: np.ndarray, pivots: list, provenance: str) -> WeightedModule:
    """Submódulo com base dada pelas linhas escalonadas; coordenadas lidas nas colunas pivô."""
    field = module.field
    size = len(pivots)
    actions = {}
    for key, matrix in module.actions.items():
        image = field.matmul(matrix, basis.T)
        actions[key] = image[pivots, :].copy() if size else field.zeros((0, 0))
    weights = None
    flags = module.flags
    if module.weights is not None and _rows_homogeneous(module, basis):
        weights = [module.weights[c] for c in pivots]
    else:
        flags = replace(flags, torus_compatible=False)
    return WeightedModule(field, module.ell, module.datum, weights, actions, flags=flags,
                          provenance=provenance, r=module.r, dim=size)


def quotient(module: WeightedModule, basis: np.ndarray, pivots: list, provenance: str) -> WeightedModule:
    """M/S, com base nas colunas não pivô da forma escalonada de S."""
    field = module.field
    kept = [c for c in range(module.dim) if c not in set(pivots)]
    actions = {}
    for key, matrix in module.actions.items():
        result = field.zeros((len(kept), len(kept)))
        for column, c in enumerate(kept):
            image = matrixmath.reduce_vector(field, basis, pivots, matrix[:, c]) if pivots else matrix[:, c]
            result[:, column] = image[kept]
        actions[key] = result
    weights = None
    flags = module.flags
    if module.weights is not None and _rows_homogeneous(module, basis):
        weights = [module.weights[c] for c in kept]
    else:
        flags = replace(flags, torus_compatible=False)
    return WeightedModule(field, module.ell, module.datum, weights, actions, flags=flags,
                          provenance=provenance, r=module.r, dim=len(kept))


def _rows_homogeneous(module: WeightedModule, basis: np.ndarray) -> bool:
    field = module.field
    for row in basis:
        support = np.flatnonzero(field.nonzero_mask(row))
        if len({module.weights[c] for c in support}) > 1:
            return False
    return True


def _weight_blocks(module: WeightedModule) -> dict:
    blocks = {}
    for t, weight in enumerate(module.weights):
        blocks.setdefault(weight, []).append(t)
    return blocks


def _random_vector(module: WeightedModule, indices, rng) -> np.ndarray:
    field = module.field
    vector = field.zeros(module.dim)
    while not field.nonzero_mask(vector).any():
        for t in indices:
            vector[t] = field.random_scalar(rng)
    return vector


def random_weight_submodule(module: WeightedModule, rng) -> tuple[np.ndarray, list]:
    """Submódulo gerado por um vetor de peso aleatório."""
    if module.weights is None:
        raise ValueError("Submódulo de peso exige módulo com pesos")
    blocks = _weight_blocks(module)
    weights = sorted(blocks)
    chosen = weights[int(rng.integers(0, len(weights)))]
    return closure(module, _random_vector(module, blocks[chosen], rng))


def randsub(module: WeightedModule, rng) -> WeightedModule:
    basis, pivots = random_weight_submodule(module, rng)
    return submodule(module, basis, pivots, f"randsub({module.provenance})")


def quot(module: WeightedModule, rng) -> WeightedModule:
    basis, pivots = random_weight_submodule(module, rng)
    return quotient(module, basis, pivots, f"quot({module.provenance})")


def cyclic(module: WeightedModule, rng) -> WeightedModule:
    """Submódulo cíclico gerado por um vetor aleatório fora dos espaços de peso; só é u⁰-graduado."""
    basis, pivots = closure(module, _random_vector(module, range(module.dim), rng))
    result = submodule(module, basis, pivots, f"cyclic({module.provenance})")
    if result.weights is not None:
        result = WeightedModule(result.field, result.ell, result.datum, None, result.actions,
                                flags=replace(result.flags, torus_compatible=False),
                                provenance=result.provenance, r=result.r, dim=result.dim)
    return result


# Módulos simples

def _depth(datum, top: tuple, weight: tuple):
    return sum(datum.from_weight(tuple(a - b for a, b in zip(top, weight))))


def radical_below(module: WeightedModule, top: tuple) -> tuple[np.ndarray, list]:
    """
    Maior submódulo sem componente no peso top: R_top = 0 e
    R_μ = {v ∈ M_μ : E_i^{(n)} v ∈ R_{μ+nα_i}} processando μ por profundidade.
    """
    field = module.field
    datum = module.datum
    blocks = _weight_blocks(module)
    raising = [(key, m) for key, m in module.actions.items() if key[0] == "E"]
    constraints = {top: field.identity(len(blocks.get(top, [])))}
    rows = []
    for weight in sorted(blocks, key=lambda w: (_depth(datum, top, w), w)):
        if weight == top:
            continue
        indices = blocks[weight]
        equations = []
        for (letter, i, n), matrix in raising:
            shift = datum.to_weight(datum.simple_root(i))
            target = tuple(a + n * b for a, b in zip(weight, shift))
            if target not in blocks:
                continue
            condition = constraints.get(target)
            if condition is None or condition.shape[0] == 0:
                continue
            block = matrix[np.ix_(blocks[target], indices)]
            equations.append(field.matmul(condition, block))
        if equations:
            kernel = matrixmath.nullspace(field, np.concatenate(equations, axis=0))
        else:
            kernel = field.identity(len(indices))
        # vetores w com w ∈ R_μ ⇔ C_μ w = 0
        constraints[weight] = matrixmath.nullspace(field, kernel) if kernel.shape[0] else field.identity(len(indices))
        for row in kernel:
            vector = field.zeros(module.dim)
            vector[indices] = row
            rows.append(vector)
    if not rows:
        return field.zeros((0, module.dim)), []
    return matrixmath.row_reduce(field, np.array(rows, dtype=field.dtype))


def simple(context: KernelContext, weight) -> WeightedModule:
    """L(λ) = Ẑ(λ)/rad, certificado: radical nulo e todo vetor da base gera L."""
    weight = _check_weight(context, weight)
    standard = verma(context, weight)
    basis, pivots = radical_below(standard, weight)
    module = quotient(standard, basis, pivots, f"simple({','.join(map(str, weight))})")
    if all(0 <= c < context.bound for c in weight):
        # restrito: restrição do simples de U_ζ
        module.flags = replace(module.flags, full_u=True)
    certify_simple(module, weight)
    return module


def certify_simple(module: WeightedModule, top: tuple):
    field = module.field
    rest, _ = radical_below(module, top)
    if rest.shape[0]:
        raise InternalInconsistencyError(f"{module.provenance}: radical não nulo após o quociente")
    for t in range(module.dim):
        vector = field.zeros(module.dim)
        vector[t] = field.one
        span, pivots = closure(module, vector)
        if len(pivots) != module.dim:
            raise InternalInconsistencyError(f"{module.provenance}: vetor {t} não gera o módulo")
    logger.debug("%s certificado (dim %d)", module.provenance, module.dim)


# Verificações de caráter e de dualidade

def weight_basis_over_am(context: KernelContext, module: WeightedModule, m: int, side: str = MINUS):
    """
    Vetores de peso v_1..v_t (linhas da matriz devolvida) com {∫_m v_k} independentes e
    t·dim A_m = dim M, escolhidos gulosamente entre os vetores da base; None se não existirem.
    """
    field = module.field
    algebra = context.algebra(AlgebraDescriptor(AlgebraKind.A_M, m=m, side=side))
    top = context.bound - 1
    image = field.identity(module.dim)
    for s in sorted(algebra.positions):
        image = field.matmul(image, module.root_action(context, side, s, top))
    _, pivots = matrixmath.row_reduce(field, image)
    if len(pivots) * algebra.dimension != module.dim:
        return None
    return field.identity(module.dim)[list(pivots)]


def character_decomposition(datum, character: Character, standard: Character) -> Counter | None:
    """
    Decomposição unitriangular de um caráter em translados do caráter de Ẑ(0);
    None se algum coeficiente ficar negativo.
    """
    remaining = Counter(character)
    result = Counter()
    while +remaining:
        weight = max((w for w, c in remaining.items() if c), key=lambda w: (sum(datum.from_weight(w)), w))
        count = remaining[weight]
        if count < 0:
            return None
        result[weight] += count
        for mu, c in standard.shifted(weight).items():
            remaining[mu] -= count * c
            if remaining[mu] < 0:
                return None
        remaining = Counter({w: c for w, c in remaining.items() if c})
    return result


def verma_character_test(context: KernelContext, module: WeightedModule) -> bool:
    """Caráter de M é combinação não negativa de caracteres de Ẑ(λ)."""
    standard = Character.of(verma(context, (0,) * context.datum.rank))
    return character_decomposition(context.datum, Character.of(module), standard) is not None


def intertwiners(source: WeightedModule, target: WeightedModule) -> list:
    """Base do espaço de morfismos T com Tρ_X(g) = ρ_Y(g)T, T preservando pesos."""
    _same_setting(source, target)
    field = source.field
    if source.weights is None or target.weights is None:
        raise ValueError("Morfismos calculados por blocos de peso")
    source_blocks = _weight_blocks(source)
    target_blocks = _weight_blocks(target)
    unknowns = []
    for weight, columns in source_blocks.items():
        for row in target_blocks.get(weight, []):
            for column in columns:
                unknowns.append((row, column))
    position = {u: k for k, u in enumerate(unknowns)}
    equations = []
    keys = set(source.actions) & set(target.actions)
    for key in sorted(keys):
        x, y = source.actions[key], target.actions[key]
        # (T X)[a, b] − (Y T)[a, b] = Σ_c T[a,c]X[c,b] − Σ_c Y[a,c]T[c,b]
        for a in range(target.dim):
            for b in range(source.dim):
                row = {}
                for c in np.flatnonzero(field.nonzero_mask(x[:, b])):
                    if (a, int(c)) in position:
                        accumulate(field, row, {position[(a, int(c))]: x[c, b]})
                for c in np.flatnonzero(field.nonzero_mask(y[a, :])):
                    if (int(c), b) in position:
                        accumulate(field, row, {position[(int(c), b)]: field.neg(y[a, c])})
                row = prune(field, row)
                if row:
                    vector = field.zeros(len(unknowns))
                    for k, v in row.items():
                        vector[k] = v
                    equations.append(vector)
    if not unknowns:
        return []
    if equations:
        solutions = matrixmath.nullspace(field, np.array(equations, dtype=field.dtype))
    else:
        solutions = field.identity(len(unknowns))
    result = []
    for solution in solutions:
        matrix = field.zeros((target.dim, source.dim))
        for k, (a, b) in enumerate(unknowns):
            matrix[a, b] = solution[k]
        result.append(matrix)
    return result


def isomorphic(source: WeightedModule, target: WeightedModule, rng) -> bool:
    """Procura um isomorfismo explícito: combinação aleatória de morfismos que seja invertível."""
    if source.dim != target.dim or Character.of(source) != Character.of(target):
        return False
    field = source.field
    basis = intertwiners(source, target)
    if not basis:
        return False
    for _ in range(4):
        candidate = field.zeros((target.dim, source.dim))
        for matrix in basis:
            candidate = field.normalize(candidate + field.scale(matrix, field.random_scalar(rng)))
        if matrixmath.rank(field, candidate) == source.dim:
            return True
    return False


def zdual_check(context: KernelContext, weight, rng) -> dict:
    """dual(Ẑ(λ)) ≅ Ẑ(2(p^rℓ−1)ρ − λ) e o mesmo para Ẑ': caráter e isomorfismo explícito."""
    weight = _check_weight(context, weight)
    mirror = tuple(2 * (context.bound - 1) - c for c in weight)
    report = {}
    for name, build in (("verma", verma), ("coverma", coverma)):
        dualized = dual(build(context, weight))
        expected = build(context, mirror)
        report[f"{name}_character"] = Character.of(dualized) == Character.of(expected)
        report[f"{name}_iso"] = report[f"{name}_character"] and isomorphic(dualized, expected, rng)
    logger.info("Zdual λ=%s: %s", weight, report)
    return report


def projective_cover_check(context: KernelContext, weight) -> dict:
    """Ẑ(λ) é livre de posto 1 sobre u_ζ(b⁻) (cabeça e socle de dimensão 1); Ẑ'(λ) tem E-socle λ."""
    weight = _check_weight(context, weight)
    field = context.field
    standard = verma(context, weight)
    lowering = [m for key, m in standard.actions.items() if key[0] == "F"]
    image_rank = matrixmath.rank(field, np.concatenate(lowering, axis=1))
    socle = matrixmath.nullspace(field, np.concatenate(lowering, axis=0))
    costandard = coverma(context, weight)
    raising = [m for key, m in costandard.actions.items() if key[0] == "E"]
    e_socle = matrixmath.nullspace(field, np.concatenate(raising, axis=0))
    e_socle_weights = {costandard.weights[int(np.flatnonzero(field.nonzero_mask(row))[0])] for row in e_socle}
    bottom = tuple(c - 2 * (context.bound - 1) for c in weight)
    socle_weights = {standard.weights[int(np.flatnonzero(field.nonzero_mask(row))[0])] for row in socle}
    return {
        "head_dimension": standard.dim - image_rank,
        "socle_dimension": socle.shape[0],
        "socle_weight_ok": socle_weights == {bottom},
        "e_socle_dimension": e_socle.shape[0],
        "e_socle_weight_ok": e_socle_weights == {weight},
    }


# Exportação

def export_module(module: WeightedModule) -> str:
    """Texto com dimensão, pesos e as matrizes de cada gerador."""
    field = module.field
    lines = [f"# {module.provenance}", f"dim {module.dim}", f"field {field.label} ell {module.ell} r {module.r}"]
    if module.weights is not None:
        lines.append("weights " + " ".join(",".join(str(c) for c in w) for w in module.weights))
    for letter, i, n in sorted(module.actions):
        lines.append(f"action {letter} {i} {n}")
        for row in module.actions[(letter, i, n)]:
            lines.append(" ".join(field.format(x) for x in row))
    return "\n".join(lines) + "\n"
