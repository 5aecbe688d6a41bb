"""
Resoluções livres minimais graduadas de k sobre u_ζ(u±) e dimensões de H^n(u_ζ(b±), k).
"""
from dataclasses import dataclass
from math import comb
import logging

import numpy as np

from algebra.kernelalg import PLUS, AlgebraDescriptor, AlgebraKind, InternalInconsistencyError, KernelAlgebra, KernelContext
from algebra.rootdata import format_root
import matrixmath

logger = logging.getLogger(__name__)


@dataclass
class GradedBetti:
    """Pesos (coordenadas de raízes simples) dos geradores de cada P_n."""
    side: str
    degrees: list
    generators: list

    def betti_numbers(self) -> list:
        return [len(weights) for weights in self.degrees]

    def to_record(self) -> dict:
        return {"side": self.side, "betti": self.betti_numbers(),
                "weights": [[format_root(w) for w in weights] for weights in self.degrees]}


class _FreeModule:
    """A^t com geradores de pesos dados; base (j, b) na ordem j·dim A + b."""

    def __init__(self, algebra: KernelAlgebra, weights: list):
        self.algebra = algebra
        self.weights = weights
        size = algebra.dimension
        self.dim = len(weights) * size
        self.basis_weights = [tuple(a + b for a, b in zip(w, algebra.weight(key)))
                              for w in weights for key in algebra.basis]
        self._size = size

    def left(self, matrix: np.ndarray) -> np.ndarray:
        field = self.algebra.field
        return field.kron(field.identity(len(self.weights)), matrix)

    def unit(self, j: int) -> int:
        return j * self._size + self.algebra.index[self.algebra.unit_key()]


def _blocks(weights: list) -> dict:
    blocks = {}
    for t, weight in enumerate(weights):
        blocks.setdefault(weight, []).append(t)
    return blocks


def _homogeneous_kernel(field, matrix: np.ndarray, source_weights: list, size: int) -> list:
    """Base homogênea do núcleo de um mapa que preserva pesos."""
    kernel = []
    for weight, columns in sorted(_blocks(source_weights).items()):
        block = matrix[:, columns]
        rows = np.flatnonzero(field.nonzero_mask(block).any(axis=1))
        basis = matrixmath.nullspace(field, block[rows, :]) if rows.size else field.identity(len(columns))
        for row in basis:
            vector = field.zeros(size)
            vector[columns] = row
            kernel.append((weight, vector))
    return kernel


def _minimal_generators(free: _FreeModule, kernel: list) -> list:
    """Vetores homogêneos do núcleo que completam A⁺·K a K."""
    algebra = free.algebra
    field = algebra.field
    if not kernel:
        return []
    operators = [free.left(algebra.left_matrix(symbol)) for symbol in algebra.generators()]
    images = [field.matmul(operator, vector.reshape(-1, 1))[:, 0] for _, vector in kernel for operator in operators]
    if images:
        reduced, pivots = matrixmath.row_space(field, np.array(images, dtype=field.dtype))
    else:
        reduced, pivots = field.zeros((0, free.dim)), []
    chosen = []
    for weight, vector in sorted(kernel, key=lambda item: (sum(abs(c) for c in item[0]), item[0])):
        rest = matrixmath.reduce_vector(field, reduced, pivots, vector) if pivots else vector
        if field.nonzero_mask(rest).any():
            reduced, pivots = matrixmath.row_reduce(field, np.vstack([reduced, rest]))
            chosen.append((weight, vector))
    return chosen


def _differential(free: _FreeModule, target_size: int, generators: list) -> np.ndarray:
    """Matriz de A^{t'} → P com e_j ↦ z_j, coluna (j, b) = b·z_j."""
    algebra = free.algebra
    field = algebra.field
    size = algebra.dimension
    matrix = field.zeros((target_size, len(generators) * size))
    actions = [free.left(algebra.element_left_matrix({key: field.one})) for key in algebra.basis]
    for j, (_, z) in enumerate(generators):
        column = z.reshape(-1, 1)
        for b, action in enumerate(actions):
            matrix[:, j * size + b] = field.matmul(action, column)[:, 0]
    return matrix


def minimal_resolution(context: KernelContext, side: str = PLUS, n_max: int = 4) -> GradedBetti:
    """
    P_0 = A → k, e P_{n+1} cobre minimamente ker(P_n → P_{n−1}) por sizígias graduadas.
    A diferencial tem entradas no radical (verificado).
    """
    kind = AlgebraKind.U_PLUS if side == PLUS else AlgebraKind.U_MINUS
    algebra = context.algebra(AlgebraDescriptor(kind))
    field = context.field
    rank = context.datum.rank
    zero = (0,) * rank
    current = _FreeModule(algebra, [zero])
    # ε: A → k
    augmentation = field.zeros((1, current.dim))
    augmentation[0, current.unit(0)] = field.one
    degrees = [[zero]]
    generators_by_degree = [[]]
    differential = augmentation
    for n in range(1, n_max + 1):
        kernel = _homogeneous_kernel(field, differential, current.basis_weights, current.dim)
        generators = _minimal_generators(current, kernel)
        for _, z in generators:
            for j in range(len(current.weights)):
                if not field.is_zero(z[current.unit(j)]):
                    raise InternalInconsistencyError(f"Diferencial de grau {n} não é minimal")
        weights = [w for w, _ in generators]
        degrees.append(weights)
        generators_by_degree.append(generators)
        logger.debug("grau %d: %d geradores", n, len(weights))
        if not weights:
            break
        differential = _differential(current, current.dim, generators)
        current = _FreeModule(algebra, weights)
    while len(degrees) <= n_max:
        degrees.append([])
        generators_by_degree.append([])
    return GradedBetti(side, degrees, generators_by_degree)


def in_ell_lattice(context: KernelContext, weight: tuple) -> bool:
    """μ ∈ ℓX (μ em coordenadas de raízes simples), isto é, caráter trivial de u_ζ⁰."""
    return all(c % context.ell == 0 for c in context.datum.to_weight(weight))


def borel_cohomology_dims(context: KernelContext, side: str = PLUS, n_max: int = 4,
                          betti: GradedBetti | None = None) -> list:
    """dim H^n(u_ζ(b±), k) = #{geradores de P_n com peso em ℓX}."""
    betti = betti or minimal_resolution(context, side, n_max)
    return [sum(1 for w in weights if in_ell_lattice(context, w)) for weights in betti.degrees[:n_max + 1]]


def expected_borel_dims(context: KernelContext, n_max: int) -> list:
    """Função de Hilbert de um anel de polinômios em N geradores de grau 2."""
    n_positive = context.datum.n_positive
    return [comb(n // 2 + n_positive - 1, n_positive - 1) if n % 2 == 0 else 0 for n in range(n_max + 1)]


def strict_grading(betti: GradedBetti) -> bool:
    """Todo gerador de grau n tem altura ≥ n."""
    return all(abs(sum(w)) >= n for n, weights in enumerate(betti.degrees) for w in weights)


def torus_invariance_check(context: KernelContext, betti: GradedBetti) -> list:
    """
    Compara o critério do reticulado ℓX com os autovalores de K_i calculados diretamente
    nos geradores da resolução; devolve os geradores onde os dois discordam.
    """
    kind = AlgebraKind.U_PLUS if betti.side == PLUS else AlgebraKind.U_MINUS
    algebra = context.algebra(AlgebraDescriptor(kind))
    field = context.field
    datum = context.datum
    mismatches = []
    for n in range(1, len(betti.degrees)):
        generators = betti.generators[n]
        previous = _FreeModule(algebra, betti.degrees[n - 1])
        for weight, z in generators:
            trivial = True
            for i in range(1, datum.rank + 1):
                diagonal = field.vector([field.zeta_power(datum.inner(datum.simple_root(i), w))
                                         for w in previous.basis_weights])
                scaled = np.array([field.mul(a, b) for a, b in zip(diagonal, z)], dtype=field.dtype)
                support = np.flatnonzero(field.nonzero_mask(z))
                t = int(support[0])
                eigenvalue = field.div(scaled[t], z[t])
                if not field.equal(scaled, field.scale(z, eigenvalue)):
                    raise InternalInconsistencyError(f"Gerador de grau {n} não é autovetor de K_{i}")
                trivial = trivial and field.is_zero(field.sub(eigenvalue, field.one))
            if trivial != in_ell_lattice(context, weight):
                mismatches.append((n, weight))
    return mismatches
