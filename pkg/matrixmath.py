import numpy as np
from typing import List


def multiply_matrices(field, matrices: List[np.ndarray], n: int) -> np.ndarray:
    """Multiplica uma lista de matrizes n×n em ordem."""
    result = field.identity(n)
    for matrix in matrices:
        result = field.matmul(result, matrix)
    return result


def matrix_power(field, matrix: np.ndarray, exponent: int) -> np.ndarray:
    """Potência inteira não negativa de uma matriz quadrada."""
    result = field.identity(matrix.shape[0])
    base = matrix
    while exponent:
        if exponent & 1:
            result = field.matmul(result, base)
        base = field.matmul(base, base)
        exponent >>= 1
    return result


def row_reduce(field, matrix) -> tuple[np.ndarray, list]:
    """Forma escalonada reduzida por linhas; devolve a matriz e as colunas pivô."""
    reduced = field.normalize(np.array(matrix, dtype=field.dtype, copy=True))
    if reduced.ndim != 2:
        raise ValueError("row_reduce espera uma matriz")
    rows, columns = reduced.shape
    pivots = []
    r = 0
    for c in range(columns):
        if r == rows:
            break
        hits = np.flatnonzero(field.nonzero_mask(reduced[r:, c]))
        if hits.size == 0:
            continue
        pivot = r + int(hits[0])
        if pivot != r:
            reduced[[r, pivot]] = reduced[[pivot, r]]
        reduced[r] = field.scale(reduced[r], field.inv(reduced[r, c]))
        others = np.flatnonzero(field.nonzero_mask(reduced[:, c]))
        others = others[others != r]
        if others.size:
            reduced[others] = field.normalize(reduced[others] - field.outer(reduced[others, c], reduced[r]))
        pivots.append(c)
        r += 1
    return reduced[:r] if r < rows else reduced, pivots


def rank(field, matrix) -> int:
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0
    return len(row_reduce(field, matrix)[1])


def nullspace(field, matrix) -> np.ndarray:
    """Base (em linhas) do núcleo à direita: vetores x com A x = 0."""
    matrix = np.asarray(matrix)
    columns = matrix.shape[1]
    if matrix.shape[0] == 0:
        return field.identity(columns)
    reduced, pivots = row_reduce(field, matrix)
    free = [c for c in range(columns) if c not in set(pivots)]
    basis = field.zeros((len(free), columns))
    for k, f in enumerate(free):
        basis[k, f] = field.one
        for row, c in enumerate(pivots):
            basis[k, c] = field.normalize(np.array([-reduced[row, f]], dtype=field.dtype))[0]
    return basis


def row_space(field, vectors) -> tuple[np.ndarray, list]:
    """Base escalonada do espaço gerado pelas linhas."""
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return field.zeros((0, vectors.shape[-1] if vectors.ndim == 2 else 0)), []
    return row_reduce(field, vectors)


def reduce_vector(field, reduced: np.ndarray, pivots: list, vector: np.ndarray) -> np.ndarray:
    """Reduz um vetor módulo as linhas de uma forma escalonada reduzida."""
    result = np.array(vector, dtype=field.dtype, copy=True)
    for row, c in enumerate(pivots):
        if field.nonzero_mask(result[c:c + 1])[0]:
            result = field.normalize(result - field.scale(reduced[row], result[c]))
    return result


def solve(field, matrix, rhs) -> np.ndarray | None:
    """Resolve A X = B (B vetor ou matriz); devolve uma solução ou None se inconsistente."""
    matrix = np.asarray(matrix)
    rhs = np.asarray(rhs)
    vector_rhs = rhs.ndim == 1
    if vector_rhs:
        rhs = rhs.reshape(-1, 1)
    rows, columns = matrix.shape
    if rows == 0:
        if field.nonzero_mask(rhs).any():
            return None
        solution = field.zeros((columns, rhs.shape[1]))
        return solution[:, 0] if vector_rhs else solution
    augmented = np.concatenate([field.normalize(matrix), field.normalize(rhs)], axis=1)
    reduced, pivots = row_reduce(field, augmented)
    if any(c >= columns for c in pivots):
        return None
    solution = field.zeros((columns, rhs.shape[1]))
    for row, c in enumerate(pivots):
        solution[c] = reduced[row, columns:]
    return solution[:, 0] if vector_rhs else solution


def inverse(field, matrix) -> np.ndarray | None:
    n = matrix.shape[0]
    return solve(field, matrix, field.identity(n))


def in_row_span(field, vectors, vector) -> bool:
    vectors = np.asarray(vectors)
    if vectors.size == 0:
        return not field.nonzero_mask(vector).any()
    return rank(field, np.vstack([vectors, vector])) == rank(field, vectors)


def direct_sum(field, blocks: List[np.ndarray]) -> np.ndarray:
    """Matriz bloco-diagonal."""
    size = sum(block.shape[0] for block in blocks)
    result = field.zeros((size, size))
    offset = 0
    for block in blocks:
        n = block.shape[0]
        result[offset:offset + n, offset:offset + n] = block
        offset += n
    return result


def stack_columns(field, matrices: List[np.ndarray], rows: int) -> np.ndarray:
    """Concatena matrizes lado a lado (imagem conjunta)."""
    matrices = [m for m in matrices if m.shape[1]]
    if not matrices:
        return field.zeros((rows, 0))
    return np.concatenate(matrices, axis=1)
