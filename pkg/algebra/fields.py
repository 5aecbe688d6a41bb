from fractions import Fraction
import logging
import operator

import numpy as np
import sympy

logger = logging.getLogger(__name__)

# Maior p aceito pelo corpo primo vetorizado em int64.
MAX_PRIME = 1 << 16
_FLOAT_EXACT_LIMIT = 1 << 52


def _is_prime(n: int) -> bool:
    return n >= 2 and bool(sympy.isprime(n))


def _multiplicative_order(p: int, ell: int) -> int:
    return int(sympy.n_order(p, ell))


class PrimeField:
    """
    Corpo primo F_p com uma raiz primitiva ℓ-ésima da unidade ζ.
    Escalares são inteiros do Python; matrizes são arrays int64 reduzidos mod p.
    """
    dtype = np.int64
    degree = 1

    def __init__(self, p: int, ell: int):
        if not _is_prime(p):
            raise ValueError(f"{p} não é primo")
        if p >= MAX_PRIME:
            raise ValueError(f"p={p} grande demais para aritmética vetorizada (limite {MAX_PRIME})")
        if (p - 1) % ell:
            raise ValueError(f"F_{p} não contém raízes primitivas de ordem {ell}")
        self.p = p
        self.ell = ell
        self.characteristic = p
        self.zero = 0
        self.one = 1
        self.zeta = self._find_zeta()
        self._zeta_powers = [pow(self.zeta, k, p) for k in range(ell)]
        self.label = f"F{p}"

    def _find_zeta(self) -> int:
        prime_factors = sympy.primefactors(self.ell)
        for x in range(2, self.p):
            if pow(x, self.ell, self.p) != 1:
                continue
            if all(pow(x, self.ell // q, self.p) != 1 for q in prime_factors):
                return x
        raise ValueError("Raiz primitiva não encontrada")

    # escalares

    def from_int(self, n: int) -> int:
        return int(n) % self.p

    def from_fraction(self, value) -> int:
        value = Fraction(value)
        if value.denominator % self.p == 0:
            raise ZeroDivisionError(f"Denominador {value.denominator} se anula em F_{self.p}")
        return value.numerator * pow(value.denominator, -1, self.p) % self.p

    def coerce(self, x) -> int:
        return self.from_fraction(x) if isinstance(x, Fraction) else int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (int(a) * int(b)) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a = int(a) % self.p
        if a == 0:
            raise ZeroDivisionError("Inverso de zero")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return int(a) % self.p == 0

    def power(self, a, n: int):
        if n < 0:
            return pow(self.inv(a), -n, self.p)
        return pow(int(a), n, self.p)

    def zeta_power(self, k: int):
        return self._zeta_powers[k % self.ell]

    def format(self, a) -> str:
        return str(int(a) % self.p)

    def parse(self, text: str):
        return int(text) % self.p

    def random_scalar(self, rng):
        return int(rng.integers(0, self.p))

    # matrizes

    def array(self, rows) -> np.ndarray:
        rows = [[self.coerce(x) for x in row] for row in rows]
        return np.array(rows, dtype=np.int64).reshape(len(rows), -1) if rows else np.zeros((0, 0), dtype=np.int64)

    def vector(self, values) -> np.ndarray:
        return np.array([self.coerce(x) for x in values], dtype=np.int64)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def identity(self, n: int) -> np.ndarray:
        return np.identity(n, dtype=np.int64)

    def normalize(self, matrix) -> np.ndarray:
        return np.asarray(matrix, dtype=np.int64) % self.p

    def matmul(self, a, b) -> np.ndarray:
        if a.shape[-1] == 0:
            return np.zeros(a.shape[:-1] + b.shape[1:], dtype=np.int64)
        # produtos em float64 são exatos enquanto n·(p−1)² < 2^52
        if a.shape[-1] * (self.p - 1) ** 2 < _FLOAT_EXACT_LIMIT:
            product = a.astype(np.float64) @ b.astype(np.float64)
            return product.astype(np.int64) % self.p
        return (a @ b) % self.p

    def kron(self, a, b) -> np.ndarray:
        return np.kron(a, b) % self.p

    def scale(self, matrix, s) -> np.ndarray:
        return (matrix * int(s)) % self.p

    def outer(self, u, v) -> np.ndarray:
        return np.outer(u, v) % self.p

    def nonzero_mask(self, matrix) -> np.ndarray:
        return np.asarray(matrix) != 0

    def equal(self, a, b) -> bool:
        return a.shape == b.shape and not np.any((a - b) % self.p)

    def describe(self) -> dict:
        return {"field": self.label, "p": self.p, "n": 1, "ell": self.ell, "zeta": self.zeta}


class ResidueElement:
    """Elemento de base[x]/(f), f mônico; coeficientes do grau mais baixo ao mais alto."""
    __slots__ = ("field", "coeffs")

    def __init__(self, field: "ResidueField", coeffs):
        self.field = field
        self.coeffs = coeffs

    def _lift(self, other):
        if isinstance(other, ResidueElement):
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.from_fraction(other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.field.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.field.sub(self, other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.field.sub(other, self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.field.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.field.div(self, other)

    def __neg__(self):
        return self.field.neg(self)

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"{self.field.label}{self.field.format(self)}"


class ResidueField:
    """
    Corpo k[x]/(f) com ζ = x: Q(ζ_ℓ) com f = Φ_ℓ, ou F_{p^n} com f fator
    irredutível de grau n de Φ_ℓ mod p.
    """
    dtype = object

    def __init__(self, modulus, ell: int, characteristic: int, label: str):
        # modulus: coeficientes de f do grau mais baixo ao mais alto, mônico
        self.characteristic = characteristic
        self.ell = ell
        self.label = label
        self._base = (lambda c: Fraction(c)) if characteristic == 0 else (lambda c: _mod_fraction(c, characteristic))
        self.modulus = tuple(self._base(c) for c in modulus)
        self.degree = len(self.modulus) - 1
        self.zero = ResidueElement(self, tuple(self._base(0) for _ in range(self.degree)))
        self.one = self.from_fraction(1)
        self.zeta = self._reduce([0, 1])
        self._zeta_powers = [self.zero] * ell
        current = self.one
        for k in range(ell):
            self._zeta_powers[k] = current
            current = self.mul(current, self.zeta)
        if current != self.one or any(self._zeta_powers[k] == self.one for k in range(1, ell)):
            raise ValueError(f"x não tem ordem {ell} em {label}")
        self._mul_ufunc = np.frompyfunc(operator.mul, 2, 1)
        self._bool_ufunc = np.frompyfunc(bool, 1, 1)

    @staticmethod
    def cyclotomic(ell: int) -> "ResidueField":
        x = sympy.Symbol("x")
        coefficients = [int(c) for c in sympy.Poly(sympy.cyclotomic_poly(ell, x), x).all_coeffs()]
        return ResidueField(list(reversed(coefficients)), ell, 0, f"Q(z{ell})")

    @staticmethod
    def finite(p: int, ell: int) -> "ResidueField":
        n = _multiplicative_order(p, ell)
        x = sympy.Symbol("x")
        _, factors = sympy.Poly(sympy.cyclotomic_poly(ell, x), x, modulus=p).factor_list()
        candidates = sorted(
            tuple(int(c) % p for c in factor.all_coeffs())
            for factor, _ in factors if factor.degree() == n
        )
        if not candidates:
            raise ValueError(f"Φ_{ell} sem fator de grau {n} mod {p}")
        return ResidueField(list(reversed(candidates[0])), ell, p, f"F{p}^{n}")

    # aritmética interna

    def _reduce(self, poly) -> ResidueElement:
        poly = [self._base(c) for c in poly]
        n = self.degree
        for k in range(len(poly) - 1, n - 1, -1):
            c = poly[k]
            if c:
                for i in range(n):
                    poly[k - n + i] = self._base(poly[k - n + i] - c * self.modulus[i])
                poly[k] = self._base(0)
        poly = poly[:n] + [self._base(0)] * (n - len(poly))
        return ResidueElement(self, tuple(poly))

    def from_int(self, n: int) -> ResidueElement:
        return self.from_fraction(Fraction(n))

    def from_fraction(self, value) -> ResidueElement:
        return self._reduce([self._base(Fraction(value))])

    def coerce(self, x) -> ResidueElement:
        if isinstance(x, ResidueElement):
            return x
        return self.from_fraction(x)

    def add(self, a, b):
        return ResidueElement(self, tuple(self._base(x + y) for x, y in zip(a.coeffs, b.coeffs)))

    def sub(self, a, b):
        return ResidueElement(self, tuple(self._base(x - y) for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a):
        return ResidueElement(self, tuple(self._base(-x) for x in a.coeffs))

    def mul(self, a, b):
        if not a or not b:
            return self.zero
        product = [self._base(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        product[i + j] += x * y
        return self._reduce(product)

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("Inverso de zero")
        # resolve a·c = 1 pela matriz de multiplicação por a
        n = self.degree
        columns = []
        basis = self.one
        for _ in range(n):
            columns.append(list(self.mul(a, basis).coeffs))
            basis = self.mul(basis, self.zeta)
        rows = [[columns[j][i] for j in range(n)] + [self.one.coeffs[i]] for i in range(n)]
        for c in range(n):
            pivot = next(r for r in range(c, n) if rows[r][c])
            rows[c], rows[pivot] = rows[pivot], rows[c]
            factor = self._base_inverse(rows[c][c])
            rows[c] = [self._base(x * factor) for x in rows[c]]
            for r in range(n):
                if r != c and rows[r][c]:
                    f = rows[r][c]
                    rows[r] = [self._base(x - f * y) for x, y in zip(rows[r], rows[c])]
        solution = [rows[i][n] for i in range(n)]
        # solução nas coordenadas da base 1, ζ, ζ², ...
        return self._reduce(solution)

    def _base_inverse(self, c):
        if self.characteristic == 0:
            return 1 / Fraction(c)
        return pow(int(c), -1, self.characteristic)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return not a

    def power(self, a, n: int):
        if n < 0:
            a, n = self.inv(a), -n
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def zeta_power(self, k: int):
        return self._zeta_powers[k % self.ell]

    def format(self, a) -> str:
        return "[" + ",".join(_format_base(c) for c in a.coeffs) + "]"

    def parse(self, text: str):
        body = text.strip().lstrip("[").rstrip("]")
        return self._reduce([Fraction(c) for c in body.split(",")] if body else [])

    def random_scalar(self, rng):
        bound = self.characteristic or 4
        low = 0 if self.characteristic else -bound
        return self._reduce([int(rng.integers(low, bound)) for _ in range(self.degree)])

    # matrizes

    def zeros(self, shape) -> np.ndarray:
        matrix = np.empty(shape, dtype=object)
        matrix.fill(self.zero)
        return matrix

    def identity(self, n: int) -> np.ndarray:
        matrix = self.zeros((n, n))
        for i in range(n):
            matrix[i, i] = self.one
        return matrix

    def array(self, rows) -> np.ndarray:
        rows = list(rows)
        if not rows:
            return self.zeros((0, 0))
        matrix = self.zeros((len(rows), len(rows[0])))
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                matrix[i, j] = self.coerce(x)
        return matrix

    def vector(self, values) -> np.ndarray:
        values = list(values)
        result = self.zeros(len(values))
        for i, x in enumerate(values):
            result[i] = self.coerce(x)
        return result

    def normalize(self, matrix) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=object)
        if matrix.size == 0:
            return self.zeros(matrix.shape)
        return np.frompyfunc(self.coerce, 1, 1)(matrix)

    def matmul(self, a, b) -> np.ndarray:
        if a.shape[-1] == 0:
            return self.zeros(a.shape[:-1] + b.shape[1:])
        return a @ b

    def kron(self, a, b) -> np.ndarray:
        return np.kron(a, b)

    def scale(self, matrix, s) -> np.ndarray:
        if matrix.size == 0:
            return matrix.copy()
        return np.frompyfunc(lambda x: x * s, 1, 1)(matrix)

    def outer(self, u, v) -> np.ndarray:
        if u.size == 0 or v.size == 0:
            return self.zeros((u.size, v.size))
        return self._mul_ufunc.outer(u, v)

    def nonzero_mask(self, matrix) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=object)
        if matrix.size == 0:
            return np.zeros(matrix.shape, dtype=bool)
        return self._bool_ufunc(matrix).astype(bool)

    def equal(self, a, b) -> bool:
        return a.shape == b.shape and not self.nonzero_mask(a - b).any()

    def describe(self) -> dict:
        return {"field": self.label, "p": self.characteristic, "n": self.degree, "ell": self.ell,
                "modulus": [_format_base(c) for c in self.modulus]}


def _mod_fraction(c, p: int) -> int:
    c = Fraction(c)
    return c.numerator * pow(c.denominator, -1, p) % p


def _format_base(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def build_field(kind: str, ell: int, p: int | None = None):
    """Constrói o corpo de coeficientes: 'cyclo' → Q(ζ_ℓ); 'fq' → F_{p^n}, n = ordem de p mod ℓ."""
    if kind == "cyclo":
        return ResidueField.cyclotomic(ell)
    if kind == "fq":
        if p is None:
            raise ValueError("Corpo finito requer p")
        if p % ell == 0:
            raise ValueError(f"p={p} divide ℓ={ell}")
        n = _multiplicative_order(p, ell)
        field = PrimeField(p, ell) if n == 1 else ResidueField.finite(p, ell)
        logger.info("corpo %s com ζ de ordem %d", field.label, ell)
        return field
    raise ValueError(f"Corpo desconhecido: {kind}")
