from fractions import Fraction
from functools import lru_cache
import itertools
import logging

logger = logging.getLogger(__name__)


class NotInLocalizationError(ArithmeticError):
    """Coeficiente cujo denominador não é produto de geradores de S."""


class VanishingDenominatorError(ZeroDivisionError):
    """Denominador que se anula na especialização q ↦ ζ."""


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


class LaurentScalar:
    """Polinômio de Laurent Σ c_i q^{lowest+i} com coeficientes racionais exatos."""
    __slots__ = ("lowest", "coefficients")

    def __init__(self, lowest: int = 0, coefficients=()):
        coefficients = [Fraction(c) for c in coefficients]
        start, end = 0, len(coefficients)
        while start < end and coefficients[start] == 0:
            start += 1
        while end > start and coefficients[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coefficients", tuple(coefficients[start:end]))
        object.__setattr__(self, "lowest", lowest + start if end > start else 0)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentScalar é imutável")

    @classmethod
    def zero(cls) -> "LaurentScalar":
        return cls()

    @classmethod
    def one(cls) -> "LaurentScalar":
        return cls(0, (1,))

    @classmethod
    def constant(cls, value) -> "LaurentScalar":
        return cls(0, (value,))

    @classmethod
    def monomial(cls, exponent: int, coefficient=1) -> "LaurentScalar":
        return cls(exponent, (coefficient,))

    @classmethod
    def from_terms(cls, terms: dict) -> "LaurentScalar":
        terms = {e: Fraction(c) for e, c in terms.items() if c != 0}
        if not terms:
            return cls()
        low, high = min(terms), max(terms)
        return cls(low, [terms.get(e, 0) for e in range(low, high + 1)])

    @property
    def highest(self) -> int:
        return self.lowest + len(self.coefficients) - 1

    def terms(self) -> dict:
        return {self.lowest + i: c for i, c in enumerate(self.coefficients) if c != 0}

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_monomial(self) -> bool:
        return len(self.coefficients) == 1

    def __bool__(self) -> bool:
        return bool(self.coefficients)

    @staticmethod
    def _coerce(other):
        if isinstance(other, LaurentScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentScalar.constant(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        terms = self.terms()
        for e, c in other.terms().items():
            terms[e] = terms.get(e, 0) + c
        return LaurentScalar.from_terms(terms)

    __radd__ = __add__

    def __neg__(self):
        return LaurentScalar(self.lowest, [-c for c in self.coefficients])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self or not other:
            return LaurentScalar()
        product = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                product[i + j] += a * b
        return LaurentScalar(self.lowest + other.lowest, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            if not self.is_monomial():
                raise ArithmeticError("Só monômios de Laurent são invertíveis")
            return LaurentScalar.monomial(-self.lowest, 1 / self.coefficients[0]) ** (-exponent)
        result = LaurentScalar.one()
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.lowest == other.lowest and self.coefficients == other.coefficients

    def __hash__(self):
        return hash((self.lowest, self.coefficients))

    def bar(self) -> "LaurentScalar":
        """Involução q ↦ q⁻¹."""
        return LaurentScalar.from_terms({-e: c for e, c in self.terms().items()})

    def is_symmetric(self) -> bool:
        return self == self.bar()

    def try_divide(self, other: "LaurentScalar") -> "LaurentScalar | None":
        """Divisão exata em k[q,q⁻¹]; None se o quociente não for de Laurent."""
        if not other:
            raise ZeroDivisionError("Divisão de Laurent por zero")
        if not self:
            return LaurentScalar()
        remainder = list(self.coefficients)
        divisor = other.coefficients
        if len(remainder) < len(divisor):
            return None
        quotient = [Fraction(0)] * (len(remainder) - len(divisor) + 1)
        for k in range(len(quotient) - 1, -1, -1):
            c = remainder[k + len(divisor) - 1] / divisor[-1]
            quotient[k] = c
            if c:
                for t, d in enumerate(divisor):
                    remainder[k + t] -= c * d
        if any(remainder):
            return None
        return LaurentScalar(self.lowest - other.lowest, quotient)

    def exact_divide(self, other: "LaurentScalar") -> "LaurentScalar":
        result = self.try_divide(other)
        if result is None:
            raise ArithmeticError(f"Divisão não exata: ({self}) / ({other})")
        return result

    def evaluate(self, field):
        """Especializa q ↦ ζ no corpo dado."""
        result = field.zero
        for e, c in self.terms().items():
            result = field.add(result, field.mul(field.from_fraction(c), field.zeta_power(e)))
        return result

    def serialize(self) -> str:
        return f"{self.lowest}:" + ",".join(format_fraction(c) for c in self.coefficients)

    @classmethod
    def parse(cls, text: str) -> "LaurentScalar":
        lowest, _, body = text.strip().partition(":")
        coefficients = [parse_fraction(c) for c in body.split(",")] if body.strip() else []
        return cls(int(lowest), coefficients)

    def __repr__(self):
        return f"LaurentScalar({self.serialize()})"

    def __str__(self):
        if not self:
            return "0"
        parts = []
        for e, c in sorted(self.terms().items(), reverse=True):
            power = "" if e == 0 else ("q" if e == 1 else f"q^{e}")
            if power and abs(c) == 1:
                body = power
            else:
                body = format_fraction(abs(c)) + (f"*{power}" if power else "")
            sign = "-" if c < 0 else "+"
            parts.append(f"{sign} {body}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


def s_generator(degree: int) -> LaurentScalar:
    """Gerador q^k − q^{−k} do conjunto multiplicativo S."""
    return LaurentScalar.from_terms({degree: 1, -degree: -1})


def s_degrees_for(type_label: str) -> tuple:
    """Graus dos geradores de S: {1} em ADE, q²−q⁻² em BCF, e também q³−q⁻³ em G2."""
    label = type_label.upper()
    if label.startswith("G"):
        return (2, 3)
    if label[0] in "BCF":
        return (2,)
    return ()


class LocalizedScalar:
    """Elemento de 𝒜 = S⁻¹k[q,q⁻¹]: numerador de Laurent sobre um monômio nos geradores de S."""
    __slots__ = ("numerator", "exponents", "s_degrees")

    def __init__(self, numerator: LaurentScalar, exponents=None, s_degrees: tuple = ()):
        s_degrees = tuple(s_degrees)
        exponents = list(exponents) if exponents is not None else [0] * len(s_degrees)
        if len(exponents) != len(s_degrees):
            raise ValueError("Expoentes incompatíveis com os geradores de S")
        # forma canônica: cancela potências de geradores que dividem o numerador
        for k, degree in enumerate(s_degrees):
            generator = s_generator(degree)
            while exponents[k] > 0 and numerator:
                quotient = numerator.try_divide(generator)
                if quotient is None:
                    break
                numerator = quotient
                exponents[k] -= 1
        if not numerator:
            exponents = [0] * len(s_degrees)
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "exponents", tuple(exponents))
        object.__setattr__(self, "s_degrees", s_degrees)

    def __setattr__(self, name, value):
        raise AttributeError("LocalizedScalar é imutável")

    @classmethod
    def from_laurent(cls, value, s_degrees: tuple = ()) -> "LocalizedScalar":
        if not isinstance(value, LaurentScalar):
            value = LaurentScalar.constant(value)
        return cls(value, None, s_degrees)

    @classmethod
    def from_fraction(cls, numerator: LaurentScalar, denominator: LaurentScalar, s_degrees: tuple,
                      max_total_exponent: int = 8) -> "LocalizedScalar":
        """
        Escreve numerador/denominador com denominador monômio em S,
        buscando expoentes e com D dividindo ∏ g^e.
        """
        if not denominator:
            raise ZeroDivisionError("Denominador nulo")
        generators = [s_generator(d) for d in s_degrees]
        for total in range(max_total_exponent + 1):
            for exponents in _exponent_vectors(len(generators), total):
                product = LaurentScalar.one()
                for generator, e in zip(generators, exponents):
                    product = product * generator ** e
                cofactor = product.try_divide(denominator)
                if cofactor is not None:
                    return cls(numerator * cofactor, exponents, s_degrees)
        raise NotInLocalizationError(f"({numerator})/({denominator}) não pertence a 𝒜 com S={s_degrees}")

    def denominator(self) -> LaurentScalar:
        result = LaurentScalar.one()
        for degree, e in zip(self.s_degrees, self.exponents):
            result = result * s_generator(degree) ** e
        return result

    def is_laurent(self) -> bool:
        return not any(self.exponents)

    def is_zero(self) -> bool:
        return not self.numerator

    def __bool__(self):
        return bool(self.numerator)

    def _coerce(self, other):
        if isinstance(other, LocalizedScalar):
            if other.s_degrees != self.s_degrees:
                if not other.s_degrees and other.is_laurent():
                    return LocalizedScalar(other.numerator, None, self.s_degrees)
                if not self.s_degrees:
                    return None
                raise ValueError("Escalares em localizações diferentes")
            return other
        if isinstance(other, (LaurentScalar, int, Fraction)):
            return LocalizedScalar.from_laurent(other, self.s_degrees)
        return None

    def _common(self, other):
        top = [max(a, b) for a, b in zip(self.exponents, other.exponents)]
        left, right = self.numerator, other.numerator
        for degree, t, a, b in zip(self.s_degrees, top, self.exponents, other.exponents):
            generator = s_generator(degree)
            left = left * generator ** (t - a)
            right = right * generator ** (t - b)
        return left, right, top

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        left, right, top = self._common(other)
        return LocalizedScalar(left + right, top, self.s_degrees)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedScalar(-self.numerator, self.exponents, self.s_degrees)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        exponents = [a + b for a, b in zip(self.exponents, other.exponents)]
        return LocalizedScalar(self.numerator * other.numerator, exponents, self.s_degrees)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (LaurentScalar, int, Fraction)):
            return self.is_laurent() and self.numerator == other
        if not isinstance(other, LocalizedScalar):
            return NotImplemented
        return (self.numerator, self.exponents) == (other.numerator, other.exponents)

    def __hash__(self):
        return hash((self.numerator, self.exponents))

    def evaluate(self, field):
        denominator = field.one
        for degree, e in zip(self.s_degrees, self.exponents):
            value = s_generator(degree).evaluate(field)
            if e and field.is_zero(value):
                raise VanishingDenominatorError(f"q^{degree} − q^-{degree} se anula em ζ (ℓ={field.ell})")
            for _ in range(e):
                denominator = field.mul(denominator, value)
        return field.div(self.numerator.evaluate(field), denominator)

    def serialize(self) -> str:
        return self.numerator.serialize() + "/" + ",".join(str(e) for e in self.exponents)

    @classmethod
    def parse(cls, text: str, s_degrees: tuple) -> "LocalizedScalar":
        numerator, _, exponents = text.strip().rpartition("/")
        if not numerator:
            numerator, exponents = exponents, ""
        values = [int(e) for e in exponents.split(",")] if exponents.strip() else [0] * len(s_degrees)
        return cls(LaurentScalar.parse(numerator), values, s_degrees)

    def __repr__(self):
        return f"LocalizedScalar({self.serialize()})"

    def __str__(self):
        if self.is_laurent():
            return str(self.numerator)
        factors = "*".join(f"(q^{d}-q^-{d})" + (f"^{e}" if e > 1 else "")
                           for d, e in zip(self.s_degrees, self.exponents) if e)
        return f"({self.numerator})/{factors}"


def _exponent_vectors(length: int, total: int):
    if length == 0:
        if total == 0:
            yield ()
        return
    for combination in itertools.combinations_with_replacement(range(length), total):
        vector = [0] * length
        for k in combination:
            vector[k] += 1
        yield tuple(vector)


@lru_cache(maxsize=None)
def q_integer(n: int, d: int = 1) -> LaurentScalar:
    """[n]_{q^d} = (q^{dn} − q^{−dn})/(q^d − q^{−d}); [−n] = −[n]."""
    if n == 0:
        return LaurentScalar()
    if n < 0:
        return -q_integer(-n, d)
    return LaurentScalar.from_terms({d * (n - 1 - 2 * k): 1 for k in range(n)})


@lru_cache(maxsize=None)
def q_factorial(n: int, d: int = 1) -> LaurentScalar:
    result = LaurentScalar.one()
    for k in range(1, n + 1):
        result = result * q_integer(k, d)
    return result


@lru_cache(maxsize=None)
def q_binomial(a: int, b: int, d: int = 1) -> LaurentScalar:
    """Binomial gaussiano [a escolhe b]_{q^d}; para a < 0 usa [a, b] = (−1)^b [b−a−1, b]."""
    if b < 0:
        return LaurentScalar()
    if a < 0:
        value = q_binomial(b - a - 1, b, d)
        return -value if b % 2 else value
    if b > a:
        return LaurentScalar()
    numerator = LaurentScalar.one()
    for t in range(b):
        numerator = numerator * q_integer(a - t, d)
    return numerator.exact_divide(q_factorial(b, d))


def specialize(x, field):
    """Especialização q ↦ ζ de um escalar de Laurent ou de 𝒜 no corpo dado."""
    if isinstance(x, (LaurentScalar, LocalizedScalar)):
        return x.evaluate(field)
    if isinstance(x, (int, Fraction)):
        return field.from_fraction(Fraction(x))
    raise TypeError(f"Não sei especializar {type(x).__name__}")
