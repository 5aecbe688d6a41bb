"""
Linguagem de especificação de módulos:

    trivial | onedim(λ) | verma(λ) | coverma(λ) | simple(λ) | dual(s) | omega(s)
    | tensor(s,s) | sum(s,s) | twist(s,λ) | randsub(s,seed) | quot(s,seed)
    | cyclic(s,seed) | res(s,minus|plus)

λ são coordenadas inteiras em pesos fundamentais separadas por vírgula.
"""
import logging
import re
from typing import List

import numpy as np

from algebra.kernelalg import MINUS, PLUS, KernelContext
from reps import qmodules
from reps.qmodules import WeightedModule

logger = logging.getLogger(__name__)

WEIGHT_NODES = {"onedim", "verma", "coverma", "simple"}
UNARY_NODES = {"dual", "omega"}
BINARY_NODES = {"tensor", "sum"}
SEEDED_NODES = {"randsub", "quot", "cyclic"}
NODE_NAMES = WEIGHT_NODES | UNARY_NODES | BINARY_NODES | SEEDED_NODES | {"trivial", "twist", "res"}

_TOKEN = re.compile(r"\s*(?:(?P<name>[a-z]+)|(?P<int>-?\d+)|(?P<punct>[(),]))")


class SpecSyntaxError(ValueError):
    """Erro de sintaxe com a posição (em caracteres) onde foi detectado."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (posição {position})")
        self.position = position


class SpecNode:
    def __init__(self, name: str, weight: tuple | None = None, seed: int | None = None, side: str | None = None):
        self.name = name
        self.weight = weight
        self.seed = seed
        self.side = side
        self.parent: 'SpecNode' = None
        self.children: List[SpecNode] = []

    def add_child(self, child: 'SpecNode'):
        self.children.append(child)
        child.parent = self

    def add_children(self, children: List['SpecNode']):
        for child in children:
            self.add_child(child)

    def __eq__(self, other):
        return isinstance(other, SpecNode) and str(self) == str(other)

    def __hash__(self):
        return hash(str(self))

    def __repr__(self):
        return f"SpecNode({self})"

    def __str__(self):
        """Forma canônica, sem espaços."""
        weight = ",".join(str(c) for c in self.weight) if self.weight is not None else ""
        if self.name == "trivial":
            return "trivial"
        if self.name in WEIGHT_NODES:
            return f"{self.name}({weight})"
        arguments = [str(child) for child in self.children]
        if self.name == "twist":
            arguments.append(weight)
        elif self.name in SEEDED_NODES:
            arguments.append(str(self.seed))
        elif self.name == "res":
            arguments.append(self.side)
        return f"{self.name}({','.join(arguments)})"

    def depth(self) -> int:
        return 1 + max((child.depth() for child in self.children), default=0)

    def realize(self, context: KernelContext) -> WeightedModule:
        """Constrói o módulo descrito pela árvore, recursivamente."""
        modules = [child.realize(context) for child in self.children]
        name = self.name
        if name == "trivial":
            module = qmodules.trivial(context)
        elif name == "onedim":
            module = qmodules.onedim(context, self.weight)
        elif name == "verma":
            module = qmodules.verma(context, self.weight)
        elif name == "coverma":
            module = qmodules.coverma(context, self.weight)
        elif name == "simple":
            module = qmodules.simple(context, self.weight)
        elif name == "dual":
            module = qmodules.dual(modules[0])
        elif name == "omega":
            module = qmodules.omega_twist(modules[0])
        elif name == "tensor":
            module = qmodules.tensor(*modules)
        elif name == "sum":
            module = qmodules.direct_sum(*modules)
        elif name == "twist":
            module = qmodules.twist(modules[0], self.weight)
        elif name == "res":
            module = qmodules.restrict(modules[0], self.side)
        else:
            rng = np.random.default_rng(self.seed)
            build = {"randsub": qmodules.randsub, "quot": qmodules.quot, "cyclic": qmodules.cyclic}[name]
            module = build(modules[0], rng)
        module.provenance = str(self)
        logger.debug("realizado %s (dim %d)", self, module.dim)
        return module


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        position = 0
        while position < len(text):
            if text[position:].strip() == "":
                break
            match = _TOKEN.match(text, position)
            if not match:
                raise SpecSyntaxError(f"Caractere inesperado {text[position]!r}", position)
            kind = match.lastgroup
            start = match.start(kind)
            self.tokens.append((kind, match.group(kind), start))
            position = match.end()
        self.index = 0

    def peek(self):
        if self.index < len(self.tokens):
            return self.tokens[self.index]
        return ("end", "", len(self.text))

    def take(self, kind: str, value: str | None = None):
        token = self.peek()
        if token[0] != kind or (value is not None and token[1] != value):
            expected = value or kind
            found = token[1] or "fim do texto"
            raise SpecSyntaxError(f"Esperado {expected!r}, encontrado {found!r}", token[2])
        self.index += 1
        return token

    def integers(self) -> tuple:
        values = [int(self.take("int")[1])]
        while self.peek()[1] == "," and self.index + 1 < len(self.tokens) and self.tokens[self.index + 1][0] == "int":
            self.take("punct", ",")
            values.append(int(self.take("int")[1]))
        return tuple(values)

    def node(self) -> SpecNode:
        _, name, position = self.take("name")
        if name not in NODE_NAMES:
            raise SpecSyntaxError(f"Construtor desconhecido {name!r}", position)
        if name == "trivial":
            return SpecNode("trivial")
        self.take("punct", "(")
        if name in WEIGHT_NODES:
            node = SpecNode(name, weight=self.integers())
        else:
            node = SpecNode(name)
            node.add_child(self.node())
            if name in BINARY_NODES:
                self.take("punct", ",")
                node.add_child(self.node())
            elif name == "twist":
                self.take("punct", ",")
                node.weight = self.integers()
            elif name in SEEDED_NODES:
                self.take("punct", ",")
                node.seed = int(self.take("int")[1])
            elif name == "res":
                self.take("punct", ",")
                _, side, where = self.take("name")
                if side not in (MINUS, PLUS):
                    raise SpecSyntaxError(f"Lado deve ser minus ou plus, não {side!r}", where)
                node.side = side
        self.take("punct", ")")
        return node


def parse_module_spec(text: str) -> SpecNode:
    parser = _Parser(text)
    node = parser.node()
    token = parser.peek()
    if token[0] != "end":
        raise SpecSyntaxError(f"Texto extra {token[1]!r}", token[2])
    return node


def realize(spec, context: KernelContext) -> WeightedModule:
    node = parse_module_spec(spec) if isinstance(spec, str) else spec
    return node.realize(context)
