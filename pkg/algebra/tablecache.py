"""
Cache em texto das constantes de estrutura, versionado e escrito de forma atômica.

    format_version 1
    type A2
    w0 1,2,1
    ell_independent 1
    s_degrees
    unit <s> <sinal> <expoente>
    E <i> <j> -> leading:<escalar> ; tail: (<expoentes>)=<escalar> ; ...
    word E <s> (<palavra>)=<num|den> ; ...
    end
"""
import logging
import os
import tempfile

from algebra.genericuq import E_SIDE, F_SIDE, StructureTable, TableEntry, parse_generic, serialize_generic
from algebra.rootdata import build_root_datum, convex_order
from algebra.scalars import LocalizedScalar

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
CACHE_SUB_FOLDER = "cache"

loaded_tables = {}


class TableFormatError(ValueError):
    """Arquivo de cache ilegível ou de versão diferente."""


def cache_path(type_label: str, w0_word, folder: str = CACHE_SUB_FOLDER) -> str:
    word = "".join(str(i) for i in w0_word)
    return os.path.join(folder, f"{type_label}_{word}.table")


def _tuple_text(values) -> str:
    return ",".join(str(v) for v in values)


def serialize_table(table: StructureTable) -> str:
    lines = [
        f"format_version {FORMAT_VERSION}",
        f"type {table.datum.type_label}",
        f"w0 {_tuple_text(table.order.w0_word)}",
        "ell_independent 1",
        f"s_degrees {_tuple_text(table.s_degrees)}".rstrip(),
    ]
    for s, (sign, a) in sorted(table.omega_units.items()):
        lines.append(f"unit {s} {sign} {a}")
    for side, entries in ((E_SIDE, table.e_entries), (F_SIDE, table.f_entries)):
        for (i, j), entry in sorted(entries.items()):
            tail = " ; ".join(f"({_tuple_text(m)})={c.serialize()}" for m, c in sorted(entry.tail.items()))
            lines.append(f"{side} {i} {j} -> leading:{entry.leading.serialize()} ; tail: {tail}".rstrip())
    for (side, s), words in sorted(table.root_words.items()):
        terms = " ; ".join(f"({_tuple_text(w)})={serialize_generic(c)}" for w, c in sorted(words.items()))
        lines.append(f"word {side} {s} {terms}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_key(text: str) -> tuple:
    inner = text.strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise TableFormatError(f"Chave mal formada: {text!r}")
    inner = inner[1:-1]
    return tuple(int(v) for v in inner.split(",")) if inner else ()


def parse_table(text: str) -> StructureTable:
    header = {}
    units, entries, words = {}, {E_SIDE: {}, F_SIDE: {}}, {}
    s_degrees = ()
    finished = False
    for number, line in enumerate(text.splitlines(), start=1):
        values = line.strip().split(maxsplit=1)
        if not values:
            continue
        key = values[0]
        rest = values[1] if len(values) > 1 else ""
        try:
            if key in ("format_version", "type", "w0", "ell_independent"):
                header[key] = rest
                if key == "format_version" and rest != str(FORMAT_VERSION):
                    raise TableFormatError(f"Versão {rest} do cache; esperada {FORMAT_VERSION}")
            elif key == "s_degrees":
                s_degrees = tuple(int(v) for v in rest.split(",")) if rest else ()
            elif key == "unit":
                s, sign, a = (int(v) for v in rest.split())
                units[s] = (sign, a)
            elif key in (E_SIDE, F_SIDE):
                pair, _, body = rest.partition("->")
                i, j = (int(v) for v in pair.split())
                leading_text, _, tail_text = body.partition("; tail:")
                leading = LocalizedScalar.parse(leading_text.strip().removeprefix("leading:").strip(), s_degrees)
                tail = {}
                for piece in tail_text.split(";"):
                    if piece.strip():
                        exponents, _, scalar = piece.partition("=")
                        tail[_parse_key(exponents)] = LocalizedScalar.parse(scalar.strip(), s_degrees)
                entries[key][(i, j)] = TableEntry(i, j, leading, tail)
            elif key == "word":
                side, s, body = rest.split(maxsplit=2)
                terms = {}
                for piece in body.split(";"):
                    if piece.strip():
                        word, _, scalar = piece.partition("=")
                        terms[_parse_key(word)] = parse_generic(scalar.strip())
                words[(side, int(s))] = terms
            elif key == "end":
                finished = True
            else:
                raise TableFormatError(f"Linha desconhecida: {key}")
        except TableFormatError:
            raise
        except (ValueError, ArithmeticError) as error:
            raise TableFormatError(f"Linha {number}: {error}") from error
    if "format_version" not in header:
        raise TableFormatError("Cabeçalho sem format_version")
    if not finished:
        raise TableFormatError("Cache truncado (sem 'end')")
    datum = build_root_datum(header["type"])
    order = convex_order(datum, [int(v) for v in header["w0"].split(",")])
    return StructureTable(order, s_degrees, entries[E_SIDE], entries[F_SIDE], units, words)


def save_table(table: StructureTable, path: str) -> str:
    """Escreve em arquivo temporário e renomeia."""
    folder = os.path.dirname(path) or "."
    os.makedirs(folder, exist_ok=True)
    handle, temporary = tempfile.mkstemp(dir=folder, prefix=".table-")
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as file:
            file.write(serialize_table(table))
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.remove(temporary)
        raise
    loaded_tables[os.path.abspath(path)] = table
    logger.info("cache escrito em %s", path)
    return path


def load_table(path: str) -> StructureTable:
    key = os.path.abspath(path)
    if key not in loaded_tables:
        with open(path, "r", encoding="utf-8") as file:
            loaded_tables[key] = parse_table(file.read())
        logger.info("cache lido de %s", path)
    return loaded_tables[key]


def describe_table(table: StructureTable) -> dict:
    return {
        "type": table.datum.type_label,
        "w0": _tuple_text(table.order.w0_word),
        "pairs": len(table.e_entries),
        "tail_terms": sum(len(entry.tail) for entry in table.e_entries.values()),
        "s_denominator": table.has_s_denominator(),
        "units": {s: f"{sign:+d}q^{a}" for s, (sign, a) in sorted(table.omega_units.items())},
    }
