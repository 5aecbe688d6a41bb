"""
Relatórios em linhas JSON, em ordem canônica, e o resumo legível da execução.
"""
import json
import logging
import sys

import numpy as np

logger = logging.getLogger(__name__)


def _plain(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    raise TypeError(f"Valor não serializável: {type(value).__name__}")


def record_line(record: dict) -> str:
    return json.dumps(record, sort_keys=True, ensure_ascii=False, separators=(",", ":"), default=_plain)


def canonical(records: list) -> list:
    """Ordena por (caso, verificação), independente da ordem de execução."""
    return sorted(records, key=lambda record: (record.get("case", ""), record.get("check", ""),
                                               record.get("suite", "")))


def write_report(records: list, path: str | None = None) -> str:
    text = "".join(record_line(record) + "\n" for record in canonical(records))
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
        logger.info("relatório com %d registros em %s", len(records), path)
    return text


def summarize(records: list) -> dict:
    summary = {"total": len(records), "agree": 0, "disagree": 0, "skipped": 0}
    for record in records:
        if record.get("skipped"):
            summary["skipped"] += 1
        elif record.get("agree"):
            summary["agree"] += 1
        else:
            summary["disagree"] += 1
    return summary


def print_summary(records: list):
    summary = summarize(records)
    print(f"{summary['total']} verificações: {summary['agree']} concordam, "
          f"{summary['disagree']} discordam, {summary['skipped']} puladas")
    for record in canonical(records):
        if not record.get("skipped") and not record.get("agree"):
            print(f"  FALHA {record.get('case')} [{record.get('check')}] {record.get('spec', '')}")
