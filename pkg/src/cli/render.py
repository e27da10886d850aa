"""
Text rendering of reports: aligned key/value blocks for people, tab-separated
key/value rows for pipelines. Numbers in tabular output never depend on the
locale.
"""
from typing import Any, Iterable, List, Mapping, Tuple

from src.algebra.pairs import RelationReport

Rows = Iterable[Tuple[str, Any]]


def _human_value(value: Any) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return format(value, ".6g")
    if isinstance(value, (list, tuple)):
        return ", ".join(_human_value(v) for v in value) or "-"
    if value is None:
        return "-"
    return str(value)


def _tabular_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (list, tuple)):
        return ",".join(_tabular_value(v) for v in value)
    if value is None:
        return "NA"
    return str(value)


def render_rows(title: str, rows: Rows, fmt: str = "human") -> str:
    rows = list(rows)
    if fmt == "tabular":
        return "".join(f"{key}\t{_tabular_value(value)}\n" for key, value in rows)
    width = max((len(key) for key, _ in rows), default=0)
    lines = [title] + [f"  {key.ljust(width)}  {_human_value(value)}" for key, value in rows]
    return "\n".join(lines) + "\n"


def relation_rows(report: RelationReport) -> List[Tuple[str, Any]]:
    return [
        ("norm_a", report.norm_a),
        ("norm_b", report.norm_b),
        ("min_eig_a", report.positivity_a),
        ("min_eig_b", report.positivity_b),
        ("r1", report.r1),
        ("r2", report.r2),
        ("tol", report.tol),
        ("passed", report.passed),
    ]


def mapping_rows(values: Mapping[str, Any], prefix: str = "") -> List[Tuple[str, Any]]:
    return [(f"{prefix}{key}", value) for key, value in sorted(values.items())]
