"""
JSON documents for matrices, pairs, sampled D elements and matrix fields,
plus tab-separated path traces and CSV field tables.

Documents are written with sorted keys; floats use Python's shortest
round-trip representation, so reading a written document gives back the
same bits and rewriting it gives the same bytes.
"""
import csv
import hashlib
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from src.algebra.errors import FileFormatError
from src.algebra.funcalg import FieldPair, FieldRelationReport, MatrixField
from src.algebra.homotopy import PathReport
from src.algebra.matrix import CMatrix, as_cmatrix
from src.algebra.pairs import SoftPair
from src.algebra.spaces import SpaceGrid, build_grid, with_regions
from src.algebra.universal import DElement

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

TRACE_COLUMNS = ("t", "r1", "r2", "class", "step")


def _number(x: float) -> str:
    return format(float(x), ".17g")


def matrix_to_doc(M: CMatrix) -> Dict[str, Any]:
    """{"n": n, "entries": [re, im, re, im, ...]} in row-major order."""
    arr = np.asarray(M, dtype=np.complex128)
    flat = np.column_stack([arr.real.ravel(), arr.imag.ravel()]).ravel()
    return {"n": int(arr.shape[0]), "entries": [float(x) for x in flat]}


def matrix_from_doc(doc: Any) -> CMatrix:
    try:
        n = doc["n"]
        entries = doc["entries"]
    except (KeyError, TypeError) as e:
        raise FileFormatError(f"matrix document is missing a field: {e}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise FileFormatError(f"matrix size must be a non-negative integer, got {n!r}")
    if not isinstance(entries, list) or len(entries) != 2 * n * n:
        raise FileFormatError(f"matrix of size {n} needs {2 * n * n} entries")
    try:
        flat = np.array(entries, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise FileFormatError(f"matrix entries are not numbers: {e}")
    return as_cmatrix((flat[0::2] + 1j * flat[1::2]).reshape(n, n))


def pair_to_doc(pair: SoftPair) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"a": matrix_to_doc(pair.a), "b": matrix_to_doc(pair.b)}
    if pair.meta:
        doc["meta"] = dict(pair.meta)
    return doc


def pair_from_doc(doc: Any) -> SoftPair:
    if not isinstance(doc, dict) or "a" not in doc or "b" not in doc:
        raise FileFormatError("pair document needs the keys 'a' and 'b'")
    meta = doc.get("meta", {})
    if not isinstance(meta, dict):
        raise FileFormatError("pair metadata must be an object")
    return SoftPair(matrix_from_doc(doc["a"]), matrix_from_doc(doc["b"]), meta)


def delement_to_doc(e: DElement) -> Dict[str, Any]:
    return {
        "grid": [float(t) for t in e.grid],
        "samples": [matrix_to_doc(v)["entries"] for v in e.values],
    }


def delement_from_doc(doc: Any) -> DElement:
    try:
        grid = np.array(doc["grid"], dtype=np.float64)
        samples = [matrix_from_doc({"n": 2, "entries": s}) for s in doc["samples"]]
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"malformed D element document: {e}")
    return DElement(grid, np.array(samples).reshape(-1, 2, 2))


def grid_to_doc(grid: SpaceGrid) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "kind": grid.kind,
        "resolution": list(grid.resolution),
        "regions": {name: [int(i) for i in idx] for name, idx in grid.regions.items()},
    }
    if grid.kind == "interval":
        doc["coords"] = [float(x) for x in grid.points[:, 0]]
    return doc


def grid_from_doc(doc: Any) -> SpaceGrid:
    try:
        grid = build_grid(doc["kind"], doc["resolution"], doc.get("coords"))
        return with_regions(grid, doc.get("regions", {}))
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"malformed grid descriptor: {e}")


def _field_samples(field_: MatrixField) -> List[List[float]]:
    return [matrix_to_doc(v)["entries"] for v in field_.values]


def _field_values(samples: Any, n: int, count: int) -> np.ndarray:
    if not isinstance(samples, list) or len(samples) != count:
        raise FileFormatError(f"expected {count} matrix samples")
    return np.array([matrix_from_doc({"n": n, "entries": s}) for s in samples]).reshape(count, n, n)


def field_to_doc(field_: MatrixField) -> Dict[str, Any]:
    return {
        "grid": grid_to_doc(field_.grid),
        "n": field_.n,
        "indices": [int(i) for i in field_.indices],
        "values": _field_samples(field_),
    }


def field_from_doc(doc: Any, grid: Optional[SpaceGrid] = None) -> MatrixField:
    try:
        grid = grid if grid is not None else grid_from_doc(doc["grid"])
        indices = np.array(doc["indices"], dtype=np.int64)
        return MatrixField(grid, _field_values(doc["values"], int(doc["n"]), indices.size), indices)
    except (KeyError, TypeError) as e:
        raise FileFormatError(f"malformed field document: {e}")


def field_pair_to_doc(fp: FieldPair) -> Dict[str, Any]:
    return {
        "grid": grid_to_doc(fp.grid),
        "n": fp.a.n,
        "indices": [int(i) for i in fp.a.indices],
        "a": _field_samples(fp.a),
        "b": _field_samples(fp.b),
    }


def field_pair_from_doc(doc: Any) -> FieldPair:
    try:
        grid = grid_from_doc(doc["grid"])
        n = int(doc["n"])
        indices = np.array(doc["indices"], dtype=np.int64)
        a = MatrixField(grid, _field_values(doc["a"], n, indices.size), indices)
        b = MatrixField(grid, _field_values(doc["b"], n, indices.size), indices)
    except (KeyError, TypeError) as e:
        raise FileFormatError(f"malformed field pair document: {e}")
    return FieldPair(a, b)


def dumps(doc: Dict[str, Any]) -> str:
    # floats use the shortest repr that reads back to the same double; it carries the same
    # information as 17 significant digits, and 17-digit files read back bit for bit
    return json.dumps(doc, sort_keys=True, indent=1, allow_nan=False) + "\n"


def write_document(path: PathLike, doc: Dict[str, Any]) -> str:
    """Write ``doc`` and return the SHA-256 of the bytes written."""
    try:
        text = dumps(doc)
    except ValueError as e:
        raise FileFormatError(f"cannot serialize document: {e}")
    data = text.encode("utf-8")
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise FileFormatError(f"cannot write {path}: {e}")
    logger.debug(f"Wrote {len(data)} bytes to {path}")
    return hashlib.sha256(data).hexdigest()


def read_document(path: PathLike) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise FileFormatError(f"cannot read {path}: {e}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path} is not valid JSON: {e}")


def read_matrix(path: PathLike) -> CMatrix:
    return matrix_from_doc(read_document(path))


def read_pair(path: PathLike) -> SoftPair:
    return pair_from_doc(read_document(path))


def read_field_pair(path: PathLike) -> FieldPair:
    return field_pair_from_doc(read_document(path))


def read_delement(path: PathLike) -> DElement:
    return delement_from_doc(read_document(path))


def trace_table(report: PathReport) -> str:
    """One tab-separated row per sample: t, r1, r2, class, step distance."""
    lines = ["\t".join(TRACE_COLUMNS)]
    for t, r1, r2, cls, step in report.rows():
        cls_text = "NA" if cls is None else str(cls)
        lines.append("\t".join([_number(t), _number(r1), _number(r2), cls_text, _number(step)]))
    return "\n".join(lines) + "\n"


def parse_trace_table(text: str) -> List[Tuple[float, float, float, Optional[int], float]]:
    lines = text.splitlines()
    if not lines or tuple(lines[0].split("\t")) != TRACE_COLUMNS:
        raise FileFormatError("trace table header is missing")
    rows = []
    for number, line in enumerate(lines[1:], start=2):
        try:
            t, r1, r2, cls, step = line.split("\t")
            rows.append((float(t), float(r1), float(r2), None if cls == "NA" else int(cls), float(step)))
        except ValueError as e:
            raise FileFormatError(f"trace table line {number} is malformed: {e}")
    return rows


def write_text(path: PathLike, text: str) -> str:
    data = text.encode("utf-8")
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise FileFormatError(f"cannot write {path}: {e}")
    return hashlib.sha256(data).hexdigest()


def field_table(fp: FieldPair, report: FieldRelationReport) -> str:
    """CSV with one row per point: index, coordinates, r1, r2 and tr(a − b)."""
    traces = np.trace(fp.a.values - fp.b.values, axis1=1, axis2=2).real
    coords = fp.grid.points[fp.a.indices]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["point"] + ["x", "y", "z"][: coords.shape[1]] + ["r1", "r2", "trace"])
    for k, (idx, point) in enumerate(zip(fp.a.indices, coords)):
        writer.writerow(
            [str(int(idx))] + [_number(c) for c in point]
            + [_number(report.r1[k]), _number(report.r2[k]), _number(traces[k])]
        )
    return buffer.getvalue()
