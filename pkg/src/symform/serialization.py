"""JSON matrix files and report output."""

import dataclasses
import json
import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

from symform import hermitian
from symform.errors import InvalidInput
from symform.hermitian import ComplexMatrix
from symform.models import ProbeReport, ViolationRecord

logger = structlog.get_logger()

# computed properties written next to dataclass fields
DERIVED_FIELDS = ("slack", "passed")


def _fail(path: Path | str, message: str) -> InvalidInput:
    return InvalidInput(f"{path}: {message}")


def parse_matrix(document: Any, source: Path | str = "<matrix>") -> ComplexMatrix:
    """Validate a decoded {"n": int, "re": [[float]], "im": [[float]]} document."""
    if not isinstance(document, dict):
        raise _fail(source, "top level must be an object with keys n, re, im")
    unknown = set(document) - {"n", "re", "im"}
    if unknown:
        raise _fail(source, f"unknown field(s) {sorted(unknown)}")
    n = document.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise _fail(source, f"field 'n' must be a positive integer, got {n!r}")

    parts = []
    for key in ("re", "im"):
        rows = document.get(key)
        if not isinstance(rows, list) or len(rows) != n:
            raise _fail(source, f"field '{key}' must be a list of {n} rows")
        for index, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise _fail(source, f"field '{key}[{index}]' must have {n} entries")
            for col, value in enumerate(row):
                if not isinstance(value, int | float) or isinstance(value, bool) or not math.isfinite(value):
                    raise _fail(source, f"field '{key}[{index}][{col}]' must be a finite number, got {value!r}")
        parts.append(np.array(rows, dtype=np.float64))
    return parts[0] + 1j * parts[1]


def load_matrix(path: Path | str, hermitian_required: bool = False) -> ComplexMatrix:
    """Read a matrix file; hermitian_required enforces the Hermitian tolerance."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise _fail(path, f"cannot read matrix file: {e.strerror}") from e
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise _fail(path, f"line {e.lineno}, column {e.colno}: {e.msg}") from e

    matrix = parse_matrix(document, path)
    if hermitian_required:
        try:
            return hermitian.HermitianMatrix.from_array(matrix).data
        except InvalidInput as e:
            raise _fail(path, str(e)) from e
    logger.debug("Matrix loaded", path=str(path), n=matrix.shape[0])
    return matrix


def matrix_to_dict(matrix: ArrayLike) -> dict[str, Any]:
    matrix = hermitian.as_matrix(matrix)
    return {"n": matrix.shape[0], "re": matrix.real.tolist(), "im": matrix.imag.tolist()}


def dump_matrix(matrix: ArrayLike, path: Path | str) -> None:
    Path(path).write_text(json.dumps(matrix_to_dict(matrix), indent=2) + "\n", encoding="utf-8")


def to_jsonable(value: Any) -> Any:
    """Convert reports to JSON-ready values; non-finite floats become "inf", "-inf" or "nan"."""
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        out = {f.name: to_jsonable(getattr(value, f.name)) for f in dataclasses.fields(value)}
        for name in DERIVED_FIELDS:
            if isinstance(getattr(type(value), name, None), property):
                out[name] = to_jsonable(getattr(value, name))
        return out
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, list | tuple):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return to_jsonable(value.item())
    if isinstance(value, complex):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, float) and not math.isfinite(value):
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    return value


def report_to_dict(report: Any) -> dict[str, Any]:
    return to_jsonable(report)


def dumps_report(report: Any) -> str:
    return json.dumps(report_to_dict(report), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_report(report: Any, path: Path | str) -> None:
    """Pretty-printed UTF-8 JSON with keys in declaration order."""
    path = Path(path)
    path.write_text(dumps_report(report), encoding="utf-8")
    logger.info("Report written", path=str(path))


def _number(value: Any) -> Any:
    if value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def report_from_dict(document: dict[str, Any]) -> ProbeReport:
    """Inverse of report_to_dict for probe reports."""
    fields = {f.name for f in dataclasses.fields(ProbeReport)}
    violation_fields = {f.name for f in dataclasses.fields(ViolationRecord)}
    data = {key: value for key, value in document.items() if key in fields}
    data["violations"] = [
        ViolationRecord(**{key: _number(value) for key, value in item.items() if key in violation_fields})
        for item in document.get("violations", [])
    ]
    for key in ("min_slack", "max_gap"):
        data[key] = _number(data.get(key))
    return ProbeReport(**data)


def load_report(path: Path | str) -> ProbeReport:
    path = Path(path)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise _fail(path, f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    return report_from_dict(document)
