"""JSON formats for matrix sets and decomposition reports.

Matrix set::

    {"n": 3, "matrices": [{"name": "A1", "re": [[...]], "im": [[...]]}, ...]}

``im`` is optional.  Reports store complex entries as ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, DuplicateName, ParseError
from .report import BlockPartition, DecompositionReport, Transform


@dataclass
class MatrixSet:
    names: list
    matrices: list

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    @property
    def n(self) -> int:
        return self.matrices[0].shape[0]


def _grid(value, n, where):
    if not isinstance(value, list) or not all(isinstance(row, list) for row in value):
        raise ParseError(f"{where}: expected a list of rows")
    if len(value) != n or any(len(row) != n for row in value):
        shape = (len(value), max((len(r) for r in value), default=0))
        raise DimensionMismatch(f"{where}: grid is {shape[0]}x{shape[1]}, expected {n}x{n}")
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: non-numeric entry ({exc})") from None
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{where}: non-finite entry")
    return arr


def matrix_set_from_dict(obj) -> MatrixSet:
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object with 'n' and 'matrices'")
    n = obj.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"field 'n': expected a positive integer, got {n!r}")
    entries = obj.get("matrices")
    if not isinstance(entries, list) or not entries:
        raise ParseError("field 'matrices': expected a nonempty list")
    names, mats = [], []
    for i, entry in enumerate(entries):
        where = f"matrices[{i}]"
        if not isinstance(entry, dict):
            raise ParseError(f"{where}: expected an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise ParseError(f"{where}.name: expected a nonempty string")
        if name in names:
            raise DuplicateName(f"{where}.name: duplicate name {name!r}")
        if "re" not in entry:
            raise ParseError(f"{where}: missing field 're'")
        re = _grid(entry["re"], n, f"{where}.re")
        if entry.get("im") is not None:
            m = re + 1j * _grid(entry["im"], n, f"{where}.im")
        else:
            m = re
        names.append(name)
        mats.append(m)
    return MatrixSet(names, mats)


def parse_matrix_set(path) -> MatrixSet:
    """Read a matrix set file, preserving the order of the matrices."""
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return matrix_set_from_dict(obj)
    except ParseError as exc:
        raise type(exc)(f"{path}: {exc}") from None


def matrix_set_to_dict(names, matrices) -> dict:
    matrices = [np.asarray(m) for m in matrices]
    out = {"n": int(matrices[0].shape[0]), "matrices": []}
    for name, m in zip(names, matrices):
        entry = {"name": name, "re": np.real(m).tolist()}
        if np.iscomplexobj(m) and np.any(np.imag(m)):
            entry["im"] = np.imag(m).tolist()
        out["matrices"].append(entry)
    return out


def write_matrix_set(path, names, matrices):
    Path(path).write_text(json.dumps(matrix_set_to_dict(names, matrices), indent=1) + "\n")


def complex_pairs(m):
    """Nested ``[re, im]`` pairs for a complex array or scalar."""
    m = np.asarray(m, dtype=complex)
    stacked = np.stack([m.real + 0.0, m.imag + 0.0], axis=-1)
    return stacked.tolist()


def from_pairs(obj) -> np.ndarray:
    arr = np.asarray(obj, dtype=float)
    if arr.shape[-1:] != (2,):
        raise ParseError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return complex_pairs(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_pairs(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def report_to_dict(report: DecompositionReport) -> dict:
    return {
        "algorithm": report.algorithm,
        "partition": {"kind": report.partition.kind, "sizes": list(report.partition.sizes)},
        "transform": {
            "unitary": bool(report.transform.unitary),
            "s": complex_pairs(report.transform.s),
            "s_inv": complex_pairs(report.transform.s_inv),
        },
        "transformed": {name: complex_pairs(t) for name, t in zip(report.names, report.transformed)},
        "residuals": {name: float(report.residuals[name]) for name in report.names},
        "provenance": _jsonable(report.provenance),
    }


def report_from_dict(obj) -> DecompositionReport:
    try:
        part = BlockPartition(obj["partition"]["sizes"], obj["partition"]["kind"])
        tr = obj["transform"]
        s = from_pairs(tr["s"])
        s_inv = from_pairs(tr["s_inv"]) if tr.get("s_inv") is not None else None
        transform = Transform(s, s_inv, unitary=bool(tr.get("unitary", False)))
        transformed_obj = obj.get("transformed", {})
        names = list(transformed_obj) or list(obj.get("residuals", {}))
        transformed = [from_pairs(transformed_obj[k]) for k in transformed_obj]
        residuals = {k: float(v) for k, v in obj.get("residuals", {}).items()}
        return DecompositionReport(
            obj.get("algorithm", "?"), transform, part, transformed, residuals, names,
            obj.get("provenance", {}),
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report: {exc!r}") from None


def dumps_report(report: DecompositionReport) -> str:
    return json.dumps(report_to_dict(report), indent=1) + "\n"


def load_report(path) -> DecompositionReport:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return report_from_dict(obj)


def _fmt(z, digits=6):
    z = complex(z)
    re = round(z.real, digits) + 0.0
    im = round(z.imag, digits) + 0.0
    if im == 0.0:
        return f"{re:g}"
    return f"{re:g}{im:+g}i"


def format_matrix(m, digits=6) -> str:
    cells = [[_fmt(x, digits) for x in row] for row in np.asarray(m)]
    width = max(len(c) for row in cells for c in row)
    return "\n".join("  " + " ".join(c.rjust(width) for c in row) for row in cells)


def format_report_text(report: DecompositionReport) -> str:
    lines = [
        f"algorithm {report.algorithm}: {report.partition}",
        f"transform ({'unitary' if report.transform.unitary else 'invertible'}) S:",
        format_matrix(report.transform.s),
    ]
    for name, t in zip(report.names, report.transformed):
        lines.append(f"S^-1 {name} S  (pattern residual {report.residuals[name]:.3g}):")
        lines.append(format_matrix(t))
    return "\n".join(lines) + "\n"
