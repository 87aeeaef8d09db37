"""JSON operator files and deterministic report serialization.

Complex numbers are written as ``[re, im]`` pairs.  Parsing errors raise
:class:`SchemaError` carrying the dotted path of the offending field.
"""
from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .symbols import COVECTOR_DIM, GEOMETRIES, CollarOperator, SymbolError, SymbolMatrix


class SchemaError(ValueError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _complex(v, field):
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise SchemaError(field, "expected a [re, im] pair")


def _int(d, key, field, minimum=None):
    if key not in d:
        raise SchemaError(f"{field}.{key}" if field else key, "missing")
    v = d[key]
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError(f"{field}.{key}" if field else key, "expected an integer")
    if minimum is not None and v < minimum:
        raise SchemaError(f"{field}.{key}" if field else key, f"must be >= {minimum}")
    return v


def _symbol_matrix(entries, rows, cols, dim, field) -> SymbolMatrix:
    if not isinstance(entries, list):
        raise SchemaError(field, "expected a list of entries")
    ent = [[{} for _ in range(cols)] for _ in range(rows)]
    for i, e in enumerate(entries):
        f = f"{field}[{i}]"
        if not isinstance(e, dict):
            raise SchemaError(f, "expected an object")
        r = _int(e, "row", f, 0)
        c = _int(e, "col", f, 0)
        if r >= rows:
            raise SchemaError(f"{f}.row", f"{r} outside a {rows}x{cols} matrix")
        if c >= cols:
            raise SchemaError(f"{f}.col", f"{c} outside a {rows}x{cols} matrix")
        mons = e.get("monomials")
        if not isinstance(mons, list):
            raise SchemaError(f"{f}.monomials", "expected a list")
        for j, mo in enumerate(mons):
            fm = f"{f}.monomials[{j}]"
            if not isinstance(mo, dict) or "powers" not in mo or "coef" not in mo:
                raise SchemaError(fm, "expected {powers, coef}")
            pw = mo["powers"]
            if not isinstance(pw, list) or len(pw) != dim or not all(isinstance(p, int) and p >= 0 for p in pw):
                raise SchemaError(f"{fm}.powers", f"expected {dim} nonnegative integers")
            key = tuple(pw)
            ent[r][c][key] = ent[r][c].get(key, 0) + _complex(mo["coef"], f"{fm}.coef")
    try:
        return SymbolMatrix(tuple(tuple(row) for row in ent), dim)
    except SymbolError as exc:
        raise SchemaError(field, str(exc)) from None


def _symbol_to_json(S: SymbolMatrix) -> list:
    out = []
    for r, row in enumerate(S.entries):
        for c, e in enumerate(row):
            if e:
                out.append({"row": r, "col": c,
                            "monomials": [{"powers": list(k), "coef": [v.real, v.imag]}
                                          for k, v in sorted(e.items())]})
    return out


def operator_from_json(data: dict) -> CollarOperator:
    """Build a :class:`CollarOperator` from a parsed operator file."""
    if not isinstance(data, dict):
        raise SchemaError("<root>", "expected an object")
    m = _int(data, "m", "", 1)
    re_ = _int(data, "rank_e", "", 1)
    rf = _int(data, "rank_f", "", 1)
    geom = data.get("geometry")
    if geom not in GEOMETRIES:
        raise SchemaError("geometry", f"expected one of {list(GEOMETRIES)}")
    dim = COVECTOR_DIM[geom]
    coeffs = data.get("coeffs")
    if not isinstance(coeffs, list) or len(coeffs) != m + 1:
        raise SchemaError("coeffs", f"expected a list of m+1={m + 1} entries")
    sym: list[Any] = [None] * (m + 1)
    dn: list[Any] = [None] * (m + 1)
    z0: list[Any] = [None] * (m + 1)
    for i, c in enumerate(coeffs):
        f = f"coeffs[{i}]"
        if not isinstance(c, dict):
            raise SchemaError(f, "expected an object")
        l = _int(c, "l", f, 0)
        if l > m or sym[l] is not None:
            raise SchemaError(f"{f}.l", "out of range or repeated")
        sym[l] = _symbol_matrix(c.get("entries"), rf, re_, dim, f"{f}.entries")
        deg = {d for row in sym[l].degree_pattern for d in row if d is not None}
        if deg - {l}:
            raise SchemaError(f"{f}.entries", f"coefficient {l} must be homogeneous of degree {l}")
        if c.get("dnormal") is not None:
            dn[l] = _symbol_matrix(c["dnormal"], rf, re_, dim, f"{f}.dnormal")
        if c.get("zeroth") is not None:
            try:
                z0[l] = np.array([[_complex(v, f"{f}.zeroth") for v in row] for row in c["zeroth"]])
            except TypeError:
                raise SchemaError(f"{f}.zeroth", "expected a matrix of [re, im] pairs") from None
    try:
        return CollarOperator(m, re_, rf, geom, tuple(sym), tuple(dn), tuple(z0), name=str(data.get("name", "")))
    except SymbolError as exc:
        raise SchemaError("coeffs", str(exc)) from None


def operator_to_json(op: CollarOperator) -> dict:
    coeffs = []
    for l, c in enumerate(op.coeffs):
        item: dict[str, Any] = {"l": l, "entries": _symbol_to_json(c)}
        if op.dnormal[l] is not None:
            item["dnormal"] = _symbol_to_json(op.dnormal[l])
        if op.zeroth[l] is not None:
            item["zeroth"] = encode(op.zeroth[l])
        coeffs.append(item)
    return {"m": op.m, "rank_e": op.rank_e, "rank_f": op.rank_f, "geometry": op.geometry,
            "name": op.name, "coeffs": coeffs}


def load_operator(path) -> CollarOperator:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"line {exc.lineno}", exc.msg) from None
    return operator_from_json(data)


def encode(obj):
    """Recursively turn numpy arrays and complex numbers into JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [_float(obj.real), _float(obj.imag)]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def decode_matrix(m, field="matrix") -> np.ndarray:
    """Matrix whose entries are real numbers or ``[re, im]`` pairs."""
    def entry(v, f):
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(v)
        return _complex(v, f)
    if not isinstance(m, list) or not all(isinstance(row, list) for row in m):
        raise SchemaError(field, "expected a list of rows")
    if len({len(row) for row in m}) > 1:
        raise SchemaError(field, "rows have different lengths")
    try:
        return np.array([[entry(v, f"{field}[{i}][{j}]") for j, v in enumerate(row)]
                         for i, row in enumerate(m)], dtype=complex)
    except TypeError:
        raise SchemaError(field, "expected a matrix of [re, im] pairs") from None


def dumps(report: dict) -> str:
    return json.dumps(encode(report), sort_keys=True, indent=1)
