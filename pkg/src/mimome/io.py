"""Matrix file interchange: JSON with explicit [re, im] pairs as the
primary format (bit-exact round trip), plus a CSV reader accepting
"a+bi" style tokens for convenience on input."""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError


def write_matrix(path, mat: np.ndarray) -> None:
    """Write a complex matrix as JSON {rows, cols, data: [[re, im], ...]}.

    Values are serialized with Python's shortest round-trip float repr, so
    a write-then-read cycle reproduces the array bit for bit."""
    mat = np.asarray(mat, dtype=np.complex128)
    if mat.ndim != 2:
        raise ParseError("only 2-D matrices can be written")
    rows, cols = mat.shape
    data = [[float(v.real), float(v.imag)] for v in mat.reshape(-1)]
    doc = {"rows": rows, "cols": cols, "data": data}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def read_matrix(path) -> np.ndarray:
    """Read a matrix file; dispatches on content to JSON or CSV."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return _read_json(text, path)
    return _read_csv(text, path)


def _read_json(text: str, path) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    for key in ("rows", "cols", "data"):
        if key not in doc:
            raise ParseError(f"{path}: missing field '{key}'")
    rows, cols = int(doc["rows"]), int(doc["cols"])
    data = doc["data"]
    if rows < 1 or cols < 1:
        raise ParseError(f"{path}: rows and cols must be positive")
    if len(data) != rows * cols:
        raise ParseError(
            f"{path}: data has {len(data)} entries, expected {rows * cols}")
    out = np.empty(rows * cols, dtype=np.complex128)
    for i, pair in enumerate(data):
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            raise ParseError(f"{path}: data entry {i} is not a [re, im] pair")
        re, im = float(pair[0]), float(pair[1])
        if not (np.isfinite(re) and np.isfinite(im)):
            raise ParseError(f"{path}: data entry {i} is not finite")
        out[i] = complex(re, im)
    return out.reshape(rows, cols)


def _parse_token(tok: str, path, line_no: int, col_no: int) -> complex:
    # accepts 1.5, -2i, 1+2i, 3.0-0.5i (with i or j suffix)
    cleaned = tok.strip().replace("i", "j").replace("I", "j")
    if cleaned == "":
        raise ParseError(f"{path}: empty entry at line {line_no} column {col_no}")
    try:
        val = complex(cleaned)
    except ValueError:
        raise ParseError(
            f"{path}: cannot parse '{tok.strip()}' at line {line_no} "
            f"column {col_no}") from None
    if not (np.isfinite(val.real) and np.isfinite(val.imag)):
        raise ParseError(
            f"{path}: non-finite entry at line {line_no} column {col_no}")
    return val


def _read_csv(text: str, path) -> np.ndarray:
    rows = []
    width = None
    for line_no, line in enumerate(text.splitlines(), start=1):
        if line.strip() == "" or line.lstrip().startswith("#"):
            continue
        toks = line.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise ParseError(
                f"{path}: line {line_no} has {len(toks)} entries, expected {width}")
        rows.append([_parse_token(t, path, line_no, c + 1)
                     for c, t in enumerate(toks)])
    if not rows:
        raise ParseError(f"{path}: no matrix rows found")
    return np.array(rows, dtype=np.complex128)
