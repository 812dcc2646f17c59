"""Matrix Market reader/writer (coordinate and array, real/complex).

Values are serialized with Python's shortest round-trip ``repr`` so a
write-read cycle reproduces every binary64 bit-exactly.  Parse errors
carry the offending line number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MatrixMarketError

__all__ = ["MMInfo", "read_matrix_market", "write_matrix_market"]

_FIELDS = ("real", "complex", "integer")
_SYMMETRIES = ("general", "symmetric", "hermitian")


@dataclass(frozen=True)
class MMInfo:
    fmt: str        # "coordinate" | "array"
    field: str      # "real" | "complex" | "integer"
    symmetry: str   # "general" | "symmetric" | "hermitian"
    rows: int
    cols: int
    nnz: int


def _fmt_value(x) -> str:
    if isinstance(x, complex):
        return f"{_fmt_value(x.real)} {_fmt_value(x.imag)}"
    return repr(float(x))


def write_matrix_market(M: np.ndarray, path, symmetry: str = "general", fmt: str | None = None) -> None:
    """Write a dense matrix; symmetric/hermitian store the lower triangle."""
    M = np.atleast_2d(np.asarray(M))
    if symmetry not in _SYMMETRIES:
        raise ValueError(f"symmetry must be one of {_SYMMETRIES}")
    rows, cols = M.shape
    cplx = bool(np.iscomplexobj(M))
    field = "complex" if cplx else "real"
    if symmetry != "general":
        if rows != cols:
            raise ValueError("symmetric storage needs a square matrix")
        ref = M.conj().T if symmetry == "hermitian" else M.T
        if not np.array_equal(M, ref):
            raise ValueError(f"matrix is not {symmetry}")
    if fmt is None:
        fmt = "coordinate" if np.count_nonzero(M) * 4 < M.size else "array"
    if fmt not in ("coordinate", "array"):
        raise ValueError("fmt must be 'coordinate' or 'array'")

    lines = [f"%%MatrixMarket matrix {fmt} {field} {symmetry}"]
    if fmt == "array":
        lines.append(f"{rows} {cols}")
        for j in range(cols):
            i0 = j if symmetry != "general" else 0
            for i in range(i0, rows):
                v = complex(M[i, j]) if cplx else float(M[i, j])
                lines.append(_fmt_value(v))
    else:
        entries = []
        for j in range(cols):
            i0 = j if symmetry != "general" else 0
            for i in range(i0, rows):
                v = complex(M[i, j]) if cplx else float(M[i, j])
                if v != 0:
                    entries.append((i, j, v))
        lines.append(f"{rows} {cols} {len(entries)}")
        for i, j, v in entries:
            lines.append(f"{i + 1} {j + 1} {_fmt_value(v)}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_value(parts, field, lineno):
    try:
        if field == "complex":
            if len(parts) != 2:
                raise ValueError("expected two values")
            return complex(float(parts[0]), float(parts[1]))
        if len(parts) != 1:
            raise ValueError("expected one value")
        if field == "integer":
            return float(int(parts[0]))
        return float(parts[0])
    except ValueError as exc:
        raise MatrixMarketError(f"line {lineno}: bad {field} value {' '.join(parts)!r}: {exc}") from exc


def read_matrix_market(path):
    """Read into a dense ndarray; returns (matrix, MMInfo)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = fh.read().splitlines()
    if not raw:
        raise MatrixMarketError("line 1: empty file")
    header = raw[0].split()
    if len(header) != 5 or header[0] != "%%MatrixMarket" or header[1].lower() != "matrix":
        raise MatrixMarketError(f"line 1: malformed header {raw[0]!r}")
    fmt, field, symmetry = header[2].lower(), header[3].lower(), header[4].lower()
    if fmt not in ("coordinate", "array"):
        raise MatrixMarketError(f"line 1: unsupported format {fmt!r}")
    if field not in _FIELDS:
        raise MatrixMarketError(f"line 1: unsupported field {field!r}")
    if symmetry not in _SYMMETRIES:
        raise MatrixMarketError(f"line 1: unsupported symmetry {symmetry!r}")

    body = [(i + 1, ln) for i, ln in enumerate(raw) if i > 0]
    body = [(no, ln.strip()) for no, ln in body if ln.strip() and not ln.lstrip().startswith("%")]
    if not body:
        raise MatrixMarketError("line 1: missing size line")
    size_no, size_line = body[0]
    sizes = size_line.split()
    dtype = complex if field == "complex" else float
    if fmt == "array":
        if len(sizes) != 2:
            raise MatrixMarketError(f"line {size_no}: array size line needs 2 integers")
        try:
            rows, cols = int(sizes[0]), int(sizes[1])
        except ValueError as exc:
            raise MatrixMarketError(f"line {size_no}: bad size line: {exc}") from exc
        out = np.zeros((rows, cols), dtype=dtype)
        expected = []
        for j in range(cols):
            i0 = j if symmetry != "general" else 0
            expected.extend((i, j) for i in range(i0, rows))
        if len(body) - 1 != len(expected):
            raise MatrixMarketError(
                f"line {size_no}: expected {len(expected)} entries, file has {len(body) - 1}"
            )
        for (i, j), (no, ln) in zip(expected, body[1:]):
            out[i, j] = _parse_value(ln.split(), field, no)
        nnz = int(np.count_nonzero(out))
    else:
        if len(sizes) != 3:
            raise MatrixMarketError(f"line {size_no}: coordinate size line needs 3 integers")
        try:
            rows, cols, nnz = (int(s) for s in sizes)
        except ValueError as exc:
            raise MatrixMarketError(f"line {size_no}: bad size line: {exc}") from exc
        if len(body) - 1 != nnz:
            raise MatrixMarketError(f"line {size_no}: expected {nnz} entries, file has {len(body) - 1}")
        out = np.zeros((rows, cols), dtype=dtype)
        for no, ln in body[1:]:
            parts = ln.split()
            if len(parts) < 3:
                raise MatrixMarketError(f"line {no}: coordinate entry needs row col value")
            try:
                i, j = int(parts[0]) - 1, int(parts[1]) - 1
            except ValueError as exc:
                raise MatrixMarketError(f"line {no}: bad indices: {exc}") from exc
            if not (0 <= i < rows and 0 <= j < cols):
                raise MatrixMarketError(f"line {no}: index ({i + 1}, {j + 1}) out of bounds")
            if symmetry != "general" and i < j:
                raise MatrixMarketError(f"line {no}: entry above the diagonal in {symmetry} storage")
            out[i, j] += _parse_value(parts[2:], field, no)

    if symmetry != "general":
        strict = np.tril(out, -1)
        out = out + (strict.conj().T if symmetry == "hermitian" else strict.T)
        if symmetry == "hermitian" and np.iscomplexobj(out) and np.diagonal(out).imag.any():
            raise MatrixMarketError("hermitian matrix with complex diagonal")
    return out, MMInfo(fmt, field, symmetry, rows, cols, nnz)
