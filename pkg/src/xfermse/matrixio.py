"""Matrix file formats: CSV and the binary ``xmat`` layout.

``xmat`` layout, all little-endian::

    b"XMAT" | version: u32 | rows: u64 | cols: u64 | rows*cols float64, row-major
"""

from __future__ import annotations

import csv
import hashlib
import io
import struct
from pathlib import Path

import numpy as np

__all__ = [
    "MatrixFormatError",
    "read_matrix",
    "write_matrix",
    "read_csv",
    "write_csv",
    "read_xmat",
    "write_xmat",
    "file_digest",
    "detect_format",
]

XMAT_MAGIC = b"XMAT"
XMAT_VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


class MatrixFormatError(ValueError):
    pass


def detect_format(path) -> str:
    path = Path(path)
    if path.suffix.lower() == ".xmat":
        return "xmat"
    try:
        with open(path, "rb") as fh:
            if fh.read(4) == XMAT_MAGIC:
                return "xmat"
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    return "csv"


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def read_csv(path, header: bool | None = None) -> np.ndarray:
    """Read a numeric CSV file.

    ``header=None`` auto-detects a header: the first row is skipped when any
    of its cells is not a number.
    """
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows")
    if header is None:
        header = not all(_is_number(c) for c in rows[0])
    if header:
        rows = rows[1:]
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows after header")
    ncol = len(rows[0])
    out = np.empty((len(rows), ncol))
    for i, row in enumerate(rows):
        if len(row) != ncol:
            raise MatrixFormatError(
                f"{path}: row {i + 1} has {len(row)} columns, expected {ncol}"
            )
        try:
            out[i] = [float(c) for c in row]
        except ValueError as exc:
            raise MatrixFormatError(f"{path}: row {i + 1}: {exc}") from exc
    if not np.all(np.isfinite(out)):
        raise MatrixFormatError(f"{path}: non-finite values")
    return out


def write_csv(path, M, header: list | None = None) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        # repr gives the shortest string that round-trips to the same float64
        w.writerows([repr(float(v)) for v in row] for row in M)


def read_xmat(path) -> np.ndarray:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    if len(raw) < _HEADER.size:
        raise MatrixFormatError(f"{path}: truncated xmat header")
    magic, version, rows, cols = _HEADER.unpack_from(raw)
    if magic != XMAT_MAGIC:
        raise MatrixFormatError(f"{path}: bad magic {magic!r}")
    if version != XMAT_VERSION:
        raise MatrixFormatError(f"{path}: unsupported xmat version {version}")
    expected = _HEADER.size + 8 * rows * cols
    if len(raw) != expected:
        raise MatrixFormatError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size, count=rows * cols)
    M = data.reshape(rows, cols).astype(np.float64)
    if not np.all(np.isfinite(M)):
        raise MatrixFormatError(f"{path}: non-finite values")
    return M


def write_xmat(path, M) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=np.float64))
    rows, cols = M.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(XMAT_MAGIC, XMAT_VERSION, rows, cols))
        fh.write(np.ascontiguousarray(M, dtype="<f8").tobytes())


def read_matrix(path, header: bool | None = None) -> np.ndarray:
    if detect_format(path) == "xmat":
        return read_xmat(path)
    return read_csv(path, header=header)


def write_matrix(path, M) -> None:
    if Path(path).suffix.lower() == ".xmat":
        write_xmat(path, M)
    else:
        write_csv(path, M)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()
