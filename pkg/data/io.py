"""
Readers and writers for matrices, signals and JSON artifacts.

Matrices travel as headerless row-major CSV or as the CDIF1 binary
container: 5-byte magic b"CDIF1", little-endian u64 rows, u64 cols, then
rows*cols little-endian f64 values in row-major order.
"""
import csv
import json
from pathlib import Path
from typing import Any, List, Union

import numpy as np

from utils.errors import DataParseError, ShapeError

PathLike = Union[str, Path]

CDIF_MAGIC = b"CDIF1"
_HEADER_DTYPE = np.dtype("<u8")
_PAYLOAD_DTYPE = np.dtype("<f8")


def _to_builtin(value: Any) -> Any:
    """json.dumps default hook for numpy scalars and arrays."""
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(path: PathLike, payload: Any) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_to_builtin) + "\n")
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataParseError(e.msg, path=str(path), line=e.lineno) from e


def write_matrix_csv(path: PathLike, matrix) -> Path:
    """Write a matrix as headerless CSV with round-trip precision."""
    path = Path(path)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    np.savetxt(path, matrix, delimiter=",", fmt="%.17g")
    return path


def read_matrix_csv(path: PathLike, columns: int = None) -> np.ndarray:
    """
    Read a headerless numeric CSV.

    Blank lines and lines starting with '#' are skipped.  Every other row
    must hold the same number of finite numbers.

    Raises:
        DataParseError: naming the offending line
    """
    path = Path(path)
    rows: List[List[float]] = []
    width = columns

    with open(path, newline="") as handle:
        for line_number, record in enumerate(csv.reader(handle), start=1):
            if not record or not "".join(record).strip() or record[0].lstrip().startswith("#"):
                continue
            try:
                values = [float(field) for field in record]
            except ValueError:
                raise DataParseError(f"non-numeric value in row {record!r}", path=str(path), line=line_number)
            if not np.all(np.isfinite(values)):
                raise DataParseError("non-finite value", path=str(path), line=line_number)
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise DataParseError(
                    f"expected {width} columns, found {len(values)}", path=str(path), line=line_number
                )
            rows.append(values)

    if not rows:
        raise DataParseError("no data rows", path=str(path))

    return np.asarray(rows, dtype=float)


def write_matrix_binary(path: PathLike, matrix) -> Path:
    """Write a matrix in the CDIF1 container."""
    path = Path(path)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    if matrix.ndim != 2:
        raise ShapeError(f"CDIF1 holds 2-D matrices, got shape {matrix.shape}")

    header = np.array(matrix.shape, dtype=_HEADER_DTYPE).tobytes()
    payload = np.ascontiguousarray(matrix, dtype=_PAYLOAD_DTYPE).tobytes(order="C")
    path.write_bytes(CDIF_MAGIC + header + payload)
    return path


def read_matrix_binary(path: PathLike) -> np.ndarray:
    """Read a matrix from the CDIF1 container."""
    path = Path(path)
    blob = path.read_bytes()
    header_end = len(CDIF_MAGIC) + 2 * _HEADER_DTYPE.itemsize

    if len(blob) < header_end or blob[: len(CDIF_MAGIC)] != CDIF_MAGIC:
        raise DataParseError("missing CDIF1 header", path=str(path))

    rows, cols = (int(v) for v in np.frombuffer(blob, dtype=_HEADER_DTYPE, count=2, offset=len(CDIF_MAGIC)))
    expected = header_end + rows * cols * _PAYLOAD_DTYPE.itemsize
    if len(blob) != expected:
        raise DataParseError(f"payload holds {len(blob) - header_end} bytes, expected {expected - header_end}", path=str(path))

    values = np.frombuffer(blob, dtype=_PAYLOAD_DTYPE, count=rows * cols, offset=header_end)
    return values.reshape(rows, cols).astype(float)


def read_signal_csv(path: PathLike) -> np.ndarray:
    """
    Read a two-column signal CSV (sample index implicit).

    Returns:
        Array of shape (2, T)
    """
    table = read_matrix_csv(path, columns=2)
    return np.ascontiguousarray(table.T)


def write_signal_csv(path: PathLike, s1, s2) -> Path:
    s1 = np.asarray(s1, dtype=float)
    s2 = np.asarray(s2, dtype=float)
    if s1.shape != s2.shape or s1.ndim != 1:
        raise ShapeError(f"channels must be 1-D and equal length: {s1.shape} vs {s2.shape}")
    return write_matrix_csv(path, np.column_stack([s1, s2]))


def read_beats_json(path: PathLike) -> np.ndarray:
    """Read beat indices from a JSON list or an object with a 'fetal_beats' key."""
    payload = read_json(path)
    if isinstance(payload, dict):
        payload = payload.get("fetal_beats")
    if not isinstance(payload, list):
        raise DataParseError("expected a list of beat indices", path=str(path))
    try:
        beats = np.asarray([int(b) for b in payload], dtype=int)
    except (TypeError, ValueError) as e:
        raise DataParseError(f"beat indices must be integers: {e}", path=str(path)) from e
    return np.sort(beats)
