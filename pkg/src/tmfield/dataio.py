"""CSV ingestion and byte-deterministic NPY / PGM / CSV export.

Readers are strict: every defective cell is reported with its 1-based file
row so the failure can be found in the original file, and non-finite values
are rejected rather than propagated. Writers are byte-deterministic: the
same array always produces the same file, which makes exported artifacts
directly comparable across runs and across process boundaries.

NPY output is always format version 1.0, little-endian float64, C order.
PGM output is the binary P5 variant with one byte per pixel, mapping a
probability v to round-half-up(v * 255). CSV float output uses ``repr``,
whose shortest round-trip representation parses back to the identical
double.
"""

from __future__ import annotations

import csv
import struct

import numpy as np

from .binning import TimeSeries
from .errors import DataError, UsageError
from .field import ChannelStack, FieldImage

__all__ = [
    "read_csv",
    "write_npy",
    "read_npy",
    "write_pgm",
    "write_series_csv",
    "write_matrix_csv",
    "read_matrix_csv",
]

_NPY_MAGIC = b"\x93NUMPY"


def _parses_as_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _numbered_rows(path):
    try:
        handle = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}", code="missing-file")
    except IsADirectoryError:
        raise DataError(f"input path is a directory: {path}", code="missing-file")
    with handle:
        rows = [
            (lineno, [cell.strip() for cell in row])
            for lineno, row in enumerate(csv.reader(handle), start=1)
            if any(cell.strip() for cell in row)
        ]
    if not rows:
        raise DataError(f"no data rows in {path}", code="invalid-input")
    return rows


def read_csv(path, column=None) -> TimeSeries:
    """Read one numeric column from a CSV file.

    Headerless single-column files need no selector. Files with a header
    row (detected by any unparseable cell in the first row) or multiple
    columns require ``column``, either a header name or a 0-based index.
    Non-numeric and non-finite cells are rejected with the offending file
    row number; note that ``nan``/``inf`` spellings parse as floats and are
    therefore reported as non-finite rather than non-numeric.

    Returns
    -------
    TimeSeries
    """
    rows = _numbered_rows(path)
    header = None
    if any(not _parses_as_float(cell) for cell in rows[0][1]):
        header = rows[0][1]
        rows = rows[1:]
        if not rows:
            raise DataError(f"no data rows after the header in {path}", code="invalid-input")

    width = len(rows[0][1])
    index = _resolve_column(column, header, width)

    values = np.empty(len(rows), dtype=np.float64)
    for position, (lineno, cells) in enumerate(rows):
        if index >= len(cells):
            raise DataError(
                f"row {lineno} has {len(cells)} columns, expected at least {index + 1}",
                code="invalid-input",
            )
        cell = cells[index]
        try:
            value = float(cell)
        except ValueError:
            raise DataError(
                f"non-numeric value {cell!r} at row {lineno}", code="non-numeric"
            )
        if not np.isfinite(value):
            raise DataError(f"non-finite value at row {lineno}", code="invalid-input")
        values[position] = value
    return TimeSeries(values)


def _resolve_column(column, header, width: int) -> int:
    if column is None:
        if width != 1:
            raise DataError(
                f"input has {width} columns; a column selector is required",
                code="bad-column",
            )
        return 0
    if header is not None and str(column) in header:
        return header.index(str(column))
    try:
        index = int(column)
    except (TypeError, ValueError):
        if header is None:
            raise DataError(
                f"column {column!r} named but the file has no header row",
                code="bad-column",
            )
        raise DataError(f"no column named {column!r} in header {header}", code="bad-column")
    if not 0 <= index < width:
        raise DataError(
            f"column index {index} out of range for {width} columns", code="bad-column"
        )
    return index


def _export_payload(obj) -> np.ndarray:
    if isinstance(obj, ChannelStack):
        return obj.as_array()
    if isinstance(obj, FieldImage):
        return obj.entries
    return np.asarray(obj, dtype=np.float64)


def write_npy(obj, path) -> None:
    """Write an image, stack, or array as an NPY version 1.0 file.

    The payload is little-endian float64 in C order; a FieldImage writes
    with shape (T, T) and a ChannelStack with shape (R, T, T). The header
    is padded with spaces so the preamble length is a multiple of 64
    bytes, and the same input always yields the same bytes.
    """
    array = np.ascontiguousarray(_export_payload(obj), dtype="<f8")
    header = "{'descr': '<f8', 'fortran_order': False, 'shape': %s, }" % str(array.shape)
    unpadded = len(_NPY_MAGIC) + 2 + 2 + len(header) + 1
    padding = (-unpadded) % 64
    header_bytes = header.encode("latin1") + b" " * padding + b"\n"
    with open(path, "wb") as fh:
        fh.write(_NPY_MAGIC)
        fh.write(bytes((1, 0)))
        fh.write(struct.pack("<H", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(array.tobytes(order="C"))


def read_npy(path) -> np.ndarray:
    """Read an NPY file back as a contiguous float64 array."""
    try:
        array = np.load(path, allow_pickle=False)
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}", code="missing-file")
    except ValueError as exc:
        raise DataError(f"not a readable NPY file: {exc}", code="invalid-input")
    if array.dtype != np.float64:
        raise DataError(f"expected float64 payload, got {array.dtype}", code="invalid-input")
    return np.ascontiguousarray(array)


def write_pgm(img, path) -> None:
    """Write a single image as a binary (P5) 8-bit PGM file.

    Probabilities map to gray levels by round-half-up of v * 255, so 0.5
    lands on 128 rather than the nearest even value.
    """
    entries = _export_payload(img)
    if entries.ndim != 2:
        raise UsageError(
            f"PGM export needs a single 2-D image, got shape {entries.shape}",
            code="format-channels",
        )
    if entries.size and (entries.min() < 0.0 or entries.max() > 1.0):
        raise UsageError("PGM export expects entries in [0, 1]", code="invalid-input")
    levels = np.floor(entries * 255.0 + 0.5).astype(np.uint8)
    height, width = levels.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(levels.tobytes(order="C"))


def write_series_csv(values, path) -> None:
    """Write a series as headerless single-column CSV with repr floats."""
    array = np.asarray(values, dtype=np.float64).reshape(-1)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for value in array:
            fh.write(repr(float(value)))
            fh.write("\n")


def write_matrix_csv(obj, path) -> None:
    """Write a 2-D array as CSV, one image row per line, repr floats."""
    entries = _export_payload(obj)
    if entries.ndim != 2:
        raise UsageError(
            f"CSV export needs a single 2-D image, got shape {entries.shape}",
            code="format-channels",
        )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for row in entries:
            fh.write(",".join(repr(float(value)) for value in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    """Read a rectangular numeric CSV (no header) as a float64 matrix."""
    rows = _numbered_rows(path)
    width = len(rows[0][1])
    matrix = np.empty((len(rows), width), dtype=np.float64)
    for position, (lineno, cells) in enumerate(rows):
        if len(cells) != width:
            raise DataError(
                f"row {lineno} has {len(cells)} columns, expected {width}",
                code="invalid-input",
            )
        for j, cell in enumerate(cells):
            try:
                value = float(cell)
            except ValueError:
                raise DataError(
                    f"non-numeric value {cell!r} at row {lineno}", code="non-numeric"
                )
            if not np.isfinite(value):
                raise DataError(f"non-finite value at row {lineno}", code="invalid-input")
            matrix[position, j] = value
    return matrix
