"""Reading and writing embedding tables.

Binary layout (all little-endian)::

    offset  size  field
    0       4     magic  b"CFMB"
    4       4     version (uint32, currently 1)
    8       4     n, number of rows (uint32)
    12      4     d, row width (uint32)
    16      4*n*d float32 payload, row-major

CSV files are UTF-8 with a header row ``f0,f1,...`` and one sample per line.
Tables are returned as float64.
"""
from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError

MAGIC = b"CFMB"
VERSION = 1
HEADER = struct.Struct("<4sIII")


def atomic_write(path, data: bytes) -> None:
    """Write ``data`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def encode_embeddings(table) -> bytes:
    a = np.asarray(table)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise FormatError(f"expected an n x d table, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise FormatError("embeddings must be finite")
    n, d = a.shape
    payload = np.ascontiguousarray(a, dtype="<f4")
    if not np.all(np.isfinite(payload)):
        raise FormatError("values overflow float32")
    return HEADER.pack(MAGIC, VERSION, n, d) + payload.tobytes()


def write_embeddings(path, table) -> None:
    atomic_write(path, encode_embeddings(table))


def decode_embeddings(raw: bytes, name: str = "<bytes>") -> np.ndarray:
    if len(raw) < HEADER.size:
        raise FormatError(f"{name}: file is {len(raw)} bytes, shorter than the 16-byte header")
    magic, version, n, d = HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise FormatError(f"{name}: bad magic {magic!r} at offset 0, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{name}: unsupported version {version} at offset 4")
    expected = n * d * 4
    got = len(raw) - HEADER.size
    if got != expected:
        raise FormatError(
            f"{name}: payload is {got} bytes at offset {HEADER.size}, expected {expected} (n={n}, d={d})"
        )
    a = np.frombuffer(raw, dtype="<f4", offset=HEADER.size).reshape(n, d)
    bad = ~np.isfinite(a)
    if bad.any():
        flat = int(np.argmax(bad.reshape(-1)))
        raise FormatError(
            f"{name}: non-finite value at byte offset {HEADER.size + 4 * flat} "
            f"(row {flat // d}, column {flat % d})"
        )
    return a.astype(np.float64)


def read_embeddings(path) -> np.ndarray:
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise FormatError(f"{path}: cannot read ({exc.strerror})") from exc
    return decode_embeddings(raw, str(path))


def write_csv(path, table) -> None:
    a = np.asarray(table, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    lines = [",".join(f"f{i}" for i in range(a.shape[1]))]
    lines += [",".join(repr(float(v)) for v in row) for row in a]
    atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))


def read_csv(path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise FormatError(f"{path}: cannot read as UTF-8 text ({exc})") from exc
    lines = text.splitlines()
    if not lines:
        raise FormatError(f"{path}: empty file")
    header = [h.strip() for h in lines[0].split(",")]
    d = len(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != d:
            raise FormatError(f"{path}: line {lineno} has {len(fields)} fields, expected {d}")
        try:
            row = [float(f) for f in fields]
        except ValueError:
            raise FormatError(f"{path}: line {lineno} has a non-numeric field") from None
        if not all(np.isfinite(row)):
            raise FormatError(f"{path}: line {lineno} has a non-finite value")
        rows.append(row)
    if not rows:
        raise FormatError(f"{path}: no data rows")
    return np.array(rows, dtype=np.float64)


def load_table(path) -> np.ndarray:
    """Read a table, choosing CSV for ``.csv`` files and the binary format otherwise."""
    if str(path).lower().endswith(".csv"):
        return read_csv(path)
    return read_embeddings(path)


def save_table(path, table) -> None:
    if str(path).lower().endswith(".csv"):
        write_csv(path, table)
    else:
        write_embeddings(path, table)
