"""Shot-record files.

Layout, version 1::

    # {"format": "qutrit-kcbs-shots", "format_version": 1, "N": 5, ...}
    i,j,order,rep,a1,a2
    1,2,0,0,1,-1
    ...

The first line is ``#`` followed by a JSON object (keys sorted).  ``order``
is 0 for normal and 1 for reverse.  Nothing time-dependent is written, so
identical tables give identical bytes.

Other formats plug in through :func:`register_adapter`; an adapter maps a
path to a :class:`~qutrit_kcbs.records.ShotTable`.
"""

from __future__ import annotations

import io
import json
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from .records import ShotTable

FORMAT_NAME = "qutrit-kcbs-shots"
FORMAT_VERSION = 1
COLUMNS = ("i", "j", "order", "rep", "a1", "a2")
_HEADER_LINES = 2


class ShotFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def dumps(table: ShotTable) -> str:
    buf = io.StringIO()
    write_shots(table, buf)
    return buf.getvalue()


def write_shots(table: ShotTable, dest: str | Path | TextIO) -> None:
    header = dict(table.meta)
    header.update(format=FORMAT_NAME, format_version=FORMAT_VERSION, N=table.N,
                  theta_set=table.theta_set, n_records=len(table))
    header.setdefault("orders", [o.value for o in table.orders])
    cols = np.column_stack([getattr(table, c).astype(np.int64) for c in COLUMNS])
    if isinstance(dest, (str, Path)):
        with open(dest, "w", newline="\n") as fh:
            _write(fh, header, cols)
    else:
        _write(dest, header, cols)


def _write(fh: TextIO, header: dict, cols: np.ndarray) -> None:
    fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
    fh.write(",".join(COLUMNS) + "\n")
    if len(cols):
        np.savetxt(fh, cols, fmt="%d", delimiter=",")


def _parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise ShotFileError("missing '#' JSON header", 1)
    try:
        header = json.loads(line[1:])
    except json.JSONDecodeError as exc:
        raise ShotFileError(f"header is not valid JSON ({exc.msg})", 1) from None
    if not isinstance(header, dict):
        raise ShotFileError("header must be a JSON object", 1)
    if header.get("format") != FORMAT_NAME:
        raise ShotFileError(f"not a {FORMAT_NAME} file", 1)
    if "format_version" not in header:
        raise ShotFileError("header lacks the mandatory format_version", 1)
    if header["format_version"] != FORMAT_VERSION:
        raise ShotFileError(f"unsupported format_version {header['format_version']!r}", 1)
    for key in ("N", "theta_set"):
        if key not in header:
            raise ShotFileError(f"header lacks {key!r}", 1)
    return header


def _parse_rows(lines: list[str]) -> np.ndarray:
    if not lines:
        return np.empty((0, len(COLUMNS)), dtype=np.int64)
    try:
        rows = np.loadtxt(lines, delimiter=",", dtype=np.int64, ndmin=2)
        if rows.shape[1] == len(COLUMNS):
            return rows
    except ValueError:
        pass
    # Slow path, only to locate the offending line.
    rows = np.empty((len(lines), len(COLUMNS)), dtype=np.int64)
    for k, line in enumerate(lines):
        parts = line.strip().split(",")
        if len(parts) != len(COLUMNS):
            raise ShotFileError(f"expected {len(COLUMNS)} fields, got {len(parts)}", k + _HEADER_LINES + 1)
        try:
            rows[k] = [int(p) for p in parts]
        except ValueError:
            raise ShotFileError(f"non-integer field in {line.strip()!r}", k + _HEADER_LINES + 1) from None
    return rows


def _validate(rows: np.ndarray, N: int) -> None:
    i, j, order, rep, a1, a2 = rows.T
    checks = [
        ((i < 1) | (i > N), f"i outside 1..{N}"),
        ((j < 1) | (j > N), f"j outside 1..{N}"),
        ((order != 0) & (order != 1), "order must be 0 (normal) or 1 (reverse)"),
        (rep < 0, "rep must be non-negative"),
        ((a1 != 1) & (a1 != -1), "a1 must be +1 or -1"),
        ((a2 != 1) & (a2 != -1), "a2 must be +1 or -1"),
    ]
    step = np.where(order == 1, -1, 1)
    checks.append(((i - 1 + step) % N + 1 != j, "pair is not adjacent for its order"))
    first_bad = None
    for bad, msg in checks:
        if bad.any():
            k = int(np.argmax(bad))
            if first_bad is None or k < first_bad[0]:
                first_bad = (k, msg)
    if first_bad is not None:
        raise ShotFileError(first_bad[1], first_bad[0] + _HEADER_LINES + 1)


def loads(text: str) -> ShotTable:
    lines = text.splitlines()
    if not lines:
        raise ShotFileError("empty file", 1)
    header = _parse_header(lines[0])
    if len(lines) < 2 or lines[1].strip() != ",".join(COLUMNS):
        raise ShotFileError(f"expected column line {','.join(COLUMNS)!r}", 2)
    body = lines[_HEADER_LINES:]
    if body and not body[-1].strip():
        body = body[:-1]
    rows = _parse_rows(body)
    N = header["N"]
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise ShotFileError(f"header N must be a positive integer, got {N!r}", 1)
    _validate(rows, N)
    expected = header.get("n_records")
    if expected is not None and expected != len(rows):
        raise ShotFileError(f"header declares {expected} records, file has {len(rows)}")
    meta = {k: v for k, v in header.items() if k not in ("format", "format_version", "n_records")}
    return ShotTable(N, float(header["theta_set"]), *rows.T, meta=meta)


def _read_native(path: str | Path) -> ShotTable:
    try:
        text = Path(path).read_text()
    except UnicodeDecodeError:
        raise ShotFileError("file is not UTF-8 text") from None
    return loads(text)


ADAPTERS: dict[str, Callable[[str | Path], ShotTable]] = {"native": _read_native}


def register_adapter(name: str):
    """Decorator adding an importer for a foreign shot format."""

    def deco(fn):
        ADAPTERS[name] = fn
        return fn

    return deco


def read_shots(path: str | Path, adapter: str = "native") -> ShotTable:
    try:
        reader = ADAPTERS[adapter]
    except KeyError:
        raise ValueError(f"unknown adapter {adapter!r}; known: {sorted(ADAPTERS)}") from None
    return reader(path)
