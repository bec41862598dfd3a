"""Output file management and the optimizer-run cache."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import sqlite3
import threading
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

from wigner_cs import constants as C
from wigner_cs.constants import ModeKind, Provenance
from wigner_cs.exceptions import FormatError
from wigner_cs.sensing import SamplingSet, SensingMatrix

logger = logging.getLogger(__name__)


def fmt_float(value: float) -> str:
    """17 significant digits: enough to round-trip a double."""
    return f"{float(value):.17g}"


# ---------------------------------------------------------------------------
# Directory helpers
# ---------------------------------------------------------------------------

def ensure_directories(directories: Iterable[str]) -> None:
    """Create each directory in *directories* if it does not already exist."""
    for d in directories:
        os.makedirs(d, exist_ok=True)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def write_formatted_json(data: Any, filepath: str, sort_keys: bool = False) -> None:
    """Write *data* as indented JSON to *filepath*."""
    with open(filepath, "w", encoding="utf-8") as fh:
        json.dump(data, fh, ensure_ascii=False, indent=4, sort_keys=sort_keys)
        fh.write("\n")


def read_json(filepath: str) -> Any:
    try:
        with open(filepath, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise FormatError("File not found", path=filepath) from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"Malformed JSON: {exc}", path=filepath) from exc


# ---------------------------------------------------------------------------
# Generic CSV
# ---------------------------------------------------------------------------

def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return fmt_float(value)
    if value is None:
        return ""
    return value


def write_rows_csv(rows: Sequence[dict[str, Any]], filepath: str, fieldnames: Sequence[str]) -> None:
    """Write dict rows with a header; floats use :func:`fmt_float`."""
    with open(filepath, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in fieldnames})


def write_two_column(filepath: str, xs: Iterable[float], ys: Iterable[float | None]) -> None:
    """Plot-ready whitespace-separated ``x y`` file; missing y values are skipped."""
    with open(filepath, "w", encoding="utf-8") as fh:
        for x, y in zip(xs, ys):
            if y is None:
                continue
            fh.write(f"{fmt_float(x)} {fmt_float(y)}\n")


def _read_csv(filepath: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(filepath, encoding="utf-8", newline="") as fh:
            rows = [row for row in csv.reader(fh) if row]
    except FileNotFoundError:
        raise FormatError("File not found", path=filepath) from None
    if not rows:
        raise FormatError("Empty CSV file", path=filepath)
    return [h.strip() for h in rows[0]], rows[1:]


def _float_table(filepath: str, rows: list[list[str]], width: int) -> np.ndarray:
    try:
        table = np.array([[float(v) for v in row] for row in rows], dtype=float)
    except ValueError as exc:
        raise FormatError(f"Non-numeric value: {exc}", path=filepath) from exc
    if table.size == 0:
        raise FormatError("CSV file has no data rows", path=filepath)
    if table.ndim != 2 or table.shape[1] != width:
        raise FormatError(f"Expected {width} columns per row", path=filepath)
    return table


# ---------------------------------------------------------------------------
# Sampling sets (CSV + JSON provenance sidecar)
# ---------------------------------------------------------------------------

def sidecar_path(filepath: str) -> str:
    return filepath + C.SIDECAR_SUFFIX


def write_samples_csv(samples: SamplingSet, filepath: str, meta: dict[str, Any] | None = None) -> None:
    """Write ``theta,phi,chi`` rows in radians plus a provenance sidecar."""
    with open(filepath, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(C.SAMPLES_HEADER)
        for th, ph, ch in zip(samples.theta, samples.phi, samples.chi):
            writer.writerow([fmt_float(th), fmt_float(ph), fmt_float(ch)])

    sidecar = {"provenance": str(samples.provenance), "K": samples.K}
    if meta:
        sidecar.update(meta)
    write_formatted_json(sidecar, sidecar_path(filepath), sort_keys=True)


def read_samples_csv(filepath: str) -> SamplingSet:
    """Read a sampling CSV; provenance comes from the sidecar when present."""
    header, rows = _read_csv(filepath)
    if tuple(header) != C.SAMPLES_HEADER:
        raise FormatError(f"Expected header {','.join(C.SAMPLES_HEADER)}", path=filepath)
    table = _float_table(filepath, rows, 3)

    provenance = Provenance.FILE
    side = sidecar_path(filepath)
    if os.path.exists(side):
        try:
            provenance = Provenance(read_json(side).get("provenance", Provenance.FILE))
        except (ValueError, AttributeError):
            logger.warning("Ignoring unreadable provenance in %s", side)
    return SamplingSet(table[:, 0], table[:, 1], table[:, 2], provenance)


# ---------------------------------------------------------------------------
# Measurements
# ---------------------------------------------------------------------------

def write_complex_csv(values: np.ndarray, filepath: str) -> None:
    """One ``re,im`` row per entry."""
    with open(filepath, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(C.MEASUREMENTS_HEADER)
        for v in np.asarray(values, dtype=complex):
            writer.writerow([fmt_float(v.real), fmt_float(v.imag)])


def read_complex_csv(filepath: str) -> np.ndarray:
    header, rows = _read_csv(filepath)
    if tuple(header) != C.MEASUREMENTS_HEADER:
        raise FormatError(f"Expected header {','.join(C.MEASUREMENTS_HEADER)}", path=filepath)
    table = _float_table(filepath, rows, 2)
    return table[:, 0] + 1j * table[:, 1]


# ---------------------------------------------------------------------------
# Sensing matrices
# ---------------------------------------------------------------------------

def write_matrix_csv(matrix: SensingMatrix | np.ndarray, filepath: str) -> None:
    """Header ``re_0,im_0,...``; one row per matrix row."""
    data = matrix.data if isinstance(matrix, SensingMatrix) else np.asarray(matrix, dtype=complex)
    L = data.shape[1]
    header = [f"{part}_{q}" for q in range(L) for part in ("re", "im")]
    with open(filepath, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in data:
            interleaved = np.column_stack([row.real, row.imag]).ravel()
            writer.writerow([fmt_float(v) for v in interleaved])


def read_matrix_csv(filepath: str) -> np.ndarray:
    header, rows = _read_csv(filepath)
    if len(header) % 2 or any(
        h != f"{part}_{i // 2}" for i, (h, part) in enumerate(zip(header, ["re", "im"] * (len(header) // 2)))
    ):
        raise FormatError("Expected header re_0,im_0,...", path=filepath)
    table = _float_table(filepath, rows, len(header))
    return table[:, 0::2] + 1j * table[:, 1::2]


def matrix_to_json(matrix: SensingMatrix) -> dict[str, Any]:
    interleaved = np.stack([matrix.data.real, matrix.data.imag], axis=-1).ravel()
    return {
        "kind": str(matrix.kind),
        "N": matrix.N,
        "K": matrix.K,
        "L": matrix.L,
        "data": interleaved.tolist(),
    }


def matrix_from_json(data: dict[str, Any]) -> SensingMatrix:
    try:
        K, L = int(data["K"]), int(data["L"])
        flat = np.asarray(data["data"], dtype=float)
        pairs = flat.reshape(K, L, 2)
        return SensingMatrix(ModeKind(data["kind"]), int(data["N"]), pairs[..., 0] + 1j * pairs[..., 1])
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"Malformed matrix JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# Optimizer-run store (SQLite key-value)
# ---------------------------------------------------------------------------

def config_digest(config: dict[str, Any]) -> str:
    """Stable key for an optimizer configuration."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class RunStore:
    """Thread-safe SQLite key-value store for optimizer runs.

    Keys are configuration digests, values the run's JSON, so experiment
    commands reuse optimized sampling sets instead of recomputing them.
    """

    def __init__(self, db_path: str) -> None:
        self._db_path = db_path
        self._local = threading.local()
        conn = self._conn()
        conn.execute("CREATE TABLE IF NOT EXISTS runs (key TEXT PRIMARY KEY, data TEXT NOT NULL)")
        conn.commit()

    # Each thread gets its own connection (SQLite requirement)
    def _conn(self) -> sqlite3.Connection:
        conn = getattr(self._local, "conn", None)
        if conn is None:
            conn = sqlite3.connect(self._db_path, timeout=30)
            conn.execute("PRAGMA journal_mode=WAL")
            conn.execute("PRAGMA synchronous=NORMAL")
            self._local.conn = conn
        return conn

    def get(self, key: str) -> dict[str, Any] | None:
        row = self._conn().execute("SELECT data FROM runs WHERE key = ?", (key,)).fetchone()
        if row is None:
            return None
        try:
            return json.loads(row[0])
        except json.JSONDecodeError:
            logger.warning("Discarding corrupt cache entry %s", key)
            return None

    def put(self, key: str, data: dict[str, Any]) -> None:
        """Store *data* under *key* (upsert)."""
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"))
        conn = self._conn()
        conn.execute("INSERT OR REPLACE INTO runs (key, data) VALUES (?, ?)", (key, blob))
        conn.commit()

    def count(self) -> int:
        row = self._conn().execute("SELECT COUNT(*) FROM runs").fetchone()
        return row[0] if row else 0

    def close(self) -> None:
        """Close the current thread's connection."""
        conn = getattr(self._local, "conn", None)
        if conn is not None:
            conn.close()
            self._local.conn = None

    def clear(self) -> None:
        conn = self._conn()
        conn.execute("DELETE FROM runs")
        conn.commit()
