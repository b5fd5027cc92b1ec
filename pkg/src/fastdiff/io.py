"""Run-directory serialization: CSVs, a manifest, and integrity hashes.

Output files are deliberately boring so that byte-level reproducibility is
testable: floats are rendered with ``repr`` (shortest round-trip form), line
endings are LF, and the manifest carries no timestamps — two runs with the
same configuration and seed must produce identical bytes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "fmt",
    "write_csv",
    "read_csv_columns",
    "float_columns",
    "sha256_file",
    "write_manifest",
    "read_manifest",
    "MANIFEST_NAME",
]

MANIFEST_NAME = "manifest.json"


def fmt(value) -> str:
    """Shortest decimal string that round-trips the value.

    Floats use repr (exact round-trip); integers and strings pass through.
    Infinities render as 'inf'/'-inf' so divergent diagnostics stay readable.
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Write rows under a one-line header, LF endings, values via :func:`fmt`."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_csv_columns(path: Path) -> dict[str, list[str]]:
    """Read a CSV as raw string columns keyed by header name."""
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        cols: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            if len(row) != len(header):
                raise ValueError(f"{path}: row with {len(row)} fields, expected {len(header)}")
            for name, val in zip(header, row):
                cols[name].append(val)
    return cols


def float_columns(cols: Mapping[str, list[str]], names: Sequence[str]) -> dict[str, np.ndarray]:
    """Parse selected raw columns as float arrays."""
    return {name: np.array([float(v) for v in cols[name]]) for name in names}


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(run_dir: Path, payload: Mapping) -> Path:
    """Write manifest.json (sorted keys, LF, trailing newline, no timestamps)."""
    path = Path(run_dir) / MANIFEST_NAME
    with path.open("w", encoding="utf-8", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(run_dir: Path) -> dict:
    path = Path(run_dir) / MANIFEST_NAME
    with path.open("r", encoding="utf-8") as fh:
        return json.load(fh)
