"""Deterministic CSV/JSON table writers and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import tempfile
from typing import Iterable, Mapping, Sequence

import numpy as np


def fmt(value) -> str:
    """17 significant digits for floats; everything else via ``str``."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "nan" if math.isnan(value) else f"{float(value):.17g}"
    return str(value)


def _jsonable(v):
    if hasattr(v, "item"):
        v = v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def clean_json(obj):
    """Recursively convert numpy scalars, complex numbers and non-finite floats."""
    if isinstance(obj, Mapping):
        return {str(k): clean_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [clean_json(v) for v in obj]
    return _jsonable(obj)


def write_table(path: str, columns: Sequence[str], rows: Iterable[Sequence],
                meta: Mapping = None, fmt_name: str = "csv") -> str:
    """Write a table as CSV (``#`` metadata lines) or JSON; returns the path."""
    rows = [list(r) for r in rows]
    meta = dict(meta or {})
    if fmt_name == "json":
        doc = {"meta": meta, "columns": list(columns),
               "rows": [[_jsonable(v) for v in r] for r in rows]}
        with open(path, "w") as fh:
            json.dump(clean_json(doc), fh, indent=1, allow_nan=False)
            fh.write("\n")
        return path
    with open(path, "w", newline="") as fh:
        for k, v in meta.items():
            fh.write(f"# {k} = {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def write_json(path: str, doc) -> str:
    with open(path, "w") as fh:
        json.dump(clean_json(doc), fh, indent=1, allow_nan=False)
        fh.write("\n")
    return path


def file_sha256(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def write_manifest_atomic(path: str, manifest: dict) -> str:
    """Write ``manifest`` to ``path`` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".manifest-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(clean_json(manifest), fh, indent=1, allow_nan=False)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path
