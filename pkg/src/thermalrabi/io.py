"""File formats: CSV with '#'-metadata headers and JSON run manifests.

Both formats are fully pinned so independent runs can be diffed byte for
byte: 12 significant digits, LF line endings, '#key=value' metadata lines,
then one header row, then data rows. Wall-clock times live only in the
manifest.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

PACKAGE_VERSION = "0.1.0"


def fmt(x) -> str:
    """12 significant digits, locale-independent."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if np.isnan(v):
        return "nan"
    return f"{v:.12g}"


def write_csv(path, columns: list[str], rows, metadata: dict | None = None):
    """Rows are sequences matching `columns`; values pass through fmt()
    unless already strings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for key, value in (metadata or {}).items():
        lines.append(f"#{key}={value if isinstance(value, str) else fmt(value)}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def read_csv(path):
    """Inverse of write_csv: returns (metadata, columns, rows-as-strings)."""
    metadata, columns, rows = {}, None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("=")
            metadata[key] = value
        elif columns is None:
            columns = line.split(",")
        else:
            rows.append(line.split(","))
    return metadata, columns or [], rows


def config_hash(config_dict: dict) -> str:
    """Stable hash of a configuration mapping (order-independent)."""
    canon = json.dumps(config_dict, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


def write_manifest(path, payload: dict):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8", newline="\n")
    return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
