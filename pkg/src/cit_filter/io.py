"""CSV/JSON output and run manifests."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import platform
import subprocess
from importlib import metadata
from pathlib import Path

import numpy as np


def version_string() -> str:
    """Package version plus the short git revision when available."""
    try:
        version = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        version = "0+unknown"
    try:
        rev = subprocess.run(["git", "rev-parse", "--short", "HEAD"], capture_output=True,
                             text=True, timeout=5, cwd=Path(__file__).parent)
        if rev.returncode == 0 and rev.stdout.strip():
            version += "+g" + rev.stdout.strip()
    except (OSError, subprocess.SubprocessError):
        pass
    return version


def _default(obj):
    if dataclasses.is_dataclass(obj):
        return dataclasses.asdict(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n",
                    encoding="utf-8")
    return path


def write_csv(path, header, rows) -> Path:
    """Write rows with full float precision (repr round-trips exactly)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return path


def read_csv(path) -> dict:
    """Column name -> float array."""
    with Path(path).open(encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(x) for x in row] for row in r], dtype=float)
    if data.size == 0:
        return {h: np.array([]) for h in header}
    return {h: data[:, k] for k, h in enumerate(header)}


def write_with_sidecar(path, header, rows, meta: dict) -> list:
    """CSV plus ``<name>.json`` holding the metadata."""
    path = Path(path)
    csv_path = write_csv(path, header, rows)
    meta = dict(meta, version=version_string(), columns=list(header))
    side = write_json(path.with_suffix(".json"), meta)
    return [csv_path, side]


def sha256(path) -> str:
    h = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(output_dir, scenario: str, inputs: dict, derived: dict, files,
                   wall_time: float, extra: dict | None = None) -> Path:
    out = Path(output_dir)
    entries = {}
    for f in files:
        f = Path(f)
        entries[str(f.relative_to(out)) if f.is_relative_to(out) else str(f)] = sha256(f)
    manifest = {
        "scenario": scenario,
        "version": version_string(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "inputs": inputs,
        "derived": derived,
        "files": entries,
        "wall_time_s": wall_time,
    }
    if extra:
        manifest.update(extra)
    return write_json(out / "manifest.json", manifest)
