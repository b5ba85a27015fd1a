"""Versioned CSV output and run manifests."""
from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

CSV_VERSION = "# hypwave-csv v1"
MANIFEST = "manifest.json"
SIG_DIGITS = 12


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0:
            return "0"
        return format(x, f".{SIG_DIGITS}g")
    return str(x)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable, meta: Optional[dict] = None) -> Path:
    """Write rows with the version line and a one-line JSON header block."""
    path = Path(path)
    lines = [CSV_VERSION]
    if meta:
        lines.append("# " + json.dumps(meta, sort_keys=True, default=_json_default))
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: Path):
    """Return (meta, columns, rows as lists of strings)."""
    meta, columns, rows = {}, None, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# hypwave-csv"):
            continue
        if line.startswith("# "):
            meta = json.loads(line[2:])
            continue
        if columns is None:
            columns = line.split(",")
            continue
        rows.append(line.split(","))
    return meta, columns, rows


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def config_digest(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=_json_default)
    return hashlib.sha256(blob.encode()).hexdigest()


def output_dir(requested: Optional[str]) -> Path:
    """--out wins; otherwise HYPWAVE_OUT; otherwise ./hypwave_out."""
    path = Path(requested or os.environ.get("HYPWAVE_OUT") or "hypwave_out")
    path.mkdir(parents=True, exist_ok=True)
    return path


class RunRecorder:
    """Collects outputs and assertion outcomes, then writes the single manifest."""

    def __init__(self, out: Path, command: str, config: dict):
        self.out = Path(out)
        self.command = command
        self.config = config
        self.outputs: list = []
        self.assertions: dict = {}
        self.calibration: dict = {}
        self.start = time.perf_counter()

    def csv(self, name: str, columns, rows, meta=None) -> Path:
        path = write_csv(self.out / name, columns, rows, meta)
        self.outputs.append(name)
        return path

    def check(self, name: str, passed: bool):
        self.assertions[name] = bool(passed)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def finish(self) -> dict:
        manifest = {
            "command": self.command,
            "config": self.config,
            "config_digest": config_digest(self.config),
            "calibration": self.calibration,
            "assertions": self.assertions,
            "passed": self.passed,
            "outputs": sorted(self.outputs),
            "wall_clock_s": round(time.perf_counter() - self.start, 3),
        }
        (self.out / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True,
                                                    default=_json_default) + "\n")
        return manifest
