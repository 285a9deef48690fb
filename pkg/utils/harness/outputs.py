"""
Campaign artifacts: replicates.csv (written row by row while the campaign runs),
summary.json, qq.csv and a manifest of content hashes.
"""

import csv
import hashlib
import json
import logging
import math
import os
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

from utils.errors import IoFailure

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "replicate", "seed", "n_f", "mono", "poly", "poly_star",
    "s_tilde", "s_f_star", "normalized", "overflow", "runtime_ms",
]


def format_real(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return format(float(value), ".17g")


def to_jsonable(value: Any) -> Any:
    """Recursively replace non-finite floats by None so the output is strict JSON."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return to_jsonable(value.item())
    return value


class ReplicateWriter:
    """Single ordered writer for replicates.csv; every row is flushed as it is written."""

    def __init__(self, path: Path, timing: bool):
        self.path = Path(path)
        self.timing = timing
        self.rows = 0
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._f = open(self.path, "w", newline="", encoding="utf-8")
        except OSError as e:
            raise IoFailure(f"Failed to open {self.path}: {e}") from e
        self._csv = csv.writer(self._f, lineterminator="\r\n")
        self._write(CSV_COLUMNS)

    def _write(self, row: Sequence[str]) -> None:
        try:
            self._csv.writerow(row)
            self._f.flush()
        except OSError as e:
            raise IoFailure(f"Failed to write {self.path}: {e}") from e

    def write(self, record) -> None:
        self._write(record.csv_row(self.timing))
        self.rows += 1

    def close(self) -> None:
        self._f.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def write_replicates_csv(records: Iterable, path: Path, timing: bool) -> None:
    with ReplicateWriter(path, timing) as writer:
        for record in records:
            writer.write(record)


def read_replicates_csv(path: Path) -> List[Dict[str, str]]:
    try:
        with open(path, newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))
    except OSError as e:
        raise IoFailure(f"Failed to read {path}: {e}") from e


def write_json(data: Dict[str, Any], path: Path) -> None:
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False))
            f.write("\n")
    except OSError as e:
        raise IoFailure(f"Failed to write {path}: {e}") from e


def write_qq_csv(points: Sequence[Sequence[float]], path: Path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(["theoretical", "empirical"])
            for t, e in points:
                writer.writerow([format_real(t), format_real(e)])
    except OSError as e:
        raise IoFailure(f"Failed to write {path}: {e}") from e


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as e:
        raise IoFailure(f"Failed to hash {path}: {e}") from e
    return digest.hexdigest()


def emit_outputs(result, out_dir) -> Dict[str, Any]:
    """
    Write every artifact of a (possibly truncated) campaign result into out_dir and
    return the manifest: relative file name -> sha256 of its content.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise IoFailure(f"Failed to create output directory {out}: {e}") from e

    write_replicates_csv(result.records, out / "replicates.csv", result.config.toggles.timing)
    write_json(result.summary(), out / "summary.json")
    files = ["replicates.csv", "summary.json"]
    if result.qq:
        write_qq_csv(result.qq, out / "qq.csv")
        files.append("qq.csv")

    graphs = out / "graphs"
    if graphs.is_dir():
        files.extend(sorted(str(p.relative_to(out)).replace(os.sep, "/") for p in graphs.glob("*.txt")))

    manifest = {
        "campaign": result.config.name,
        "files": {name: sha256_file(out / name) for name in files},
    }
    write_json(manifest, out / "manifest.json")
    logger.info("wrote %d artifacts to %s", len(files) + 1, out)
    return manifest
