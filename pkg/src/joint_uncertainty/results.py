"""Result files, run manifests and the on-disk results cache."""

import csv
import hashlib
import json
import logging
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

from joint_uncertainty import __version__
from joint_uncertainty.config import RunConfig

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12
MANIFEST_NAME = "manifest.json"
DIAGNOSTIC_NAME = "diagnostic.json"


def format_number(value: Any) -> str:
    """CSV cell text: 12 significant digits for floats."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    if hasattr(value, "item"):
        return format_number(value.item())
    return str(value)


def round_floats(data: Any) -> Any:
    """Round every float in a nested structure to 12 significant digits."""
    if isinstance(data, bool) or data is None:
        return data
    if isinstance(data, float):
        if not math.isfinite(data):
            return str(data)
        return float(f"{data:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(data, Mapping):
        return {str(k): round_floats(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [round_floats(v) for v in data]
    if isinstance(data, Path):
        return str(data)
    if hasattr(data, "item"):
        return round_floats(data.item())
    return data


def write_csv(path: Path, columns: Sequence[str], rows: Sequence[Mapping[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_number(row.get(column)) for column in columns])
    return path


def read_csv(path: Path) -> List[Dict[str, str]]:
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(round_floats(data), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunArtifacts:
    """Collects the output files of one command and writes its manifest.

    All writes go through this object so the manifest lists every file.
    """

    def __init__(self, config: RunConfig, output_dir: Optional[Path] = None):
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)
        self.started = _now()
        self.outputs: List[str] = []

    def record(self, path: Path) -> Path:
        """Add a file written elsewhere to the manifest."""
        name = str(path.relative_to(self.output_dir))
        if name not in self.outputs:
            self.outputs.append(name)
        logger.info(f"Wrote {path}")
        return path

    def csv(self, name: str, columns: Sequence[str], rows: Sequence[Mapping[str, Any]]) -> Path:
        return self.record(write_csv(self.output_dir / name, columns, rows))

    def json(self, name: str, data: Any) -> Path:
        return self.record(write_json(self.output_dir / name, data))

    def text(self, name: str, content: str) -> Path:
        path = self.output_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content)
        return self.record(path)

    def diagnostic(self, error: BaseException) -> Path:
        """Machine-readable record of a numerical failure."""
        data: Dict[str, Any] = {"error": type(error).__name__, "message": str(error)}
        for attribute in ("residual_norm", "iterations", "bracket"):
            if getattr(error, attribute, None) is not None:
                data[attribute] = getattr(error, attribute)
        data["config"] = self.config.resolved()
        return self.json(DIAGNOSTIC_NAME, data)

    def finish(self) -> Path:
        manifest = {
            "command": self.config.command,
            "version": __version__,
            "config": self.config.resolved(),
            "started": self.started,
            "finished": _now(),
            "outputs": list(self.outputs),
        }
        return write_json(self.output_dir / MANIFEST_NAME, manifest)


def cache_key(command: str, parameters: Mapping[str, Any]) -> str:
    """SHA-1 of the sorted JSON dump of (command, parameters, version)."""
    payload = {
        "command": command,
        "parameters": round_floats(dict(parameters)),
        "version": __version__,
    }
    return hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()


class ResultsCache:
    """JSON detail files stored as ``<cache_dir>/<key>.json``."""

    def __init__(self, cache_dir: Path, enabled: bool = True):
        self.cache_dir = Path(cache_dir)
        self.enabled = enabled
        self.hits = 0
        self.misses = 0

    def path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def get(self, key: str) -> Optional[Dict[str, Any]]:
        if not self.enabled:
            return None
        path = self.path(key)
        if not path.exists():
            self.misses += 1
            return None
        try:
            with open(path) as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path}: {e}")
            self.misses += 1
            return None
        self.hits += 1
        logger.debug(f"Cache hit {key[:10]}")
        return data

    def put(self, key: str, data: Mapping[str, Any]) -> None:
        if not self.enabled:
            return
        write_json(self.path(key), data)

    def entries(self) -> List[Path]:
        if not self.cache_dir.is_dir():
            return []
        return sorted(self.cache_dir.glob("*.json"))

    def size_bytes(self) -> int:
        return sum(p.stat().st_size for p in self.entries())

    def clear(self) -> int:
        removed = 0
        for path in self.entries():
            path.unlink()
            removed += 1
        return removed
