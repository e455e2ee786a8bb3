"""Run configuration: defaults, flat YAML files and environment overrides."""

import os
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

ENV_CACHE_DIR = "JOINT_UNCERTAINTY_CACHE_DIR"
ENV_WORKERS = "JOINT_UNCERTAINTY_WORKERS"


class Command(str, Enum):
    """Batch commands that produce result files."""

    MIN_UNCERTAINTY = "min-uncertainty"
    SWEEP = "sweep"
    EXTRAPOLATE = "extrapolate"
    GAUSSIAN = "gaussian"
    MIXTURE_BOUND = "mixture-bound"
    BSV_SCAN = "bsv-scan"
    VERIFY = "verify"


@dataclass
class SolverConfig:
    """Eigensolver settings."""

    tolerance: float = 1e-10
    dense_threshold: int = 2000
    krylov_dim: int = 60
    max_restarts: int = 200

    def validate(self) -> None:
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.dense_threshold < 0:
            raise ValueError(f"dense_threshold must be >= 0, got {self.dense_threshold}")
        if self.krylov_dim < 4:
            raise ValueError(f"krylov_dim must be >= 4, got {self.krylov_dim}")
        if self.max_restarts < 1:
            raise ValueError(f"max_restarts must be >= 1, got {self.max_restarts}")


@dataclass
class XiSearchConfig:
    """Grid scan and refinement over the mixing parameter xi."""

    grid_points: int = 33
    lower: float = 0.02
    upper: float = 0.98
    xatol: float = 1e-6

    def validate(self) -> None:
        if self.grid_points < 3:
            raise ValueError(f"xi grid needs at least 3 points, got {self.grid_points}")
        if not 0.0 < self.lower < self.upper < 1.0:
            raise ValueError(
                f"xi bounds must satisfy 0 < lower < upper < 1, got ({self.lower}, {self.upper})"
            )
        if self.xatol <= 0:
            raise ValueError(f"xatol must be positive, got {self.xatol}")


# Flat file keys that belong to the nested sections
_SOLVER_KEYS = {
    "tolerance": "tolerance",
    "dense_threshold": "dense_threshold",
    "krylov_dim": "krylov_dim",
    "max_restarts": "max_restarts",
}
_XI_KEYS = {
    "xi_grid_points": "grid_points",
    "xi_lower": "lower",
    "xi_upper": "upper",
    "xi_xatol": "xatol",
}
_ALIASES = {"workers": "thread_count", "output": "output_dir"}
_TRUE = ("1", "true", "yes", "on")


def _normalize_key(key: str) -> str:
    key = str(key).strip().replace("-", "_")
    return _ALIASES.get(key, key)


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run.

    ``parameters`` holds the command-specific values (photons, modes, ...).
    """

    command: str = ""
    parameters: Dict[str, Any] = field(default_factory=dict)
    seed: int = 0
    output_dir: Path = Path("results")
    cache_dir: Path = Path(".joint-uncertainty-cache")
    thread_count: int = 1
    use_cache: bool = True
    solver: SolverConfig = field(default_factory=SolverConfig)
    xi_search: XiSearchConfig = field(default_factory=XiSearchConfig)

    @classmethod
    def default(cls) -> "RunConfig":
        return cls()

    @classmethod
    def from_yaml(cls, config_path: Path) -> "RunConfig":
        """Load a flat ``key: value`` YAML file; a missing file gives defaults."""
        if not config_path.exists():
            return cls.default()

        with open(config_path) as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ValueError(f"{config_path}: expected a mapping of key: value lines")

        return cls._from_dict(data)

    @classmethod
    def from_env(cls, base: Optional["RunConfig"] = None) -> "RunConfig":
        """Apply environment overrides on top of ``base`` (defaults if omitted)."""
        config = base if base is not None else cls.default()

        cache_dir = os.getenv(ENV_CACHE_DIR)
        if cache_dir:
            config.cache_dir = Path(cache_dir)

        workers = os.getenv(ENV_WORKERS)
        if workers:
            try:
                config.thread_count = int(workers)
            except ValueError:
                raise ValueError(f"{ENV_WORKERS} must be an integer, got {workers!r}") from None

        return config

    @classmethod
    def _from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        config = cls.default()
        for raw_key, value in data.items():
            config.set(_normalize_key(raw_key), value)
        return config

    def set(self, key: str, value: Any) -> None:
        """Set one flat key, routing it to the matching section."""
        if key in _SOLVER_KEYS:
            current = getattr(self.solver, _SOLVER_KEYS[key])
            setattr(self.solver, _SOLVER_KEYS[key], type(current)(value))
        elif key in _XI_KEYS:
            current = getattr(self.xi_search, _XI_KEYS[key])
            setattr(self.xi_search, _XI_KEYS[key], type(current)(value))
        elif key in ("output_dir", "cache_dir"):
            setattr(self, key, Path(value))
        elif key in ("seed", "thread_count"):
            setattr(self, key, int(value))
        elif key == "use_cache":
            self.use_cache = value if isinstance(value, bool) else str(value).lower() in _TRUE
        elif key == "command":
            self.command = str(value)
        else:
            self.parameters[key] = value

    def apply_overrides(self, **flags: Any) -> "RunConfig":
        """Apply command-line values; ``None`` means the flag was not given."""
        for key, value in flags.items():
            if value is not None:
                self.set(_normalize_key(key), value)
        return self

    def parameter(self, key: str, default: Any = None) -> Any:
        return self.parameters.get(_normalize_key(key), default)

    def validate(self) -> None:
        if self.command and self.command not in {c.value for c in Command}:
            raise ValueError(f"unknown command {self.command!r}")
        if self.thread_count < 1:
            raise ValueError(f"thread_count must be >= 1, got {self.thread_count}")
        self.solver.validate()
        self.xi_search.validate()

    def resolved(self) -> Dict[str, Any]:
        """Plain-data view used for manifests and cache keys."""
        return {
            "command": self.command,
            "parameters": dict(sorted(self.parameters.items())),
            "seed": self.seed,
            "output_dir": str(self.output_dir),
            "cache_dir": str(self.cache_dir),
            "thread_count": self.thread_count,
            "use_cache": self.use_cache,
            "solver": asdict(self.solver),
            "xi_search": asdict(self.xi_search),
        }

    def to_yaml(self, path: Path) -> None:
        """Save as a flat YAML file that ``from_yaml`` reads back."""
        data: Dict[str, Any] = {
            "seed": self.seed,
            "output-dir": str(self.output_dir),
            "cache-dir": str(self.cache_dir),
            "workers": self.thread_count,
        }
        data.update({key.replace("_", "-"): value for key, value in asdict(self.solver).items()})
        data.update(
            {
                flat.replace("_", "-"): getattr(self.xi_search, attr)
                for flat, attr in _XI_KEYS.items()
            }
        )
        data.update({key.replace("_", "-"): value for key, value in self.parameters.items()})

        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)


def load_config(config_path: Optional[Path] = None) -> RunConfig:
    """Defaults, then the file, then the environment. Flags are applied by the caller."""
    config = RunConfig.from_yaml(config_path) if config_path else RunConfig.default()
    return RunConfig.from_env(config)
