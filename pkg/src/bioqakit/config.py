"""Run context and pipeline configuration for bioqakit."""

import hashlib
import json
import tomllib
from copy import copy
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError

STRATEGIES = ("snippet", "abstract", "appended")
HEAD_INITS = ("zeros", "normal")


@dataclass(frozen=True)
class PipelineConfig:
    """Effective knobs shared by every subcommand."""

    strategy: str = "snippet"
    window: int = 1  # sentences per side for the appended strategy
    boundary_required: bool = True
    normalize: bool = True  # answer normalization in metrics and dedup
    seed: int = 13
    top_k: int = 5
    max_answer_length: int = 30
    list_threshold: float = 0.5
    head_init: str = "zeros"
    head_bias: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(
                f"Unknown strategy '{self.strategy}'. Available: {', '.join(STRATEGIES)}"
            )
        if self.window < 0:
            raise ConfigError(f"window must be >= 0, got {self.window}")
        if not 1 <= self.top_k <= 5:
            raise ConfigError(f"top_k must be within [1, 5], got {self.top_k}")
        if self.max_answer_length < 1:
            raise ConfigError("max_answer_length must be >= 1")
        if self.head_init not in HEAD_INITS:
            raise ConfigError(
                f"Unknown head_init '{self.head_init}'. Available: {', '.join(HEAD_INITS)}"
            )

    @classmethod
    def from_mapping(cls, values: dict[str, Any], source: str = "config") -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"Unknown keys in {source}: {', '.join(unknown)}")
        return cls(**values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @property
    def digest(self) -> str:
        """sha256 over the canonical JSON form of the effective config."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass
class RunContext:
    """Where the run happens and which configuration applies."""

    root: Path
    config: PipelineConfig
    config_source: Path | None = None

    def with_overrides(self, **overrides: Any) -> "RunContext":
        """Return a new context with CLI flag values layered on top.

        ``None`` values mean "flag not given" and leave the config untouched.
        """
        given = {k: v for k, v in overrides.items() if v is not None}
        if not given:
            return self
        ctx = copy(self)
        try:
            ctx.config = replace(self.config, **given)
        except TypeError as e:
            raise ConfigError(str(e)) from e
        return ctx

    def resolve(self, path: str | Path) -> Path:
        """Resolve a path relative to the run root."""
        p = Path(path)
        return p if p.is_absolute() else self.root / p

    @classmethod
    def from_path(
        cls, path: Path | None = None, config_file: Path | None = None
    ) -> "RunContext":
        """Load defaults, then the config file, if any.

        An explicit ``config_file`` wins; otherwise the nearest ``pyproject.toml``
        with a ``[tool.bioqakit]`` table is used.
        """
        if path is None:
            path = Path.cwd()

        if config_file is not None:
            if not config_file.exists():
                raise ConfigError(f"Config file not found: {config_file}")
            values = cls._load_table(config_file, explicit=True)
            return cls(
                root=path,
                config=PipelineConfig.from_mapping(values, str(config_file)),
                config_source=config_file,
            )

        pyproject = cls._find_pyproject(path)
        if pyproject is None:
            return cls(root=path, config=PipelineConfig())

        values = cls._load_table(pyproject, explicit=False)
        return cls(
            root=path,
            config=PipelineConfig.from_mapping(values, str(pyproject)),
            config_source=pyproject if values else None,
        )

    @staticmethod
    def _load_table(config_path: Path, explicit: bool) -> dict[str, Any]:
        try:
            with open(config_path, "rb") as f:
                data = tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"Invalid TOML in {config_path}: {e}") from e

        # Standalone config files may be flat or use the pyproject table
        table = data.get("tool", {}).get("bioqakit")
        if table is None:
            return data if explicit else {}
        return table

    @staticmethod
    def _find_pyproject(start_path: Path) -> Path | None:
        """Find the nearest pyproject.toml carrying a [tool.bioqakit] table."""
        current = start_path if start_path.is_dir() else start_path.parent

        while True:
            pyproject = current / "pyproject.toml"
            if pyproject.exists():
                with open(pyproject, "rb") as f:
                    try:
                        data = tomllib.load(f)
                    except tomllib.TOMLDecodeError:
                        data = {}
                if "bioqakit" in data.get("tool", {}):
                    return pyproject
            if current == current.parent:
                return None
            current = current.parent
