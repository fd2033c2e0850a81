"""Configuration for symform: the YAML key store and run-time settings."""

import dataclasses
import types
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union, get_args, get_origin, get_type_hints

import structlog
import yaml

from symform.errors import ConfigError, InvalidInput
from symform.forms import FormDescriptor
from symform.probes import ProbeConfig
from symform.quadrature import QuadratureSpec
from symform.targets import TargetDescriptor

logger = structlog.get_logger()

CONFIG_DIR_NAME = ".symform"


class Config:
    """Configuration manager using YAML file storage.

    Supports both local (directory-level) and global (user-level) configuration.
    Local config is stored in .symform/config.yaml in the current directory.
    Global config is stored in ~/.symform/config.yaml.

    When reading, values are looked up in local config first, then global config.
    Keys are RunConfig field names; values are kept as given and coerced when a run resolves them.
    """

    def __init__(
        self, use_global: bool = False, config_dir: Path | None = None, global_dir: Path | None = None
    ) -> None:
        """Initialize configuration manager.

        Args:
            use_global: If True, use global config only. If False, use local config with global fallback.
            config_dir: Custom directory to store config file (overrides use_global)
            global_dir: Custom directory of the global fallback (defaults to ~/.symform)
        """
        global_dir = Path(global_dir) if global_dir is not None else Path.home() / CONFIG_DIR_NAME
        if config_dir is not None:
            self.config_dir = Path(config_dir)
            self.is_global = use_global
        elif use_global:
            self.config_dir = global_dir
            self.is_global = True
        else:
            self.config_dir = Path.cwd() / CONFIG_DIR_NAME
            self.is_global = False

        self.config_file = self.config_dir / "config.yaml"
        self._config: dict[str, Any] = _read_yaml(self.config_file)

        # For local config, also load global config as fallback
        self._global_config: dict[str, Any] = {}
        if not self.is_global:
            try:
                self._global_config = _read_yaml(global_dir / "config.yaml")
            except ConfigError as e:
                logger.warning("Failed to load global config", error=str(e))

        logger.debug("Config initialized", config_file=str(self.config_file), is_global=self.is_global)

    def _save(self) -> None:
        """Save configuration to YAML file, creating the directory on first write."""
        try:
            self.config_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, "w", encoding="utf-8") as f:
                yaml.safe_dump(self._config, f, default_flow_style=False, sort_keys=False)
            logger.debug("Config saved successfully")
        except (OSError, yaml.YAMLError) as e:
            logger.error("Failed to save config", error=str(e))
            raise ConfigError(f"Failed to save config to {self.config_file}: {e}") from e

    def get(self, key: str, default: str | None = None) -> Any:
        """Get a configuration value, checking local config first, then global config."""
        if key in self._config:
            logger.debug("Getting config value from local", key=key)
            return self._config[key]

        if not self.is_global and key in self._global_config:
            logger.debug("Getting config value from global", key=key)
            return self._global_config[key]

        logger.debug("Config value not found", key=key)
        return default

    def source(self, key: str) -> str | None:
        """The layer a lookup of key is answered from: "local", "global" or None when unset."""
        if key in self._config:
            return "global" if self.is_global else "local"
        if not self.is_global and key in self._global_config:
            return "global"
        return None

    def set(self, key: str, value: str) -> None:
        """Set a configuration value after checking it coerces to the field type."""
        check_key(key)
        coerce(key, value)
        logger.debug("Setting config value", key=key)
        self._config[key] = value
        self._save()

    def unset(self, key: str) -> None:
        logger.debug("Unsetting config value", key=key)
        if key in self._config:
            del self._config[key]
            self._save()

    def list(self) -> dict[str, Any]:
        """List all configuration settings; local settings override global ones."""
        if self.is_global:
            logger.debug("Listing global config values", count=len(self._config))
            return self._config.copy()
        merged = self._global_config.copy()
        merged.update(self._config)
        logger.debug("Listing merged config values", count=len(merged))
        return merged


def get_config(use_global: bool = False) -> Config:
    return Config(use_global=use_global)


def _read_yaml(path: Path) -> dict[str, Any]:
    if not path.exists():
        logger.debug("Config file does not exist", path=str(path))
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            document = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        logger.error("Failed to load config", path=str(path), error=str(e))
        raise ConfigError(f"Failed to load config from {path}: {e}") from e
    if not isinstance(document, dict):
        raise ConfigError(f"{path}: config must be a flat mapping of keys to values")
    logger.debug("Config loaded successfully", path=str(path), keys=list(document))
    return document


def load_config_file(path: Path | str) -> dict[str, Any]:
    """Read an explicit --config file of key=value lines; unlike the store, a missing file is an error.

    Blank lines and lines starting with # are skipped. Values are typed by YAML, so 0.5 is a float,
    [0.2, 0.3] a list and off a boolean.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        logger.error("Failed to load config", path=str(path), error=str(e))
        raise ConfigError(f"Failed to load config from {path}: {e}") from e

    settings: dict[str, Any] = {}
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{path}, line {number}: expected key=value, got {line!r}")
        if key in settings:
            raise ConfigError(f"{path}, line {number}: duplicate key {key!r}")
        try:
            value = yaml.safe_load(raw.strip()) if raw.strip() else None
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}, line {number}: cannot read the value of {key!r}: {e}") from e
        if isinstance(value, dict):
            raise ConfigError(f"{path}, line {number}: {key!r} must hold a scalar or a list, not a mapping")
        settings[key] = value
    logger.debug("Config file loaded", path=str(path), keys=list(settings))
    return settings


@dataclass(frozen=True)
class RunConfig:
    """Every setting a command reads, after CLI flags, config files and defaults are merged."""

    command: str = ""
    form: str = "trace"
    target: str = "lieb"
    ineq: str = "gt"
    family: str = "power_product"
    mode: str = "midpoint"
    check: str = "axioms"
    n: int = 3
    m: int | None = None
    k: int | None = None
    trials: int = 100
    seed: int = 0
    threads: int | None = None
    tol_abs: float = 1e-9
    tol_rel: float = 1e-8
    confirm_tol: float = 1e-6
    tau_mode: str = "fixed_half"
    out: str | None = None
    r: float | None = None
    s: float | None = None
    p: float | None = None
    q: float | None = None
    t: float | None = None
    tau: float | None = None
    theta: float | None = None
    p0: float | None = None
    p1: float | None = None
    weights: tuple[float, ...] | None = None
    strict: bool = True
    force: bool = False
    matrices: tuple[str, ...] = ()
    kernel: str | None = None
    quad_truncation: float = 12.0
    quad_panels_per_unit: int = 8
    quad_nodes: int = 16
    quad_abs_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.n < 1 or (self.m is not None and self.m < 1):
            raise ConfigError(f"Dimensions must be positive, got n={self.n}, m={self.m}")
        if self.k is not None and self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.tau_mode not in ("fixed_half", "uniform"):
            raise ConfigError(f"tau_mode must be fixed_half or uniform, got {self.tau_mode!r}")

    @classmethod
    def resolve(
        cls,
        overrides: Mapping[str, Any] | None = None,
        config_file: Path | str | None = None,
        store: Config | None = None,
    ) -> "RunConfig":
        """Merge settings: overrides > config_file > store (local over global) > defaults.

        None values in overrides mean "not given on the command line".
        """
        layers: list[tuple[str, Mapping[str, Any]]] = [
            ("store", store.list() if store is not None else {}),
            (str(config_file), load_config_file(config_file) if config_file is not None else {}),
            ("command line", {key: value for key, value in (overrides or {}).items() if value is not None}),
        ]
        values: dict[str, Any] = {}
        for source, layer in layers:
            for key, value in layer.items():
                check_key(key, source)
                values[key] = coerce(key, value)
        logger.debug("Run config resolved", keys=sorted(values))
        return cls(**values)

    def form_descriptor(self) -> FormDescriptor:
        return FormDescriptor.parse(self.form)

    def target_descriptor(self) -> TargetDescriptor:
        return TargetDescriptor(
            kind=self.target, r=self.r, s=self.s, p=self.p, q=self.q, weights=self.weights, strict=self.strict
        )

    def probe_config(self) -> ProbeConfig:
        try:
            return ProbeConfig(
                n=self.n,
                m=self.m,
                trials=self.trials,
                seed=self.seed,
                tau_mode=self.tau_mode,
                tol_abs=self.tol_abs,
                tol_rel=self.tol_rel,
                confirm_tol=self.confirm_tol,
                enforce_hoelder=not self.force,
                threads=self.threads,
            )
        except InvalidInput as e:
            raise ConfigError(str(e)) from e

    def quadrature_spec(self) -> QuadratureSpec:
        try:
            return QuadratureSpec(
                truncation=self.quad_truncation,
                panels_per_unit=self.quad_panels_per_unit,
                nodes_per_panel=self.quad_nodes,
                abs_tol=self.quad_abs_tol,
            )
        except InvalidInput as e:
            raise ConfigError(str(e)) from e

    def ineq_params(self) -> dict[str, Any]:
        """Fixed parameters for a named inequality; anything left out is drawn per trial."""
        params = {key: getattr(self, key) for key in ("p", "q", "r", "s", "t", "tau", "theta", "p0", "p1")}
        params = {key: value for key, value in params.items() if value is not None}
        if self.ineq == "interpolation":
            params["family"] = self.family
        if self.force:
            params["force"] = True
        return params


FIELDS = {f.name for f in dataclasses.fields(RunConfig)}
_HINTS = get_type_hints(RunConfig)
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def check_key(key: str, source: str = "config") -> None:
    if key not in FIELDS:
        raise ConfigError(f"Unknown config key {key!r} in {source}")


def _scalar(kind: type, key: str, value: Any) -> Any:
    if value is None:
        raise ConfigError(f"{key} needs a value")
    if kind is bool:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE | _FALSE:
            return text in _TRUE
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    if kind is int and isinstance(value, float) and not value.is_integer():
        raise ConfigError(f"{key} must be an integer, got {value!r}")
    if kind in (int, float) and isinstance(value, bool):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    try:
        return kind(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{key} must be of type {kind.__name__}, got {value!r}") from e


def coerce(key: str, value: Any) -> Any:
    """Convert a YAML or command-line value to the type of the RunConfig field."""
    check_key(key)
    hint = _HINTS[key]
    if get_origin(hint) in (Union, types.UnionType):
        if value is None or (isinstance(value, str) and value.strip().lower() in {"none", "null"}):
            return None
        hint = next(arg for arg in get_args(hint) if arg is not type(None))
    if get_origin(hint) is tuple:
        item = get_args(hint)[0]
        if isinstance(value, str):
            value = [part for part in (piece.strip() for piece in value.split(",")) if part]
        if not isinstance(value, list | tuple):
            raise ConfigError(f"{key} must be a list, got {value!r}")
        return tuple(_scalar(item, key, part) for part in value)
    return _scalar(hint, key, value)
