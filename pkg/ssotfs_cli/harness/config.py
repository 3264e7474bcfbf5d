"""Experiment configuration schema, defaults and validation."""

import hashlib
import json
import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Mapping, Optional, Tuple

from ssotfs_cli.phy.otfs import FrameParams
from ssotfs_cli.utils.config_loader import load_config_text
from ssotfs_cli.utils.errors import ConfigurationError

logger = logging.getLogger(__name__)

KINDS = ("aoa-demo", "miss-detection", "fer", "det-eval")
PRECODING_POLICIES = ("distinct", "random", "zero", "none")
POWER_POLICIES = ("equal", "maxmin-radar")
DETECTORS = ("auto", "mp", "mmse", "ml")
CONSTELLATIONS = ("bpsk", "qpsk")
DOPPLER_POLICIES = ("fractional", "integer")

_FRAME_KEYS = ("M", "N", "n_bs", "delta_f", "T", "alpha_total")

# Values that differ from the dataclass defaults for a given experiment kind.
KIND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "aoa-demo": {
        "K": 4,
        "P": 2,
        "trials": 1,
        "t_obs": 10,
        "radar_snr_db": 5.0,
        "n_range_values": (0, 2, 4),
        "power_allocation": ("equal",),
    },
    "miss-detection": {
        "K": 4,
        "P": 2,
        "trials": 10_000,
        "t_obs": 1,
        "snr_db": (-5.0, 0.0, 5.0, 10.0, 15.0),
        "power_allocation": ("maxmin-radar", "equal"),
    },
    "fer": {
        "K": 1,
        "P": 8,
        "trials": 1_000,
        "coded": True,
        "precoding": ("distinct", "none"),
        "power_allocation": ("equal",),
        "snr_db": (0.0, 2.0, 4.0, 6.0, 8.0, 10.0),
    },
    "det-eval": {
        "frame": {"M": 8, "N": 8},
        "K": 1,
        "P": 4,
        "l_max": 2,
        "k_max": 2,
        "trials": 1_000,
        "p_values": (3, 4, 5),
        "error_repeats": (1, 2, 4, 6, 8, 10),
    },
}


@dataclass(frozen=True)
class MonitorConfig:
    memory_threshold: int = 15 * 1024**3
    timeout: int = 3600


@dataclass(frozen=True)
class MlflowConfig:
    use: bool = False
    tracking_uri: str = "http://localhost:5000"
    experiment_name: str = "SS-OTFS ISAC"


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description.

    ``snr_db`` is the radar SNR axis for miss-detection and the symbol SNR
    axis for FER; ``radar_snr_db`` is the fixed radar SNR of the AoA demo.
    """

    kind: str
    seed: int
    frame: FrameParams = field(default_factory=FrameParams)
    K: int = 1
    P: int = 2
    l_max: int = 10
    k_max: int = 6
    doppler: str = "fractional"
    constellation: str = "bpsk"
    precoding: Tuple[str, ...] = ("distinct",)
    power_allocation: Tuple[str, ...] = ("equal",)
    n_range: int = 0
    snr_db: Tuple[float, ...] = (0.0, 5.0, 10.0)
    trials: int = 100
    threads: int = 1
    coded: bool = False
    detector: str = "auto"
    mp_iterations: int = 20
    mp_damping: float = 0.7
    t_obs: int = 1
    error_repeats: Tuple[int, ...] = (1, 2, 4)
    p_values: Tuple[int, ...] = (3, 4, 5)
    n_range_values: Tuple[int, ...] = (0,)
    radar_snr_db: float = 5.0
    min_doppler_separation: float = 0.2
    monitor: MonitorConfig = field(default_factory=MonitorConfig)
    mlflow: MlflowConfig = field(default_factory=MlflowConfig)

    def __post_init__(self):
        _validate(self)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ExperimentConfig":
        """Builds a config from a parsed document, applying per-kind defaults."""
        if not isinstance(data, Mapping):
            raise ConfigurationError("configuration must be a mapping")
        known = {f for f in cls.__dataclass_fields__}
        for key in data:
            if key not in known:
                raise ConfigurationError("unknown key", field=str(key))
        if "kind" not in data:
            raise ConfigurationError("missing experiment kind", field="kind")
        if "seed" not in data:
            raise ConfigurationError("a seed is required for reproducibility", field="seed")
        kind = data["kind"]
        if kind not in KINDS:
            raise ConfigurationError(
                f"unknown experiment kind {kind!r}; expected one of {KINDS}", field="kind"
            )

        defaults = KIND_DEFAULTS[kind]
        merged: Dict[str, Any] = {k: v for k, v in defaults.items() if k != "frame"}
        merged.update({k: v for k, v in data.items() if k not in ("frame", "monitor", "mlflow")})

        frame = dict(defaults.get("frame", {}))
        frame.update(_section(data, "frame", _FRAME_KEYS))
        merged["frame"] = _frame_params(frame)
        merged["monitor"] = MonitorConfig(**_section(data, "monitor", ("memory_threshold", "timeout")))
        merged["mlflow"] = MlflowConfig(**_section(data, "mlflow", ("use", "tracking_uri", "experiment_name")))

        for key in ("precoding", "power_allocation", "snr_db", "error_repeats", "p_values", "n_range_values"):
            if key in merged:
                merged[key] = _as_tuple(merged[key], key)
        return cls(**merged)

    def with_overrides(
        self, seed: Optional[int] = None, threads: Optional[int] = None, trials: Optional[int] = None
    ) -> "ExperimentConfig":
        """Copy with the CLI overrides applied (``None`` keeps the current value)."""
        requested = (("seed", seed), ("threads", threads), ("trials", trials))
        changes = {k: v for k, v in requested if v is not None}
        return replace(self, **changes) if changes else self

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, tuple):
                data[key] = list(value)
        return data

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form; the worker count is excluded."""
        data = self.to_dict()
        data.pop("threads")
        data.pop("monitor")
        data.pop("mlflow")
        canonical = json.dumps(data, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_config(text: str) -> ExperimentConfig:
    """Parses and validates a JSON (or YAML) configuration document."""
    return ExperimentConfig.from_dict(load_config_text(text))


def _section(data: Mapping[str, Any], name: str, keys: Tuple[str, ...]) -> Dict[str, Any]:
    section = data.get(name, {}) or {}
    if not isinstance(section, Mapping):
        raise ConfigurationError("expected a mapping", field=name)
    for key in section:
        if key not in keys:
            raise ConfigurationError("unknown key", field=f"{name}.{key}")
    return dict(section)


def _frame_params(frame: Dict[str, Any]) -> FrameParams:
    for key in ("M", "N", "n_bs"):
        if key in frame and not (_is_int(frame[key]) and frame[key] >= 1):
            raise ConfigurationError(f"must be a positive integer, got {frame[key]!r}", field=f"frame.{key}")
    try:
        return FrameParams(**frame)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(str(e), field="frame") from e


def _as_tuple(value, name: str) -> tuple:
    if isinstance(value, (list, tuple)):
        return tuple(value)
    if isinstance(value, (str, int, float)) and not isinstance(value, bool):
        return (value,)
    raise ConfigurationError(f"expected a list, got {value!r}", field=name)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _require(condition: bool, name: str, message: str) -> None:
    if not condition:
        raise ConfigurationError(message, field=name)


def _validate(config: ExperimentConfig) -> None:
    _require(config.kind in KINDS, "kind", f"unknown experiment kind {config.kind!r}")
    _require(_is_int(config.seed), "seed", f"must be an integer, got {config.seed!r}")
    _require(config.seed >= 0, "seed", "must be nonnegative")

    for name in ("K", "P", "trials", "threads", "mp_iterations", "t_obs"):
        value = getattr(config, name)
        _require(_is_int(value) and value >= 1, name, f"must be a positive integer, got {value!r}")
    for name in ("l_max", "k_max"):
        value = getattr(config, name)
        _require(_is_int(value) and value >= 0, name, f"must be a nonnegative integer, got {value!r}")
    _require(
        _is_int(config.n_range) and config.n_range >= 0 and config.n_range % 2 == 0,
        "n_range",
        f"must be an even nonnegative integer, got {config.n_range!r}",
    )
    _require(config.n_range < config.frame.n_bs, "n_range", "must be smaller than frame.n_bs")

    _require(config.doppler in DOPPLER_POLICIES, "doppler", f"expected one of {DOPPLER_POLICIES}")
    _require(config.constellation in CONSTELLATIONS, "constellation", f"expected one of {CONSTELLATIONS}")
    _require(config.detector in DETECTORS, "detector", f"expected one of {DETECTORS}")
    _require(bool(config.precoding), "precoding", "at least one policy is required")
    for policy in config.precoding:
        _require(policy in PRECODING_POLICIES, "precoding", f"unknown policy {policy!r}")
    _require(bool(config.power_allocation), "power_allocation", "at least one policy is required")
    for policy in config.power_allocation:
        _require(policy in POWER_POLICIES, "power_allocation", f"unknown policy {policy!r}")
    _require(isinstance(config.coded, bool), "coded", "must be a boolean")

    _require(bool(config.snr_db), "snr_db", "the SNR grid must not be empty")
    _require(all(_is_number(v) for v in config.snr_db), "snr_db", "SNR values must be numbers")
    _require(
        all(b > a for a, b in zip(config.snr_db, config.snr_db[1:])),
        "snr_db",
        f"SNR grid must be strictly increasing, got {list(config.snr_db)}",
    )
    _require(_is_number(config.radar_snr_db), "radar_snr_db", "must be a number")
    _require(
        _is_number(config.mp_damping) and 0 < config.mp_damping <= 1,
        "mp_damping",
        f"must be in (0, 1], got {config.mp_damping!r}",
    )
    _require(
        _is_number(config.min_doppler_separation) and config.min_doppler_separation >= 0,
        "min_doppler_separation",
        "must be a nonnegative number",
    )
    for name in ("error_repeats", "p_values"):
        values = getattr(config, name)
        _require(bool(values), name, "must not be empty")
        _require(all(_is_int(v) and v >= 1 for v in values), name, "entries must be positive integers")
    _require(bool(config.n_range_values), "n_range_values", "must not be empty")
    _require(
        all(_is_int(v) and v >= 0 and v % 2 == 0 and v < config.frame.n_bs for v in config.n_range_values),
        "n_range_values",
        "entries must be even nonnegative integers below frame.n_bs",
    )
    _require(config.K * config.P <= config.frame.n_bs, "K", "K*P must not exceed frame.n_bs")
