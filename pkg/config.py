"""
Configuration file for the Shapelet Segment Explainer
Contains constants, default settings, run configuration and plot palette
"""

import json
import os
from dataclasses import dataclass, field, asdict, fields
from typing import List, Dict, Any, Optional, Union, get_args, get_origin, get_type_hints

from core.errors import ConfigError


@dataclass
class PlotColors:
    """Figure palette"""
    BACKGROUND: str = "#ffffff"
    GRID: str = "#e6e6e6"
    SERIES: str = "#111111"
    GROUND_TRUTH: str = "#47d495"
    SALIENCY_SCALE: str = "Reds"
    CURVES: List[str] = None

    def __post_init__(self):
        if self.CURVES is None:
            self.CURVES = ["#6f58c9", "#ee6c4d", "#47d495", "#98c1d9", "#111111"]


@dataclass
class SDDDefaults:
    """Default shapelet bank and training settings"""
    N_SHAPELETS: int = 6
    MIN_SHAPELET_LEN: int = 8
    PATCHES_PER_SHAPELET: int = 4
    NUM_HEADS: int = 2
    D_MODEL: int = 16
    LAMBDA_MATCH: float = 1.0
    LAMBDA_DIV: float = 0.5
    DELTA: float = 0.3
    LEARNING_RATE: float = 1e-3
    BATCH_SIZE: int = 32
    EPOCHS: int = 100
    INIT_NOISE: float = 0.01
    POOLING: str = "max"


@dataclass
class AttributionDefaults:
    """Default segmentation and Shapley settings"""
    GAP_TOLERANCE: int = 0
    K_EXACT: int = 12
    NUM_SAMPLES: int = 64
    BASELINE: str = "linear"
    OMEGA_FACTOR: float = 1.5


@dataclass
class SynthDefaults:
    """Default synthetic benchmark settings (full benchmark scale)"""
    LENGTH: int = 800
    N_TRAIN: int = 10000
    N_TEST: int = 2000
    SMOOTHING_WINDOW: int = 5
    EQUAL_AMPLITUDE: float = 1.0
    HIGH_AMPLITUDE: float = 3.0


@dataclass
class ReferenceDefaults:
    """Default reference classifier training settings"""
    LEARNING_RATE: float = 1e-2
    BATCH_SIZE: int = 64
    EPOCHS: int = 30
    VALIDATION_FRACTION: float = 0.2
    PATIENCE: int = 10


PERTURBATION_BASELINES = ['linear', 'zero', 'mean']
POOLING_MODES = ['max', 'mean']
SYNTH_VARIANTS = ['mcc', 'mtc']
AMPLITUDE_MODES = ['e', 'h']
OCCLUSION_ORDERS = ['bottom', 'top']
DATASET_FORMATS = {'tsv': '\t', 'csv': ','}

# Artifact versions
ARTIFACT_VERSION = 1
BANK_KIND = 'shapelet_bank'
REFERENCE_KIND = 'reference_cnn'

# Float text format (17 significant digits round-trips a double)
FLOAT_FORMAT = '%.17g'

# Application settings
APP_TITLE = "Shapelet Segment Explainer"
SEED_ENV_VAR = 'SHAPEX_SEED'
DEFAULT_SEED = 0
ADAPTER_TIMEOUT_S = 30.0

# Logging configuration
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'
LOG_DIR = 'logs'


def default_seed() -> int:
    """Seed from the SHAPEX_SEED environment variable, else DEFAULT_SEED"""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == '':
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def default_shapelet_length(series_length: int, patches: int = 4) -> int:
    """
    Default shapelet length for a series of length T

    max(8, round(T/10)) rounded up to a multiple of the patch count,
    capped at T.

    Examples:
        >>> default_shapelet_length(200)
        20
        >>> default_shapelet_length(50)
        8
    """
    length = max(SDDDefaults.MIN_SHAPELET_LEN, int(round(series_length / 10)))
    length = -(-length // patches) * patches
    if length > series_length:
        # short series: largest multiple of the patch count that still fits
        length = max(series_length // patches * patches, 1)
    return length


def _coerce(key: str, value: Any, hint: Any) -> Any:
    """Check a config value against its field type; ints widen to floats"""
    if get_origin(hint) is Union:
        if value is None:
            return None
        hint = next(arg for arg in get_args(hint) if arg is not type(None))
    if get_origin(hint) is dict:
        if isinstance(value, dict):
            return value
    elif hint is float:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
    elif hint is int:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
    elif isinstance(value, hint):
        return value
    expected = getattr(hint, '__name__', str(hint))
    raise ConfigError(f"{key} must be of type {expected}, got {value!r}")


@dataclass
class RunConfig:
    """
    Every knob of the pipeline plus artifact paths

    Precedence when resolving: command-line flags > JSON config file > defaults.
    None means "derive from the data" for n_shapelets-dependent or
    length-dependent values (shapelet_len, patch_len, omega).
    """
    # shapelet bank
    n_shapelets: int = SDDDefaults.N_SHAPELETS
    shapelet_len: Optional[int] = None
    patch_len: Optional[int] = None
    num_heads: int = SDDDefaults.NUM_HEADS
    d_model: int = SDDDefaults.D_MODEL
    use_encoder: bool = True
    pooling: str = SDDDefaults.POOLING
    lambda_match: float = SDDDefaults.LAMBDA_MATCH
    lambda_div: float = SDDDefaults.LAMBDA_DIV
    delta: float = SDDDefaults.DELTA
    # attribution
    omega: Optional[float] = None
    gap_tolerance: int = AttributionDefaults.GAP_TOLERANCE
    all_runs: bool = False
    k_exact: int = AttributionDefaults.K_EXACT
    num_samples: int = AttributionDefaults.NUM_SAMPLES
    baseline: str = AttributionDefaults.BASELINE
    relational: bool = True
    # optimisation
    lr: float = SDDDefaults.LEARNING_RATE
    batch: int = SDDDefaults.BATCH_SIZE
    epochs: int = SDDDefaults.EPOCHS
    seed: int = field(default_factory=default_seed)
    # paths
    paths: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def from_sources(
        cls,
        flags: Dict[str, Any],
        config_file: Optional[str] = None,
        defaults: Optional[Dict[str, Any]] = None
    ) -> 'RunConfig':
        """
        Resolve a RunConfig from defaults, an optional JSON file and flags

        Args:
            flags: Flag values; None entries are treated as "not given"
            config_file: Optional path to a JSON object with RunConfig keys
            defaults: Command-specific defaults replacing the class defaults

        Returns:
            Validated RunConfig

        Raises:
            ConfigError: Unknown keys, unreadable file, wrongly typed or invalid values
        """
        known = {f.name for f in fields(cls)}
        values: Dict[str, Any] = dict(defaults or {})

        if config_file:
            try:
                with open(config_file, 'r', encoding='utf-8') as f:
                    file_values = json.load(f)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigError(f"Cannot read config file {config_file}: {e}")
            if not isinstance(file_values, dict):
                raise ConfigError(f"Config file {config_file} must hold a JSON object")
            unknown = sorted(set(file_values) - known)
            if unknown:
                raise ConfigError(f"Unknown config keys in {config_file}: {unknown}")
            values.update(file_values)

        for key, value in flags.items():
            if key in known and value is not None:
                values[key] = value

        hints = get_type_hints(cls)
        config = cls(**{key: _coerce(key, value, hints[key]) for key, value in values.items()})
        config.validate()
        return config

    def validate(self) -> None:
        """Check every module precondition before any work starts"""
        if self.n_shapelets < 2:
            raise ConfigError(f"n_shapelets must be >= 2, got {self.n_shapelets}")
        if self.shapelet_len is not None and self.shapelet_len < 1:
            raise ConfigError(f"shapelet_len must be >= 1, got {self.shapelet_len}")
        if self.patch_len is not None and self.patch_len < 1:
            raise ConfigError(f"patch_len must be >= 1, got {self.patch_len}")
        if (self.shapelet_len is not None and self.patch_len is not None
                and self.shapelet_len % self.patch_len != 0):
            raise ConfigError(
                f"shapelet_len {self.shapelet_len} not divisible by patch_len {self.patch_len}"
            )
        if self.num_heads < 1 or self.d_model % self.num_heads != 0:
            raise ConfigError(
                f"d_model {self.d_model} must be divisible by num_heads {self.num_heads}"
            )
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}")
        if self.lambda_match < 0 or self.lambda_div < 0:
            raise ConfigError("lambda_match and lambda_div must be non-negative")
        if self.omega is not None and not 0 < self.omega < 1:
            raise ConfigError(f"omega must lie in (0, 1), got {self.omega}")
        if self.gap_tolerance < 0:
            raise ConfigError("gap_tolerance must be non-negative")
        if self.k_exact < 0 or self.num_samples < 1:
            raise ConfigError("k_exact must be >= 0 and num_samples >= 1")
        if self.baseline not in PERTURBATION_BASELINES:
            raise ConfigError(f"baseline must be one of {PERTURBATION_BASELINES}")
        if self.lr <= 0 or self.batch < 1 or self.epochs < 0:
            raise ConfigError("lr must be > 0, batch >= 1 and epochs >= 0")

    def to_json(self) -> str:
        """Stable JSON rendering used for the reproducibility echo"""
        return json.dumps(asdict(self), sort_keys=True)
