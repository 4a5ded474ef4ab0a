"""
Motif-insertion synthetic benchmarks with ground-truth saliency

Four binary variants: the class is decided either by how many motifs were
inserted (count, MCC) or by which motif shape was inserted (type, MTC), and
motifs either match the base signal's amplitude (E) or exceed it (H).
"""

import logging
from dataclasses import dataclass
from typing import Tuple, Optional, List

import numpy as np
import pandas as pd

from config import SynthDefaults, SYNTH_VARIANTS, AMPLITUDE_MODES
from core.errors import ConfigError
from core.types import Dataset, TimeSeries

logger = logging.getLogger(__name__)

MOTIF_SHAPES = ['sine_bump', 'triangle']


@dataclass(frozen=True)
class MotifSpec:
    """Shape, length and peak amplitude of an inserted motif"""
    shape: str
    length: int
    amplitude: float

    def __post_init__(self):
        if self.shape not in MOTIF_SHAPES:
            raise ConfigError(f"Unknown motif shape '{self.shape}', expected one of {MOTIF_SHAPES}")
        if self.length < 4:
            raise ConfigError(f"Motif length must be >= 4, got {self.length}")
        if not self.amplitude > 0:
            raise ConfigError(f"Motif amplitude must be > 0, got {self.amplitude}")


def motif_waveform(spec: MotifSpec) -> np.ndarray:
    """
    Sample a motif

    sine_bump is amplitude * sin(pi * j / (length - 1)); triangle ramps
    linearly up to the centre and back down. Both are rescaled so that the
    peak equals the amplitude exactly, which matters for even lengths where
    the centre falls between two samples.

    Examples:
        >>> motif_waveform(MotifSpec('triangle', 5, 2.0)).tolist()
        [0.0, 1.0, 2.0, 1.0, 0.0]
    """
    j = np.arange(spec.length, dtype=np.float64)
    half = (spec.length - 1) / 2.0
    if spec.shape == 'sine_bump':
        wave = np.sin(np.pi * j / (spec.length - 1))
    else:
        wave = 1.0 - np.abs(j - half) / half
    wave[0] = 0.0
    wave[-1] = 0.0
    return spec.amplitude * wave / wave.max()


@dataclass(frozen=True)
class SynthConfig:
    """
    Settings for one synthetic benchmark

    Args:
        variant: 'mcc' (count decides the class) or 'mtc' (type decides)
        amplitude_mode: 'e' (equal amplitude) or 'h' (higher amplitude)
        length: Series length T
        n_train, n_test: Split sizes
        motif_len: Motif length; max(4, round(T/20)) when None
        seed: Seed for the whole generation
        mcc_shape: Motif shape used by the count variant
    """
    variant: str = 'mcc'
    amplitude_mode: str = 'h'
    length: int = SynthDefaults.LENGTH
    n_train: int = SynthDefaults.N_TRAIN
    n_test: int = SynthDefaults.N_TEST
    motif_len: Optional[int] = None
    seed: int = 0
    mcc_shape: str = 'sine_bump'

    @property
    def resolved_motif_len(self) -> int:
        if self.motif_len is not None:
            return int(self.motif_len)
        return max(4, int(round(self.length / 20)))

    @property
    def amplitude(self) -> float:
        if self.amplitude_mode == 'e':
            return SynthDefaults.EQUAL_AMPLITUDE
        return SynthDefaults.HIGH_AMPLITUDE

    @property
    def max_insertions(self) -> int:
        return 2 if self.variant == 'mcc' else 1

    @property
    def name(self) -> str:
        return f"{self.variant.upper()}-{self.amplitude_mode.upper()}"

    def validate(self) -> None:
        """
        Raises:
            ConfigError: Unknown variant/mode, bad sizes, or motifs that
                cannot fit inside the series without overlap
        """
        if self.variant not in SYNTH_VARIANTS:
            raise ConfigError(f"variant must be one of {SYNTH_VARIANTS}, got '{self.variant}'")
        if self.amplitude_mode not in AMPLITUDE_MODES:
            raise ConfigError(f"amplitude_mode must be one of {AMPLITUDE_MODES}")
        if self.n_train < 1 or self.n_test < 1:
            raise ConfigError("n_train and n_test must be positive")
        if self.mcc_shape not in MOTIF_SHAPES:
            raise ConfigError(f"mcc_shape must be one of {MOTIF_SHAPES}")
        motif_len = self.resolved_motif_len
        if motif_len < 4:
            raise ConfigError(f"motif_len must be >= 4, got {motif_len}")
        margin = -(-motif_len // 2)
        available = self.length - 2 * margin
        if self.max_insertions * motif_len > available:
            raise ConfigError(
                f"{self.max_insertions} motif(s) of length {motif_len} cannot fit in a series "
                f"of length {self.length} with edge margin {margin}"
            )


def _motif_for(cfg: SynthConfig, label: int) -> Tuple[MotifSpec, int]:
    """Motif spec and insertion count for one class"""
    if cfg.variant == 'mcc':
        return MotifSpec(cfg.mcc_shape, cfg.resolved_motif_len, cfg.amplitude), label + 1
    shape = 'sine_bump' if label == 0 else 'triangle'
    return MotifSpec(shape, cfg.resolved_motif_len, cfg.amplitude), 1


def _insertion_starts(rng: np.random.Generator, length: int, motif_len: int, count: int) -> np.ndarray:
    """Uniform non-overlapping start positions at least motif_len/2 from both edges"""
    margin = -(-motif_len // 2)
    slack = length - 2 * margin - count * motif_len
    offsets = np.sort(rng.integers(0, slack + 1, size=count))
    return margin + offsets + np.arange(count) * motif_len


def smooth_noise(noise: np.ndarray, window: int = SynthDefaults.SMOOTHING_WINDOW) -> np.ndarray:
    """Centred moving average along each row, then per-row standardisation"""
    smoothed = (
        pd.DataFrame(noise.T)
        .rolling(window=window, center=True, min_periods=1)
        .mean()
        .to_numpy()
        .T
    )
    smoothed = smoothed - smoothed.mean(axis=1, keepdims=True)
    return smoothed / smoothed.std(axis=1, keepdims=True)


def _generate_split(cfg: SynthConfig, n: int, seed_seq: np.random.SeedSequence, split: str) -> Dataset:
    label_seq, *instance_seqs = seed_seq.spawn(n + 1)
    labels = np.arange(n) % 2
    np.random.default_rng(label_seq).shuffle(labels)

    rngs = [np.random.default_rng(s) for s in instance_seqs]
    base = smooth_noise(np.stack([rng.standard_normal(cfg.length) for rng in rngs]))

    instances: List[TimeSeries] = []
    for i in range(n):
        spec, count = _motif_for(cfg, int(labels[i]))
        wave = motif_waveform(spec)
        values = base[i].copy()
        gt = np.zeros(cfg.length, dtype=np.int8)
        for start in _insertion_starts(rngs[i], cfg.length, spec.length, count):
            values[start:start + spec.length] = wave
            gt[start:start + spec.length] = 1
        instances.append(TimeSeries(values=values, label=int(labels[i]), gt_saliency=gt))

    return Dataset(instances=tuple(instances), num_classes=2, name=f"{cfg.name}-{split}")


def generate(cfg: SynthConfig) -> Tuple[Dataset, Dataset]:
    """
    Generate the train and test splits of one benchmark

    Base signal: Gaussian white noise smoothed by a centred moving average and
    rescaled to zero mean, unit standard deviation. Motifs replace the base
    signal over their window and ground-truth saliency is 1 exactly there.
    Classes are balanced and everything is a pure function of the config.

    Args:
        cfg: Benchmark settings

    Returns:
        (train, test) datasets

    Raises:
        ConfigError: Invalid settings or motifs that cannot fit
    """
    cfg.validate()
    logger.info(
        f"Generating {cfg.name}: T={cfg.length}, train={cfg.n_train}, test={cfg.n_test}, "
        f"motif_len={cfg.resolved_motif_len}, seed={cfg.seed}"
    )
    train_seq, test_seq = np.random.SeedSequence(cfg.seed).spawn(2)
    train = _generate_split(cfg, cfg.n_train, train_seq, 'train')
    test = _generate_split(cfg, cfg.n_test, test_seq, 'test')
    logger.info(f"Generated {len(train)} train / {len(test)} test series")
    return train, test
