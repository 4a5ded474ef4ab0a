"""
Segment-level masks and the baselines that replace masked timesteps
"""

from typing import Iterable

import numpy as np

from config import PERTURBATION_BASELINES
from core.errors import ConfigError, ShapeError
from core.types import PerturbationMask

from .segmentation import SegmentSet


def build_mask(length: int, segs: SegmentSet, subset: Iterable[int]) -> PerturbationMask:
    """
    Keep the union of the chosen segments, mask everything else

    Timesteps outside every segment are masked even for the full coalition.
    """
    bits = np.zeros(length, dtype=np.int8)
    for n in subset:
        s = segs[n]
        bits[s.start:s.end] = 1
    return PerturbationMask(bits)


def _check(x: np.ndarray, mask: PerturbationMask) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != mask.length:
        raise ShapeError(f"Mask length {mask.length} does not match series shape {x.shape}")
    return x


def perturb_linear(x: np.ndarray, mask: PerturbationMask) -> np.ndarray:
    """
    Replace each masked run by the line between the kept samples around it

    Runs touching an edge hold the single available anchor constant; a fully
    masked series becomes all zeros.

    Examples:
        >>> perturb_linear(np.array([0., 5., -3., 7., 8.]), PerturbationMask([1, 0, 0, 0, 1])).tolist()
        [0.0, 2.0, 4.0, 6.0, 8.0]
    """
    x = _check(x, mask)
    kept = mask.bits == 1
    if kept.all():
        return x.copy()
    if not kept.any():
        return np.zeros_like(x)
    t = np.arange(x.shape[0])
    out = x.copy()
    # np.interp holds the end values constant outside the kept range
    out[~kept] = np.interp(t[~kept], t[kept], x[kept])
    return out


def perturb_zero(x: np.ndarray, mask: PerturbationMask) -> np.ndarray:
    x = _check(x, mask)
    return np.where(mask.bits == 1, x, 0.0)


def perturb_mean(x: np.ndarray, mask: PerturbationMask) -> np.ndarray:
    """Masked timesteps take the mean of the whole series"""
    x = _check(x, mask)
    return np.where(mask.bits == 1, x, x.mean())


_BASELINES = {
    'linear': perturb_linear,
    'zero': perturb_zero,
    'mean': perturb_mean,
}


def perturb(x: np.ndarray, mask: PerturbationMask, baseline: str = 'linear') -> np.ndarray:
    """
    Raises:
        ConfigError: Unknown baseline
    """
    if baseline not in _BASELINES:
        raise ConfigError(f"baseline must be one of {PERTURBATION_BASELINES}, got '{baseline}'")
    return _BASELINES[baseline](x, mask)
