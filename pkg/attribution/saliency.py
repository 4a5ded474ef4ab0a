"""
From segment Shapley values to timestep saliency, plus comparison variants
"""

import logging

import numpy as np

from core.errors import ConfigError, ShapeError
from core.types import SaliencyMap
from sdd.bank import ShapeletBank

from .segmentation import Segment, SegmentSet
from .shapley import ShapleyConfig, ShapleyResult, shapley

logger = logging.getLogger(__name__)


def to_saliency(res: ShapleyResult, segs: SegmentSet, length: int) -> SaliencyMap:
    """
    Spread |phi_n| evenly over each segment, sum overlaps, scale the peak to 1

    Timesteps in no segment score 0; an all-zero sum stays all-zero.
    """
    if len(res.phi) != len(segs):
        raise ShapeError(f"{len(res.phi)} Shapley values for {len(segs)} segments")
    if segs.length != length:
        raise ShapeError(f"Segments cover length {segs.length}, asked for {length}")
    scores = np.zeros(length)
    for phi, s in zip(res.phi, segs):
        scores[s.start:s.end] += abs(phi) / s.length
    peak = scores.max(initial=0.0)
    if peak > 0:
        scores = np.minimum(scores / peak, 1.0)
    return SaliencyMap(scores)


def equal_length_segments(length: int, seg_len: int) -> SegmentSet:
    """
    Consecutive intervals of seg_len steps (the last may be shorter), all connected

    Examples:
        >>> [(s.start, s.end) for s in equal_length_segments(10, 4)]
        [(0, 4), (4, 8), (8, 10)]
    """
    if seg_len < 1 or length < 1:
        raise ConfigError(f"seg_len and length must be >= 1, got {seg_len} and {length}")
    segments = [
        Segment(shapelet_id=i + 1, start=start, end=min(start + seg_len, length), peak=start)
        for i, start in enumerate(range(0, length, seg_len))
    ]
    return SegmentSet.fully_connected(segments, length)


def equal_length_shapley(
    x: np.ndarray,
    classifier,
    target: int,
    seg_len: int,
    config: ShapleyConfig = ShapleyConfig()
) -> SaliencyMap:
    """Saliency from equally spaced segments instead of shapelet-aligned ones"""
    x = np.asarray(x, dtype=np.float64)
    segs = equal_length_segments(x.shape[0], seg_len)
    return to_saliency(shapley(x, segs, classifier, target, config), segs, x.shape[0])


def activation_saliency(x: np.ndarray, bank: ShapeletBank) -> SaliencyMap:
    """
    Saliency read straight off the activation map: max over shapelets per
    timestep, min-max scaled (all-zero when constant)
    """
    strength = bank.activation_map(x).max(axis=1)
    low, high = strength.min(), strength.max()
    if high <= low:
        return SaliencyMap.zeros(strength.shape[0])
    return SaliencyMap(np.clip((strength - low) / (high - low), 0.0, 1.0))


def random_saliency(length: int, seed: int = 0) -> SaliencyMap:
    """Uniform random scores, the chance-level reference"""
    return SaliencyMap(np.random.default_rng(seed).random(length))
