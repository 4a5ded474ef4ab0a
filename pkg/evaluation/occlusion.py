"""
Occlusion protocol: mask the least (or most) salient steps and track AUROC
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from config import OCCLUSION_ORDERS, PERTURBATION_BASELINES
from core.errors import ConfigError, MissingLabel, ShapeError
from core.types import Dataset, PerturbationMask, SaliencyMap
from attribution.perturbation import perturb

from .metrics import macro_auroc

logger = logging.getLogger(__name__)

DEFAULT_RATIOS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)


@dataclass(frozen=True)
class OcclusionCurve:
    ratios: Tuple[float, ...]
    auroc: Tuple[float, ...]
    order: str = 'bottom'
    baseline: str = 'linear'

    def rows(self):
        return [
            {'ratio': r, 'auroc': a, 'order': self.order, 'baseline': self.baseline}
            for r, a in zip(self.ratios, self.auroc)
        ]


def masked_steps(ratio: float, length: int) -> int:
    """floor(ratio * length), tolerant of products like 0.29 * 100 = 28.999..."""
    return min(length, math.floor(ratio * length + 1e-9))


def occlusion_mask(scores: np.ndarray, k: int, order: str = 'bottom') -> PerturbationMask:
    """
    Mask the k lowest (bottom) or highest (top) scoring steps

    Ties go to the earlier timestep in both orders.
    """
    ranking = np.argsort(scores if order == 'bottom' else -scores, kind='stable')
    bits = np.ones(scores.shape[0], dtype=np.int8)
    bits[ranking[:k]] = 0
    return PerturbationMask(bits)


def occlusion(
    test: Dataset,
    maps: Sequence[SaliencyMap],
    classifier,
    ratios: Sequence[float] = DEFAULT_RATIOS,
    baseline: str = 'linear',
    order: str = 'bottom'
) -> OcclusionCurve:
    """
    AUROC of the classifier after masking a fraction of each test series

    Args:
        test: Labeled test set
        maps: One saliency map per test instance
        classifier: Black-box classifier
        ratios: Fractions r in [0, 1]; floor(r * T) steps are masked
        baseline: Replacement for masked steps
        order: 'bottom' masks the least salient steps, 'top' the most salient

    Raises:
        ShapeError: Map count or map length mismatch
        MissingLabel: Unlabeled test instance
        ConfigError: Invalid ratio, baseline or order
    """
    if len(maps) != len(test):
        raise ShapeError(f"{len(maps)} saliency maps for {len(test)} test instances")
    T = test.length
    for i, m in enumerate(maps):
        if m.length != T:
            raise ShapeError(f"Saliency map {i} has length {m.length}, series have length {T}")
    if not test.has_labels:
        raise MissingLabel(f"Occlusion needs labels on every instance of '{test.name}'")
    if any(not 0 <= r <= 1 for r in ratios):
        raise ConfigError(f"Occlusion ratios must lie in [0, 1], got {list(ratios)}")
    if baseline not in PERTURBATION_BASELINES:
        raise ConfigError(f"baseline must be one of {PERTURBATION_BASELINES}")
    if order not in OCCLUSION_ORDERS:
        raise ConfigError(f"order must be one of {OCCLUSION_ORDERS}")

    X = test.values_matrix()
    labels = test.labels()
    curve = []
    for r in ratios:
        k = masked_steps(r, T)
        batch = np.stack([
            perturb(X[i], occlusion_mask(maps[i].scores, k, order), baseline)
            for i in range(len(test))
        ])
        score = macro_auroc(classifier.predict_proba_batch(batch), labels)
        logger.info(f"Occlusion {order} r={r:g} ({k} steps, {baseline}): AUROC {score:.4f}")
        curve.append(score)

    return OcclusionCurve(tuple(float(r) for r in ratios), tuple(curve), order, baseline)
