"""
Explain a prediction: segment -> Shapley -> saliency
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional

import numpy as np

from config import AttributionDefaults
from core.errors import ConfigError
from core.types import Dataset, SaliencyMap
from sdd.bank import ShapeletBank

from .saliency import to_saliency
from .segmentation import SegmentSet, segment
from .shapley import ShapleyConfig, ShapleyResult, shapley

logger = logging.getLogger(__name__)

NO_SEGMENT_WARNING = "no shapelet activation exceeded the threshold"


@dataclass(frozen=True)
class ExplainConfig:
    """Segmentation and Shapley settings for one explanation run"""
    omega: Optional[float] = None
    gap_tolerance: int = AttributionDefaults.GAP_TOLERANCE
    all_runs: bool = False
    k_exact: int = AttributionDefaults.K_EXACT
    num_samples: int = AttributionDefaults.NUM_SAMPLES
    seed: int = 0
    baseline: str = AttributionDefaults.BASELINE
    relational: bool = True

    def shapley_config(self) -> ShapleyConfig:
        return ShapleyConfig(
            k_exact=self.k_exact,
            num_samples=self.num_samples,
            seed=self.seed,
            baseline=self.baseline,
            relational=self.relational,
        )


@dataclass(frozen=True)
class Explanation:
    """Everything one explanation produced"""
    saliency: SaliencyMap
    segments: SegmentSet
    result: Optional[ShapleyResult]
    target: int


def explain_instance(
    x: np.ndarray,
    bank: ShapeletBank,
    classifier,
    target: Optional[int] = None,
    config: ExplainConfig = ExplainConfig()
) -> Explanation:
    """
    Full explanation of one series

    Args:
        x: Series of the bank's training length
        bank: Trained shapelet bank
        classifier: Black-box classifier
        target: Class to explain; the classifier's prediction on x when None
        config: Segmentation and Shapley settings

    Returns:
        Explanation; with no segments the saliency is all-zero and carries a warning

    Raises:
        ShapeError: Series length differs from the bank's
        AdapterError: The external model failed
    """
    x = np.asarray(x, dtype=np.float64)
    segs = segment(x, bank, config.omega, config.gap_tolerance, config.all_runs)
    if target is None:
        target = int(np.argmax(classifier.predict_proba(x)))
    elif classifier.num_classes and not 0 <= target < classifier.num_classes:
        raise ConfigError(f"target {target} out of range for {classifier.num_classes} classes")

    if len(segs) == 0:
        logger.warning("No segments found; returning an all-zero saliency map")
        return Explanation(SaliencyMap.zeros(x.shape[0], NO_SEGMENT_WARNING), segs, None, target)

    result = shapley(x, segs, classifier, target, config.shapley_config())
    return Explanation(to_saliency(result, segs, x.shape[0]), segs, result, target)


def explain(
    x: np.ndarray,
    bank: ShapeletBank,
    classifier,
    target: Optional[int] = None,
    config: ExplainConfig = ExplainConfig()
) -> SaliencyMap:
    """Saliency map of one series (see explain_instance)"""
    return explain_instance(x, bank, classifier, target, config).saliency


def explain_dataset(
    ds: Dataset,
    bank: ShapeletBank,
    classifier,
    config: ExplainConfig = ExplainConfig()
) -> List[Explanation]:
    """Explain every instance in order, each for the classifier's own prediction"""
    logger.info(f"Explaining {len(ds)} series of '{ds.name}'")
    explanations = []
    for i, ts in enumerate(ds):
        explanations.append(explain_instance(ts.values, bank, classifier, None, config))
        if (i + 1) % 50 == 0:
            logger.info(f"Explained {i + 1}/{len(ds)}")
    empty = sum(e.result is None for e in explanations)
    if empty:
        logger.warning(f"{empty} of {len(ds)} series produced no segments")
    return explanations


def shapley_record(explanation: Explanation, instance: int) -> Dict[str, Any]:
    """JSON-ready summary of one explanation"""
    res = explanation.result
    segments = []
    if res is not None:
        for n, s in enumerate(explanation.segments):
            segments.append({
                'shapelet_id': s.shapelet_id,
                'start': s.start,
                'end': s.end,
                'phi': float(res.phi[n]),
                'mode': res.modes[n],
                'samples': res.samples_used[n],
            })
    return {
        'instance': instance,
        'target': explanation.target,
        'value_at_empty': None if res is None else res.value_at_empty,
        'value_at_full': None if res is None else res.value_at_full,
        'warning': explanation.saliency.warning,
        'segments': segments,
    }
