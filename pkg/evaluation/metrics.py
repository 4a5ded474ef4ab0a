"""
Saliency quality against ground truth, and rank-based AUROC
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.integrate import trapezoid
from scipy.stats import mannwhitneyu

from core.errors import DegenerateGroundTruth, ShapeError
from core.types import SaliencyMap

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SaliencyMetrics:
    auprc: float
    aup: float
    aur: float


def threshold_sweep(scores: np.ndarray, gt: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Precision and recall at every distinct score, highest threshold first

    Predicting "salient" means score >= threshold. Tied scores fall into
    one bucket.

    Returns:
        (thresholds descending, precision, recall)
    """
    order = np.argsort(-scores, kind='stable')
    ranked = scores[order]
    hits = gt[order]

    # last index of each block of equal scores
    block_end = np.ones(ranked.shape[0], dtype=bool)
    block_end[:-1] = ranked[:-1] != ranked[1:]
    predicted = np.flatnonzero(block_end) + 1
    true_pos = np.cumsum(hits)[block_end]

    precision = true_pos / predicted
    recall = true_pos / hits.sum()
    return ranked[block_end], precision, recall


def saliency_metrics(saliency: SaliencyMap, gt: np.ndarray) -> SaliencyMetrics:
    """
    AUPRC, AUP and AUR of a saliency map against binary ground truth

    AUPRC integrates the precision envelope (running max from high recall
    down) over recall with the trapezoid rule, starting from recall 0 at the
    precision of the highest threshold. AUP and AUR integrate precision and
    recall over the threshold axis min-max scaled to [0, 1]; on the interval
    up to each threshold the value at that threshold is used. A constant map
    has a single threshold: AUP is its precision and AUR its recall.

    Raises:
        ShapeError: Lengths differ
        DegenerateGroundTruth: gt is all 0 or all 1
    """
    scores = np.asarray(saliency.scores if isinstance(saliency, SaliencyMap) else saliency, dtype=np.float64)
    gt = np.asarray(gt).astype(np.int64)
    if scores.shape != gt.shape:
        raise ShapeError(f"Saliency length {scores.shape} does not match ground truth {gt.shape}")
    positives = int(gt.sum())
    if positives == 0 or positives == gt.shape[0]:
        raise DegenerateGroundTruth("Ground truth must contain both salient and non-salient steps")

    thresholds, precision, recall = threshold_sweep(scores, gt)

    curve_recall = np.concatenate([[0.0], recall])
    curve_precision = np.concatenate([[precision[0]], precision])
    envelope = np.maximum.accumulate(curve_precision[::-1])[::-1]
    auprc = float(trapezoid(envelope, curve_recall))

    if thresholds.shape[0] == 1:
        aup, aur = float(precision[0]), float(recall[0])
    else:
        tau = thresholds[::-1]
        width = np.diff((tau - tau[0]) / (tau[-1] - tau[0]))
        aup = float(np.sum(width * precision[::-1][1:]))
        aur = float(np.sum(width * recall[::-1][1:]))

    return SaliencyMetrics(auprc=auprc, aup=aup, aur=aur)


def auroc(scores: np.ndarray, labels: np.ndarray) -> float:
    """
    Probability that a random positive outscores a random negative; ties count 1/2

    Raises:
        DegenerateGroundTruth: Only one class present
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels).astype(bool)
    if scores.shape != labels.shape:
        raise ShapeError(f"{scores.shape[0]} scores for {labels.shape[0]} labels")
    pos, neg = scores[labels], scores[~labels]
    if pos.size == 0 or neg.size == 0:
        raise DegenerateGroundTruth("AUROC needs both positive and negative labels")
    u = mannwhitneyu(pos, neg, alternative='two-sided', method='asymptotic').statistic
    return float(u) / (pos.size * neg.size)


def macro_auroc(probs: np.ndarray, labels: np.ndarray) -> float:
    """
    Class-1 AUROC for two classes, one-vs-rest mean otherwise

    Classes absent from ``labels`` (or covering all of it) are skipped.
    """
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    if probs.shape[1] == 2:
        return auroc(probs[:, 1], labels == 1)

    per_class = []
    for c in range(probs.shape[1]):
        members = labels == c
        if members.all() or not members.any():
            logger.debug(f"Skipping class {c} in macro AUROC")
            continue
        per_class.append(auroc(probs[:, c], members))
    if not per_class:
        raise DegenerateGroundTruth("AUROC needs at least two classes present")
    return float(np.mean(per_class))
