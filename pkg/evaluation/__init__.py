"""Saliency metrics against ground truth and the occlusion protocol"""

from .metrics import SaliencyMetrics, threshold_sweep, saliency_metrics, auroc, macro_auroc
from .occlusion import OcclusionCurve, DEFAULT_RATIOS, occlusion_mask, occlusion

__all__ = [
    'SaliencyMetrics',
    'threshold_sweep',
    'saliency_metrics',
    'auroc',
    'macro_auroc',
    'OcclusionCurve',
    'DEFAULT_RATIOS',
    'occlusion_mask',
    'occlusion',
]
