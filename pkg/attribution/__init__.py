"""Shapelet-driven segmentation, segment perturbation, Shapley values and saliency"""

from .segmentation import (
    Segment,
    SegmentSet,
    build_adjacency,
    segments_from_activation,
    segment,
    connected_universe,
)
from .perturbation import build_mask, perturb_linear, perturb_zero, perturb_mean, perturb
from .shapley import ShapleyConfig, ShapleyResult, shapley_from_value, coalition_values, shapley
from .saliency import (
    to_saliency,
    equal_length_segments,
    equal_length_shapley,
    activation_saliency,
    random_saliency,
)
from .pipeline import ExplainConfig, Explanation, explain_instance, explain, explain_dataset, shapley_record

__all__ = [
    'Segment',
    'SegmentSet',
    'build_adjacency',
    'segments_from_activation',
    'segment',
    'connected_universe',
    'build_mask',
    'perturb_linear',
    'perturb_zero',
    'perturb_mean',
    'perturb',
    'ShapleyConfig',
    'ShapleyResult',
    'shapley_from_value',
    'coalition_values',
    'shapley',
    'to_saliency',
    'equal_length_segments',
    'equal_length_shapley',
    'activation_saliency',
    'random_saliency',
    'ExplainConfig',
    'Explanation',
    'explain_instance',
    'explain',
    'explain_dataset',
    'shapley_record',
]
