"""Figures and figure export"""

from .visualizations import (
    create_saliency_figure,
    create_occlusion_figure,
    create_loss_figure
)
from .export import write_figure

__all__ = [
    'create_saliency_figure',
    'create_occlusion_figure',
    'create_loss_figure',
    'write_figure'
]
