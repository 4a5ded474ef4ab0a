"""
Figure export: static SVG through kaleido or standalone HTML
"""

import logging
import os

import plotly.graph_objects as go

from core.errors import ConfigError, IoError

logger = logging.getLogger(__name__)

FIGURE_FORMATS = ('.svg', '.html')


def write_figure(fig: go.Figure, path: str) -> str:
    """
    Write a figure, picking the format from the file extension

    Raises:
        ConfigError: Extension is neither .svg nor .html
        IoError: Writing failed
    """
    ext = os.path.splitext(path)[1].lower()
    if ext not in FIGURE_FORMATS:
        raise ConfigError(f"Figure path must end in one of {FIGURE_FORMATS}, got '{path}'")
    parent = os.path.dirname(path)
    try:
        if parent:
            os.makedirs(parent, exist_ok=True)
        if ext == '.svg':
            fig.write_image(path, format='svg')
        else:
            fig.write_html(path, include_plotlyjs='cdn', full_html=True)
    except (OSError, ValueError) as e:
        logger.error(f"Error writing figure {path}: {e}")
        raise IoError(f"Cannot write figure {path}: {e}") from e
    logger.info(f"Figure saved to {path}")
    return path
