"""
Visualization components using Plotly
"""

from typing import Optional, Sequence

import numpy as np
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from config import PlotColors
from core.types import SaliencyMap
from evaluation.occlusion import OcclusionCurve


colors = PlotColors()


def _apply_theme(fig: go.Figure, title: str) -> go.Figure:
    fig.update_layout(
        title=title,
        template='plotly_white',
        plot_bgcolor=colors.BACKGROUND,
        paper_bgcolor=colors.BACKGROUND,
        font=dict(color=colors.SERIES),
    )
    fig.update_xaxes(gridcolor=colors.GRID)
    fig.update_yaxes(gridcolor=colors.GRID)
    return fig


def create_saliency_figure(
    x: np.ndarray,
    saliency: SaliencyMap,
    gt: Optional[np.ndarray] = None,
    title: str = 'Saliency'
) -> go.Figure:
    """
    Series line with a saliency heat strip underneath

    Args:
        x: Series values
        saliency: Map of the same length
        gt: Optional binary ground truth, shaded on the series panel
        title: Figure title

    Returns:
        Plotly figure
    """
    x = np.asarray(x, dtype=np.float64)
    t = np.arange(x.shape[0])
    fig = make_subplots(
        rows=2, cols=1, shared_xaxes=True,
        row_heights=[0.8, 0.2], vertical_spacing=0.04
    )

    if gt is not None:
        edges = np.diff(np.concatenate([[0], np.asarray(gt, dtype=np.int8), [0]]))
        for start, end in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
            fig.add_vrect(
                x0=start - 0.5, x1=end - 0.5,
                fillcolor=colors.GROUND_TRUTH, opacity=0.3, line_width=0,
                row=1, col=1
            )

    fig.add_trace(
        go.Scatter(x=t, y=x, mode='lines', line=dict(color=colors.SERIES, width=1.5), name='series'),
        row=1, col=1
    )
    fig.add_trace(
        go.Heatmap(
            x=t, z=[saliency.scores], zmin=0.0, zmax=1.0,
            colorscale=colors.SALIENCY_SCALE, showscale=True,
            colorbar=dict(title='score', len=0.3, y=0.1)
        ),
        row=2, col=1
    )
    fig.update_yaxes(showticklabels=False, row=2, col=1)
    fig.update_xaxes(title_text='timestep', row=2, col=1)
    return _apply_theme(fig, title)


def create_occlusion_figure(curves: Sequence[OcclusionCurve], title: str = 'Occlusion') -> go.Figure:
    """
    One AUROC-vs-ratio line per curve

    Returns:
        Plotly figure
    """
    fig = go.Figure()
    for i, curve in enumerate(curves):
        fig.add_trace(go.Scatter(
            x=list(curve.ratios), y=list(curve.auroc),
            mode='lines+markers',
            line=dict(color=colors.CURVES[i % len(colors.CURVES)]),
            name=f'{curve.order} / {curve.baseline}'
        ))
    fig.update_layout(xaxis_title='fraction of timesteps masked', yaxis_title='AUROC')
    fig.update_yaxes(range=[0, 1.05])
    return _apply_theme(fig, title)


def create_loss_figure(history: Sequence[float], title: str = 'Shapelet training loss') -> go.Figure:
    """Mean loss per instance for each epoch"""
    fig = go.Figure(data=[
        go.Scatter(
            x=np.arange(1, len(history) + 1), y=list(history),
            mode='lines', line=dict(color=colors.CURVES[0])
        )
    ])
    fig.update_layout(xaxis_title='epoch', yaxis_title='loss', showlegend=False)
    return _apply_theme(fig, title)
