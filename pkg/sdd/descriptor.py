"""
Descriptor (shapelet convolution + softmax) and detector (peak window)

The tensor functions are used during training; describe/activate/detect are
the array-level operations used everywhere else.
"""

from typing import Tuple

import numpy as np
import torch
import torch.nn.functional as F
from scipy.special import softmax

from core.errors import ShapeError

DTYPE = torch.float64


def similarity(x: torch.Tensor, shapelets: torch.Tensor, bias: torch.Tensor) -> torch.Tensor:
    """
    Same-padded shapelet convolution for a batch

    I[b, t, n] = sum_j x[b, t - L//2 + j] * S[n, j] + bias[n], zero outside [0, T).

    Args:
        x: (B, T) series
        shapelets: (N, L) effective shapelets
        bias: (N,) convolution bias

    Returns:
        (B, T, N) similarity map
    """
    L = shapelets.shape[1]
    left = L // 2
    padded = F.pad(x.unsqueeze(1), (left, L - 1 - left))
    out = F.conv1d(padded, shapelets.unsqueeze(1), bias)
    return out.transpose(1, 2)


def peak_windows(x: torch.Tensor, activations: torch.Tensor, L: int) -> Tuple[torch.Tensor, torch.Tensor]:
    """
    Detector for a batch: peak position and centred window per shapelet

    Args:
        x: (B, T) series
        activations: (B, T, N) activation maps
        L: Window length

    Returns:
        (t_star (B, N), windows (B, N, L)), zero-padded outside the series
    """
    t_star = activations.argmax(dim=1)
    padded = F.pad(x, (L // 2, L))
    windows = padded.unfold(1, L, 1)
    batch = torch.arange(x.shape[0]).unsqueeze(1)
    return t_star, windows[batch, t_star]


def describe(x: np.ndarray, shapelets: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """
    Similarity map of one series against every shapelet

    Args:
        x: Series, length T >= 1
        shapelets: (N, L) effective shapelets
        bias: (N,) bias

    Returns:
        (T, N) similarity map I

    Raises:
        ShapeError: Inconsistent shapes
    """
    x = np.asarray(x, dtype=np.float64)
    shapelets = np.asarray(shapelets, dtype=np.float64)
    bias = np.asarray(bias, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ShapeError(f"Expected a non-empty 1-D series, got shape {x.shape}")
    if shapelets.ndim != 2 or shapelets.shape[1] < 1:
        raise ShapeError(f"Expected an (N, L) shapelet matrix, got shape {shapelets.shape}")
    if bias.shape != (shapelets.shape[0],):
        raise ShapeError(f"Bias shape {bias.shape} does not match {shapelets.shape[0]} shapelets")

    with torch.no_grad():
        out = similarity(
            torch.from_numpy(x).unsqueeze(0),
            torch.from_numpy(shapelets),
            torch.from_numpy(bias),
        )
    return out[0].numpy()


def activate(similarity_map: np.ndarray) -> np.ndarray:
    """
    Row-wise softmax over shapelets (max-subtracted, so large logits are safe)

    Examples:
        >>> activate(np.array([[np.log(3.0), 0.0]])).round(6).tolist()
        [[0.75, 0.25]]
    """
    return softmax(np.asarray(similarity_map, dtype=np.float64), axis=1)


def detect(x: np.ndarray, activations: np.ndarray, n: int, L: int) -> Tuple[int, np.ndarray]:
    """
    Peak position of shapelet n and the length-L window centred on it

    Ties go to the lowest index. The window starts at t* - L//2 and is
    zero-padded where it leaves the series.

    Returns:
        (t_star, detected window)
    """
    x = np.asarray(x, dtype=np.float64)
    activations = np.asarray(activations)
    if not 0 <= n < activations.shape[1]:
        raise ShapeError(f"Shapelet index {n} out of range for {activations.shape[1]} shapelets")
    t_star = int(np.argmax(activations[:, n]))
    padded = np.pad(x, (L // 2, L))
    return t_star, padded[t_star:t_star + L].copy()
