"""
Training objective: classification, matching and diversity losses
"""

import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np
import torch
import torch.nn as nn

from core.errors import ConfigError, EmptyBatch, NumericalError

from .bank import ShapeletBank
from .descriptor import similarity, peak_windows, DTYPE

logger = logging.getLogger(__name__)

PROB_CLAMP = 1e-12
NORM_CLAMP = 1e-12


def _as_tensor(values) -> torch.Tensor:
    if isinstance(values, torch.Tensor):
        return values
    return torch.as_tensor(np.asarray(values, dtype=np.float64))


def loss_cls(
    activations: torch.Tensor,
    labels,
    projection: nn.Linear,
    pooling: str = 'max'
) -> torch.Tensor:
    """
    Summed cross-entropy of the classification head

    Each activation map is pooled over time per shapelet (max, or mean),
    projected to class logits and turned into probabilities. Two classes use
    the binary form -sum(y log p + (1 - y) log(1 - p)) with p = sigmoid of the
    logit difference; more classes use categorical cross-entropy. Probabilities
    are clamped at 1e-12.

    Args:
        activations: (K, T, N) activation maps
        labels: (K,) class indices
        projection: Linear head N -> C
        pooling: 'max' or 'mean'

    Raises:
        EmptyBatch: K == 0
    """
    activations = _as_tensor(activations)
    if activations.shape[0] == 0:
        raise EmptyBatch("loss_cls needs at least one instance")
    labels = torch.as_tensor(np.asarray(labels), dtype=torch.long)

    pooled = activations.amax(dim=1) if pooling == 'max' else activations.mean(dim=1)
    logits = projection(pooled)

    if logits.shape[1] == 2:
        p = torch.sigmoid(logits[:, 1] - logits[:, 0]).clamp(PROB_CLAMP, 1.0 - PROB_CLAMP)
        y = labels.to(DTYPE)
        return -(y * torch.log(p) + (1.0 - y) * torch.log(1.0 - p)).sum()

    probs = torch.softmax(logits, dim=1).clamp_min(PROB_CLAMP)
    return -torch.log(probs[torch.arange(labels.shape[0]), labels]).sum()


def loss_match(shapelets, detected) -> torch.Tensor:
    """
    Sum of Euclidean distances between each shapelet and its detected window

    ``detected`` may carry leading batch dimensions; distances are summed over
    all of them.

    Examples:
        >>> float(loss_match([[0.0, 0.0]], [[3.0, 4.0]]))
        5.0
    """
    shapelets = _as_tensor(shapelets)
    detected = _as_tensor(detected)
    return torch.linalg.vector_norm(shapelets - detected, dim=-1).sum()


def loss_div(shapelets, delta: float) -> torch.Tensor:
    """
    Hinge penalty on pairwise cosine similarity above the margin

    sum_{i<j} max(0, cos(S_i, S_j) - delta), norms clamped at 1e-12.
    """
    shapelets = _as_tensor(shapelets)
    norms = torch.linalg.vector_norm(shapelets, dim=1, keepdim=True).clamp_min(NORM_CLAMP)
    unit = shapelets / norms
    cosine = unit @ unit.T
    n = shapelets.shape[0]
    upper = torch.triu_indices(n, n, offset=1)
    return torch.relu(cosine[upper[0], upper[1]] - delta).sum()


@dataclass
class LossBreakdown:
    """Total loss, its components and gradients per parameter block"""
    total: float
    cls: float
    match: float
    div: float
    gradients: Dict[str, np.ndarray] = field(default_factory=dict)


def loss_terms(
    bank: ShapeletBank,
    x: torch.Tensor,
    labels: torch.Tensor,
    lambda_match: float,
    lambda_div: float,
    delta: float
) -> Dict[str, torch.Tensor]:
    """
    Forward pass of the composite objective

    Peak positions and detected windows are constants for the gradient: the
    argmax is piecewise constant, so gradients flow only through the
    shapelets, the similarity map and the head.
    """
    if x.shape[0] == 0:
        raise EmptyBatch("total_loss needs at least one instance")
    shapelets = bank.effective_shapelets()
    activations = torch.softmax(similarity(x, shapelets, bank.bias), dim=2)
    with torch.no_grad():
        _, detected = peak_windows(x, activations, bank.hyper.shapelet_len)

    cls = loss_cls(activations, labels, bank.projection, bank.hyper.pooling)
    match = loss_match(shapelets.unsqueeze(0), detected)
    div = loss_div(shapelets, delta)
    total = cls + lambda_match * match + lambda_div * div
    return {'total': total, 'cls': cls, 'match': match, 'div': div}


def check_finite(bank: ShapeletBank, loss: torch.Tensor) -> None:
    """
    Raises:
        NumericalError: The loss or any gradient holds NaN/inf
    """
    if not torch.isfinite(loss):
        raise NumericalError("Loss is not finite", block='loss')
    for name, param in bank.named_parameters():
        if param.grad is not None and not torch.all(torch.isfinite(param.grad)):
            raise NumericalError("Gradient is not finite", block=name)


def total_loss(
    bank: ShapeletBank,
    x,
    labels,
    lambda_match: float,
    lambda_div: float,
    delta: float
) -> LossBreakdown:
    """
    L = L_cls + lambda_match * L_match + lambda_div * L_div with exact gradients

    Args:
        bank: Shapelet bank; its gradients are overwritten
        x: (K, T) batch
        labels: (K,) labels
        lambda_match, lambda_div: Non-negative weights
        delta: Diversity margin

    Returns:
        LossBreakdown with gradients keyed by parameter name

    Raises:
        ConfigError: Negative weights
        EmptyBatch: K == 0
        NumericalError: NaN in the loss or a gradient block
    """
    if lambda_match < 0 or lambda_div < 0:
        raise ConfigError("lambda_match and lambda_div must be non-negative")
    x = _as_tensor(x)
    bank.zero_grad(set_to_none=True)
    terms = loss_terms(bank, x, torch.as_tensor(np.asarray(labels)), lambda_match, lambda_div, delta)
    if not torch.isfinite(terms['total']):
        raise NumericalError("Loss is not finite", block='loss')
    terms['total'].backward()
    check_finite(bank, terms['total'])

    gradients = {
        name: (param.grad.detach().numpy().copy() if param.grad is not None
               else np.zeros(tuple(param.shape)))
        for name, param in bank.named_parameters()
    }
    return LossBreakdown(
        total=float(terms['total']),
        cls=float(terms['cls']),
        match=float(terms['match']),
        div=float(terms['div']),
        gradients=gradients,
    )
