"""
Black-box classifier contract
"""

import logging
from abc import ABC, abstractmethod

import numpy as np

from core.errors import ProtocolError

logger = logging.getLogger(__name__)

PROB_TOLERANCE = 1e-6


class Classifier(ABC):
    """
    Anything that maps a series to a probability vector over C classes

    Subclasses implement predict_proba_batch; every returned row is a valid
    distribution (non-negative, sums to 1 within 1e-6).
    """

    kind: str = 'abstract'

    def __init__(self, num_classes: int, metadata: str = ''):
        self.num_classes = num_classes
        self.metadata = metadata

    @abstractmethod
    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        """(M, T) series -> (M, C) probabilities"""

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """One series -> length-C probability vector"""
        return self.predict_proba_batch(np.asarray(x, dtype=np.float64)[None, :])[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Argmax class per series"""
        return np.argmax(self.predict_proba_batch(np.atleast_2d(X)), axis=1)

    def close(self) -> None:
        """Release external resources; no-op by default"""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        self.close()
        return False


def check_distribution(probs: np.ndarray, num_classes: int) -> np.ndarray:
    """
    Validate an (M, C) probability matrix

    Raises:
        ProtocolError: Wrong width, negative entries or rows not summing to 1
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[1] != num_classes:
        raise ProtocolError(f"Expected {num_classes} probabilities per series, got shape {probs.shape}")
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise ProtocolError("Probabilities must be finite and non-negative")
    if np.any(np.abs(probs.sum(axis=1) - 1.0) > PROB_TOLERANCE):
        raise ProtocolError("Probabilities must sum to 1")
    return probs
