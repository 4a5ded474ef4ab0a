"""
Shared fixtures: small stand-in classifiers for the attribution tests
"""

import pytest
import numpy as np

from blackbox.classifier import Classifier


class FunctionClassifier(Classifier):
    """Binary classifier whose class-1 probability is fn(X) per row"""

    kind = 'function'

    def __init__(self, fn):
        super().__init__(num_classes=2, metadata='test function')
        self.fn = fn
        self.calls = 0
        self.rows = 0

    def predict_proba_batch(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        self.calls += 1
        self.rows += X.shape[0]
        p1 = np.clip(np.asarray(self.fn(X), dtype=np.float64), 0.0, 1.0)
        return np.stack([1.0 - p1, p1], axis=1)


@pytest.fixture
def function_classifier():
    """Factory for FunctionClassifier"""
    return FunctionClassifier
