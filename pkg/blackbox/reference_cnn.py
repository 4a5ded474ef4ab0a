"""
Small reference CNN used as the built-in black box
"""

import copy
import logging
from dataclasses import dataclass
from typing import Dict, Any, Optional

import numpy as np
import torch
import torch.nn as nn

from config import ARTIFACT_VERSION, REFERENCE_KIND, ReferenceDefaults
from core.errors import ConfigError, MissingLabel, NumericalError, ShapeError, VersionError
from core.types import Dataset

from .classifier import Classifier

logger = logging.getLogger(__name__)

DTYPE = torch.float64


class ReferenceCNN(nn.Module):
    """Two convolution stages, global max+mean pooling, dense head to C logits"""

    def __init__(self, num_classes: int):
        super().__init__()
        self.features = nn.Sequential(
            nn.Conv1d(1, 8, kernel_size=7, padding=3, dtype=DTYPE),
            nn.ReLU(),
            nn.Conv1d(8, 16, kernel_size=5, padding=2, dtype=DTYPE),
            nn.ReLU(),
        )
        # max pooling finds a motif, mean pooling lets the head count them
        self.head = nn.Linear(32, num_classes, dtype=DTYPE)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = self.features(x.unsqueeze(1))
        pooled = torch.cat([h.amax(dim=2), h.mean(dim=2)], dim=1)
        return self.head(pooled)


class BuiltinClassifier(Classifier):
    """In-process classifier wrapping a ReferenceCNN; a pure function of (weights, x)"""

    kind = 'builtin'

    def __init__(self, network: ReferenceCNN, series_length: int, num_classes: int, metadata: str = ''):
        super().__init__(num_classes, metadata or f"reference_cnn T={series_length} C={num_classes}")
        self.network = network.eval()
        self.series_length = series_length
        self.report: Dict[str, Any] = {}

    def predict_proba_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.series_length:
            raise ShapeError(
                f"Model was trained on series of length {self.series_length}, got shape {X.shape}"
            )
        with torch.no_grad():
            logits = self.network(torch.from_numpy(X))
            return torch.softmax(logits, dim=1).numpy()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'version': ARTIFACT_VERSION,
            'kind': REFERENCE_KIND,
            'num_classes': self.num_classes,
            'series_length': self.series_length,
            'state': {k: v.tolist() for k, v in self.network.state_dict().items()},
            'report': self.report,
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], source: str = '<memory>') -> 'BuiltinClassifier':
        """
        Raises:
            VersionError: Wrong kind, version or malformed weights
        """
        if doc.get('kind') != REFERENCE_KIND:
            raise VersionError(f"expected a {REFERENCE_KIND} artifact, got kind {doc.get('kind')!r}", source)
        if doc.get('version') != ARTIFACT_VERSION:
            raise VersionError(
                f"unsupported version {doc.get('version')!r} (expected {ARTIFACT_VERSION})", source
            )
        try:
            network = ReferenceCNN(int(doc['num_classes']))
            network.load_state_dict({k: torch.tensor(v, dtype=DTYPE) for k, v in doc['state'].items()})
            handle = cls(network, int(doc['series_length']), int(doc['num_classes']))
        except (KeyError, TypeError, RuntimeError) as e:
            raise VersionError(f"malformed reference model: {e}", source) from e
        handle.report = dict(doc.get('report', {}))
        return handle


@dataclass(frozen=True)
class ReferenceTrainConfig:
    """Optimiser settings for the reference CNN"""
    lr: float = ReferenceDefaults.LEARNING_RATE
    batch_size: int = ReferenceDefaults.BATCH_SIZE
    epochs: int = ReferenceDefaults.EPOCHS
    seed: int = 0
    validation_fraction: float = ReferenceDefaults.VALIDATION_FRACTION
    patience: int = ReferenceDefaults.PATIENCE

    def validate(self) -> None:
        if self.lr <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("lr must be > 0, batch_size >= 1 and epochs >= 0")
        if not 0 <= self.validation_fraction < 1:
            raise ConfigError("validation_fraction must lie in [0, 1)")


def _accuracy(network: ReferenceCNN, X: torch.Tensor, y: torch.Tensor) -> float:
    if X.shape[0] == 0:
        return float('nan')
    with torch.no_grad():
        return float((network(X).argmax(dim=1) == y).to(DTYPE).mean())


def train_reference(
    ds: Dataset,
    config: ReferenceTrainConfig,
    test: Optional[Dataset] = None
) -> BuiltinClassifier:
    """
    Train the reference CNN with Adam and cross-entropy

    A fraction of the training set is held out for validation; the weights
    with the best validation accuracy are kept and training stops after
    ``patience`` epochs without improvement. Deterministic per seed.

    Args:
        ds: Labeled training data
        config: Optimiser settings
        test: Optional test split for the accuracy report

    Returns:
        BuiltinClassifier whose ``report`` holds train/validation/test accuracy

    Raises:
        MissingLabel: Unlabeled training instance
        NumericalError: Loss diverged
    """
    config.validate()
    if not ds.has_labels:
        raise MissingLabel(f"Dataset '{ds.name}' has unlabeled instances")
    num_classes = max(ds.num_classes, 2)

    rng = np.random.default_rng(config.seed)
    order = rng.permutation(len(ds))
    n_val = int(len(ds) * config.validation_fraction) if len(ds) >= 5 else 0
    val_idx, train_idx = order[:n_val], order[n_val:]

    X = torch.from_numpy(ds.values_matrix())
    y = torch.from_numpy(ds.labels())
    X_train, y_train = X[torch.from_numpy(train_idx)], y[torch.from_numpy(train_idx)]
    X_val, y_val = X[torch.from_numpy(val_idx)], y[torch.from_numpy(val_idx)]

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(config.seed)
        network = ReferenceCNN(num_classes)

    logger.info(
        f"Training reference CNN on {len(train_idx)} series ({n_val} held out) "
        f"for up to {config.epochs} epochs"
    )
    optimizer = torch.optim.Adam(network.parameters(), lr=config.lr)
    criterion = nn.CrossEntropyLoss()

    best_state = copy.deepcopy(network.state_dict())
    best_val = _accuracy(network, X_val, y_val) if n_val else -1.0
    stale = 0
    epochs_run = 0
    for epoch in range(config.epochs):
        network.train()
        perm = torch.from_numpy(rng.permutation(len(train_idx)))
        for start in range(0, len(train_idx), config.batch_size):
            idx = perm[start:start + config.batch_size]
            optimizer.zero_grad(set_to_none=True)
            loss = criterion(network(X_train[idx]), y_train[idx])
            if not torch.isfinite(loss):
                raise NumericalError(f"Reference CNN loss diverged in epoch {epoch}", block='loss')
            loss.backward()
            optimizer.step()
        epochs_run = epoch + 1

        network.eval()
        if n_val:
            val_acc = _accuracy(network, X_val, y_val)
            logger.debug(f"epoch {epoch}: validation accuracy {val_acc:.4f}")
            if val_acc > best_val:
                best_val, best_state, stale = val_acc, copy.deepcopy(network.state_dict()), 0
            else:
                stale += 1
                if stale >= config.patience:
                    logger.info(f"Early stopping after epoch {epoch + 1}")
                    break
        else:
            best_state = copy.deepcopy(network.state_dict())

    network.load_state_dict(best_state)
    network.eval()

    handle = BuiltinClassifier(network, ds.length, num_classes)
    handle.report = {
        'train_accuracy': _accuracy(network, X_train, y_train),
        'validation_accuracy': _accuracy(network, X_val, y_val) if n_val else None,
        'epochs_run': epochs_run,
    }
    if test is not None:
        handle.report['test_accuracy'] = evaluate_accuracy(handle, test)
    logger.info(f"Reference CNN report: {handle.report}")
    return handle


def evaluate_accuracy(handle: Classifier, ds: Dataset) -> float:
    """Fraction of labeled instances whose argmax prediction matches the label"""
    if not ds.has_labels:
        raise MissingLabel(f"Dataset '{ds.name}' has unlabeled instances")
    predictions = handle.predict(ds.values_matrix())
    return float(np.mean(predictions == ds.labels()))
