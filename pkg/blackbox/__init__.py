"""Black-box classifiers: contract, reference CNN and external-process adapter"""

from config import REFERENCE_KIND
from core.errors import ConfigError
from utils import load_json_artifact, save_json_artifact

from .classifier import Classifier, check_distribution
from .reference_cnn import (
    ReferenceCNN,
    BuiltinClassifier,
    ReferenceTrainConfig,
    train_reference,
    evaluate_accuracy,
)
from .external import ExternalClassifier, external_adapter


def save_reference(handle: BuiltinClassifier, path: str) -> str:
    return save_json_artifact(handle.to_dict(), path)


def load_reference(path: str) -> BuiltinClassifier:
    return BuiltinClassifier.from_dict(load_json_artifact(path, REFERENCE_KIND), path)


def open_classifier(spec: str) -> Classifier:
    """
    Resolve a model specification

    'builtin:PATH' loads a saved reference CNN, 'external:CMD' launches CMD
    as an NDJSON child process.

    Raises:
        ConfigError: Unknown prefix
    """
    prefix, _, rest = spec.partition(':')
    if prefix == 'builtin' and rest:
        return load_reference(rest)
    if prefix == 'external' and rest:
        return external_adapter(rest)
    raise ConfigError(f"Model must be 'builtin:PATH' or 'external:CMD', got {spec!r}")


__all__ = [
    'Classifier',
    'check_distribution',
    'ReferenceCNN',
    'BuiltinClassifier',
    'ReferenceTrainConfig',
    'train_reference',
    'evaluate_accuracy',
    'ExternalClassifier',
    'external_adapter',
    'save_reference',
    'load_reference',
    'open_classifier',
]
