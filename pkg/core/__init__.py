"""Domain types and errors for the Shapelet Segment Explainer"""

from .types import TimeSeries, Dataset, PerturbationMask, SaliencyMap
from .errors import (
    DomainError,
    FormatError,
    ParseError,
    EmptyDataset,
    IoError,
    ConfigError,
    ShapeError,
    NumericalError,
    EmptyBatch,
    MissingLabel,
    AdapterError,
    AdapterTimeout,
    ProtocolError,
    DegenerateGroundTruth,
    VersionError,
)

__all__ = [
    'TimeSeries',
    'Dataset',
    'PerturbationMask',
    'SaliencyMap',
    'DomainError',
    'FormatError',
    'ParseError',
    'EmptyDataset',
    'IoError',
    'ConfigError',
    'ShapeError',
    'NumericalError',
    'EmptyBatch',
    'MissingLabel',
    'AdapterError',
    'AdapterTimeout',
    'ProtocolError',
    'DegenerateGroundTruth',
    'VersionError',
]
