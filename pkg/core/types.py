"""
Domain types shared by all modules

All containers are frozen and their arrays read-only, so instances can be
shared between readers freely.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, List

import numpy as np

from .errors import ShapeError, EmptyDataset, FormatError


def _frozen_array(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """
    A univariate series with optional class label and ground-truth saliency

    Args:
        values: Real-valued samples, length T >= 1, all finite
        label: Optional class index
        gt_saliency: Optional binary flags, length T
    """
    values: np.ndarray
    label: Optional[int] = None
    gt_saliency: Optional[np.ndarray] = None

    def __post_init__(self):
        values = _frozen_array(self.values, np.float64)
        if values.ndim != 1:
            raise ShapeError(f"Only univariate series are supported, got shape {values.shape}")
        if values.size < 1:
            raise ShapeError("A series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise FormatError("Series contains non-finite values")
        object.__setattr__(self, 'values', values)

        if self.label is not None:
            label = int(self.label)
            if label < 0:
                raise FormatError(f"Label must be non-negative, got {label}")
            object.__setattr__(self, 'label', label)

        if self.gt_saliency is not None:
            gt = _frozen_array(self.gt_saliency, np.int8)
            if gt.shape != values.shape:
                raise ShapeError(
                    f"Saliency length {gt.size} does not match series length {values.size}"
                )
            if not np.all((gt == 0) | (gt == 1)):
                raise FormatError("Saliency flags must be 0 or 1")
            object.__setattr__(self, 'gt_saliency', gt)

    @property
    def length(self) -> int:
        return int(self.values.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimeSeries):
            return NotImplemented
        if self.label != other.label or not np.array_equal(self.values, other.values):
            return False
        if (self.gt_saliency is None) != (other.gt_saliency is None):
            return False
        return self.gt_saliency is None or np.array_equal(self.gt_saliency, other.gt_saliency)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Equal-length collection of series

    Args:
        instances: Series sharing one length T
        num_classes: Class count C; every present label is < C
        name: Display name
    """
    instances: Tuple[TimeSeries, ...]
    num_classes: int
    name: str = 'dataset'

    def __post_init__(self):
        instances = tuple(self.instances)
        if not instances:
            raise EmptyDataset(f"Dataset '{self.name}' has no instances")
        if int(self.num_classes) < 1:
            raise FormatError(f"num_classes must be positive, got {self.num_classes}")
        length = instances[0].length
        for i, ts in enumerate(instances):
            if ts.length != length:
                raise FormatError(
                    f"expected length {length}, got {ts.length}", row=i + 1
                )
            if ts.label is not None and ts.label >= self.num_classes:
                raise FormatError(
                    f"label {ts.label} >= num_classes {self.num_classes}", row=i + 1
                )
        object.__setattr__(self, 'instances', instances)
        object.__setattr__(self, 'num_classes', int(self.num_classes))

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def __getitem__(self, index: int) -> TimeSeries:
        return self.instances[index]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.num_classes == other.num_classes
            and self.name == other.name
            and len(self) == len(other)
            and all(a == b for a, b in zip(self.instances, other.instances))
        )

    __hash__ = None

    @property
    def length(self) -> int:
        """Common series length T"""
        return self.instances[0].length

    @property
    def has_labels(self) -> bool:
        return all(ts.label is not None for ts in self.instances)

    @property
    def has_saliency(self) -> bool:
        return all(ts.gt_saliency is not None for ts in self.instances)

    def values_matrix(self) -> np.ndarray:
        """Stack all series into a (K, T) float64 matrix"""
        return np.stack([ts.values for ts in self.instances])

    def labels(self) -> np.ndarray:
        """Labels as an int array; -1 where missing"""
        return np.array(
            [-1 if ts.label is None else ts.label for ts in self.instances], dtype=np.int64
        )

    def saliency_matrix(self) -> np.ndarray:
        """Stack ground-truth saliency into a (K, T) int8 matrix"""
        if not self.has_saliency:
            raise FormatError(f"Dataset '{self.name}' has no ground-truth saliency")
        return np.stack([ts.gt_saliency for ts in self.instances])

    def subset(self, indices: Sequence[int], name: Optional[str] = None) -> 'Dataset':
        return Dataset(
            instances=tuple(self.instances[i] for i in indices),
            num_classes=self.num_classes,
            name=name or self.name,
        )

    @classmethod
    def from_arrays(
        cls,
        values: np.ndarray,
        labels: Optional[Sequence[int]] = None,
        saliency: Optional[np.ndarray] = None,
        num_classes: Optional[int] = None,
        name: str = 'dataset'
    ) -> 'Dataset':
        """Build a dataset from a (K, T) matrix and optional labels/saliency"""
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 2:
            raise ShapeError(f"Expected a (K, T) matrix, got shape {values.shape}")
        instances: List[TimeSeries] = []
        for i in range(values.shape[0]):
            instances.append(TimeSeries(
                values=values[i],
                label=None if labels is None else int(labels[i]),
                gt_saliency=None if saliency is None else saliency[i],
            ))
        if num_classes is None:
            num_classes = 1 if labels is None or len(labels) == 0 else int(np.max(labels)) + 1
        return cls(instances=tuple(instances), num_classes=num_classes, name=name)


@dataclass(frozen=True, eq=False)
class PerturbationMask:
    """Binary mask over timesteps; 1 keeps the sample, 0 perturbs it"""
    bits: np.ndarray

    def __post_init__(self):
        bits = _frozen_array(self.bits, np.int8)
        if bits.ndim != 1:
            raise ShapeError(f"Mask must be one-dimensional, got shape {bits.shape}")
        if not np.all((bits == 0) | (bits == 1)):
            raise FormatError("Mask entries must be 0 or 1")
        object.__setattr__(self, 'bits', bits)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PerturbationMask):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SaliencyMap:
    """
    Per-timestep importance scores in [0, 1]

    Args:
        scores: Finite scores, each in [0, 1]
        warning: Set when the map is a fallback (e.g. no segments were found)
    """
    scores: np.ndarray
    warning: Optional[str] = field(default=None)

    def __post_init__(self):
        scores = _frozen_array(self.scores, np.float64)
        if scores.ndim != 1:
            raise ShapeError(f"Saliency must be one-dimensional, got shape {scores.shape}")
        if not np.all(np.isfinite(scores)):
            raise FormatError("Saliency scores must be finite")
        if scores.size and (scores.min() < 0.0 or scores.max() > 1.0):
            raise FormatError("Saliency scores must lie in [0, 1]")
        object.__setattr__(self, 'scores', scores)

    @property
    def length(self) -> int:
        return int(self.scores.size)

    @classmethod
    def zeros(cls, length: int, warning: Optional[str] = None) -> 'SaliencyMap':
        return cls(scores=np.zeros(length), warning=warning)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SaliencyMap):
            return NotImplemented
        return np.array_equal(self.scores, other.scores) and self.warning == other.warning

    __hash__ = None
