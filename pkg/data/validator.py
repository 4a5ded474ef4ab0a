"""
Row validation and dataset construction for parsed dataset files
"""

import logging
from typing import Optional, Dict

import numpy as np

from core.errors import FormatError
from core.types import Dataset, TimeSeries

logger = logging.getLogger(__name__)

UNLABELED = -1


def validate_rows(
    matrix: np.ndarray,
    saliency: bool,
    name: str,
    num_classes: Optional[int] = None
) -> Dataset:
    """
    Turn a parsed (rows, fields) matrix into a Dataset

    The first field is the label (-1 marks an unlabeled instance); the rest
    are the T values, followed by T saliency flags when ``saliency`` is set.

    Args:
        matrix: Float matrix, one row per instance
        saliency: Whether the trailing half of the value fields are flags
        name: Dataset name
        num_classes: Class count declared by the file header, if any

    Returns:
        Dataset

    Raises:
        FormatError: Labels not integral, flags not binary, or the field
            count cannot be split into values and flags
    """
    n_fields = matrix.shape[1]
    if n_fields < 2:
        raise FormatError(f"each row needs a label and at least one value, got {n_fields} fields", row=1)

    if saliency:
        if (n_fields - 1) % 2 != 0:
            raise FormatError(
                f"{n_fields - 1} fields after the label cannot be split into values and saliency flags",
                row=1,
            )
        length = (n_fields - 1) // 2
    else:
        length = n_fields - 1

    labels = matrix[:, 0]
    for i, label in enumerate(labels):
        if label != np.floor(label) or (label < 0 and label != UNLABELED):
            raise FormatError(f"label {label!r} is not a non-negative integer", row=i + 1)

    values = matrix[:, 1:1 + length]
    flags = matrix[:, 1 + length:] if saliency else None
    if flags is not None:
        bad_rows = np.where(~np.all((flags == 0) | (flags == 1), axis=1))[0]
        if bad_rows.size:
            raise FormatError("saliency flags must be 0 or 1", row=int(bad_rows[0]) + 1)

    instances = []
    for i in range(matrix.shape[0]):
        label = int(labels[i])
        instances.append(TimeSeries(
            values=values[i],
            label=None if label == UNLABELED else label,
            gt_saliency=None if flags is None else flags[i].astype(np.int8),
        ))

    present = [ts.label for ts in instances if ts.label is not None]
    inferred = (max(present) + 1) if present else 1
    classes = max(inferred, num_classes or 0)

    return Dataset(instances=tuple(instances), num_classes=classes, name=name)


def validate_data_quality(ds: Dataset) -> Dict[str, float]:
    """
    Summary statistics logged after loading

    Args:
        ds: Loaded dataset

    Returns:
        Dictionary with instance count, length, class balance and saliency prevalence
    """
    labels = ds.labels()
    stats: Dict[str, float] = {
        'instances': len(ds),
        'length': ds.length,
        'num_classes': ds.num_classes,
        'unlabeled': int(np.sum(labels == UNLABELED)),
    }
    for c in range(ds.num_classes):
        stats[f'class_{c}'] = int(np.sum(labels == c))
    if ds.has_saliency:
        stats['saliency_prevalence'] = float(ds.saliency_matrix().mean())

    logger.info(f"Data quality check: {stats['instances']} series of length {stats['length']}")
    return stats
