"""
Shapelet-driven segmentation of a series and the temporal adjacency graph
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from config import AttributionDefaults
from core.errors import ConfigError, ShapeError
from sdd.bank import ShapeletBank

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Segment:
    """Interval [start, end) aligned with shapelet ``shapelet_id`` (1-based)"""
    shapelet_id: int
    start: int
    end: int
    peak: int

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ShapeError(f"Invalid segment interval [{self.start}, {self.end})")
        if not self.start <= self.peak < self.end:
            raise ShapeError(f"Peak {self.peak} outside [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start


def gap(a: Segment, b: Segment) -> int:
    """Number of timesteps between two intervals; <= 0 when they touch or overlap"""
    return max(b.start - a.end, a.start - b.end)


def build_adjacency(segments: Sequence[Segment], gap_tolerance: int = 0) -> np.ndarray:
    """Symmetric boolean matrix, true where gap <= gap_tolerance (diagonal included)"""
    k = len(segments)
    adjacency = np.eye(k, dtype=bool)
    for i in range(k):
        for j in range(i + 1, k):
            linked = gap(segments[i], segments[j]) <= gap_tolerance
            adjacency[i, j] = adjacency[j, i] = linked
    return adjacency


@dataclass(frozen=True, eq=False)
class SegmentSet:
    """Segments of one series with their temporal adjacency"""
    segments: Tuple[Segment, ...]
    adjacency: np.ndarray
    length: int

    def __post_init__(self):
        segments = tuple(self.segments)
        adjacency = np.array(self.adjacency, dtype=bool)
        k = len(segments)
        if adjacency.shape != (k, k):
            raise ShapeError(f"Adjacency shape {adjacency.shape} does not match {k} segments")
        if not np.array_equal(adjacency, adjacency.T) or not np.all(np.diag(adjacency)):
            raise ShapeError("Adjacency must be symmetric with a true diagonal")
        if any(s.end > self.length for s in segments):
            raise ShapeError(f"Segment extends beyond series length {self.length}")
        adjacency.setflags(write=False)
        object.__setattr__(self, 'segments', segments)
        object.__setattr__(self, 'adjacency', adjacency)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)

    def __getitem__(self, index: int) -> Segment:
        return self.segments[index]

    @classmethod
    def from_segments(cls, segments: Sequence[Segment], length: int, gap_tolerance: int = 0) -> 'SegmentSet':
        return cls(tuple(segments), build_adjacency(segments, gap_tolerance), length)

    @classmethod
    def fully_connected(cls, segments: Sequence[Segment], length: int) -> 'SegmentSet':
        k = len(segments)
        return cls(tuple(segments), np.ones((k, k), dtype=bool), length)


def segments_from_activation(
    activations: np.ndarray,
    omega: float,
    gap_tolerance: int = AttributionDefaults.GAP_TOLERANCE,
    all_runs: bool = False
) -> SegmentSet:
    """
    Threshold each activation column and keep the run holding its peak

    Args:
        activations: (T, N) activation map
        omega: Threshold; a timestep belongs to a run when A > omega
        gap_tolerance: Adjacency tolerance in timesteps
        all_runs: Keep every super-threshold run instead of only the peak's

    Returns:
        SegmentSet ordered by shapelet then start
    """
    activations = np.asarray(activations, dtype=np.float64)
    if activations.ndim != 2:
        raise ShapeError(f"Expected a (T, N) activation map, got shape {activations.shape}")
    if not 0 < omega < 1:
        raise ConfigError(f"omega must lie in (0, 1), got {omega}")
    if gap_tolerance < 0:
        raise ConfigError("gap_tolerance must be non-negative")

    T, N = activations.shape
    segments: List[Segment] = []
    for n in range(N):
        column = activations[:, n]
        runs, count = ndimage.label(column > omega)
        if count == 0:
            continue
        if all_runs:
            wanted = range(1, count + 1)
        else:
            peak = int(np.argmax(column))
            if runs[peak] == 0:
                continue
            wanted = [runs[peak]]
        for run_id in wanted:
            idx = np.flatnonzero(runs == run_id)
            start, end = int(idx[0]), int(idx[-1]) + 1
            peak = start + int(np.argmax(column[start:end]))
            segments.append(Segment(n + 1, start, end, peak))

    logger.debug(f"{len(segments)} segments from {N} shapelets at omega={omega:.4f}")
    return SegmentSet.from_segments(segments, T, gap_tolerance)


def segment(
    x: np.ndarray,
    bank: ShapeletBank,
    omega: Optional[float] = None,
    gap_tolerance: int = AttributionDefaults.GAP_TOLERANCE,
    all_runs: bool = False
) -> SegmentSet:
    """
    Segment a series with a trained shapelet bank

    Args:
        x: Series of the bank's training length
        bank: Trained shapelet bank
        omega: Activation threshold, default 1.5 / N
        gap_tolerance: Adjacency tolerance in timesteps
        all_runs: Keep every super-threshold run

    Raises:
        ShapeError: Series length differs from the bank's
        ConfigError: omega outside (0, 1)
    """
    if omega is None:
        omega = AttributionDefaults.OMEGA_FACTOR / bank.hyper.n_shapelets
    return segments_from_activation(bank.activation_map(x), omega, gap_tolerance, all_runs)


def connected_universe(segs: SegmentSet, n: int) -> Tuple[int, ...]:
    """Indices connected to segment n, directly or through others, excluding n"""
    if not 0 <= n < len(segs):
        raise ShapeError(f"Segment index {n} out of range for {len(segs)} segments")
    _, labels = connected_components(csr_matrix(segs.adjacency), directed=False)
    return tuple(int(i) for i in np.flatnonzero(labels == labels[n]) if i != n)
