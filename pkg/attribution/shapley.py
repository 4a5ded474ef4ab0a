"""
Segment-level Shapley values with temporally relational coalitions

Each segment plays only with the segments in its connected component of the
adjacency graph. Small components are enumerated exactly; larger ones are
estimated from random permutations.
"""

import logging
from dataclasses import dataclass
from math import factorial
from typing import Callable, Dict, FrozenSet, List, Sequence, Tuple

import numpy as np

from config import AttributionDefaults, PERTURBATION_BASELINES
from core.errors import ConfigError

from .perturbation import build_mask, perturb
from .segmentation import SegmentSet, connected_universe

logger = logging.getLogger(__name__)

Coalition = FrozenSet[int]
ValueFunction = Callable[[List[Coalition]], np.ndarray]


@dataclass(frozen=True)
class ShapleyConfig:
    """Exact/sampled switch and perturbation settings"""
    k_exact: int = AttributionDefaults.K_EXACT
    num_samples: int = AttributionDefaults.NUM_SAMPLES
    seed: int = 0
    baseline: str = AttributionDefaults.BASELINE
    relational: bool = True

    def validate(self) -> None:
        if self.k_exact < 0 or self.num_samples < 1:
            raise ConfigError("k_exact must be >= 0 and num_samples >= 1")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.baseline not in PERTURBATION_BASELINES:
            raise ConfigError(f"baseline must be one of {PERTURBATION_BASELINES}")


@dataclass(frozen=True, eq=False)
class ShapleyResult:
    """
    Per-segment Shapley values

    ``modes[n]`` is 'exact' or 'sampled'; ``samples_used[n]`` counts the
    coalitions enumerated (exact) or permutations drawn (sampled).
    """
    phi: np.ndarray
    modes: Tuple[str, ...]
    samples_used: Tuple[int, ...]
    value_at_empty: float
    value_at_full: float

    @property
    def mode(self) -> str:
        return 'sampled' if 'sampled' in self.modes else 'exact'


class CachedValue:
    """Memoising wrapper that evaluates unseen coalitions in one batch"""

    def __init__(self, value_fn: ValueFunction):
        self.value_fn = value_fn
        self.cache: Dict[Coalition, float] = {}

    def prefetch(self, coalitions: Sequence[Coalition]) -> None:
        missing = list(dict.fromkeys(c for c in coalitions if c not in self.cache))
        if not missing:
            return
        values = np.asarray(self.value_fn(missing), dtype=np.float64)
        for coalition, value in zip(missing, values):
            self.cache[coalition] = float(value)

    def __call__(self, coalition: Coalition) -> float:
        if coalition not in self.cache:
            self.prefetch([coalition])
        return self.cache[coalition]


def _exact(n: int, others: Tuple[int, ...], v: CachedValue) -> float:
    k = len(others)
    weights = [factorial(s) * factorial(k - s) / factorial(k + 1) for s in range(k + 1)]
    coalitions = []
    for bits in range(1 << k):
        coalitions.append(frozenset(others[j] for j in range(k) if bits >> j & 1))
    v.prefetch(coalitions + [c | {n} for c in coalitions])

    phi = 0.0
    for c in coalitions:
        phi += weights[len(c)] * (v(c | {n}) - v(c))
    return phi


def _sampled(n: int, others: Tuple[int, ...], v: CachedValue, config: ShapleyConfig) -> float:
    rng = np.random.default_rng((config.seed, n))
    players = np.array((n,) + others)
    prefixes = []
    for _ in range(config.num_samples):
        order = rng.permutation(players)
        position = int(np.flatnonzero(order == n)[0])
        prefixes.append(frozenset(int(p) for p in order[:position]))
    v.prefetch(prefixes + [c | {n} for c in prefixes])

    total = 0.0
    for c in prefixes:
        total += v(c | {n}) - v(c)
    return total / config.num_samples


def shapley_from_value(value_fn: ValueFunction, segs: SegmentSet, config: ShapleyConfig) -> ShapleyResult:
    """
    Shapley value of every segment under an arbitrary coalition value function

    Args:
        value_fn: Maps a list of coalitions (frozensets of segment indices) to their values
        segs: Segments and adjacency
        config: Exact/sampled switch, sample count, seed, relational flag

    Raises:
        ConfigError: No segments, or invalid settings
    """
    config.validate()
    k = len(segs)
    if k == 0:
        raise ConfigError("Shapley values need at least one segment")

    v = CachedValue(value_fn)
    everyone = tuple(range(k))
    v.prefetch([frozenset(), frozenset(everyone)])

    phi = np.zeros(k)
    modes: List[str] = []
    samples: List[int] = []
    for n in range(k):
        if config.relational:
            others = connected_universe(segs, n)
        else:
            others = tuple(i for i in everyone if i != n)
        if len(others) <= config.k_exact:
            phi[n] = _exact(n, others, v)
            modes.append('exact')
            samples.append(1 << len(others))
        else:
            phi[n] = _sampled(n, others, v, config)
            modes.append('sampled')
            samples.append(config.num_samples)

    logger.debug(f"Shapley over {k} segments used {len(v.cache)} distinct coalitions")
    phi.setflags(write=False)
    return ShapleyResult(
        phi=phi,
        modes=tuple(modes),
        samples_used=tuple(samples),
        value_at_empty=v(frozenset()),
        value_at_full=v(frozenset(everyone)),
    )


def coalition_values(
    x: np.ndarray,
    segs: SegmentSet,
    classifier,
    target: int,
    baseline: str = 'linear'
) -> ValueFunction:
    """
    v(G') = f(perturb(x, mask of G'))[target], evaluated batch-wise
    """
    x = np.asarray(x, dtype=np.float64)

    def value_fn(coalitions: List[Coalition]) -> np.ndarray:
        batch = np.empty((len(coalitions), x.shape[0]))
        for row, coalition in enumerate(coalitions):
            batch[row] = perturb(x, build_mask(x.shape[0], segs, sorted(coalition)), baseline)
        return classifier.predict_proba_batch(batch)[:, target]

    return value_fn


def shapley(
    x: np.ndarray,
    segs: SegmentSet,
    classifier,
    target: int,
    config: ShapleyConfig = ShapleyConfig()
) -> ShapleyResult:
    """
    Shapley values of the segments of x for the classifier's target class

    Raises:
        ConfigError: No segments
        AdapterError: The external model failed
    """
    if classifier.num_classes and not 0 <= target < classifier.num_classes:
        raise ConfigError(f"target {target} out of range for {classifier.num_classes} classes")
    return shapley_from_value(coalition_values(x, segs, classifier, target, config.baseline), segs, config)
