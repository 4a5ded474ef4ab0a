"""
Learnable shapelet bank and its versioned JSON form
"""

import logging
from dataclasses import dataclass, asdict
from typing import Dict, Any, List

import numpy as np
import torch
import torch.nn as nn

from config import ARTIFACT_VERSION, BANK_KIND, POOLING_MODES
from core.errors import ConfigError, ShapeError, VersionError

from .descriptor import similarity, describe, activate, DTYPE
from .encoder import ShapeletEncoder

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BankHyper:
    """Shape of a shapelet bank"""
    n_shapelets: int
    shapelet_len: int
    patch_len: int
    num_heads: int
    d_model: int
    num_classes: int
    series_length: int
    use_encoder: bool = True
    pooling: str = 'max'

    def validate(self) -> None:
        """
        Raises:
            ConfigError: Any structural precondition fails
        """
        if self.n_shapelets < 2:
            raise ConfigError(f"A bank needs at least 2 shapelets, got {self.n_shapelets}")
        if not 1 <= self.shapelet_len <= self.series_length:
            raise ConfigError(
                f"shapelet_len must lie in [1, {self.series_length}], got {self.shapelet_len}"
            )
        if self.patch_len < 1 or self.shapelet_len % self.patch_len != 0:
            raise ConfigError(
                f"shapelet_len {self.shapelet_len} is not divisible by patch_len {self.patch_len}"
            )
        if self.num_heads < 1 or self.d_model % self.num_heads != 0:
            raise ConfigError(
                f"d_model {self.d_model} is not divisible by num_heads {self.num_heads}"
            )
        if self.num_classes < 2:
            raise ConfigError(f"The classification head needs >= 2 classes, got {self.num_classes}")
        if self.pooling not in POOLING_MODES:
            raise ConfigError(f"pooling must be one of {POOLING_MODES}, got '{self.pooling}'")


class ShapeletBank(nn.Module):
    """
    N learnable shapelets with bias, encoder and classification head

    The effective shapelets (encoder output, or the raw parameters when the
    encoder is disabled) are what every downstream step uses.
    """

    def __init__(self, hyper: BankHyper):
        super().__init__()
        hyper.validate()
        self.hyper = hyper
        self.raw_shapelets = nn.Parameter(
            torch.zeros(hyper.n_shapelets, hyper.shapelet_len, dtype=DTYPE)
        )
        self.bias = nn.Parameter(torch.zeros(hyper.n_shapelets, dtype=DTYPE))
        self.encoder = ShapeletEncoder(
            hyper.shapelet_len, hyper.patch_len, hyper.d_model, hyper.num_heads
        )
        self.projection = nn.Linear(hyper.n_shapelets, hyper.num_classes, dtype=DTYPE)
        self.history: List[float] = []

    def effective_shapelets(self) -> torch.Tensor:
        if not self.hyper.use_encoder:
            return self.raw_shapelets
        return self.encoder(self.raw_shapelets)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        """Activation maps (B, T, N) for a batch of series (B, T)"""
        return torch.softmax(similarity(x, self.effective_shapelets(), self.bias), dim=2)

    def activation_map(self, x: np.ndarray) -> np.ndarray:
        """(T, N) activation map of one series"""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.hyper.series_length,):
            raise ShapeError(
                f"Bank was trained on series of length {self.hyper.series_length}, "
                f"got length {x.shape[-1] if x.ndim else 0}"
            )
        return activate(describe(x, encode_shapelets(self), self.bias_numpy()))

    def bias_numpy(self) -> np.ndarray:
        return self.bias.detach().numpy().copy()

    def to_dict(self) -> Dict[str, Any]:
        """Versioned JSON-ready document; floats survive a round trip exactly"""
        return {
            'version': ARTIFACT_VERSION,
            'kind': BANK_KIND,
            'hyper': asdict(self.hyper),
            'raw_shapelets': self.raw_shapelets.detach().tolist(),
            'bias': self.bias.detach().tolist(),
            'encoder': {k: v.tolist() for k, v in self.encoder.state_dict().items()},
            'projection': {k: v.tolist() for k, v in self.projection.state_dict().items()},
            'history': [float(h) for h in self.history],
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], source: str = '<memory>') -> 'ShapeletBank':
        """
        Rebuild a bank from to_dict output

        Raises:
            VersionError: Wrong kind, version, or missing fields
        """
        if doc.get('kind') != BANK_KIND:
            raise VersionError(f"expected a {BANK_KIND} artifact, got kind {doc.get('kind')!r}", source)
        if doc.get('version') != ARTIFACT_VERSION:
            raise VersionError(
                f"unsupported version {doc.get('version')!r} (expected {ARTIFACT_VERSION})", source
            )
        try:
            bank = cls(BankHyper(**doc['hyper']))
            with torch.no_grad():
                bank.raw_shapelets.copy_(torch.tensor(doc['raw_shapelets'], dtype=DTYPE))
                bank.bias.copy_(torch.tensor(doc['bias'], dtype=DTYPE))
            bank.encoder.load_state_dict(
                {k: torch.tensor(v, dtype=DTYPE) for k, v in doc['encoder'].items()}
            )
            bank.projection.load_state_dict(
                {k: torch.tensor(v, dtype=DTYPE) for k, v in doc['projection'].items()}
            )
        except (KeyError, TypeError, RuntimeError) as e:
            raise VersionError(f"malformed shapelet bank: {e}", source) from e
        bank.history = list(doc.get('history', []))
        return bank.eval()


def encode_shapelets(bank: ShapeletBank) -> np.ndarray:
    """Effective shapelets (N, L) as an array"""
    with torch.no_grad():
        return bank.effective_shapelets().numpy().copy()
