"""
Mini-batch training of the shapelet bank
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import torch

from config import SDDDefaults, default_shapelet_length
from core.errors import ConfigError, MissingLabel, NumericalError
from core.types import Dataset

from .bank import BankHyper, ShapeletBank
from .descriptor import DTYPE
from .losses import loss_terms, check_finite

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    """Shapelet bank shape and optimiser settings"""
    n_shapelets: int = SDDDefaults.N_SHAPELETS
    shapelet_len: Optional[int] = None
    patch_len: Optional[int] = None
    num_heads: int = SDDDefaults.NUM_HEADS
    d_model: int = SDDDefaults.D_MODEL
    use_encoder: bool = True
    pooling: str = SDDDefaults.POOLING
    lambda_match: float = SDDDefaults.LAMBDA_MATCH
    lambda_div: float = SDDDefaults.LAMBDA_DIV
    delta: float = SDDDefaults.DELTA
    lr: float = SDDDefaults.LEARNING_RATE
    batch_size: int = SDDDefaults.BATCH_SIZE
    epochs: int = SDDDefaults.EPOCHS
    seed: int = 0
    init_noise: float = SDDDefaults.INIT_NOISE

    def hyper_for(self, series_length: int, num_classes: int) -> BankHyper:
        """Resolve data-dependent defaults into a concrete BankHyper"""
        patches = SDDDefaults.PATCHES_PER_SHAPELET
        shapelet_len = self.shapelet_len or default_shapelet_length(series_length, patches)
        if self.patch_len is not None:
            patch_len = self.patch_len
        elif shapelet_len % patches == 0:
            patch_len = shapelet_len // patches
        else:
            patch_len = shapelet_len
        hyper = BankHyper(
            n_shapelets=self.n_shapelets,
            shapelet_len=shapelet_len,
            patch_len=patch_len,
            num_heads=self.num_heads,
            d_model=self.d_model,
            num_classes=max(num_classes, 2),
            series_length=series_length,
            use_encoder=self.use_encoder,
            pooling=self.pooling,
        )
        hyper.validate()
        return hyper

    def validate(self) -> None:
        if self.lr <= 0 or self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("lr must be > 0, batch_size >= 1 and epochs >= 0")
        if self.lambda_match < 0 or self.lambda_div < 0:
            raise ConfigError("lambda_match and lambda_div must be non-negative")


def init_bank(ds: Dataset, config: TrainConfig) -> ShapeletBank:
    """
    Build a bank whose raw shapelets are random training subsequences plus
    small Gaussian noise; encoder and head use torch's default initialisers.
    """
    hyper = config.hyper_for(ds.length, ds.num_classes)
    rng = np.random.default_rng(config.seed)
    values = ds.values_matrix()

    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(config.seed)
        bank = ShapeletBank(hyper)

    L = hyper.shapelet_len
    picks = rng.integers(0, values.shape[0], size=hyper.n_shapelets)
    starts = rng.integers(0, ds.length - L + 1, size=hyper.n_shapelets)
    init = np.stack([values[i, s:s + L] for i, s in zip(picks, starts)])
    init = init + rng.normal(0.0, config.init_noise, size=init.shape)
    with torch.no_grad():
        bank.raw_shapelets.copy_(torch.from_numpy(init))
    return bank


def train(ds: Dataset, config: TrainConfig) -> ShapeletBank:
    """
    Learn a shapelet bank with Adam on the composite objective

    Deterministic for a given seed. The per-epoch mean loss per instance is
    stored in ``bank.history``.

    Args:
        ds: Labeled training data
        config: Bank shape and optimiser settings

    Returns:
        Trained bank in eval mode

    Raises:
        MissingLabel: Some instance has no label
        NumericalError: The loss or a gradient became NaN
    """
    config.validate()
    if not ds.has_labels:
        missing = next(i for i, ts in enumerate(ds) if ts.label is None)
        raise MissingLabel(f"Instance {missing} of '{ds.name}' has no label")

    bank = init_bank(ds, config)
    hyper = bank.hyper
    logger.info(
        f"Training {hyper.n_shapelets} shapelets of length {hyper.shapelet_len} "
        f"(patch {hyper.patch_len}, encoder={hyper.use_encoder}) on {len(ds)} series "
        f"for {config.epochs} epochs"
    )

    x_all = torch.from_numpy(ds.values_matrix()).to(DTYPE)
    y_all = torch.from_numpy(ds.labels())
    rng = np.random.default_rng(config.seed + 1)
    optimizer = torch.optim.Adam(bank.parameters(), lr=config.lr)

    bank.train()
    for epoch in range(config.epochs):
        order = rng.permutation(len(ds))
        epoch_loss = 0.0
        for start in range(0, len(ds), config.batch_size):
            idx = torch.from_numpy(order[start:start + config.batch_size])
            optimizer.zero_grad(set_to_none=True)
            terms = loss_terms(
                bank, x_all[idx], y_all[idx],
                config.lambda_match, config.lambda_div, config.delta
            )
            if not torch.isfinite(terms['total']):
                raise NumericalError(f"Loss diverged in epoch {epoch}", block='loss')
            terms['total'].backward()
            check_finite(bank, terms['total'])
            optimizer.step()
            epoch_loss += float(terms['total'])

        bank.history.append(epoch_loss / len(ds))
        logger.debug(f"epoch {epoch}: loss {bank.history[-1]:.6f}")
        if (epoch + 1) % 10 == 0 or epoch == config.epochs - 1:
            logger.info(f"Epoch {epoch + 1}/{config.epochs}: mean loss {bank.history[-1]:.6f}")

    return bank.eval()
