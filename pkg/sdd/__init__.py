"""Shapelet describe-and-detect: bank, encoder, losses and training"""

from config import BANK_KIND
from utils import load_json_artifact, save_json_artifact

from .bank import BankHyper, ShapeletBank, encode_shapelets
from .descriptor import describe, activate, detect
from .losses import loss_cls, loss_match, loss_div, total_loss, LossBreakdown
from .trainer import TrainConfig, train


def save_bank(bank: ShapeletBank, path: str) -> str:
    return save_json_artifact(bank.to_dict(), path)


def load_bank(path: str) -> ShapeletBank:
    return ShapeletBank.from_dict(load_json_artifact(path, BANK_KIND), path)


__all__ = [
    'BankHyper',
    'ShapeletBank',
    'encode_shapelets',
    'describe',
    'activate',
    'detect',
    'loss_cls',
    'loss_match',
    'loss_div',
    'total_loss',
    'LossBreakdown',
    'TrainConfig',
    'train',
    'save_bank',
    'load_bank',
]
