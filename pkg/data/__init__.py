"""Data loading, validation and synthetic benchmark generation"""

from .validator import validate_rows, validate_data_quality
from .loader import load_dataset, save_dataset
from .synth import MotifSpec, SynthConfig, generate, motif_waveform

__all__ = [
    'validate_rows',
    'validate_data_quality',
    'load_dataset',
    'save_dataset',
    'MotifSpec',
    'SynthConfig',
    'generate',
    'motif_waveform',
]
