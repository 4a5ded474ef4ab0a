"""
Utility functions and helpers
"""

import json
import os
import sys
import logging
from datetime import datetime
from typing import Dict, Any, List, Optional, Sequence

import numpy as np
import pandas as pd

from config import LOG_FORMAT, LOG_DATE_FORMAT, FLOAT_FORMAT
from core.errors import IoError, VersionError
from core.types import SaliencyMap

logger = logging.getLogger(__name__)


def setup_logging(level: str = 'WARNING', log_dir: Optional[str] = None) -> None:
    """
    Setup logging configuration for the application

    Log records go to stderr; stdout carries the run configuration echo and
    result rows. A dated log file is added when ``log_dir`` is given.
    """
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        log_filename = os.path.join(
            log_dir,
            f'shapex_{datetime.now().strftime("%Y%m%d")}.log'
        )
        handlers.append(logging.FileHandler(log_filename))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
        datefmt=LOG_DATE_FORMAT,
        handlers=handlers,
        force=True,
    )
    logger.info("Logging initialized")


def save_json_artifact(doc: Dict[str, Any], path: str) -> str:
    """
    Write a versioned artifact document as JSON

    Floats are written with their shortest round-trip repr, so loading gives
    back the exact same doubles.

    Raises:
        IoError: The file cannot be written
    """
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(doc, f, sort_keys=True)
            f.write('\n')
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise IoError(f"Cannot write {path}: {e}") from e
    logger.info(f"Artifact saved to {path}")
    return path


def load_json_artifact(path: str, kind: Optional[str] = None) -> Dict[str, Any]:
    """
    Read an artifact document

    Args:
        path: JSON file
        kind: Expected value of the "kind" field, if any

    Raises:
        IoError: The file cannot be read
        VersionError: Not JSON, not an object, or of another kind
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            doc = json.load(f)
    except OSError as e:
        logger.error(f"Error reading {path}: {e}")
        raise IoError(f"Cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise VersionError(f"not a JSON artifact ({e})", path) from e
    if not isinstance(doc, dict):
        raise VersionError("artifact must be a JSON object", path)
    if kind is not None and doc.get('kind') != kind:
        raise VersionError(f"expected a {kind} artifact, got kind {doc.get('kind')!r}", path)
    return doc


def _write_frame(df: pd.DataFrame, path: str) -> str:
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise IoError(f"Cannot write {path}: {e}") from e
    logger.info(f"Wrote {len(df)} rows to {path}")
    return path


def saliency_frame(maps: Sequence[SaliencyMap]) -> pd.DataFrame:
    """Long table with one row per (instance, timestep)"""
    frames = [
        pd.DataFrame({'instance': i, 't': np.arange(m.length), 'score': m.scores})
        for i, m in enumerate(maps)
    ]
    if not frames:
        return pd.DataFrame(columns=['instance', 't', 'score'])
    return pd.concat(frames, ignore_index=True)


def export_saliency_csv(maps: Sequence[SaliencyMap], path: str) -> str:
    """Write saliency maps as CSV with columns instance,t,score"""
    return _write_frame(saliency_frame(maps), path)


def load_saliency_csv(path: str) -> List[SaliencyMap]:
    """
    Read maps written by export_saliency_csv, ordered by instance

    Raises:
        IoError: The file cannot be read
        VersionError: Columns are not instance,t,score
    """
    try:
        df = pd.read_csv(path, float_precision='round_trip')
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise IoError(f"Cannot read saliency file {path}: {e}") from e
    if list(df.columns) != ['instance', 't', 'score']:
        raise VersionError(f"expected columns instance,t,score, got {list(df.columns)}", path)
    maps = []
    for _, group in df.sort_values(['instance', 't'], kind='stable').groupby('instance', sort=True):
        maps.append(SaliencyMap(group['score'].to_numpy(dtype=np.float64)))
    return maps


def export_shapley_json(records: List[Dict[str, Any]], path: str) -> str:
    """Write per-instance Shapley records (see attribution.pipeline.shapley_record)"""
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(records, f, indent=1)
            f.write('\n')
    except OSError as e:
        logger.error(f"Error writing {path}: {e}")
        raise IoError(f"Cannot write {path}: {e}") from e
    return path


def export_table_csv(rows: List[Dict[str, Any]], path: str, columns: Sequence[str]) -> str:
    """Write result rows (metrics, occlusion curves) with a fixed column order"""
    return _write_frame(pd.DataFrame(rows, columns=list(columns)), path)


def format_table_csv(rows: List[Dict[str, Any]], columns: Sequence[str]) -> str:
    """Same table as export_table_csv, rendered to text for stdout"""
    return pd.DataFrame(rows, columns=list(columns)).to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator='\n'
    )
