"""
Dataset loading and saving in the label-first text layout

One instance per line: ``label, v_1..v_T[, s_1..s_T]``. Lines starting with
``#`` are comments; a leading ``# dataset name=.. classes=.. saliency=..``
comment written by save_dataset lets load_dataset recover the name, class
count and whether saliency columns are present.
"""

import io
import logging
import re
from urllib.parse import quote, unquote
from typing import Optional, List, Dict

import numpy as np
import pandas as pd

from config import DATASET_FORMATS, FLOAT_FORMAT
from core.errors import EmptyDataset, FormatError, IoError, ParseError
from core.types import Dataset

from .validator import validate_rows

logger = logging.getLogger(__name__)

_HEADER_PATTERN = re.compile(r'^#\s*dataset\s+(.*)$')


def _parse_header(line: str) -> Dict[str, str]:
    match = _HEADER_PATTERN.match(line.strip())
    if not match:
        return {}
    fields = {}
    for token in match.group(1).split():
        if '=' in token:
            key, value = token.split('=', 1)
            fields[key] = unquote(value)
    return fields


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read().splitlines()
    except OSError as e:
        error_msg = f"Error reading dataset {path}: {e}"
        logger.error(error_msg)
        raise IoError(error_msg) from e


def resolve_format(path: str, fmt: Optional[str] = None) -> str:
    """Pick the text format from an explicit value or the file extension"""
    if fmt is None:
        fmt = 'csv' if str(path).lower().endswith('.csv') else 'tsv'
    fmt = fmt.lower()
    if fmt not in DATASET_FORMATS:
        raise FormatError(f"Unknown dataset format '{fmt}', expected one of {list(DATASET_FORMATS)}")
    return fmt


def load_dataset(
    path: str,
    fmt: Optional[str] = None,
    saliency: Optional[bool] = None,
    name: Optional[str] = None
) -> Dataset:
    """
    Load a dataset from a TSV/CSV file

    Args:
        path: File to read
        fmt: 'tsv' or 'csv'; inferred from the extension when None
        saliency: Whether rows carry T saliency flags after the values;
            taken from the header comment when None (default False)
        name: Dataset name; header comment or file stem when None

    Returns:
        Dataset with num_classes = 1 + max label (or the header's class count
        when larger)

    Raises:
        IoError: The file cannot be read
        EmptyDataset: No data rows
        FormatError: Ragged rows (with 1-based data row index) or bad flags
        ParseError: Non-numeric or missing tokens
    """
    fmt = resolve_format(path, fmt)
    delimiter = DATASET_FORMATS[fmt]
    logger.info(f"Loading dataset from {path} ({fmt})")

    lines = _read_lines(path)
    header: Dict[str, str] = {}
    rows: List[str] = []
    for line in lines:
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith('#'):
            if not rows and not header:
                header = _parse_header(stripped)
            continue
        rows.append(line.rstrip('\r\n'))

    if not rows:
        raise EmptyDataset(f"No data rows in {path}")

    # ragged rows are reported before pandas gets a chance to pad them
    widths = [len(row.split(delimiter)) for row in rows]
    for i, width in enumerate(widths):
        if width != widths[0]:
            raise FormatError(f"expected {widths[0]} fields, got {width}", row=i + 1)

    frame = pd.read_csv(
        io.StringIO('\n'.join(rows)),
        sep=delimiter,
        header=None,
        dtype=str,
        keep_default_na=False,
        skipinitialspace=True,
    )
    tokens = frame.apply(lambda col: col.str.strip())
    numeric = tokens.apply(pd.to_numeric, errors='coerce')
    bad = numeric.isna().to_numpy() | ~np.isfinite(numeric.to_numpy(dtype=np.float64))
    if bad.any():
        row, col = map(int, np.argwhere(bad)[0])
        raise ParseError(
            f"row {row + 1}, field {col + 1}: cannot parse {tokens.iat[row, col]!r} as a finite number"
        )
    # Python's float() is correctly rounded, so 17-digit text round-trips exactly
    matrix = tokens.to_numpy(dtype=object).astype(np.float64)

    if saliency is None:
        saliency = header.get('saliency', '0') == '1'

    dataset_name = name or header.get('name') or re.sub(r'\.[^.]*$', '', str(path).replace('\\', '/').split('/')[-1])
    header_classes = int(header['classes']) if header.get('classes', '').isdigit() else None

    dataset = validate_rows(matrix, saliency=saliency, name=dataset_name, num_classes=header_classes)
    logger.info(
        f"Loaded {len(dataset)} series of length {dataset.length} "
        f"({dataset.num_classes} classes, saliency={saliency}) from {path}"
    )
    return dataset


def save_dataset(ds: Dataset, path: str, fmt: Optional[str] = None) -> None:
    """
    Write a dataset in the label-first text layout

    Values are written with 17 significant digits so that load_dataset gives
    back bit-identical floats.

    Raises:
        EmptyDataset: The dataset has no instances
        IoError: The file cannot be written
    """
    if ds is None or len(ds) == 0:
        raise EmptyDataset("Refusing to save an empty dataset")

    fmt = resolve_format(path, fmt)
    delimiter = DATASET_FORMATS[fmt]
    with_saliency = ds.has_saliency

    columns = {'label': ds.labels()}
    values = ds.values_matrix()
    for j in range(ds.length):
        columns[f'v{j}'] = values[:, j]
    if with_saliency:
        flags = ds.saliency_matrix()
        for j in range(ds.length):
            columns[f's{j}'] = flags[:, j].astype(np.int64)
    frame = pd.DataFrame(columns)

    header = (
        f"# dataset name={quote(ds.name, safe='')} classes={ds.num_classes} "
        f"saliency={int(with_saliency)}\n"
    )
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(header)
            frame.to_csv(
                f, sep=delimiter, header=False, index=False,
                float_format=FLOAT_FORMAT, lineterminator='\n'
            )
    except OSError as e:
        error_msg = f"Error writing dataset {path}: {e}"
        logger.error(error_msg)
        raise IoError(error_msg) from e

    logger.info(f"Saved {len(ds)} series to {path}")
