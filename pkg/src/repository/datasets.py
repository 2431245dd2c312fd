import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.conf import messages
from src.entity.models import Dataset
from src.repository.files import atomic_write_text
from src.services.errors import MalformedInputError

logger = logging.getLogger(__name__)

MISSING_TOKENS = ("", "NA")


def _parse_column(raw: pd.Series, name: str) -> np.ndarray:
    text = raw.str.strip()
    missing = text.isin(MISSING_TOKENS)
    values = pd.to_numeric(text.where(~missing), errors="coerce").to_numpy(dtype=float)
    bad = ~missing.to_numpy() & ~np.isfinite(values)
    if bad.any():
        row = int(np.flatnonzero(bad)[0])
        raise MalformedInputError(
            messages.MALFORMED_CELL.format(value=raw.iloc[row], row=row + 1, column=name), row=row + 1, column=name
        )
    values[missing.to_numpy()] = np.nan
    return values


def load_csv(path: str | Path, response_name: str) -> Dataset:
    """Read a comma-separated file with a header row into a Dataset.

    Empty cells and the literal ``NA`` are missing; every other cell must be a finite
    real number. The response column must contain only 0 and 1.

    :param path: CSV file path.
    :type path: str | Path
    :param response_name: Name of the binary default column.
    :type response_name: str
    :raises MalformedInputError: On an unparseable cell, an absent response column or a non-binary response.
    :return: The dataset with feature columns in file order.
    :rtype: Dataset
    """
    frame = pd.read_csv(path, dtype=str, keep_default_na=False, na_filter=False, encoding="utf-8")
    if response_name not in frame.columns:
        raise MalformedInputError(messages.RESPONSE_ABSENT.format(column=response_name), column=response_name)

    response = frame[response_name].str.strip()
    binary = response.isin(("0", "1")) | pd.to_numeric(response, errors="coerce").isin((0.0, 1.0))
    if not binary.all():
        row = int(np.flatnonzero(~binary.to_numpy())[0])
        raise MalformedInputError(
            messages.RESPONSE_NOT_BINARY.format(value=frame[response_name].iloc[row], row=row + 1),
            row=row + 1,
            column=response_name,
        )
    y = pd.to_numeric(response).to_numpy().astype(np.int64)

    names = [name for name in frame.columns if name != response_name]
    x = np.column_stack([_parse_column(frame[name], name) for name in names]) if names else np.empty((len(frame), 0))
    logger.info("loaded %s: %d rows, %d features, %d defaults", path, len(frame), len(names), int(y.sum()))
    return Dataset(tuple(names), x, y)


def to_frame(ds: Dataset, response_name: str = "default") -> pd.DataFrame:
    frame = pd.DataFrame(ds.x, columns=list(ds.feature_names))
    frame[response_name] = ds.y
    return frame


def write_csv(ds: Dataset, path: str | Path, response_name: str = "default"):
    """Write a Dataset so that :func:`load_csv` reads it back exactly (missing cells empty)."""
    text = to_frame(ds, response_name).to_csv(index=False, float_format="%.17g", na_rep="", lineterminator="\n")
    atomic_write_text(path, text)
    logger.info("wrote %s (%d rows)", path, ds.n)
