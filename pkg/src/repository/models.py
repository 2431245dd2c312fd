import logging
from pathlib import Path

import numpy as np
import pandas as pd

from src.entity.models import FittedModel, MetricsReport, WoeTable
from src.repository.files import atomic_write_text
from src.schemas.model import ModelDocument, WoeDocument

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def save_model(model: FittedModel, path: str | Path, woe: dict[str, WoeTable] | None = None):
    """Write a fitted model as JSON.

    :param model: The fitted model.
    :type model: FittedModel
    :param path: Destination file.
    :type path: str | Path
    :param woe: WoE tables applied to the raw features before fitting, embedded so raw rows can be scored.
    :type woe: dict[str, WoeTable], optional
    """
    document = ModelDocument.from_model(model, woe)
    atomic_write_text(path, document.model_dump_json(indent=2) + "\n")
    logger.info("saved model %s to %s", model.link.name, path)


def load_document(path: str | Path) -> ModelDocument:
    return ModelDocument.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_model(path: str | Path) -> FittedModel:
    """Read a model written by :func:`save_model`; predictions are bit-identical to the original."""
    return load_document(path).to_model()


def save_woe(tables: dict[str, WoeTable], path: str | Path):
    atomic_write_text(path, WoeDocument.from_tables(tables).model_dump_json(indent=2) + "\n")
    logger.info("saved %d WoE tables to %s", len(tables), path)


def load_woe(path: str | Path) -> dict[str, WoeTable]:
    return WoeDocument.model_validate_json(Path(path).read_text(encoding="utf-8")).to_tables()


def write_frame(frame: pd.DataFrame, path: str | Path, index: bool = False):
    text = frame.to_csv(index=index, float_format=FLOAT_FORMAT, lineterminator="\n")
    atomic_write_text(path, text)
    logger.info("wrote %s", path)


def write_predictions(pd_: np.ndarray, path: str | Path, y: np.ndarray | None = None):
    """One ``pd`` column per row, with the observed ``default`` when given."""
    frame = pd.DataFrame({"pd": np.asarray(pd_, dtype=float)})
    if y is not None:
        frame["default"] = np.asarray(y, dtype=np.int64)
    write_frame(frame, path)


def read_predictions(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path)


def write_metrics(report: MetricsReport, path: str | Path, name: str | None = None):
    row = {"model": name} if name is not None else {}
    row.update(
        {
            "MAE+": report.mae_plus,
            "MSE+": report.mse_plus,
            "AUC": report.auc,
            "n_defaults": report.n_defaults,
            "n_total": report.n_total,
        }
    )
    write_frame(pd.DataFrame([row]), path)


def read_metrics(path: str | Path) -> list[tuple[str | None, MetricsReport]]:
    frame = pd.read_csv(path, dtype={"model": str})
    return [
        (
            row.get("model"),
            MetricsReport(row["MAE+"], row["MSE+"], row["AUC"], int(row["n_defaults"]), int(row["n_total"])),
        )
        for row in frame.to_dict("records")
    ]

