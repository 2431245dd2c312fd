import logging
import os
from functools import lru_cache
from pathlib import Path

from src.conf.config import config
from src.entity.models import FittedModel, WoeTable
from src.repository.models import load_document, save_model
from src.schemas.model import ModelDocument

logger = logging.getLogger(__name__)


class ModelStore:
    """Directory of saved models, one ``<name>.json`` file per model."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path(self, name: str) -> Path:
        if not name or Path(name).name != name or name.startswith("."):
            raise KeyError(name)
        return self.root / f"{name}.json"

    def names(self) -> list[str]:
        if not self.root.is_dir():
            return []
        return sorted(p.stem for p in self.root.glob("*.json") if not p.name.startswith("."))

    def healthy(self) -> bool:
        return self.root.is_dir() and os.access(self.root, os.R_OK)

    def document(self, name: str) -> ModelDocument:
        """Load a saved model document.

        :raises KeyError: If no model of that name exists.
        """
        path = self.path(name)
        if not path.is_file():
            raise KeyError(name)
        return _cached_document(str(path), path.stat().st_mtime_ns)

    def load(self, name: str) -> tuple[FittedModel, dict[str, WoeTable] | None]:
        document = self.document(name)
        return document.to_model(), document.woe_tables()

    def save(self, name: str, model: FittedModel, woe: dict[str, WoeTable] | None = None) -> Path:
        path = self.path(name)
        save_model(model, path, woe)
        return path


@lru_cache(maxsize=32)
def _cached_document(path: str, mtime_ns: int) -> ModelDocument:
    logger.debug("loading %s (mtime %d)", path, mtime_ns)
    return load_document(path)


store = ModelStore(config.MODELS_DIR)


def get_store() -> ModelStore:
    return store
