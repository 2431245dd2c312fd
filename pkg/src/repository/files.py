import os
import tempfile
from pathlib import Path


def atomic_write_text(path: str | Path, text: str):
    """Write ``text`` to ``path`` through a temporary file and an atomic rename.

    :param path: Destination file; parent directories are created.
    :type path: str | Path
    :param text: Content, written as UTF-8 with ``\\n`` line endings.
    :type text: str
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
