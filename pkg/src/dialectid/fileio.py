"""Atomic file writing helpers.

All pipeline outputs go through atomic_write: content lands in a temp file in
the target directory and is renamed into place, so a concurrent reader (or a
crashed run) never observes a partially written file.
"""

from __future__ import annotations

import os
import tempfile
from contextlib import contextmanager
from pathlib import Path


@contextmanager
def atomic_write(path: str | Path, mode: str = "w", encoding: str | None = "utf-8"):
    """Open a temp file next to `path`, yield it, rename over `path` on success."""
    path = Path(path)
    if "b" in mode:
        encoding = None
    fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, mode, encoding=encoding, newline="" if encoding else None) as handle:
            yield handle
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise
