"""Atomic file output."""
import os
import tempfile
from contextlib import contextmanager
from typing import IO, Iterator


@contextmanager
def atomic_write(path: str, newline: str = "") -> Iterator[IO[str]]:
    """Open a text file that only appears at ``path`` once writing succeeded.

    Content goes to a temporary file in the target directory, which replaces
    ``path`` on a clean exit. On error, the temporary file is removed and
    ``path`` is left untouched.

    Args:
        path: Destination file.
        newline: Newline translation of the text stream. Default: ``""``
            (no translation, as required by the ``csv`` module).

    Yields:
        Writable UTF-8 text stream.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(prefix=".domclust-", suffix=".tmp", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline=newline) as stream:
            yield stream
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
