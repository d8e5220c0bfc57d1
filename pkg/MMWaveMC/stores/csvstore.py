"""CSV store for study tables."""

import csv
import io
import os
import os.path
from typing import Any, Iterable, List, Optional, Sequence

import numpy as np

from MMWaveMC.constants import CSV_FLOAT_FORMAT
from MMWaveMC.helpers import hlogging

_log = hlogging.get_logger(__name__)


class CsvStore:
    """A store that writes one table per file in CSV format."""

    def __init__(self, path: str):
        """Create an instance of :class:`CsvStore`.

        Arguments:
            path (str): Path of the CSV file to write.

        """
        self._path = os.path.expanduser(path)
        directory = os.path.dirname(self._path)
        if directory:
            os.makedirs(directory, exist_ok=True)

    @property
    def path(self) -> str:
        return self._path

    def write(
        self,
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
        digest: Optional[str] = None,
    ) -> None:
        """Write ``rows`` under ``header`` to the CSV file.

        The table is written to a ``.tmp`` file first and renamed over the
        target once complete, so an interrupted study never leaves a
        truncated CSV behind.

        Arguments:
            header (list): Column names.
            rows (iterable): Table rows aligned with ``header``.
            digest (str): Config digest recorded in a leading comment line.

        """
        tmp_file_path = self._path + ".tmp"
        with open(tmp_file_path, "w", encoding="utf-8", newline="") as f:
            f.write(render(header, rows, digest))
        os.replace(tmp_file_path, self._path)
        _log.info("CsvStore: wrote %s", self._path)


def render(
    header: Sequence[str], rows: Iterable[Sequence[Any]], digest: Optional[str] = None
) -> str:
    """Render a table as CSV text with an optional ``# config_digest=`` comment line."""
    buffer = io.StringIO()
    if digest is not None:
        buffer.write(f"# config_digest={digest}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row has {len(row)} cells, header has {len(header)}")
        writer.writerow(format_row(row))
    return buffer.getvalue()


def format_row(row: Sequence[Any]) -> List[str]:
    """Format cells: fixed float precision, lowercase booleans, blank for None."""
    return [_format_cell(cell) for cell in row]


def _format_cell(cell: Any) -> str:
    if cell is None:
        return ""
    if isinstance(cell, (bool, np.bool_)):
        return "true" if cell else "false"
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    if isinstance(cell, (float, np.floating)):
        return CSV_FLOAT_FORMAT.format(float(cell))
    return str(cell)
