import csv
import logging
import math
from collections.abc import Sequence
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import EmptyFile, MalformedRow, MissingColumn, UnreadableFile
from .models import Table

logger = logging.getLogger(__name__)

# utf-8-sig drops the byte-order mark spreadsheet exports put before the header
ENCODING = "utf-8-sig"


def _parse_cell(cell: str) -> float:
    try:
        value = float(cell.strip())
    except ValueError:
        return math.nan
    return value if math.isfinite(value) else math.nan


def read_header(path: str | Path) -> list[str]:
    try:
        with open(path, newline="", encoding=ENCODING) as f:
            header = next(csv.reader(f), None)
    except UnicodeDecodeError as exc:
        raise UnreadableFile(path, f"not UTF-8 text ({exc.reason})") from exc
    except csv.Error as exc:
        raise UnreadableFile(path, str(exc)) from exc
    if not header:
        raise EmptyFile(path)
    return [name.strip() for name in header]


def load_csv(path: str | Path, schema: Sequence[str], target: str) -> Table:
    """Read the ``schema`` columns of a CSV file, in schema order.

    Blank, non-numeric and non-finite cells become missing (NaN). Columns
    not named in the schema are ignored. The target is appended to the
    schema when it is not already listed.
    """
    columns = list(schema)
    if target not in columns:
        columns.append(target)

    try:
        with open(path, newline="", encoding=ENCODING) as f:
            rows = _read_rows(path, csv.reader(f), columns)
    except UnicodeDecodeError as exc:
        raise UnreadableFile(path, f"not UTF-8 text ({exc.reason})") from exc
    except csv.Error as exc:
        raise UnreadableFile(path, str(exc)) from exc

    values = np.array(rows, dtype=np.float64).reshape(len(rows), len(columns))
    table = Table(tuple(columns), values, target)
    logger.info(
        "loaded %s: %d rows, %d missing cells",
        path,
        table.n_rows,
        int(table.missing_mask.sum()),
    )
    return table


def _read_rows(path, reader, columns: list[str]) -> list[list[float]]:
    header = next(reader, None)
    if not header:
        raise EmptyFile(path)
    header = [name.strip() for name in header]
    for name in columns:
        if name not in header:
            raise MissingColumn(name)
    positions = [header.index(name) for name in columns]

    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(header):
            raise MalformedRow(reader.line_num, len(header), len(row))
        rows.append([_parse_cell(row[p]) for p in positions])
    return rows


def write_table_csv(table: Table, path: str | Path) -> Path:
    path = Path(path)
    frame = pd.DataFrame(table.values, columns=list(table.column_names))
    frame.to_csv(path, index=False, na_rep="")
    return path
