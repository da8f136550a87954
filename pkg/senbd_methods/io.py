# -*- coding: utf-8 -*-
"""Reading count series and writing results

Count series are UTF-8 CSV files with a header row of sector names,
optionally preceded by a `period` column of opaque period labels:

    period,building,consumer
    1981Q1,0,1
    1981Q2,2,0

Result numbers are written with 12 significant digits.

Copyright 2018 Aaron Snoswell
"""

import csv
import enum
import json
import logging
import math
from pathlib import Path

import numpy as np

from .errors import DataIOError, SchemaError, DomainError
from .model import EventSeries, ModelSpec, default_sector_names
from .process import simulate


logger = logging.getLogger(__name__)

PERIOD_COLUMN = "period"
SIGNIFICANT_DIGITS = 12


def _parse_count(cell, row, column):
    text = cell.strip()
    try:
        value = int(text)
    except ValueError:
        try:
            float(text)
        except ValueError:
            raise SchemaError("not a number: {!r}".format(cell), row=row,
                              column=column)
        raise SchemaError("non-integer count {!r}".format(cell), row=row,
                          column=column)
    if value < 0:
        raise SchemaError("negative count {}".format(value), row=row,
                          column=column)
    return value


def ingest_csv(path):
    """Read a count series from a CSV file

    Args:
        path (str): CSV file path

    Returns:
        (EventSeries): The series, with labels if a period column is present
    """
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except (OSError, UnicodeDecodeError) as e:
        raise DataIOError("Cannot read {}: {}".format(path, e))

    if not rows or not any(cell.strip() for cell in rows[0]):
        raise SchemaError("missing header row", row=1, column=1)

    header = [cell.strip() for cell in rows[0]]
    has_labels = header[0].lower() == PERIOD_COLUMN
    names = header[1:] if has_labels else header
    if not names:
        raise SchemaError("no sector columns", row=1, column=1)
    if len(set(names)) != len(names) or any(not n for n in names):
        raise SchemaError("sector names must be unique and non-empty",
                          row=1, column=1)

    offset = 1 if has_labels else 0
    labels = []
    counts = []
    for line_number, cells in enumerate(rows[1:], start=2):
        if not cells or (len(cells) == 1 and not cells[0].strip()):
            # Blank line
            continue
        if len(cells) != len(header):
            raise SchemaError(
                "expected {} cells, got {}".format(len(header), len(cells)),
                row=line_number,
                column=min(len(cells), len(header)) + 1
            )
        if has_labels:
            labels.append(cells[0].strip())
        counts.append([
            _parse_count(cell, line_number, names[c])
            for c, cell in enumerate(cells[offset:])
        ])

    counts = np.array(counts, dtype=np.int64).reshape(len(counts), len(names))
    logger.info("Read %d periods of %d sectors from %s", counts.shape[0],
                counts.shape[1], path)
    return EventSeries(
        counts=counts,
        sector_names=names,
        labels=labels if has_labels else None
    )


def write_series_csv(series, path):
    """Write a count series so that ingest_csv reads it back unchanged"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            if series.labels is not None:
                writer.writerow([PERIOD_COLUMN] + list(series.sector_names))
                for label, row in zip(series.labels, series.counts):
                    writer.writerow([label] + [int(v) for v in row])
            else:
                writer.writerow(list(series.sector_names))
                for row in series.counts:
                    writer.writerow([int(v) for v in row])
    except OSError as e:
        raise DataIOError("Cannot write {}: {}".format(path, e))
    return path


def generate_synthetic(
        spec,
        horizon,
        seed,
        path,
        *,
        sector_names=None,
        allow_nonstationary=False
):
    """Simulate a series from a model and write it as CSV

    Args:
        spec (ModelSpec): Model to simulate
        horizon (int): Number of periods
        seed (int): Random seed
        path (str): Output CSV path

        sector_names (list): Column names, defaults to line1..lineD
        allow_nonstationary (bool): Simulate even if rho(S) >= 1

    Returns:
        (EventSeries): The written series
    """
    series = simulate(
        spec,
        horizon,
        seed,
        allow_nonstationary=allow_nonstationary,
        sector_names=sector_names if sector_names is not None
        else default_sector_names(spec.dimension)
    )
    write_series_csv(series, path)
    return series


def format_number(value):
    """Text form of a number with 12 significant digits"""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return "{:.{}g}".format(value, SIGNIFICANT_DIGITS)


def to_jsonable(obj):
    """Convert results to plain JSON-compatible python values

    Floats are rounded to 12 significant digits; non-finite floats become
    the strings 'inf', '-inf' and 'nan'.
    """
    if isinstance(obj, ModelSpec):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            return format_number(value)
        return float(format_number(value))
    if obj is None or isinstance(obj, str):
        return obj
    raise DomainError("Cannot serialise {!r}".format(type(obj)))


def write_json(document, path):
    """Write one result document"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="\n") as f:
            json.dump(to_jsonable(document), f, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise DataIOError("Cannot write {}: {}".format(path, e))
    return path


def write_csv_table(path, header, rows):
    """Write a table of strings and numbers as CSV"""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([
                    v if isinstance(v, str) else format_number(v)
                    for v in row
                ])
    except OSError as e:
        raise DataIOError("Cannot write {}: {}".format(path, e))
    return path


def read_csv_table(path):
    """Read a table written by write_csv_table as header and string rows"""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise DataIOError("Cannot read {}: {}".format(path, e))
    if not rows:
        raise SchemaError("missing header row", row=1, column=1)
    return rows[0], rows[1:]
