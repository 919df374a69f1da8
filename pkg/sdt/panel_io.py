""" Reading and writing the CSV files exchanged by the command line.

Every writer goes through utils.atomic_path, so a file is either absent or
complete. Floats are written with repr, which round-trips exactly.
"""

import io
import logging
import pathlib
import re
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import pandas as pd

from . import constants, utils
from .density_estimation import DensityEstimate
from .errors import InvalidArgumentError, PanelFormatError
from .shift_estimation import ShiftEstimate
from .signal_model import CurvePanel, TimeGrid

logger = logging.getLogger(__name__)

_PARSER_LINE = re.compile(r"line (\d+)")


def format_float(value: float) -> str:
    return repr(float(value))


def _write_frame(path: pathlib.Path, frame: pd.DataFrame):
    with utils.atomic_path(path) as temp_path:
        frame.to_csv(temp_path, index=False, lineterminator="\n", encoding="utf-8")
    logger.info("wrote %s (%d rows)", path, len(frame))


def _read_text_frame(path: pathlib.Path) -> pd.DataFrame:
    """Reads a CSV keeping every cell as text, mapping parser failures to PanelFormatError."""
    text = pathlib.Path(path).read_text(encoding="utf-8")
    if not text.strip():
        raise PanelFormatError(f"{path} is empty")
    try:
        return pd.read_csv(
            io.StringIO(text), dtype=str, keep_default_na=False, skip_blank_lines=False
        )
    except pd.errors.ParserError as error:
        match = _PARSER_LINE.search(str(error))
        row = int(match.group(1)) if match else None
        raise PanelFormatError(f"inconsistent number of fields ({error})", row=row) from None


def _parse_column(frame: pd.DataFrame, column: str, allow_empty: bool = False) -> np.ndarray:
    values = np.empty(len(frame))
    for index, cell in enumerate(frame[column]):
        # header is line 1
        row = index + 2
        if cell is None or (isinstance(cell, float) and np.isnan(cell)):
            raise PanelFormatError("missing value", row=row, column=column)
        cell = cell.strip()
        if cell == "" and allow_empty:
            values[index] = np.nan
            continue
        try:
            value = float(cell)
        except ValueError:
            raise PanelFormatError(f"not a number: {cell!r}", row=row, column=column) from None
        if not np.isfinite(value):
            raise PanelFormatError(f"not a finite number: {cell!r}", row=row, column=column)
        values[index] = value
    return values


def read_panel(path: pathlib.Path) -> CurvePanel:
    """Reads a wide panel CSV: header t,curve_1,...,curve_J and one row per time point.

    Raises:
        PanelFormatError: The file is empty, ragged, non-numeric, has fewer than
            4 rows, or its time column is not i/n.
    """
    frame = _read_text_frame(path)
    columns = list(frame.columns)
    if not columns or columns[0].strip() != constants.TIME_COLUMN:
        raise PanelFormatError(f"first column must be {constants.TIME_COLUMN!r}", row=1)
    curve_ids = [column.strip() for column in columns[1:]]
    if not curve_ids:
        raise PanelFormatError("no curve columns", row=1)
    if any(not curve_id or curve_id.startswith("Unnamed:") for curve_id in curve_ids):
        raise PanelFormatError("empty curve name in header", row=1)
    if len(frame) < constants.MIN_SAMPLES:
        raise PanelFormatError(
            f"a panel needs at least {constants.MIN_SAMPLES} rows, got {len(frame)}"
        )

    n = len(frame)
    times = _parse_column(frame, columns[0])
    expected = TimeGrid(n).points
    mismatch = np.nonzero(np.abs(times - expected) > constants.TIME_TOLERANCE)[0]
    if len(mismatch):
        index = int(mismatch[0])
        raise PanelFormatError(
            f"time {times[index]!r} differs from {index + 1}/{n}",
            row=index + 2,
            column=constants.TIME_COLUMN,
        )
    values = np.vstack([_parse_column(frame, column) for column in columns[1:]])
    logger.info("read panel %s: n=%d J=%d", path, n, len(curve_ids))
    return CurvePanel(TimeGrid(n), values, curve_ids=tuple(curve_ids))


def write_panel(path: pathlib.Path, panel: CurvePanel):
    data = {constants.TIME_COLUMN: [format_float(t) for t in panel.grid.points]}
    for curve_id, row in zip(panel.curve_ids, panel.values):
        data[curve_id] = [format_float(value) for value in row]
    _write_frame(path, pd.DataFrame(data))


def write_true_shifts(path: pathlib.Path, panel: CurvePanel):
    """Writes curve_id,theta_true with theta_true the target location axis + theta."""
    targets = panel.target_locations
    if targets is None:
        raise InvalidArgumentError("the panel does not record its shifts")
    _write_frame(
        path,
        pd.DataFrame(
            {
                constants.TRUE_SHIFTS_COLUMNS[0]: list(panel.curve_ids),
                constants.TRUE_SHIFTS_COLUMNS[1]: [format_float(value) for value in targets],
            }
        ),
    )


def write_estimated_shifts(
    path: pathlib.Path, curve_ids: Sequence[str], estimates: Sequence[ShiftEstimate]
):
    """Writes curve_id,theta_hat,K_selected,M_max,degenerate_flag; failed curves get an empty theta_hat."""
    rows = []
    for curve_id, estimate in zip(curve_ids, estimates):
        if estimate.error is not None:
            rows.append((curve_id, "", "", "", "1"))
            continue
        rows.append(
            (
                curve_id,
                format_float(estimate.theta_hat),
                str(estimate.selected_K),
                format_float(estimate.M_max),
                "1" if estimate.degenerate else "0",
            )
        )
    _write_frame(path, pd.DataFrame(rows, columns=list(constants.ESTIMATED_SHIFTS_COLUMNS)))


def read_shifts(path: pathlib.Path) -> Tuple[List[str], np.ndarray]:
    """Reads the shifts written by simulate (theta_true) or estimate (theta_hat).

    Rows whose theta_hat is empty (failed curves) are skipped.

    Returns:
        The curve ids and shift values of the usable rows.
    """
    frame = _read_text_frame(path)
    columns = [column.strip() for column in frame.columns]
    frame.columns = columns
    if constants.ESTIMATED_SHIFTS_COLUMNS[1] in columns:
        column = constants.ESTIMATED_SHIFTS_COLUMNS[1]
    elif constants.TRUE_SHIFTS_COLUMNS[1] in columns:
        column = constants.TRUE_SHIFTS_COLUMNS[1]
    else:
        raise PanelFormatError("no theta_hat or theta_true column", row=1)
    values = _parse_column(frame, column, allow_empty=True)
    usable = np.isfinite(values)
    if not np.any(usable):
        raise PanelFormatError("no shift values")
    ids = frame[columns[0]].tolist()
    return [curve_id for curve_id, keep in zip(ids, usable) if keep], values[usable]


def write_density(path: pathlib.Path, estimate: DensityEstimate):
    _write_frame(
        path,
        pd.DataFrame(
            {
                constants.DENSITY_COLUMNS[0]: [format_float(x) for x in estimate.x_grid],
                constants.DENSITY_COLUMNS[1]: [format_float(y) for y in estimate.values],
            }
        ),
    )


def write_bench(path: pathlib.Path, rows: Iterable):
    records = [
        (row.suite, row.metric, format_float(row.value), row.threshold, row.status)
        for row in rows
    ]
    _write_frame(path, pd.DataFrame(records, columns=list(constants.BENCH_COLUMNS)))
