"""Curve-matrix CSV ingestion.

Format: a header ``id,t1,...,tk`` of observation times followed by one row
per subject ``subject_id,v1,...,vk``. Empty cells are unobserved values.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
import pandas as pd

from ..errors import IngestError
from ..geometry import SampledCurve, TimeGrid
from .smooth import RawRecord

logger = logging.getLogger(__name__)


@dataclass
class IngestResult:
    """Parsed curves; ``curves`` is set when the data already sit on a full uniform grid."""

    records: List[RawRecord]
    times: np.ndarray
    curves: Optional[List[SampledCurve]] = None
    rescaled: bool = False

    @property
    def ids(self) -> List[str]:
        return [r.id for r in self.records]

    @property
    def grid_ready(self) -> bool:
        return self.curves is not None


def _parse_header_times(header: List[str]) -> np.ndarray:
    times = pd.to_numeric(pd.Series(header[1:], dtype="object"), errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(times))
    if bad.size:
        col = int(bad[0]) + 2
        raise IngestError(f"non-numeric header time {header[col - 1]!r}", row=1, column=col)
    steps = np.flatnonzero(np.diff(times) <= 0)
    if steps.size:
        raise IngestError("non-increasing header times", row=1, column=int(steps[0]) + 3)
    return times


def ingest_csv(path: Union[str, Path]) -> IngestResult:
    """Read a curve-matrix CSV.

    Args:
        path: UTF-8 CSV file

    Returns:
        IngestResult with one RawRecord per data row

    Raises:
        IngestError: empty file, ragged rows, non-numeric cells, bad header times
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]

    if len(rows) < 2:
        raise IngestError("no data rows")
    header, body = rows[0], rows[1:]
    if len(header) < 2:
        raise IngestError("header needs an id column and at least one time", row=1)
    times = _parse_header_times(header)

    for i, row in enumerate(body):
        if len(row) != len(header):
            raise IngestError(f"ragged row: {len(row)} cells, header has {len(header)}", row=i + 2)

    frame = pd.DataFrame([[cell.strip() for cell in row[1:]] for row in body], dtype="object")
    blank = frame == ""
    values = frame.apply(pd.to_numeric, errors="coerce")
    bad = values.isna() & ~blank
    if bad.to_numpy().any():
        r, c = np.argwhere(bad.to_numpy())[0]
        raise IngestError(f"non-numeric cell {body[r][c + 1]!r}", row=int(r) + 2, column=int(c) + 2)

    rescaled = False
    if times[0] < 0.0 or times[-1] > 1.0:
        lo, hi = times[0], times[-1]
        if hi == lo:
            raise IngestError(f"a single header time {lo:g} outside [0, 1] cannot be rescaled", row=1, column=2)
        times = (times - lo) / (hi - lo)
        times[0], times[-1] = 0.0, 1.0
        rescaled = True
        logger.warning("header times span [%g, %g]; rescaled affinely to [0, 1]", lo, hi)

    matrix = values.to_numpy(dtype=float)
    records = []
    for i, row in enumerate(body):
        observed = np.isfinite(matrix[i])
        records.append(RawRecord(times[observed], matrix[i][observed], id=row[0].strip()))

    curves = None
    if np.isfinite(matrix).all() and times[0] == 0.0 and times[-1] == 1.0 and times.size >= 3:
        grid = TimeGrid(times)
        if grid.is_uniform:
            curves = [SampledCurve(grid, matrix[i]) for i in range(len(records))]

    logger.info("ingested %d curves with %d time points from %s", len(records), times.size, path)
    return IngestResult(records=records, times=times, curves=curves, rescaled=rescaled)
