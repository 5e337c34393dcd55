"""Builds artifact tables and writes them in one pass at the end of a run."""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..geometry import GridFunction, TimeGrid
from .plots import save_svg

TableFormat = Literal["csv", "json"]


def curves_frame(curves: Sequence[GridFunction], ids: Sequence[str], grid: Optional[TimeGrid] = None) -> pd.DataFrame:
    """Curve matrix in the ingestion layout: an ``id`` column, then one column per time."""
    if grid is None:
        grid = curves[0].grid
    frame = pd.DataFrame(np.vstack([c.values for c in curves]), columns=[repr(float(t)) for t in grid.points])
    frame.insert(0, "id", list(ids))
    return frame


def glued_frame(rows: np.ndarray, grid: TimeGrid, labels: Dict[str, Sequence[Any]]) -> pd.DataFrame:
    """Glued functions as two rows each (amplitude block, phase block)."""
    k = grid.k
    records = []
    for i, row in enumerate(rows):
        for block, values in (("amplitude", row[:k]), ("phase", row[k:])):
            record = {name: vals[i] for name, vals in labels.items()}
            record["block"] = block
            record.update({repr(float(t)): v for t, v in zip(grid.points, values)})
            records.append(record)
    return pd.DataFrame(records)


@dataclass
class ArtifactWriter:
    """Collects tables, JSON documents and figures, then writes them together."""

    out_dir: Path
    table_format: TableFormat = "csv"
    float_format: str = "%.17g"
    _tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    _documents: Dict[str, Any] = field(default_factory=dict)
    _figures: Dict[str, Any] = field(default_factory=dict)

    def add_table(self, stem: str, frame: pd.DataFrame) -> None:
        self._tables[stem] = frame

    def add_json(self, name: str, payload: Union[BaseModel, Dict[str, Any]]) -> None:
        self._documents[name] = payload

    def add_figure(self, name: str, figure) -> None:
        self._figures[name] = figure

    def table_name(self, stem: str) -> str:
        return f"{stem}.{self.table_format}"

    def planned(self) -> List[str]:
        return (
            [self.table_name(s) for s in self._tables] + list(self._documents) + list(self._figures)
        )

    def to_csv(self, frame: pd.DataFrame) -> str:
        """Full-precision CSV text."""
        return frame.to_csv(index=False, float_format=self.float_format, lineterminator="\n")

    def flush(self) -> List[str]:
        """Write everything collected so far and return the file names."""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for stem, frame in self._tables.items():
            path = self.out_dir / self.table_name(stem)
            if self.table_format == "csv":
                path.write_text(self.to_csv(frame), encoding="utf-8")
            else:
                path.write_text(frame.to_json(orient="split", index=False, double_precision=15), encoding="utf-8")
            written.append(path.name)
        for name, payload in self._documents.items():
            write_json(self.out_dir / name, payload)
            written.append(name)
        for name, figure in self._figures.items():
            save_svg(figure, self.out_dir / name)
            written.append(name)
        self._tables.clear()
        self._documents.clear()
        self._figures.clear()
        return written


def write_json(path: Path, payload: Union[BaseModel, Dict[str, Any]]) -> None:
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2, by_alias=True)
    else:
        text = json.dumps(payload, indent=2, default=_json_default)
    path.write_text(text + "\n", encoding="utf-8")


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, BaseModel):
        return value.model_dump()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"cannot serialize {type(value).__name__}")
