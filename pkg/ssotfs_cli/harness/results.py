"""Result tables, Wilson intervals and CSV/JSON emission."""

import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import pandas as pd
from scipy.stats import norm

logger = logging.getLogger(__name__)

COLUMNS = ("series", "x", "metric", "n_trials", "ci_half_width")
FLOAT_FORMAT = "%.10g"


@dataclass(frozen=True)
class ResultRow:
    series: str
    x: float
    metric: float
    n_trials: int
    ci_half_width: float = 0.0


@dataclass
class ResultTable:
    """Rows of one experiment plus ``#``-comment metadata.

    Metadata must not depend on the worker count or wall time; those go to
    the JSON sidecar instead. ``sidecar`` holds extra run details that are
    written only to the sidecar.
    """

    rows: List[ResultRow] = field(default_factory=list)
    metadata: Dict[str, str] = field(default_factory=dict)
    sidecar: Dict[str, Any] = field(default_factory=dict)

    def add(self, series: str, x: float, metric: float, n_trials: int, ci_half_width: float = 0.0) -> None:
        self.rows.append(ResultRow(series, float(x), float(metric), int(n_trials), float(ci_half_width)))

    def series_names(self) -> List[str]:
        return list(dict.fromkeys(row.series for row in self.rows))

    def series(self, name: str) -> List[ResultRow]:
        return [row for row in self.rows if row.series == name]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.__dict__ for row in self.rows], columns=list(COLUMNS))

    def __len__(self) -> int:
        return len(self.rows)


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float, float]:
    """Wilson score interval of a binomial proportion.

    Returns:
        ``(estimate, half_width, center)``; the estimate is the plain ratio.
    """
    if trials <= 0:
        raise ValueError("Wilson interval needs at least one trial")
    z = float(norm.ppf(0.5 + confidence / 2))
    p = successes / trials
    denom = 1 + z**2 / trials
    center = (p + z**2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z**2 / (4 * trials**2)) / denom
    return p, half, center


def _render(table: ResultTable) -> str:
    buffer = io.StringIO()
    for key, value in table.metadata.items():
        buffer.write(f"# {key}: {value}\n")
    frame = table.to_frame()
    frame["n_trials"] = frame["n_trials"].astype("int64")
    frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


def emit_csv(table: ResultTable, path: Union[str, Path]) -> Path:
    """Writes the table as UTF-8 CSV with a header row and metadata comments."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_render(table), encoding="utf-8")
    except OSError as e:
        raise OSError(f"could not write results to {path}: {e}") from e
    logger.info(f"Wrote {len(table)} rows to {path}")
    return path


def read_csv(path: Union[str, Path]) -> ResultTable:
    """Reads a file written by :func:`emit_csv`."""
    path = Path(path)
    metadata: Dict[str, str] = {}
    with path.open(encoding="utf-8") as handle:
        for line in handle:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition(": ")
            metadata[key] = value
    frame = pd.read_csv(path, comment="#", dtype={"series": str})
    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise ValueError(f"{path}: missing columns {missing}")
    table = ResultTable(metadata=metadata)
    for record in frame.itertuples(index=False):
        table.add(record.series, record.x, record.metric, record.n_trials, record.ci_half_width)
    return table


def metadata_path(csv_path: Union[str, Path]) -> Path:
    csv_path = Path(csv_path)
    return csv_path.with_name(csv_path.name + ".meta.json")


def emit_metadata(csv_path: Union[str, Path], payload: Dict[str, Any]) -> Path:
    """Writes the run sidecar ``<csv>.meta.json``."""
    path = metadata_path(csv_path)
    try:
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
    except OSError as e:
        raise OSError(f"could not write metadata to {path}: {e}") from e
    return path
