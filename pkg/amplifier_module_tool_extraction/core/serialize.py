"""JSON and CSV encoding of results. Floats use the shortest round-trip repr."""

import csv
import io
import json
from typing import Any, Iterable

import numpy as np

SWEEP_COLUMNS = ("parameter", "value", "bstar", "probe_x", "probe_y", "V")


def _plain(obj: Any):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


def to_json(data: Any) -> str:
    return json.dumps(data, indent=2, default=_plain) + "\n"


def to_csv(rows: Iterable[dict[str, Any]], columns: Iterable[str] | None = None) -> str:
    rows = list(rows)
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if v is None else _cell(v)) for k, v in row.items()})
    return buffer.getvalue()


def _cell(value: Any) -> Any:
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return repr(value)
    return value


def samples_csv(samples) -> str:
    """One row per path: path_index,sample."""
    return to_csv(
        ({"path_index": i, "sample": float(s)} for i, s in enumerate(samples)),
        ("path_index", "sample"),
    )
