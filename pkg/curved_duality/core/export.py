"""
Machine-readable output: JSON documents and CSV tables.
"""
import csv
import dataclasses
import io
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from curved_duality.core.dynamics import Trajectory
from curved_duality.core.errors import CurvedDualityError

SCHEMA_VERSION = 1
TRAJECTORY_COLUMNS = ["t", "re_z", "im_z", "re_pi", "im_pi"]


def to_jsonable(value: Any) -> Any:
    """
    Convert numbers, arrays, dataclasses and enums to JSON types.

    Complex numbers become {"re": ..., "im": ...}; non-finite floats
    become null.
    """
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {
            f.name: to_jsonable(getattr(value, f.name))
            for f in dataclasses.fields(value)
        }
    if isinstance(value, Enum):
        return to_jsonable(value.value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": to_jsonable(value.real), "im": to_jsonable(value.imag)}
    if isinstance(value, (float, np.floating)):
        return float(value) if np.isfinite(value) else None
    return value


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
    else:
        out.write_text(text, encoding="utf-8")


def write_json(command: str, payload: Dict[str, Any], out: Optional[Path]) -> None:
    """
    Write a JSON document with sorted keys and the schema version.

    :param command: The command that produced the payload.
    :param payload: The results.
    :param out: The file, or None for stdout.
    """
    document = dict(to_jsonable(payload))
    document["command"] = command
    document["curved_duality_schema"] = SCHEMA_VERSION
    _emit(json.dumps(document, sort_keys=True, indent=2) + "\n", out)


def write_csv(
    header: Sequence[str], rows: Sequence[Sequence[Any]], out: Optional[Path]
) -> None:
    """
    Write a CSV table with a header row.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                repr(float(cell)) if isinstance(cell, (float, np.floating)) else cell
                for cell in row
            ]
        )
    _emit(buffer.getvalue(), out)


def trajectory_table(traj: Trajectory) -> Tuple[List[str], List[List[float]]]:
    """
    Return the CSV header and rows of a trajectory.

    The columns are t, Re z, Im z, Re π, Im π, then the logs in name
    order; a complex log takes two columns re_<name> and im_<name>.
    """
    header = list(TRAJECTORY_COLUMNS)
    columns = [
        traj.times,
        traj.states[:, 0],
        traj.states[:, 1],
        0.5 * traj.states[:, 2],
        -0.5 * traj.states[:, 3],
    ]
    real = traj.real_logs()
    for name in sorted(traj.logs):
        values = traj.logs[name]
        if real[name]:
            header.append(name)
            columns.append(values.real)
        else:
            header.extend([f"re_{name}", f"im_{name}"])
            columns.extend([values.real, values.imag])
    rows = np.column_stack(columns).tolist() if len(traj) else []
    return header, rows


def read_trajectory_csv(path: Path) -> Trajectory:
    """
    Read a trajectory written by trajectory_table; the logs are dropped.

    :raise CurvedDualityError: If the columns are missing.
    """
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None or not set(TRAJECTORY_COLUMNS) <= set(
            reader.fieldnames
        ):
            raise CurvedDualityError(
                f"{path} lacks the columns {', '.join(TRAJECTORY_COLUMNS)}."
            )
        rows = [[float(row[c]) for c in TRAJECTORY_COLUMNS] for row in reader]
    data = np.asarray(rows, dtype=float).reshape(-1, 5)
    states = np.column_stack(
        [data[:, 1], data[:, 2], 2.0 * data[:, 3], -2.0 * data[:, 4]]
    )
    return Trajectory(data[:, 0], states, {})
