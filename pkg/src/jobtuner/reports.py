"""CSV reports over trial history: convergence curves and 2-parameter surfaces.

Reports are pure functions of the recorded history; regenerating them from
the same trials.csv is byte-identical. Plotting is left to external tools.
"""

from __future__ import annotations

import csv
import io
import statistics
from pathlib import Path

from .errors import EmptyHistoryError, IdenticalAxesError, UnknownParamError
from .history import TrialRecord, history_dir
from .paramspace import ParamSpace

CONVERGENCE_CSV = "convergence.csv"
CONVERGENCE_HEADER = ["iteration", "aggregate_s", "best_so_far_s"]


def _fmt(x: float) -> str:
    return repr(float(x))


def convergence_series(records: list[TrialRecord]) -> list[tuple[int, float | None, float | None]]:
    """(iteration, aggregate, running best) per trial, in id order.

    Failed trials carry an empty aggregate and repeat the previous best
    (None until the first success).
    """
    if not records:
        raise EmptyHistoryError("no trials to report")
    rows = []
    best: float | None = None
    for r in sorted(records, key=lambda r: r.trial_id):
        if r.aggregate_s is not None:
            best = r.aggregate_s if best is None else min(best, r.aggregate_s)
        rows.append((r.trial_id, r.aggregate_s, best))
    return rows


def write_convergence(project_root: str | Path, records: list[TrialRecord]) -> Path:
    """Write history/convergence.csv; empty history yields a header-only file."""
    path = history_dir(project_root) / CONVERGENCE_CSV
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGENCE_HEADER)
    if records:
        for iteration, agg, best in convergence_series(records):
            writer.writerow([
                str(iteration),
                "" if agg is None else _fmt(agg),
                "" if best is None else _fmt(best),
            ])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def _sort_key(value):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (0, float(value), "")
    return (1, 0.0, str(value))


def surface_table(
    records: list[TrialRecord], px: str, py: str, space: ParamSpace
) -> list[tuple[object, object, float, int]]:
    """(px value, py value, median aggregate, trial count) per observed cell.

    Only successful trials contribute; other parameters are ignored when
    grouping. Rows are sorted by px then py.
    """
    declared = set(space.names())
    for name in (px, py):
        if name not in declared:
            raise UnknownParamError(f"parameter {name!r} is not declared in the space")
    if px == py:
        raise IdenticalAxesError("surface axes must be two distinct parameters")
    cells: dict[tuple, list[float]] = {}
    for r in records:
        if r.aggregate_s is None:
            continue
        cells.setdefault((r.point[px], r.point[py]), []).append(r.aggregate_s)
    rows = [
        (vx, vy, float(statistics.median(aggs)), len(aggs))
        for (vx, vy), aggs in cells.items()
    ]
    rows.sort(key=lambda row: (_sort_key(row[0]), _sort_key(row[1])))
    return rows


def surface_csv_name(px: str, py: str) -> str:
    return f"surface_{px}_{py}.csv"


def write_surface(
    project_root: str | Path, records: list[TrialRecord], px: str, py: str,
    space: ParamSpace,
) -> Path:
    """Write history/surface_<px>_<py>.csv for the observed (px, py) cells."""
    rows = surface_table(records, px, py, space)
    path = history_dir(project_root) / surface_csv_name(px, py)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([px, py, "median_s", "n"])
    for vx, vy, median_s, n in rows:
        writer.writerow([
            space.render_value(px, vx),
            space.render_value(py, vy),
            _fmt(median_s),
            str(n),
        ])
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path
