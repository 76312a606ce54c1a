"""Durable trial history: trials.csv, raw per-trial records, session manifest.

Layout under a project root:

    history/trials.csv        append-only CSV, one row per trial
    history/session.conf      key=value session manifest
    history/raw/trial_N.json  full-fidelity per-trial record (rebuild source)
    history/.lock             exclusive-session lock file

trials.csv columns: trial_id, strategy, timestamp_utc, one column per
parameter in space order, status, rep_times_s (';'-joined), aggregate_s
(decimal or the literal FAILED), map_s, shuffle_s, reduce_s.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from .errors import (
    HistoryCorruptError,
    IdGapError,
    LockHeldError,
    ManifestMissingError,
)
from .executors.base import TrialResult
from .paramspace import KIND_FLOAT, KIND_INT, ParamSpace, TrialPoint, Value

HISTORY_DIR = "history"
TRIALS_CSV = "trials.csv"
MANIFEST_FILE = "session.conf"
RAW_DIR = "raw"
LOCK_FILE = ".lock"

FAILED_LITERAL = "FAILED"
_PHASES = ("map", "shuffle", "reduce")


@dataclass(frozen=True)
class TrialRecord:
    """One executed trial: the point, its measurements, and the aggregate."""

    trial_id: int
    point: TrialPoint
    result: TrialResult
    aggregate_s: float | None  # None encodes FAILED
    strategy_id: str
    timestamp: datetime

    @property
    def search_objective(self) -> float:
        """What searchers see: the aggregate, or +inf for failed trials."""
        return self.aggregate_s if self.aggregate_s is not None else math.inf


def history_dir(project_root: str | Path) -> Path:
    return Path(project_root) / HISTORY_DIR


def _fmt(x: float) -> str:
    return repr(float(x))


def csv_header(space: ParamSpace) -> list[str]:
    return (
        ["trial_id", "strategy", "timestamp_utc"]
        + space.names()
        + ["status", "rep_times_s", "aggregate_s", "map_s", "shuffle_s", "reduce_s"]
    )


def record_to_row(record: TrialRecord, space: ParamSpace) -> list[str]:
    phases = record.result.phase_times_s or {}
    return (
        [str(record.trial_id), record.strategy_id, record.timestamp.isoformat()]
        + [space.render_value(s.name, record.point[s.name]) for s in space.specs]
        + [
            record.result.status,
            ";".join(_fmt(t) for t in record.result.rep_times_s),
            FAILED_LITERAL if record.aggregate_s is None else _fmt(record.aggregate_s),
        ]
        + [(_fmt(phases[p]) if p in phases else "") for p in _PHASES]
    )


def row_to_record(row: list[str], space: ParamSpace) -> TrialRecord:
    """Parse one CSV row; raises ValueError on any malformed field."""
    expected = 3 + space.dimension + 6
    if len(row) != expected:
        raise ValueError(f"expected {expected} fields, got {len(row)}")
    trial_id = int(row[0])
    strategy = row[1]
    timestamp = datetime.fromisoformat(row[2])
    assignment: dict[str, Value] = {}
    for i, spec in enumerate(space.specs):
        raw = row[3 + i]
        if spec.kind == KIND_INT:
            assignment[spec.name] = int(raw)
        elif spec.kind == KIND_FLOAT:
            assignment[spec.name] = float(raw)
        else:
            assignment[spec.name] = raw
    base = 3 + space.dimension
    status = row[base]
    reps_raw = row[base + 1]
    rep_times = tuple(float(t) for t in reps_raw.split(";")) if reps_raw else ()
    agg_raw = row[base + 2]
    aggregate = None if agg_raw == FAILED_LITERAL else float(agg_raw)
    phases = {}
    for j, phase in enumerate(_PHASES):
        cell = row[base + 3 + j]
        if cell:
            phases[phase] = float(cell)
    result = TrialResult(
        status=status,
        rep_times_s=rep_times,
        phase_times_s=phases or None,
    )
    return TrialRecord(
        trial_id=trial_id,
        point=TrialPoint(assignment),
        result=result,
        aggregate_s=aggregate,
        strategy_id=strategy,
        timestamp=timestamp,
    )


def _row_text(row: list[str]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(row)
    return buf.getvalue()


class HistoryWriter:
    """Appends records to trials.csv, flushing to stable storage per row."""

    def __init__(self, project_root: str | Path, space: ParamSpace):
        self._space = space
        self._dir = history_dir(project_root)
        self._dir.mkdir(parents=True, exist_ok=True)
        self._path = self._dir / TRIALS_CSV
        existing = read_trials(project_root, space) if self._path.exists() else []
        self._last_id = existing[-1].trial_id if existing else 0
        if not self._path.exists() or self._path.stat().st_size == 0:
            self._path.write_text(_row_text(csv_header(space)), encoding="utf-8")

    @property
    def last_id(self) -> int:
        return self._last_id

    def append(self, record: TrialRecord) -> None:
        if record.trial_id != self._last_id + 1:
            raise IdGapError(
                f"trial_id {record.trial_id} after {self._last_id}; ids must be contiguous"
            )
        write_raw_record(self._dir, record, self._space)
        with open(self._path, "a", encoding="utf-8", newline="") as fh:
            fh.write(_row_text(record_to_row(record, self._space)))
            fh.flush()
            os.fsync(fh.fileno())
        self._last_id = record.trial_id


def read_trials(project_root: str | Path, space: ParamSpace) -> list[TrialRecord]:
    """Parse trials.csv; tolerates a missing file (empty history).

    Raises HistoryCorruptError, naming the last valid trial_id, when the file
    is truncated mid-row or any row fails to parse.
    """
    path = history_dir(project_root) / TRIALS_CSV
    if not path.exists():
        return []
    text = path.read_text(encoding="utf-8")
    if not text:
        return []
    truncated_tail = not text.endswith("\n")
    records: list[TrialRecord] = []
    last_valid = 0
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if header != csv_header(space):
        raise HistoryCorruptError("trials.csv header does not match the space", 0)
    rows = list(reader)
    for i, row in enumerate(rows):
        is_last = i == len(rows) - 1
        try:
            record = row_to_record(row, space)
        except (ValueError, KeyError) as exc:
            if is_last and truncated_tail:
                raise HistoryCorruptError("trials.csv truncated mid-row", last_valid) from exc
            raise HistoryCorruptError(f"trials.csv row {i + 2} unreadable: {exc}", last_valid) from exc
        if is_last and truncated_tail:
            # parsed, but the line never terminated: cannot trust the tail row
            raise HistoryCorruptError("trials.csv truncated mid-row", last_valid)
        if record.trial_id != last_valid + 1:
            raise HistoryCorruptError(
                f"trial ids not contiguous at row {i + 2}", last_valid
            )
        records.append(record)
        last_valid = record.trial_id
    return records


# --- raw per-trial records ---------------------------------------------------

def write_raw_record(hist_dir: Path, record: TrialRecord, space: ParamSpace) -> None:
    raw_dir = hist_dir / RAW_DIR
    raw_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "trial_id": record.trial_id,
        "strategy": record.strategy_id,
        "timestamp_utc": record.timestamp.isoformat(),
        "point": record.point.as_dict(),
        "status": record.result.status,
        "rep_times_s": list(record.result.rep_times_s),
        "aggregate_s": record.aggregate_s,
        "phase_times_s": record.result.phase_times_s,
        "result_dir": record.result.result_dir,
        "log_ref": record.result.log_ref,
    }
    path = raw_dir / f"trial_{record.trial_id:05d}.json"
    tmp = path.with_suffix(".json.tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def read_raw_records(project_root: str | Path, space: ParamSpace) -> list[TrialRecord]:
    raw_dir = history_dir(project_root) / RAW_DIR
    if not raw_dir.is_dir():
        return []
    records = []
    for path in sorted(raw_dir.glob("trial_*.json")):
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        result = TrialResult(
            status=data["status"],
            rep_times_s=tuple(data["rep_times_s"]),
            phase_times_s=data.get("phase_times_s"),
            result_dir=data.get("result_dir"),
            log_ref=data.get("log_ref"),
        )
        records.append(
            TrialRecord(
                trial_id=data["trial_id"],
                point=TrialPoint(data["point"]),
                result=result,
                aggregate_s=data["aggregate_s"],
                strategy_id=data["strategy"],
                timestamp=datetime.fromisoformat(data["timestamp_utc"]),
            )
        )
    records.sort(key=lambda r: r.trial_id)
    return records


def rewrite_trials_csv(project_root: str | Path, space: ParamSpace,
                       records: list[TrialRecord]) -> None:
    """Rebuild trials.csv from records, deterministically."""
    hist = history_dir(project_root)
    hist.mkdir(parents=True, exist_ok=True)
    out = [_row_text(csv_header(space))]
    out.extend(_row_text(record_to_row(r, space)) for r in records)
    (hist / TRIALS_CSV).write_text("".join(out), encoding="utf-8")


# --- session manifest -------------------------------------------------------------

def write_manifest(project_root: str | Path, entries: dict[str, object]) -> None:
    hist = history_dir(project_root)
    hist.mkdir(parents=True, exist_ok=True)
    lines = [f"{key}={_manifest_value(value)}\n" for key, value in entries.items()]
    (hist / MANIFEST_FILE).write_text("".join(lines), encoding="utf-8")


def _manifest_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def read_manifest(project_root: str | Path) -> dict[str, str]:
    path = history_dir(project_root) / MANIFEST_FILE
    if not path.exists():
        raise ManifestMissingError(f"no session manifest at {path}")
    entries: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        entries[key.strip()] = value.strip()
    return entries


def manifest_exists(project_root: str | Path) -> bool:
    return (history_dir(project_root) / MANIFEST_FILE).exists()


# --- session lock -----------------------------------------------------------------

class SessionLock:
    """Exclusive per-project lock; refuses to run two sessions in one dir."""

    def __init__(self, project_root: str | Path):
        self._path = history_dir(project_root) / LOCK_FILE
        self._held = False

    def __enter__(self) -> "SessionLock":
        self._path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self._path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise LockHeldError(
                f"another session holds {self._path}; remove it if that session is dead"
            ) from None
        with os.fdopen(fd, "w") as fh:
            fh.write(str(os.getpid()))
        self._held = True
        return self

    def __exit__(self, *exc_info) -> None:
        if self._held:
            try:
                self._path.unlink()
            except FileNotFoundError:
                pass
            self._held = False
