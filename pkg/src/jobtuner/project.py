"""Project directories: layout, loading, validation, and template scaffolding.

A project root contains:

    params.conf        tunable parameter declarations (tuning projects)
    job.conf           what to run and how to measure it
    HadoopEnv.txt      cluster endpoint (remote projects only)
    jobs.conf          optional list of job files for batch runs
    history/           trial history, session manifest, reports
    downloaded_results/  per-trial outputs fetched from the cluster
"""

from __future__ import annotations

import shlex
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    BadValueError,
    CrossValidationError,
    DirNotEmptyError,
    MissingFileError,
    MissingKeyError,
)
from .executors.base import JobSpec
from .executors.local import PLACEHOLDER_RE
from .executors.remote import ClusterEnv
from .executors.synthetic import FAMILIES, SurfaceSpec
from .paramspace import ParamSpace, parse_param_file

PARAMS_FILE = "params.conf"
JOB_FILE = "job.conf"
ENV_FILE = "HadoopEnv.txt"
JOBS_LIST_FILE = "jobs.conf"

EXECUTOR_KINDS = ("synthetic", "local", "remote")

_ENV_KEYS = ("master", "port", "user", "key_path", "remote_workdir",
             "hadoop_home", "history_log_dir")


@dataclass(frozen=True)
class Project:
    """A loaded, cross-validated project directory."""

    root: Path
    space: ParamSpace
    job: JobSpec
    executor_kind: str
    env: ClusterEnv | None = None
    surface: SurfaceSpec | None = None
    jobs: tuple[JobSpec, ...] = ()
    tune_defaults: dict[str, str] | None = None


def parse_kv_file(text: str) -> dict[str, str]:
    """key=value lines; blank lines and '#' comments ignored; later keys win."""
    entries: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise BadValueError(line, "expected key=value")
        entries[key.strip()] = value.strip()
    return entries


def parse_env_file(text: str) -> ClusterEnv:
    """Parse HadoopEnv.txt into a ClusterEnv.

    Raises MissingKeyError for absent required keys and BadValueError when
    port is not an integer.
    """
    kv = parse_kv_file(text)
    for key in _ENV_KEYS:
        if key not in kv or not kv[key]:
            raise MissingKeyError(key, ENV_FILE)
    try:
        port = int(kv["port"])
    except ValueError:
        raise BadValueError("port", f"{kv['port']!r} is not an integer") from None
    try:
        return ClusterEnv(
            master_host=kv["master"],
            port=port,
            user=kv["user"],
            auth_key_path=kv["key_path"],
            remote_workdir=kv["remote_workdir"],
            hadoop_home=kv["hadoop_home"],
            history_log_dir=kv["history_log_dir"],
        )
    except ValueError as exc:
        raise BadValueError("port", str(exc)) from None


def _parse_bool(kv: dict[str, str], key: str, default: bool) -> bool:
    if key not in kv:
        return default
    raw = kv[key].lower()
    if raw in ("true", "1", "yes"):
        return True
    if raw in ("false", "0", "no"):
        return False
    raise BadValueError(key, f"{kv[key]!r} is not a boolean")


def _parse_float(kv: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in kv:
        if default is None:
            raise MissingKeyError(key, JOB_FILE)
        return default
    try:
        return float(kv[key])
    except ValueError:
        raise BadValueError(key, f"{kv[key]!r} is not a number") from None


def _parse_int(kv: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in kv:
        if default is None:
            raise MissingKeyError(key, JOB_FILE)
        return default
    try:
        return int(kv[key])
    except ValueError:
        raise BadValueError(key, f"{kv[key]!r} is not an integer") from None


def _parse_float_list(kv: dict[str, str], key: str) -> tuple[float, ...]:
    if key not in kv:
        raise MissingKeyError(key, JOB_FILE)
    try:
        return tuple(float(x) for x in kv[key].split(",") if x.strip() != "")
    except ValueError:
        raise BadValueError(key, f"{kv[key]!r} is not a comma-separated number list") from None


def _parse_table(raw: str) -> tuple[tuple[tuple[float, ...], float], ...]:
    # cells separated by ';', each '<u1>,<u2>,...=<seconds>'
    cells = []
    for chunk in raw.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        coords, sep, seconds = chunk.partition("=")
        if not sep:
            raise BadValueError("table", f"cell {chunk!r} lacks '='")
        cells.append(
            (tuple(float(c) for c in coords.split(",")), float(seconds))
        )
    return tuple(cells)


def parse_job_file(text: str) -> tuple[JobSpec, str, SurfaceSpec | None, dict[str, str]]:
    """Parse job.conf: returns (job, executor_kind, surface, tune defaults)."""
    kv = parse_kv_file(text)
    kind = kv.get("executor", "")
    if kind not in EXECUTOR_KINDS:
        raise BadValueError("executor", f"must be one of {', '.join(EXECUTOR_KINDS)}")

    if kind == "local":
        artifact = kv.get("command", "")
        if not artifact:
            raise MissingKeyError("command", JOB_FILE)
    elif kind == "remote":
        artifact = kv.get("jar", "")
        if not artifact:
            raise MissingKeyError("jar", JOB_FILE)
    else:
        artifact = ""

    try:
        job = JobSpec(
            artifact=artifact,
            main_entry=kv.get("main_entry") or None,
            static_args=tuple(shlex.split(kv.get("args", ""))),
            timeout_s=_parse_float(kv, "timeout_s", 3600.0),
            repetitions=_parse_int(kv, "repetitions", 1),
            cleanup_output=_parse_bool(kv, "cleanup_output", False),
        )
    except ValueError as exc:
        raise BadValueError("job", str(exc)) from None

    surface = None
    if kind == "synthetic":
        family = kv.get("family", "")
        if family not in FAMILIES:
            raise BadValueError("family", f"must be one of {', '.join(FAMILIES)}")
        try:
            surface = SurfaceSpec(
                family=family,
                base_s=_parse_float(kv, "base_s"),
                weights=_parse_float_list(kv, "weights") if "weights" in kv else (),
                optimum=_parse_float_list(kv, "optimum") if "optimum" in kv else (),
                noise_sd_s=_parse_float(kv, "noise_sd_s", 0.0),
                seed=_parse_int(kv, "surface_seed", 0),
                table=_parse_table(kv["table"]) if "table" in kv else (),
            )
        except ValueError as exc:
            raise BadValueError("surface", str(exc)) from None

    defaults = {k: kv[k] for k in ("strategy", "budget", "seed") if k in kv}
    return job, kind, surface, defaults


def load_project(root: str | Path) -> Project:
    """Load and cross-validate a project directory (read-only).

    Raises MissingFileError for absent required files, the constituent
    parsers' errors, and CrossValidationError for inter-file inconsistencies.
    """
    root = Path(root)
    if not root.is_dir():
        raise MissingFileError(str(root))

    params_path = root / PARAMS_FILE
    if not params_path.exists():
        raise MissingFileError(PARAMS_FILE)
    space = parse_param_file(params_path.read_text(encoding="utf-8"))

    job_path = root / JOB_FILE
    if not job_path.exists():
        raise MissingFileError(JOB_FILE)
    job, kind, surface, defaults = parse_job_file(job_path.read_text(encoding="utf-8"))

    env = None
    if kind == "remote":
        env_path = root / ENV_FILE
        if not env_path.exists():
            raise MissingFileError(ENV_FILE)
        env = parse_env_file(env_path.read_text(encoding="utf-8"))

    if kind == "synthetic":
        if surface is None:
            raise CrossValidationError("synthetic project lacks a surface definition")
        if surface.dimension != space.dimension:
            raise CrossValidationError(
                f"surface dimension {surface.dimension} != parameter count {space.dimension}"
            )

    if kind == "local":
        declared = set(space.names())
        unknown = sorted(set(PLACEHOLDER_RE.findall(job.artifact)) - declared)
        if unknown:
            raise CrossValidationError(
                f"{JOB_FILE} command references undeclared parameter(s): {', '.join(unknown)}"
            )

    jobs: list[JobSpec] = [job]
    jobs_list_path = root / JOBS_LIST_FILE
    if jobs_list_path.exists():
        jobs = []
        for line in jobs_list_path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            entry_path = root / line
            if not entry_path.exists():
                raise MissingFileError(line)
            entry_job, entry_kind, _, _ = parse_job_file(entry_path.read_text(encoding="utf-8"))
            if entry_kind != kind:
                raise CrossValidationError(
                    f"{line}: executor {entry_kind!r} differs from project executor {kind!r}"
                )
            jobs.append(entry_job)
        if not jobs:
            raise CrossValidationError(f"{JOBS_LIST_FILE} lists no jobs")

    return Project(
        root=root,
        space=space,
        job=job,
        executor_kind=kind,
        env=env,
        surface=surface,
        jobs=tuple(jobs),
        tune_defaults=defaults or None,
    )


# --- scaffolding ------------------------------------------------------------

_ENV_TEMPLATE = """\
# Cluster endpoint for remote job submission (public-key SSH).
master=<master-host-or-ip>
port=22
user=<ssh-user>
key_path=<path-to-private-key>
remote_workdir=/tmp/tuner_staging
hadoop_home=<remote-hadoop-home>
history_log_dir=<remote-aggregated-log-dir>
"""

_JOB_TEMPLATE = """\
# What to run for each trial.
executor=remote
jar=<path-to-job-jar>
main_entry=<MainClass>
# static arguments appended after the generated -D options, e.g. input/output paths
args=<hdfs-input> <hdfs-output>
timeout_s=3600
repetitions=1
# delete the job output between repetitions (MapReduce refuses to overwrite)
cleanup_output=true
"""

_JOB_TUNING_EXTRA = """\

# Defaults for the tune command; flags override these.
strategy=bobyqa-lite
budget=50
seed=1
"""

_PARAMS_TEMPLATE = """\
# One tunable parameter per line:
#   <name> int   min=<n> max=<n> step=<n> [default=<n>] [unit=<str>]
#   <name> float min=<n> max=<n> step=<n> [default=<n>] [unit=<str>]
#   <name> cat   values=<v1>,<v2>,... [default=<v>]
mapreduce.reduce.tasks int min=1 max=16 step=1 default=1
mapreduce.task.io.sort.mb int min=64 max=512 step=64 default=64 unit=MB
"""

_JOBS_LIST_TEMPLATE = """\
# Job files to run in order, one per line.
job.conf
"""


def scaffold(kind: str, target: str | Path) -> None:
    """Write a commented template tree for a task, project, or tuning run.

    The directory must be absent or empty; filled-in templates load cleanly
    through load_project.
    """
    if kind not in ("task", "project", "tuning"):
        raise ValueError(f"unknown scaffold kind {kind!r}; use task, project or tuning")
    target = Path(target)
    if target.exists() and any(target.iterdir()):
        raise DirNotEmptyError(f"{target} is not empty; refusing to scaffold")
    target.mkdir(parents=True, exist_ok=True)

    job_text = _JOB_TEMPLATE
    if kind == "tuning":
        job_text += _JOB_TUNING_EXTRA
    (target / JOB_FILE).write_text(job_text, encoding="utf-8")
    (target / ENV_FILE).write_text(_ENV_TEMPLATE, encoding="utf-8")
    # every kind gets a parameter file: task/project runs use only defaults,
    # but the declarations make the job's -D options explicit
    (target / PARAMS_FILE).write_text(_PARAMS_TEMPLATE, encoding="utf-8")
    if kind in ("project", "tuning"):
        (target / JOBS_LIST_FILE).write_text(_JOBS_LIST_TEMPLATE, encoding="utf-8")
