"""Self-tuning harness for batch-job configuration parameters.

Searches a typed parameter space for the configuration with minimum
measured running time, using exhaustive grid search, compass search,
Nelder-Mead, or a quadratic-model trust-region method, with durable trial
history and deterministic resume.
"""

from .errors import TunerError
from .executors import (
    ClusterEnv,
    JobSpec,
    LocalExecutor,
    RemoteExecutor,
    SurfaceSpec,
    SyntheticExecutor,
    TrialResult,
)
from .history import TrialRecord
from .paramspace import ParamSpace, ParamSpec, TrialPoint, parse_param_file
from .project import Project, load_project, scaffold
from .session import (
    SessionSummary,
    aggregate_history,
    best_of,
    resume_session,
    run_tuning,
)

__version__ = "0.1.0"

__all__ = [
    "ClusterEnv",
    "JobSpec",
    "LocalExecutor",
    "ParamSpace",
    "ParamSpec",
    "Project",
    "RemoteExecutor",
    "SessionSummary",
    "SurfaceSpec",
    "SyntheticExecutor",
    "TrialPoint",
    "TrialRecord",
    "TrialResult",
    "TunerError",
    "aggregate_history",
    "best_of",
    "load_project",
    "parse_param_file",
    "resume_session",
    "run_tuning",
    "scaffold",
]
