"""Trial executors: synthetic response surfaces, local commands, remote Hadoop jobs."""

from .base import Executor, JobSpec, TrialResult
from .hadoop_logs import parse_phase_times
from .local import LocalExecutor
from .remote import ClusterEnv, RemoteExecutor, ShellResult, SshTransport, assemble_hadoop_command
from .synthetic import SurfaceSpec, SyntheticExecutor, synthetic_eval

__all__ = [
    "ClusterEnv",
    "Executor",
    "JobSpec",
    "LocalExecutor",
    "RemoteExecutor",
    "ShellResult",
    "SshTransport",
    "SurfaceSpec",
    "SyntheticExecutor",
    "TrialResult",
    "assemble_hadoop_command",
    "parse_phase_times",
    "synthetic_eval",
]
