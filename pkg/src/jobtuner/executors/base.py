"""Executor contract shared by the synthetic, local and remote backends."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

from ..paramspace import TrialPoint

STATUS_SUCCESS = "success"
STATUS_FAILED = "failed"
STATUS_TIMEOUT = "timeout"


@dataclass(frozen=True)
class JobSpec:
    """What to run for one trial and how often to measure it.

    artifact is either a path to an executable job archive (remote) or a
    command template string with {parameter} placeholders (local); the
    synthetic executor ignores it.
    """

    artifact: str = ""
    main_entry: str | None = None
    static_args: tuple[str, ...] = ()
    timeout_s: float = 3600.0
    repetitions: int = 1
    cleanup_output: bool = False

    def __post_init__(self):
        if self.timeout_s <= 0:
            raise ValueError(f"timeout_s must be > 0, got {self.timeout_s}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        object.__setattr__(self, "static_args", tuple(self.static_args))


@dataclass(frozen=True)
class TrialResult:
    """Measured outcome of one trial (all repetitions of one point)."""

    status: str
    rep_times_s: tuple[float, ...] = ()
    phase_times_s: dict[str, float] | None = None
    result_dir: str | None = None
    log_ref: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rep_times_s", tuple(self.rep_times_s))
        if self.status not in (STATUS_SUCCESS, STATUS_FAILED, STATUS_TIMEOUT):
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == STATUS_SUCCESS and any(t <= 0 for t in self.rep_times_s):
            raise ValueError("successful trials must have positive repetition times")

    @property
    def ok(self) -> bool:
        return self.status == STATUS_SUCCESS


class Executor(ABC):
    """Runs one trial at a time; distinct instances may run concurrently."""

    @abstractmethod
    def execute_trial(self, job: JobSpec, point: TrialPoint, trial_id: int) -> TrialResult:
        """Measure job at point; rep_times_s has exactly job.repetitions entries on success."""
