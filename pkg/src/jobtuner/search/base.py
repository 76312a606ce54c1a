"""Propose/update state-machine contract shared by all searchers.

A searcher owns no execution: the session loop calls propose(), runs the
trial, then feeds the aggregate objective back through update(). propose()
is a pure peek (calling it twice without an update returns the same point),
which is what makes replay-from-history deterministic.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import ClassVar

import numpy as np

from ..errors import StateCorruptError
from ..paramspace import ParamSpace, TrialPoint


class Searcher(ABC):
    """Sequential proposer of trial points over one parameter space."""

    strategy_id: ClassVar[str]

    def __init__(self, space: ParamSpace):
        self._space = space

    @property
    def space(self) -> ParamSpace:
        return self._space

    @abstractmethod
    def propose(self) -> TrialPoint | None:
        """Next point to evaluate, or None once the searcher is done."""

    @abstractmethod
    def update(self, point: TrialPoint, objective: float) -> None:
        """Feed back the aggregate objective of the last proposed point."""

    @property
    @abstractmethod
    def done(self) -> bool: ...

    def _check_pending(self, point: TrialPoint, pending: TrialPoint | None) -> None:
        if pending is None:
            raise StateCorruptError(f"{self.strategy_id}: update without a pending proposal")
        if self._space.point_key(point) != self._space.point_key(pending):
            raise StateCorruptError(
                f"{self.strategy_id}: update for {point} but pending proposal is {pending}"
            )


def clamp01(u: np.ndarray) -> np.ndarray:
    return np.clip(u, 0.0, 1.0)
