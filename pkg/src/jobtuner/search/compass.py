"""Compass (pattern) search on the encoded unit cube.

Polls the 2d axis neighbours of the incumbent at the current step size;
moves on strict improvement, halves the step otherwise, and stops once the
step drops below min_step. The incumbent's encoded coordinate is kept
continuous; snapping happens only when a poll is decoded for execution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..paramspace import ParamSpace, TrialPoint
from .base import Searcher, clamp01


@dataclass(frozen=True)
class CompassOptions:
    initial_step: float = 0.25
    min_step: float = 1.0 / 256.0
    expand_on_success: bool = False

    def __post_init__(self):
        if not 0.0 < self.initial_step <= 1.0:
            raise ValueError("initial_step must be in (0, 1]")
        if self.min_step <= 0 or self.min_step > self.initial_step:
            raise ValueError("min_step must satisfy 0 < min_step <= initial_step")


class CompassSearcher(Searcher):
    strategy_id: ClassVar[str] = "compass"

    def __init__(self, space: ParamSpace, options: CompassOptions | None = None):
        super().__init__(space)
        self._opts = options or CompassOptions()
        self._step = self._opts.initial_step
        self._incumbent_u = space.encode_point(space.default_point())
        self._incumbent_f: float | None = None
        self._polls: list[tuple[np.ndarray, TrialPoint]] = []
        self._poll_values: list[float] = []
        self._idx = 0
        self._done = False
        # the incumbent itself is evaluated first; polling starts afterwards
        self._seeding = True

    # -- poll construction ---------------------------------------------------

    def _build_polls(self) -> list[tuple[np.ndarray, TrialPoint]]:
        incumbent_key = self._space.point_key(self._space.decode_vector(self._incumbent_u))
        polls: list[tuple[np.ndarray, TrialPoint]] = []
        seen = {incumbent_key}
        for i in range(self._space.dimension):
            for sign in (+1.0, -1.0):
                u = self._incumbent_u.copy()
                u[i] += sign * self._step
                u = clamp01(u)
                point = self._space.decode_vector(u)
                key = self._space.point_key(point)
                if key in seen:
                    continue  # snapped onto the incumbent or an earlier poll
                seen.add(key)
                polls.append((u, point))
        return polls

    def _begin_iteration(self) -> None:
        """Build a poll set at the current step; empty sets count as failures."""
        while self._step >= self._opts.min_step:
            polls = self._build_polls()
            if polls:
                self._polls = polls
                self._poll_values = []
                self._idx = 0
                return
            self._step /= 2.0
        self._done = True

    def _finish_iteration(self) -> None:
        best_idx = int(np.argmin(self._poll_values))
        best_f = self._poll_values[best_idx]
        if best_f < self._incumbent_f:  # strict improvement; ties keep the incumbent
            self._incumbent_u = self._polls[best_idx][0]
            self._incumbent_f = best_f
            if self._opts.expand_on_success:
                self._step = min(self._step * 2.0, 1.0)
        else:
            self._step /= 2.0
        self._begin_iteration()

    # -- searcher contract ------------------------------------------------------

    def propose(self) -> TrialPoint | None:
        if self._done:
            return None
        if self._seeding:
            return self._space.decode_vector(self._incumbent_u)
        return self._polls[self._idx][1]

    def update(self, point: TrialPoint, objective: float) -> None:
        self._check_pending(point, self.propose())
        if self._seeding:
            self._incumbent_f = objective
            self._seeding = False
            self._begin_iteration()
            return
        self._poll_values.append(objective)
        self._idx += 1
        if self._idx == len(self._polls):
            self._finish_iteration()

    @property
    def done(self) -> bool:
        return self._done

    @property
    def step(self) -> float:
        return self._step

    @property
    def incumbent(self) -> tuple[np.ndarray, float | None]:
        return self._incumbent_u.copy(), self._incumbent_f
