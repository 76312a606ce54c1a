"""Synthetic response surfaces: deterministic, seedable stand-ins for real jobs.

Runtime noise is drawn from a counter-based generator keyed on
(seed, trial_id, rep), so any (trial, repetition) measurement replays
bit-identically regardless of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatchError
from ..paramspace import ParamSpace, TrialPoint
from .base import Executor, JobSpec, TrialResult, STATUS_SUCCESS

FAMILY_BOWL = "bowl"
FAMILY_PLANE = "monotone_plane_basin"
FAMILY_ROSENBROCK = "rosenbrock"
FAMILY_LOOKUP = "lookup_table"

FAMILIES = (FAMILY_BOWL, FAMILY_PLANE, FAMILY_ROSENBROCK, FAMILY_LOOKUP)

# Measured times can never reach zero, noise or not.
MIN_RUNTIME_S = 0.001


@dataclass(frozen=True)
class SurfaceSpec:
    """Shape of a synthetic running-time surface over the unit cube."""

    family: str
    base_s: float
    weights: tuple[float, ...] = ()
    optimum: tuple[float, ...] = ()
    noise_sd_s: float = 0.0
    seed: int = 0
    table: tuple[tuple[tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        object.__setattr__(self, "optimum", tuple(float(o) for o in self.optimum))
        object.__setattr__(
            self,
            "table",
            tuple((tuple(float(c) for c in cell), float(t)) for cell, t in self.table),
        )
        if self.family not in FAMILIES:
            raise ValueError(f"unknown surface family {self.family!r}")
        if self.base_s <= 0:
            raise ValueError("base_s must be > 0")
        if self.noise_sd_s < 0:
            raise ValueError("noise_sd_s must be >= 0")
        if any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if any(not 0.0 <= o <= 1.0 for o in self.optimum):
            raise ValueError("optimum coordinates must lie in [0, 1]")
        if self.family == FAMILY_BOWL and len(self.weights) != len(self.optimum):
            raise ValueError("bowl surface needs matching weights and optimum lengths")
        if self.family == FAMILY_ROSENBROCK:
            for label, seq in (("weights", self.weights), ("optimum", self.optimum)):
                if seq and len(seq) != 2:
                    raise ValueError(f"rosenbrock surface is 2-dimensional; {label} has {len(seq)}")
        if self.family == FAMILY_LOOKUP and not self.table:
            raise ValueError("lookup_table surface needs a nonempty table")

    @property
    def dimension(self) -> int:
        if self.family == FAMILY_ROSENBROCK:
            return 2
        if self.family == FAMILY_LOOKUP:
            return len(self.table[0][0])
        return len(self.weights)


def _noise(surface: SurfaceSpec, trial_id: int, rep: int) -> float:
    if surface.noise_sd_s == 0.0:
        return 0.0
    # Philox is counter-based: keying on (seed) and counting by (trial, rep)
    # makes the draw a pure function of those three integers.
    bits = np.random.Philox(
        counter=[trial_id % 2**64, rep % 2**64, 0, 0],
        key=[surface.seed % 2**64, 0],
    )
    return float(np.random.Generator(bits).normal(0.0, surface.noise_sd_s))


def _clean_value(surface: SurfaceSpec, u: np.ndarray) -> float:
    if surface.family == FAMILY_BOWL:
        diffs = u - np.asarray(surface.optimum)
        return surface.base_s + float(np.dot(surface.weights, diffs * diffs))
    if surface.family == FAMILY_PLANE:
        return surface.base_s + float(np.dot(surface.weights, 1.0 - u))
    if surface.family == FAMILY_ROSENBROCK:
        u1, u2 = float(u[0]), float(u[1])
        return surface.base_s + 100.0 * (u2 - u1 * u1) ** 2 + (1.0 - u1) ** 2
    # lookup_table: nearest cell wins
    best_t, best_d = None, math.inf
    for cell, t in surface.table:
        d = float(np.sum((u - np.asarray(cell)) ** 2))
        if d < best_d:
            best_d, best_t = d, t
    return best_t


def synthetic_eval(surface: SurfaceSpec, u, trial_id: int, rep: int) -> float:
    """Simulated wall time at unit-cube point u for one repetition.

    Deterministic: the same (surface.seed, trial_id, rep) always yields the
    identical value. Results are clamped to at least MIN_RUNTIME_S.
    """
    vec = np.asarray(u, dtype=float)
    if vec.shape != (surface.dimension,):
        raise DimensionMismatchError(
            f"surface is {surface.dimension}-dimensional, got shape {vec.shape}"
        )
    t = _clean_value(surface, vec) + _noise(surface, trial_id, rep)
    return max(t, MIN_RUNTIME_S)


class SyntheticExecutor(Executor):
    """Evaluates the surface instead of running anything; ideal for tests."""

    def __init__(self, space: ParamSpace, surface: SurfaceSpec):
        if surface.dimension != space.dimension:
            raise DimensionMismatchError(
                f"surface dimension {surface.dimension} != space dimension {space.dimension}"
            )
        self._space = space
        self._surface = surface

    def execute_trial(self, job: JobSpec, point: TrialPoint, trial_id: int) -> TrialResult:
        u = self._space.encode_point(point)
        times = tuple(
            synthetic_eval(self._surface, u, trial_id, rep)
            for rep in range(1, job.repetitions + 1)
        )
        return TrialResult(status=STATUS_SUCCESS, rep_times_s=times)
