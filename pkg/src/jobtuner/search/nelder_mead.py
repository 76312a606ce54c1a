"""Nelder-Mead simplex search, bound-constrained by clamping to the unit cube.

Runs the classic reflect/expand/contract/shrink cycle as a sequential
propose/update machine. Every candidate is clamped to [0, 1]^d before it is
decoded; decoded duplicates of existing vertices are evaluated anyway, since
objectives may be noisy.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import StateCorruptError
from ..paramspace import ParamSpace, TrialPoint
from .base import Searcher, clamp01


@dataclass(frozen=True)
class NelderMeadOptions:
    alpha: float = 1.0   # reflection
    gamma: float = 2.0   # expansion
    beta: float = 0.5    # contraction
    sigma: float = 0.5   # shrink
    init_offset: float = 0.1
    spread_tol: float = 1e-3

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be > 0")
        if self.gamma <= 1:
            raise ValueError("gamma must be > 1")
        if not 0 < self.beta < 1:
            raise ValueError("beta must be in (0, 1)")
        if not 0 < self.sigma < 1:
            raise ValueError("sigma must be in (0, 1)")


def initial_simplex(space: ParamSpace, offset: float) -> list[np.ndarray]:
    """Defaults vertex plus one offset vertex per axis, clamped to the cube.

    When clamping collapses an offset vertex onto the base point (default on
    the upper bound), the offset flips sign so the simplex keeps full rank.
    """
    u0 = space.encode_point(space.default_point())
    vertices = [u0]
    for i in range(space.dimension):
        v = u0.copy()
        v[i] += offset
        v = clamp01(v)
        if np.allclose(v, u0):
            v = u0.copy()
            v[i] -= offset
            v = clamp01(v)
        vertices.append(v)
    return vertices


class NelderMeadSearcher(Searcher):
    strategy_id: ClassVar[str] = "nelder-mead"

    def __init__(self, space: ParamSpace, options: NelderMeadOptions | None = None):
        super().__init__(space)
        self._opts = options or NelderMeadOptions()
        self._seeds = initial_simplex(space, self._opts.init_offset)
        self._vertices: list[tuple[np.ndarray, float]] = []
        self._phase = "seed"
        self._pending_u: np.ndarray | None = None
        self._done = False
        # iteration scratch
        self._centroid: np.ndarray | None = None
        self._worst: tuple[np.ndarray, float] | None = None
        self._reflected: tuple[np.ndarray, float] | None = None
        self._shrink_queue: list[int] = []
        self._shrink_new: list[tuple[int, np.ndarray, float]] = []

    # -- iteration control ------------------------------------------------------

    def _max_spread(self) -> float:
        pts = [u for u, _ in self._vertices]
        return max(
            float(np.linalg.norm(a - b)) for i, a in enumerate(pts) for b in pts[i + 1:]
        )

    def _start_iteration(self) -> None:
        if self._max_spread() < self._opts.spread_tol:
            self._done = True
            self._phase = "done"
            return
        self._vertices.sort(key=lambda vf: vf[1])
        pts = [u for u, _ in self._vertices]
        self._worst = self._vertices[-1]
        self._centroid = np.mean(pts[:-1], axis=0)
        self._pending_u = clamp01(
            self._centroid + self._opts.alpha * (self._centroid - self._worst[0])
        )
        self._phase = "reflect"

    def _replace_worst(self, u: np.ndarray, f: float) -> None:
        self._vertices[-1] = (u, f)
        self._start_iteration()

    # -- searcher contract ---------------------------------------------------------

    def propose(self) -> TrialPoint | None:
        if self._done:
            return None
        if self._phase == "seed":
            return self._space.decode_vector(self._seeds[len(self._vertices)])
        return self._space.decode_vector(self._pending_u)

    def update(self, point: TrialPoint, objective: float) -> None:
        self._check_pending(point, self.propose())
        if self._phase == "seed":
            self._vertices.append((self._seeds[len(self._vertices)], objective))
            if len(self._vertices) == len(self._seeds):
                self._start_iteration()
            return

        u, f = self._pending_u, objective
        if self._phase == "reflect":
            f_best = self._vertices[0][1]
            f_second_worst = self._vertices[-2][1]
            if f < f_best:
                self._reflected = (u, f)
                self._pending_u = clamp01(self._centroid + self._opts.gamma * (u - self._centroid))
                self._phase = "expand"
            elif f < f_second_worst:
                self._replace_worst(u, f)
            else:
                self._reflected = (u, f)
                self._pending_u = clamp01(
                    self._centroid + self._opts.beta * (self._worst[0] - self._centroid)
                )
                self._phase = "contract"
        elif self._phase == "expand":
            if f < self._reflected[1]:
                self._replace_worst(u, f)
            else:
                self._replace_worst(*self._reflected)
        elif self._phase == "contract":
            # accept only if the contraction beats both the worst vertex and
            # the rejected reflection; otherwise shrink toward the best
            if f < min(self._reflected[1], self._worst[1]):
                self._replace_worst(u, f)
            else:
                self._begin_shrink()
        elif self._phase == "shrink":
            idx = self._shrink_queue[len(self._shrink_new)]
            self._shrink_new.append((idx, u, f))
            if len(self._shrink_new) == len(self._shrink_queue):
                for idx, su, sf in self._shrink_new:
                    self._vertices[idx] = (su, sf)
                self._start_iteration()
            else:
                self._queue_next_shrink()
        else:
            raise StateCorruptError(f"nelder-mead: update in phase {self._phase!r}")

    def _begin_shrink(self) -> None:
        self._shrink_queue = list(range(1, len(self._vertices)))
        self._shrink_new = []
        self._phase = "shrink"
        self._queue_next_shrink()

    def _queue_next_shrink(self) -> None:
        best_u = self._vertices[0][0]
        idx = self._shrink_queue[len(self._shrink_new)]
        target = self._vertices[idx][0]
        self._pending_u = clamp01(best_u + self._opts.sigma * (target - best_u))

    @property
    def done(self) -> bool:
        return self._done

    @property
    def vertices(self) -> list[tuple[np.ndarray, float]]:
        return [(u.copy(), f) for u, f in self._vertices]
