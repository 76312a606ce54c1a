"""Quadratic-model trust-region search ("bobyqa-lite").

Maintains 2d+1 interpolation points and a diagonal quadratic surrogate
q(u) = c + g.(u - u0) + 1/2 sum_i h_i (u_i - u0_i)^2 fitted by least squares
(exact when the system is square and nonsingular). Each iteration minimizes
q over the trust box intersected with the unit cube, evaluates the
minimizer, and adjusts the radius from the achieved-vs-predicted decrease.
A deliberately simplified relative of BOBYQA: diagonal curvature only, no
minimum-norm Hessian updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from ..errors import StateCorruptError
from ..paramspace import ParamSpace, TrialPoint
from .base import Searcher, clamp01

MAX_RADIUS = 0.5
_NULL_STEP = 1e-12
_SWEEP_TOL = 1e-9
_MAX_SWEEPS = 100


@dataclass(frozen=True)
class TrustRegionOptions:
    initial_radius: float = 0.25
    rho_min: float = 1e-3

    def __post_init__(self):
        if not 0 < self.initial_radius <= MAX_RADIUS:
            raise ValueError(f"initial_radius must be in (0, {MAX_RADIUS}]")
        if not 0 < self.rho_min <= self.initial_radius:
            raise ValueError("rho_min must satisfy 0 < rho_min <= initial_radius")


def fit_diagonal_quadratic(
    points: np.ndarray, values: np.ndarray, center: np.ndarray
) -> tuple[float, np.ndarray, np.ndarray] | None:
    """Least-squares fit of (c, g, h) around center; None when rank-deficient."""
    t = points - center
    m, d = t.shape
    design = np.hstack([np.ones((m, 1)), t, 0.5 * t * t])
    if np.linalg.matrix_rank(design) < 2 * d + 1:
        return None
    coef, *_ = np.linalg.lstsq(design, values, rcond=None)
    return float(coef[0]), coef[1 : d + 1].copy(), coef[d + 1 :].copy()


def quadratic_value(
    c: float, g: np.ndarray, h: np.ndarray, center: np.ndarray, u: np.ndarray
) -> float:
    t = u - center
    return c + float(g @ t) + 0.5 * float(h @ (t * t))


def _coordinate_min(gi: float, hi: float, lo: float, hi_bound: float) -> float:
    """argmin of gi*t + 0.5*hi*t^2 over [lo, hi_bound] (closed form)."""
    if hi > 0.0:
        return min(max(-gi / hi, lo), hi_bound)
    if hi == 0.0:
        if gi > 0.0:
            return lo
        if gi < 0.0:
            return hi_bound
        return 0.0
    # concave: an endpoint wins; ties go low for determinism
    v_lo = gi * lo + 0.5 * hi * lo * lo
    v_hi = gi * hi_bound + 0.5 * hi * hi_bound * hi_bound
    return lo if v_lo <= v_hi else hi_bound


def minimize_quadratic_in_box(
    c: float, g: np.ndarray, h: np.ndarray, center: np.ndarray, radius: float
) -> np.ndarray:
    """Minimize the diagonal model over [center-radius, center+radius] ∩ [0,1]^d.

    Cyclic exact coordinate minimization; for a diagonal model one sweep is
    already optimal, the loop just confirms convergence.
    """
    lo = np.maximum(center - radius, 0.0) - center
    hi = np.minimum(center + radius, 1.0) - center
    t = np.zeros_like(center)
    for _ in range(_MAX_SWEEPS):
        biggest_move = 0.0
        for i in range(center.size):
            new_ti = _coordinate_min(float(g[i]), float(h[i]), float(lo[i]), float(hi[i]))
            biggest_move = max(biggest_move, abs(new_ti - t[i]))
            t[i] = new_ti
        if biggest_move < _SWEEP_TOL:
            break
    return center + t


class TrustRegionSearcher(Searcher):
    strategy_id: ClassVar[str] = "bobyqa-lite"

    def __init__(self, space: ParamSpace, options: TrustRegionOptions | None = None):
        super().__init__(space)
        self._opts = options or TrustRegionOptions()
        self._radius = self._opts.initial_radius
        self._seeds = self._build_seeds()
        self._points: list[np.ndarray] = []
        self._values: list[float] = []
        self._center_idx = 0
        self._phase = "seed"
        self._pending_u: np.ndarray | None = None
        self._pending_pred: float | None = None  # q(u0) - q(u+), > 0 for real steps
        self._pending_on_boundary = False
        self._axis_cycle = 0
        self._done = False

    # -- initialization ----------------------------------------------------------

    def _build_seeds(self) -> list[np.ndarray]:
        """Center plus ± radius along each axis; clamping collisions are
        perturbed inward by half the radius so all 2d+1 seeds stay distinct."""
        u0 = clamp01(self._space.encode_point(self._space.default_point()))
        seeds = [u0]
        for i in range(self._space.dimension):
            for sign in (+1.0, -1.0):
                v = u0.copy()
                v[i] += sign * self._radius
                v = clamp01(v)
                if any(np.array_equal(v, s) for s in seeds):
                    v = u0.copy()
                    v[i] -= sign * self._radius / 2.0
                    v = clamp01(v)
                seeds.append(v)
        return seeds

    # -- interpolation-set bookkeeping ---------------------------------------------

    def _center(self) -> np.ndarray:
        return self._points[self._center_idx]

    def _center_value(self) -> float:
        return self._values[self._center_idx]

    def _capped_values(self) -> np.ndarray:
        """Values for the fit; failures (inf) become a finite worst-case cap."""
        vals = np.array(self._values, dtype=float)
        finite = vals[np.isfinite(vals)]
        if finite.size == 0:
            return np.ones_like(vals)
        spread = float(finite.max() - finite.min())
        cap = float(finite.max()) + 10.0 * max(spread, 1.0)
        vals[~np.isfinite(vals)] = cap
        return vals

    def _insert_replacing_farthest(
        self, u: np.ndarray, value: float, reference: np.ndarray, protect_center: bool
    ) -> None:
        center_val = self._center_value()
        distances = [float(np.linalg.norm(p - reference)) for p in self._points]
        if protect_center:
            distances[self._center_idx] = -1.0
        victim = int(np.argmax(distances))
        self._points[victim] = u
        self._values[victim] = value
        if value < center_val:
            self._center_idx = victim

    def _insert_replacing_worst(self, u: np.ndarray, value: float) -> None:
        center_val = self._center_value()
        scores = list(self._values)
        scores[self._center_idx] = -np.inf  # the center is the best; never evict it
        victim = int(np.argmax(scores))
        self._points[victim] = u
        self._values[victim] = value
        if value < center_val:
            self._center_idx = victim

    def _axis_sample(self) -> np.ndarray:
        """Fresh geometry point at center ± radius along a cycling axis."""
        d = self._space.dimension
        for _ in range(2 * d):
            j = self._axis_cycle % d
            sign = +1.0 if (self._axis_cycle // d) % 2 == 0 else -1.0
            self._axis_cycle += 1
            v = self._center().copy()
            v[j] += sign * self._radius
            v = clamp01(v)
            if not np.array_equal(v, self._center()):
                return v
            v = self._center().copy()
            v[j] -= sign * self._radius
            v = clamp01(v)
            if not np.array_equal(v, self._center()):
                return v
        return clamp01(self._center() + self._radius / 2.0)

    def _shrink(self) -> bool:
        """Halve the radius; returns False once the searcher is finished.

        Finishes instead of storing a radius below rho_min, so the radius
        stays within [rho_min, MAX_RADIUS] at all times after initialization.
        """
        if self._radius / 2.0 < self._opts.rho_min:
            self._done = True
            self._phase = "done"
            return False
        self._radius /= 2.0
        return True

    def _advance(self) -> None:
        """Compute the next proposal: fit, minimize, or fall back to geometry."""
        while True:
            fit = fit_diagonal_quadratic(
                np.array(self._points), self._capped_values(), self._center()
            )
            if fit is None:
                self._pending_u = self._axis_sample()
                self._phase = "geometry"
                return
            c, g, h = fit
            u_plus = minimize_quadratic_in_box(c, g, h, self._center(), self._radius)
            step = u_plus - self._center()
            if float(np.max(np.abs(step))) < _NULL_STEP:
                # model sees no improvement inside the box: trust it less
                if not self._shrink():
                    return
                continue
            self._pending_u = u_plus
            self._pending_pred = c - quadratic_value(c, g, h, self._center(), u_plus)
            self._pending_on_boundary = (
                float(np.max(np.abs(step))) >= self._radius * (1.0 - 1e-9)
            )
            self._phase = "step"
            return

    # -- searcher contract ---------------------------------------------------------

    def propose(self) -> TrialPoint | None:
        if self._done:
            return None
        if self._phase == "seed":
            return self._space.decode_vector(self._seeds[len(self._points)])
        if self._pending_u is None:
            raise StateCorruptError("trust-region: no pending proposal")
        return self._space.decode_vector(self._pending_u)

    def update(self, point: TrialPoint, objective: float) -> None:
        self._check_pending(point, self.propose())
        if self._phase == "seed":
            self._points.append(self._seeds[len(self._points)])
            self._values.append(objective)
            if len(self._points) == len(self._seeds):
                self._center_idx = int(np.argmin(self._values))
                self._advance()
            return

        if self._phase == "geometry":
            u = self._pending_u
            self._pending_u = None
            self._insert_replacing_worst(u, objective)
            self._advance()
            return

        if self._phase != "step":
            raise StateCorruptError(f"trust-region: update in phase {self._phase!r}")

        u_plus = self._pending_u
        predicted = self._pending_pred
        on_boundary = self._pending_on_boundary
        self._pending_u = None
        self._pending_pred = None

        f0 = self._center_value()
        if predicted is None or predicted <= 0.0 or not np.isfinite(objective):
            rho = -1.0
        else:
            rho = (f0 - objective) / predicted

        if rho > 0.0:
            # accepted: u+ is the new center; evict the point farthest from it
            self._insert_replacing_farthest(u_plus, objective, u_plus, protect_center=False)
        else:
            self._insert_replacing_farthest(
                u_plus, objective, self._center(), protect_center=True
            )

        if rho < 0.25:
            if not self._shrink():
                return
        elif rho > 0.75 and on_boundary:
            self._radius = min(2.0 * self._radius, MAX_RADIUS)
        self._advance()

    @property
    def done(self) -> bool:
        return self._done

    @property
    def radius(self) -> float:
        return self._radius

    @property
    def center(self) -> tuple[np.ndarray, float]:
        return self._center().copy(), self._center_value()
