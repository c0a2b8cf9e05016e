"""Minmax choice of the twisting parameter.

The worst-case likelihood weight over the exceedance region is governed
by the minimum of the summed cumulative hazards subject to the
coordinates adding up to the threshold.  Solving that constrained
minimization gives the objective value A, from which the minmax-optimal
twisting amount is theta* = 1 - N/A (clamped at 0 when A <= N) and the
second-moment upper bound (1-theta)^(-2N) exp(-2 theta A).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import Lognormal, Weibull, db_to_linear
from .errors import DomainError, ParameterError

_DESCENT_TOL = 1e-10
_MAX_ITER = 500


@dataclass(frozen=True)
class SumProblem:
    """N independent components plus the exceedance threshold."""

    components: tuple
    gamma: float
    gamma_db: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if len(self.components) < 1:
            raise ParameterError("need at least one component")
        if not (self.gamma > 0.0 and np.isfinite(self.gamma)):
            raise ParameterError(f"gamma must be positive, got {self.gamma}")
        if self.gamma_db is not None:
            expect = float(db_to_linear(self.gamma_db))
            if abs(self.gamma - expect) > 1e-12 * expect:
                raise ParameterError(
                    f"gamma={self.gamma} inconsistent with gamma_db={self.gamma_db}")

    @classmethod
    def from_db(cls, components, gamma_db: float) -> "SumProblem":
        return cls(tuple(components), float(db_to_linear(gamma_db)), float(gamma_db))

    @property
    def n(self) -> int:
        return len(self.components)

    def hazard_sum(self, x) -> np.ndarray:
        """Sum of component cumulative hazards at coordinate vector(s) x."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        total = np.zeros(x.shape[0])
        for i, comp in enumerate(self.components):
            total += comp.hazard_function(x[:, i])
        return total


@dataclass(frozen=True)
class MinmaxSolution:
    x_star: np.ndarray
    objective: float
    dominant_index: int
    theta_star: float
    second_moment_bound: float
    clamped: bool
    n: int
    gamma: float

    def to_dict(self) -> dict:
        return {
            "x_star": [float(v) for v in self.x_star],
            "objective": self.objective,
            "dominant_index": self.dominant_index,
            "theta_star": self.theta_star,
            "second_moment_bound": self.second_moment_bound,
            "clamped": self.clamped,
            "n": self.n,
            "gamma": self.gamma,
        }


def theta_star(objective: float, n: int) -> float:
    """Minmax-optimal twisting amount, clamped to 0 for small objectives."""
    if objective < 0.0:
        raise DomainError(f"objective must be nonnegative, got {objective}")
    if n < 1:
        raise DomainError("n must be >= 1")
    if objective <= n:
        return 0.0
    return 1.0 - n / objective


def second_moment_bound(theta: float, objective: float, n: int) -> float:
    """Upper bound on the second moment of the weighted indicator."""
    if not (0.0 <= theta < 1.0):
        raise DomainError(f"theta must lie in [0, 1), got {theta}")
    return (1.0 - theta) ** (-2 * n) * np.exp(-2.0 * theta * objective)


def iid_theta_reference(hazard_at_gamma: float, n: int) -> float:
    """Single-hazard reference twisting amount for the iid comparison.

    Unclamped on purpose: this is a diagnostic, not a sampling input.
    """
    if hazard_at_gamma <= 0.0:
        raise DomainError("hazard_at_gamma must be positive")
    return 1.0 - n / hazard_at_gamma


def dominant_index(problem: SumProblem) -> int:
    """Index of the component whose tail dominates the sum for large gamma.

    Closed rules for homogeneous lists: smallest shape for Weibull (ties
    broken by largest scale), largest sigma for Log-normal (ties broken
    by largest mu).  Mixed lists fall back to the smallest cumulative
    hazard at the threshold.
    """
    comps = problem.components
    if all(isinstance(c, Weibull) for c in comps):
        return min(range(len(comps)),
                   key=lambda i: (comps[i].shape, -comps[i].scale))
    if all(isinstance(c, Lognormal) for c in comps):
        return min(range(len(comps)),
                   key=lambda i: (-comps[i].sigma, -comps[i].mu))
    hazards = [float(c.hazard_function(problem.gamma)) for c in comps]
    return int(np.argmin(hazards))


# ---------------------------------------------------------------------------
# constrained minimization over the scaled simplex
# ---------------------------------------------------------------------------

def _project_simplex(v: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = total}."""
    n = v.shape[0]
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - total
    rho = np.nonzero(u * np.arange(1, n + 1) > css)[0][-1]
    tau = css[rho] / (rho + 1.0)
    return np.maximum(v - tau, 0.0)


def _objective(components, x: np.ndarray) -> float:
    total = 0.0
    for comp, xi in zip(components, x):
        if xi > 0.0:
            total += float(comp.hazard_function(xi))
    return total


def _gradient(components, x: np.ndarray, gamma: float) -> np.ndarray:
    # hazard rates blow up at 0 for shape < 1; evaluate just inside
    floor = 1e-14 * gamma
    g = np.empty(len(components))
    for i, comp in enumerate(components):
        g[i] = float(comp.hazard_rate(max(x[i], floor)))
    return np.minimum(g, 1e15)


def _refine(components, x0: np.ndarray, gamma: float) -> tuple[np.ndarray, float]:
    """Projected gradient descent with backtracking from one candidate."""
    x = x0.copy()
    f = _objective(components, x)
    for _ in range(_MAX_ITER):
        g = _gradient(components, x, gamma)
        step = gamma / max(np.max(np.abs(g)), 1e-30)
        moved = 0.0
        while step > 1e-18 * gamma:
            trial = _project_simplex(x - step * g, gamma)
            f_trial = _objective(components, trial)
            if f_trial < f - 1e-14 * (1.0 + abs(f)):
                moved = float(np.max(np.abs(trial - x)))
                x, f = trial, f_trial
                break
            step *= 0.5
        if moved < _DESCENT_TOL * gamma:
            break
    return x, f


def solve_pprime(problem: SumProblem) -> MinmaxSolution:
    """Minimize the summed cumulative hazards over {x >= 0, sum x = gamma}.

    Multi-start strategy: the N vertices (all mass on one coordinate),
    the extreme points with the off-coordinates pinned at their concavity
    onsets, and the uniform split; each candidate is refined by projected
    gradient descent and the best refined point wins (ties by candidate
    order).
    """
    comps = problem.components
    gamma = problem.gamma
    n = problem.n
    onsets = np.array([c.concavity_onset() for c in comps])

    if n == 1:
        x_best = np.array([gamma])
        f_best = _objective(comps, x_best)
    else:
        candidates = []
        for i in range(n):
            v = np.zeros(n)
            v[i] = gamma
            candidates.append(v)
        if np.any(onsets > 0.0):
            for i in range(n):
                rest = onsets.sum() - onsets[i]
                if gamma > rest:
                    v = onsets.copy()
                    v[i] = gamma - rest
                    candidates.append(v)
        candidates.append(np.full(n, gamma / n))

        x_best, f_best = None, np.inf
        for cand in candidates:
            x, f = _refine(comps, cand, gamma)
            if x_best is None or f < f_best - 1e-15 * (1.0 + abs(f_best)):
                x_best, f_best = x, f

    a = f_best
    th = theta_star(a, n)
    clamped = a <= n
    return MinmaxSolution(
        x_star=x_best,
        objective=a,
        dominant_index=int(np.argmax(x_best)),
        theta_star=th,
        second_moment_bound=float(second_moment_bound(th, a, n)),
        clamped=clamped,
        n=n,
        gamma=gamma,
    )
