"""Independent brute-force references for validating the estimators.

Nothing here shares code paths with the sampling estimators: tails come
from closed-form survival functions or adaptive quadrature of the
two-component convolution, and the constrained minimization is checked
against exhaustive grid search.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .distributions import Distribution
from .errors import OracleConvergenceError, ParameterError
from .estimators import is_estimate
from .solver import MinmaxSolution, SumProblem, second_moment_bound, solve_pprime


@dataclass(frozen=True)
class QuadratureConfig:
    # None means 1e-10 relative to the computed value
    absolute_tolerance: float | None = None
    max_subdivisions: int = 400

    def __post_init__(self):
        if self.absolute_tolerance is not None and self.absolute_tolerance <= 0.0:
            raise ParameterError("tolerance must be positive")
        if self.max_subdivisions < 10:
            raise ParameterError("max_subdivisions too small")


def exact_tail_single(dist: Distribution, gamma: float) -> float:
    """Closed-form exceedance probability for one component."""
    return float(dist.survival(gamma))


def _panel_edges(gamma: float) -> np.ndarray:
    # heavy-tail integrands peak near both endpoints; pack panels there
    fracs = np.array([0.0, 1e-12, 1e-9, 1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.1,
                      0.25, 0.5, 0.75, 0.9, 0.95, 0.99, 1 - 1e-3, 1 - 1e-4,
                      1 - 1e-6, 1 - 1e-9, 1 - 1e-12, 1.0])
    return gamma * fracs


def tail_convolution_2(dist1: Distribution, dist2: Distribution, gamma: float,
                       cfg: QuadratureConfig = QuadratureConfig()) -> float:
    """P(X1 + X2 > gamma) by adaptive quadrature of the convolution.

    Decomposition: integral over (0, gamma) of pdf1(x) * survival2(gamma - x)
    plus survival1(gamma).  The integrand is evaluated in log space and
    renormalized by its maximum so that thresholds far in the joint tail
    (values tens of decades below 1) lose no precision.
    """
    if gamma <= 0.0:
        raise ParameterError("gamma must be positive")

    def log_integrand(x):
        return dist1.log_pdf(x) + dist2.log_survival(gamma - x)

    scan = np.unique(np.concatenate([
        gamma * np.geomspace(1e-12, 0.5, 300),
        gamma - gamma * np.geomspace(1e-12, 0.5, 300),
    ]))
    shift = float(np.max(log_integrand(scan)))

    def integrand(x):
        if x <= 0.0 or x >= gamma:
            return 0.0
        return math.exp(float(log_integrand(x)) - shift)

    edges = _panel_edges(gamma)
    total = 0.0
    err = 0.0
    # endpoint singularities (shape < 1 densities) make quad grumble even
    # when its error estimate is fine; the tolerance check below decides
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        for a, b in zip(edges[:-1], edges[1:]):
            if b <= a:
                continue
            v, e = quad(integrand, a, b, epsabs=0.0, epsrel=1e-11,
                        limit=cfg.max_subdivisions)
            total += v
            err += e

    body = math.exp(shift) * total
    tail = exact_tail_single(dist1, gamma)
    result = body + tail
    abs_err = math.exp(shift) * err
    tol = cfg.absolute_tolerance
    if tol is None:
        tol = 1e-10 * max(result, np.finfo(float).tiny)
    if abs_err > tol:
        raise OracleConvergenceError(
            f"convolution quadrature error {abs_err:.3e} exceeds tolerance "
            f"{tol:.3e} at gamma={gamma}")
    return result


def grid_oracle_pprime(problem: SumProblem,
                       grid_points_per_dim: int) -> tuple[np.ndarray, float]:
    """Exhaustive simplex-grid minimization of the summed hazards, N <= 3."""
    n = problem.n
    gamma = problem.gamma
    if n > 3:
        raise ParameterError("grid oracle supports N <= 3 only")
    g = int(grid_points_per_dim)
    if g < 2:
        raise ParameterError("need at least 2 grid points per dimension")

    if n == 1:
        x = np.array([gamma])
        return x, float(problem.hazard_sum(x)[0])

    axis = np.linspace(0.0, gamma, g)
    if n == 2:
        pts = np.column_stack([axis, gamma - axis])
    else:
        x1, x2 = np.meshgrid(axis, axis, indexing="ij")
        x1, x2 = x1.ravel(), x2.ravel()
        x3 = gamma - x1 - x2
        keep = x3 >= -1e-12 * gamma
        pts = np.column_stack([x1[keep], x2[keep], np.maximum(x3[keep], 0.0)])
    objs = problem.hazard_sum(pts)
    best = int(np.argmin(objs))
    return pts[best], float(objs[best])


@dataclass(frozen=True)
class SweepRow:
    theta: float
    second_moment_empirical: float
    second_moment_bound: float
    std_error: float


def theta_sensitivity_sweep(problem: SumProblem, theta_grid, sample_count: int,
                            seed: int) -> tuple[list[SweepRow], MinmaxSolution]:
    """Empirical second moment vs the analytic bound across twisting amounts.

    The solved minmax theta* is inserted into the grid if absent.  Run i
    of the sweep uses substream i of the base seed, so the whole table is
    reproducible from (config, seed) alone.
    """
    solution = solve_pprime(problem)
    grid = sorted(set(float(t) for t in theta_grid) | {solution.theta_star})
    for t in grid:
        if not (0.0 <= t < 1.0):
            raise ParameterError(f"theta grid value {t} outside [0, 1)")
    rows = []
    for idx, theta in enumerate(grid):
        res = is_estimate(problem, theta, sample_count, seed, stream_id=idx)
        m2 = res.second_moment_weight
        sweep_se = math.sqrt(
            max(res.fourth_moment_weight - m2 * m2, 0.0) / sample_count)
        rows.append(SweepRow(
            theta=theta,
            second_moment_empirical=m2,
            second_moment_bound=float(
                second_moment_bound(theta, solution.objective, problem.n)),
            std_error=sweep_se,
        ))
    return rows, solution
