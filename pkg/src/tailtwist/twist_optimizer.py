"""Minmax choice of the twisting parameter.

The estimator's worst-case second moment is controlled by the smallest
attainable sum of (weighted) cumulative hazards over allocations of the
threshold across components.  This module solves those small separable
problems exactly enough for the minmax parameter:

  * the dominant-group problem: minimize sum of Lambda_1(x_i) over the
    s twisted components subject to sum x_i >= threshold;
  * the full problem used in the optimality diagnostic: the same with
    weight 2 on the twisted components and each untwisted component
    contributing its own hazard;
  * the all-components variant that yields the conventional baseline's
    twisting parameter.

The feasible set is closed (x_i >= 0): each hazard is continuous with
Lambda(0) = 0, so the infimum over x_i > 0 is attained on the closure
and boundary attainment is reported instead of excluded.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .dominance import Scenario, TwistPlan

__all__ = [
    "OptimizationResult",
    "solve_p",
    "solve_p_prime",
    "theta_star",
    "bound_h",
    "theta_conventional",
    "weighted_hazard_sum",
]

_MULTISTARTS = 8
_OBJECTIVE_TOL = 1e-10
_SNAP_REL = 1e-12


@dataclass(frozen=True)
class OptimizationResult:
    """Minimizer and value of one hazard-allocation problem."""

    argmin_x: tuple[float, ...]
    objective_value: float
    attained_on_boundary: bool


def weighted_hazard_sum(specs, weights, x) -> float:
    """sum_i weights[i] * Lambda_i(x[i]) for nonnegative x."""
    return math.fsum(
        w * spec.cumulative_hazard(float(v)) for spec, w, v in zip(specs, weights, x)
    )


def _descent_starts(n: int, gamma: float) -> np.ndarray:
    # fixed seed: the solver must be a pure function of its inputs
    rng = np.random.default_rng(20240607)
    starts = rng.dirichlet(np.ones(n), size=_MULTISTARTS) * gamma
    return starts


def _snap(x: np.ndarray, gamma: float) -> np.ndarray:
    """Zero out negligible coordinates, keeping the sum exactly gamma."""
    snapped = np.where(x < _SNAP_REL * gamma, 0.0, x)
    deficit = gamma - snapped.sum()
    snapped[int(np.argmax(snapped))] += deficit
    return snapped


def _minimize_allocation(specs, weights, gamma: float) -> OptimizationResult:
    """Minimize sum w_i * Lambda_i(x_i) over {x >= 0, sum x = gamma}.

    Every hazard is nondecreasing, so restricting the constraint
    sum x >= gamma to its active face loses nothing.  Closed-form
    candidates (corners, even split) are combined with multi-start
    descent for interior stationary points.
    """
    if not gamma > 0.0:
        raise ValueError("threshold must be positive for the twist optimization")
    n = len(specs)
    weights = [float(w) for w in weights]

    def objective(x: np.ndarray) -> float:
        return weighted_hazard_sum(specs, weights, np.maximum(x, 0.0))

    candidates: list[np.ndarray] = []
    for j in range(n):
        corner = np.zeros(n)
        corner[j] = gamma
        candidates.append(corner)
    candidates.append(np.full(n, gamma / n))

    if n > 1:
        lo = 1e-9 * gamma

        def grad(x: np.ndarray) -> np.ndarray:
            clipped = np.maximum(x, lo)
            return np.array(
                [w * spec.hazard_rate(float(v)) for spec, w, v in zip(specs, weights, clipped)]
            )

        constraint = {"type": "eq", "fun": lambda x: x.sum() - gamma}
        bounds = [(lo, gamma)] * n
        for start in _descent_starts(n, gamma):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                res = minimize(
                    objective,
                    np.maximum(start, lo),
                    jac=grad,
                    method="SLSQP",
                    bounds=bounds,
                    constraints=[constraint],
                    options={"ftol": _OBJECTIVE_TOL, "maxiter": 200},
                )
            if np.all(np.isfinite(res.x)):
                candidates.append(_snap(np.clip(res.x, 0.0, gamma), gamma))

    values = [objective(c) for c in candidates]
    best = int(np.argmin(values))
    x_best = candidates[best]
    return OptimizationResult(
        argmin_x=tuple(float(v) for v in x_best),
        objective_value=values[best],
        attained_on_boundary=bool(np.any(x_best == 0.0)),
    )


def _check_plan(scenario: Scenario, plan: TwistPlan) -> None:
    if any(i < 0 or i >= scenario.n for i in plan.dominant_indices):
        raise ValueError("twist plan indexes components outside the scenario")


def solve_p(scenario: Scenario, plan: TwistPlan) -> OptimizationResult:
    """Cheapest allocation of the threshold across the s twisted components.

    Minimizes sum of Lambda_1(x_i), i = 1..s, over x >= 0 with
    sum x >= threshold; the value is the exponent budget A(threshold)
    that the minmax parameter is built from.
    """
    _check_plan(scenario, plan)
    dominant_spec = scenario.components[plan.dominant_indices[0]]
    specs = [dominant_spec] * plan.s
    return _minimize_allocation(specs, [1.0] * plan.s, scenario.threshold_linear)


def solve_p_prime(scenario: Scenario, plan: TwistPlan) -> OptimizationResult:
    """Weighted variant over all N components (twisted ones count twice).

    Its value A'(threshold) bounds the log second moment of the improved
    estimator and drives the asymptotic-optimality diagnostic.
    """
    _check_plan(scenario, plan)
    dominant = set(plan.dominant_indices)
    weights = [2.0 if i in dominant else 1.0 for i in range(scenario.n)]
    return _minimize_allocation(
        list(scenario.components), weights, scenario.threshold_linear
    )


def theta_star(s: int, a: float) -> float:
    """Minmax twisting parameter 1 - s/A, clamped into [0, 1).

    A at or below s means the threshold is too small for twisting to
    help; the clamp to 0 keeps the estimator valid there.
    """
    if not a > 0.0:
        raise ValueError("the optimized hazard budget A must be positive")
    if s < 1:
        raise ValueError("the twisted-component count s must be >= 1")
    return max(0.0, 1.0 - s / a)


def bound_h(plan: TwistPlan, a: float, theta: float) -> float:
    """Worst-case second-moment bound (1-theta)^(-2s) * exp(-2*theta*A).

    Log-convex in theta; its minimizer over [0, 1) is theta_star(s, A).
    """
    if not a > 0.0:
        raise ValueError("the optimized hazard budget A must be positive")
    if not 0.0 <= theta < 1.0:
        raise ValueError("twisting parameter must lie in [0, 1)")
    return math.exp(-2.0 * plan.s * math.log1p(-theta) - 2.0 * theta * a)


def theta_conventional(scenario: Scenario) -> float:
    """Minmax parameter of the all-components-twisted baseline.

    Applies the same recipe with every component twisted: minimize the
    unweighted sum of each component's own hazard over allocations of
    the threshold, then clamp 1 - N/A_conv into [0, 1).
    """
    result = _minimize_allocation(
        list(scenario.components), [1.0] * scenario.n, scenario.threshold_linear
    )
    return theta_star(scenario.n, result.objective_value)
