"""Quasi-Newton minimization of ansatz angles.

Thin wrapper around scipy's BFGS (inverse-Hessian update, strong-Wolfe
line search with c1=1e-4, c2=0.9) that tracks the best iterate ever
evaluated, so a line-search failure still returns the best point seen,
and the returned objective is never above the starting one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

__all__ = ["OptimizeResult", "minimize"]


@dataclass
class OptimizeResult:
    theta_opt: np.ndarray
    objective_value: float
    n_evaluations: int
    converged: bool
    gradient_norm: float
    n_iterations: int = 0


def minimize(objective, theta0, gtol=1e-8, max_iter=500,
             restarts=0, restart_scale=0.1, seed=None,
             callback=None) -> OptimizeResult:
    """Minimize `objective(theta) -> (value, gradient)` from theta0 with BFGS.

    Args:
        objective: callable returning the value and its analytic gradient.
        theta0: starting angles.
        gtol: convergence threshold on the gradient infinity norm.
        max_iter: BFGS iteration cap per solve.
        restarts: optional seeded perturb-and-reoptimize rounds for plateau
            escape; 0 keeps the solve fully deterministic.
        restart_scale: stddev (radians) of the restart perturbations.
        seed: RNG seed for restarts.
        callback: forwarded to scipy, called once per accepted iterate.

    Raises:
        ValueError: if the objective evaluates to NaN.
    """
    theta0 = np.asarray(theta0, dtype=float)
    result = _single_minimize(objective, theta0, gtol, max_iter, callback)
    if restarts:
        rng = np.random.default_rng(seed)
        best = result
        for _ in range(restarts):
            perturbed = best.theta_opt + rng.normal(0.0, restart_scale, size=theta0.shape)
            trial = _single_minimize(objective, perturbed, gtol, max_iter, callback)
            trial.n_evaluations += best.n_evaluations
            if trial.objective_value < best.objective_value:
                best = trial
        result = best
    return result


def _single_minimize(objective, theta0, gtol, max_iter, callback):
    n_evals = 0
    best = None  # (value, gradient inf-norm, theta)

    def wrapped(theta):
        nonlocal n_evals, best
        n_evals += 1
        value, grad = objective(theta)
        if not np.isfinite(value):
            raise ValueError(f"objective evaluated to {value} at theta={theta}")
        gnorm = float(np.max(np.abs(grad))) if len(grad) else 0.0
        if best is None or value < best[0]:
            best = (float(value), gnorm, np.array(theta, dtype=float))
        return value, np.asarray(grad, dtype=float)

    if len(theta0) == 0:
        value, _ = wrapped(theta0)
        return OptimizeResult(theta0, value, n_evals, True, 0.0)

    res = _scipy_minimize(wrapped, theta0, jac=True, method="BFGS",
                          callback=callback,
                          options={"gtol": gtol, "maxiter": max_iter})
    value = float(res.fun)
    theta = np.asarray(res.x, dtype=float)
    gnorm = float(np.max(np.abs(res.jac)))
    if best is not None and best[0] < value:
        value, gnorm, theta = best
    converged = bool(res.success) and gnorm <= gtol
    return OptimizeResult(theta, value, n_evals, converged, gnorm,
                          n_iterations=int(res.nit))
