import numpy as np
import pytest

import oada
from oada.optimizer import minimize
from oada.statevector import Ansatz, energy_and_gradient


def quadratic(center):
    def objective(theta):
        d = theta - center
        return float(d @ d), 2 * d
    return objective


def test_quadratic_converges_quickly():
    center = np.array([1.0, -2.0, 0.5, 3.0])
    result = minimize(quadratic(center), np.zeros(4), gtol=1e-10)
    assert result.converged
    assert np.max(np.abs(result.theta_opt - center)) < 1e-8
    assert result.n_iterations <= len(center) + 2


def test_h2_single_parameter_curve_reaches_fci(h2):
    # the lone double excitation is exact for this system
    double = [op for op in h2.pool if op.kind == "double"][0]
    ansatz = Ansatz(4, 2)
    ansatz.append(double.excitation, 0.0)

    def objective(theta):
        return energy_and_gradient(ansatz, h2.sparse, theta)

    result = minimize(objective, np.zeros(1), gtol=1e-10)
    assert abs(result.objective_value - h2.refs["REF_FCI"]) < 1e-8


def test_infinite_gtol_returns_start():
    result = minimize(quadratic(np.ones(3)), np.zeros(3), gtol=np.inf)
    assert result.converged
    assert np.array_equal(result.theta_opt, np.zeros(3))


def test_monotone_accepted_iterates():
    center = np.array([2.0, -1.0])
    values = []

    def objective(theta):
        d = theta - center
        value = float(d @ d + 0.3 * d[0] ** 4)
        return value, 2 * d + np.array([1.2 * d[0] ** 3, 0.0])

    def callback(xk):
        values.append(objective(xk)[0])

    minimize(objective, np.array([5.0, 5.0]), callback=callback)
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_never_worse_than_start():
    # maxiter cripples the solve; result must still be <= f(theta0)
    def rosenbrock(theta):
        x, y = theta
        value = (1 - x) ** 2 + 100 * (y - x * x) ** 2
        grad = np.array([-2 * (1 - x) - 400 * x * (y - x * x),
                         200 * (y - x * x)])
        return float(value), grad

    start = np.array([-1.2, 1.0])
    result = minimize(rosenbrock, start, max_iter=2)
    assert not result.converged
    assert result.objective_value <= rosenbrock(start)[0] + 1e-12


def test_converged_implies_gradient_below_gtol():
    result = minimize(quadratic(np.ones(2)), np.zeros(2), gtol=1e-9)
    assert result.converged
    assert result.gradient_norm <= 1e-9


def test_nan_objective_raises():
    def bad(theta):
        return float("nan"), np.zeros_like(theta)

    with pytest.raises(ValueError, match="nan"):
        minimize(bad, np.zeros(2))


def test_warm_start_never_worse(h4):
    # optimum of the (m-1)-parameter ansatz, new angle at zero: the
    # re-optimized m-parameter objective may not be worse
    pool = h4.pool
    ansatz = Ansatz(h4.n, h4.n_electrons)
    ansatz.append(pool[-1].excitation, 0.0)

    def objective(theta):
        return energy_and_gradient(ansatz, h4.sparse, theta)

    first = minimize(objective, np.zeros(1), gtol=1e-10)
    ansatz.thetas = list(first.theta_opt)
    ansatz.append(pool[0].excitation, 0.0)

    def objective2(theta):
        return energy_and_gradient(ansatz, h4.sparse, theta)

    second = minimize(objective2, list(first.theta_opt) + [0.0], gtol=1e-10)
    assert second.objective_value <= first.objective_value + 1e-12


def test_restarts_deterministic_and_not_worse():
    def bumpy(theta):
        x = theta[0]
        return float(np.sin(3 * x) + 0.1 * x * x), np.array([3 * np.cos(3 * x) + 0.2 * x])

    base = minimize(bumpy, np.array([2.0]))
    r1 = minimize(bumpy, np.array([2.0]), restarts=3, seed=11)
    r2 = minimize(bumpy, np.array([2.0]), restarts=3, seed=11)
    assert r1.objective_value == r2.objective_value
    assert np.array_equal(r1.theta_opt, r2.theta_opt)
    assert r1.objective_value <= base.objective_value + 1e-12


def test_empty_parameter_vector():
    result = minimize(lambda t: (4.2, np.zeros(0)), np.zeros(0))
    assert result.converged and result.objective_value == 4.2
