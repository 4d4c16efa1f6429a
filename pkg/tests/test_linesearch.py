"""Tests for the backtracking step-size ladder."""

import numpy as np
import pytest

from swarmdescent.linesearch import BacktrackParams, backtrack, backtrack_batch
from swarmdescent.objectives import make_objective

QUAD1 = make_objective("quadratic", 1)


def test_quadratic_accepts_first_step():
    # On 1/2 x^2 the Armijo condition holds iff h <= 2(1 - c); with c = 0.2
    # the threshold is 1.6, so the ladder accepts h0 = 1 immediately.
    h, f_new, n_evals = backtrack(QUAD1, [1.0], [1.0], 0.2, BacktrackParams(), f_x=0.5)
    assert h == 1.0
    assert f_new == 0.0
    assert n_evals == 1


def test_quadratic_shrinks_oversized_step():
    # h0 = 2 exceeds the 1.6 threshold; 2*0.9^3 = 1.458 is the first rung below.
    params = BacktrackParams(h0=2.0)
    h, f_new, n_evals = backtrack(QUAD1, [1.0], [1.0], 0.2, params, f_x=0.5)
    assert h == 2.0 * 0.9**3
    assert f_new == QUAD1.evaluate([1.0 - h])
    assert n_evals == 4


def test_zero_gradient_accepts_h0_without_moving():
    h, f_new, n_evals = backtrack(QUAD1, [0.0], [0.0], 0.2, BacktrackParams(), f_x=0.0)
    assert h == BacktrackParams().h0
    assert f_new == 0.0
    assert n_evals == 1


def test_missing_f_x_costs_one_extra_evaluation():
    h1, f1, n1 = backtrack(QUAD1, [1.0], [1.0], 0.2, BacktrackParams())
    h2, f2, n2 = backtrack(QUAD1, [1.0], [1.0], 0.2, BacktrackParams(), f_x=0.5)
    assert (h1, f1) == (h2, f2)
    assert n1 == n2 + 1


def test_stall_at_a_conical_minimum():
    # Next to the Ackley cone tip the gradient magnitude stays ~4 while the
    # function value is ~1e-14; every ladder step overshoots the tip and
    # lands higher, so no step is acceptable and the agent stalls.
    obj = make_objective("ackley", 1)
    x = np.array([2e-15])
    g = obj.gradient(x)
    f_x = obj.evaluate(x)
    h, f_new, n_evals = backtrack(obj, x, g, 0.2, BacktrackParams(), f_x=f_x)
    assert h == 0.0
    assert f_new == f_x
    # The ladder was walked all the way down to the floor.
    assert n_evals > 200


def test_descent_condition_holds_as_evaluated():
    rng = np.random.default_rng(23)
    objs = [
        make_objective("flatbasin1d"),
        make_objective("rastrigin1d"),
        make_objective("dropwave", 2),
        make_objective("quadratic", 3),
    ]
    for _ in range(200):
        obj = objs[rng.integers(len(objs))]
        x = rng.uniform(-3.0, 3.0, obj.dimension)
        c = float(rng.uniform(0.05, 0.95))
        params = BacktrackParams(
            lam=c, gamma=float(rng.uniform(0.5, 0.95)), h0=float(rng.uniform(0.5, 2.0))
        )
        g = obj.gradient(x)
        f_x = obj.evaluate(x)
        h, f_new, _ = backtrack(obj, x, g, c, params, f_x=f_x)
        if h > 0.0:
            g_sq = np.sum(np.atleast_1d(g) * np.atleast_1d(g))
            assert f_new <= f_x - c * h * g_sq
            assert f_new == obj.evaluate(x - h * np.atleast_1d(g))


def test_step_lower_bound_on_quadratic():
    # Lemma-style bound: whenever the ladder shrinks below h0, the accepted
    # step still satisfies h >= (2 gamma / L)(1 - c) on the quadratic.
    rng = np.random.default_rng(31)
    for _ in range(200):
        mu = float(rng.uniform(0.5, 4.0))
        obj = make_objective("quadratic", 1, mu=mu)
        x = np.array([float(rng.uniform(0.5, 3.0))])
        c = float(rng.uniform(0.05, 0.95))
        gamma = float(rng.uniform(0.5, 0.95))
        params = BacktrackParams(lam=c, gamma=gamma, h0=float(rng.uniform(0.5, 3.0)))
        h, _, _ = backtrack(obj, x, obj.gradient(x), c, params, f_x=obj.evaluate(x))
        assert h > 0.0
        if h < params.h0:
            assert h >= (2.0 * gamma / mu) * (1.0 - c)


def test_step_monotone_in_descent_coefficient():
    obj = make_objective("flatbasin1d")
    x = np.array([-2.2])
    g = obj.gradient(x)
    f_x = obj.evaluate(x)
    steps = [
        backtrack(obj, x, g, c, BacktrackParams(lam=c), f_x=f_x)[0]
        for c in np.arange(0.1, 1.0, 0.1)
    ]
    assert all(a >= b for a, b in zip(steps, steps[1:]))


def test_batch_matches_scalar_calls_bitwise():
    obj = make_objective("rastrigin1d")
    rng = np.random.default_rng(41)
    X = rng.uniform(-3.0, 3.0, (6, 1))
    G = obj.gradient_many(X)
    F = obj.evaluate_many(X)
    c = rng.uniform(0.05, 0.95, 6)
    params = BacktrackParams()
    h_b, f_b, _ = backtrack_batch(obj, X, G, c, params, F)
    for i in range(6):
        h_s, f_s, _ = backtrack(obj, X[i], G[i], float(c[i]), params, f_x=float(F[i]))
        assert h_s == h_b[i]
        assert f_s == f_b[i]


def test_batch_evaluation_budget():
    # Two agents from the same point: c = 0.2 accepts the first rung, c = 0.9
    # needs h <= 0.2, first reached at 0.9^16.  Rung 0 evaluates both agents,
    # rungs 1..16 only the demanding one: 2 + 16 evaluations in total.
    X = np.array([[1.0], [1.0]])
    G = np.array([[1.0], [1.0]])
    F = np.array([0.5, 0.5])
    h, _, n_evals = backtrack_batch(QUAD1, X, G, [0.2, 0.9], BacktrackParams(), F)
    assert h[0] == 1.0
    rung = 1.0
    for _ in range(16):
        rung *= 0.9
    assert h[1] == rung
    assert n_evals == 18


def test_params_validation():
    with pytest.raises(ValueError, match="lam"):
        BacktrackParams(lam=1.0)
    with pytest.raises(ValueError, match="lam"):
        BacktrackParams(lam=0.0)
    with pytest.raises(ValueError, match="gamma"):
        BacktrackParams(gamma=1.2)
    with pytest.raises(ValueError, match="h0"):
        BacktrackParams(h0=0.0)
    with pytest.raises(ValueError, match="h_floor"):
        BacktrackParams(h0=1e-15, h_floor=1e-14)
    with pytest.raises(ValueError, match="q"):
        BacktrackParams(q=0.0)


def test_batch_shape_validation():
    with pytest.raises(ValueError):
        backtrack_batch(QUAD1, np.zeros((3, 1)), np.zeros((2, 1)), 0.2, BacktrackParams(), np.zeros(3))
    with pytest.raises(ValueError):
        backtrack_batch(QUAD1, np.zeros((3, 1)), np.zeros((3, 1)), 0.2, BacktrackParams(), np.zeros(2))
