"""Armijo backtracking line search over a geometric step-size ladder.

The search tries the steps ``h0, gamma*h0, gamma^2*h0, ...`` and accepts the
first ``h`` satisfying the sufficient-decrease condition

    F(x - h g) <= F(x) - c * h * |g|^2

where ``g`` is the gradient at ``x`` and ``c`` is the effective descent
coefficient (the base ``lam``, optionally scaled down by a relative-mass
weight).  If the ladder reaches ``h_floor`` without an acceptable step the
search reports a stall: step 0 and the unchanged objective value.

The ladder restarts from ``h0`` on every call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .objectives import Objective

__all__ = ["BacktrackParams", "backtrack", "backtrack_batch"]


@dataclass(frozen=True)
class BacktrackParams:
    """Step-ladder parameters shared by all backtracking callers.

    Attributes
    ----------
    lam : float
        Base descent coefficient in (0, 1); the fraction of ``h |g|^2``
        decrease demanded from an accepted step.
    gamma : float
        Ladder shrink factor in (0, 1).
    h0 : float
        Largest (first) trial step.
    h_floor : float
        Stall threshold: once trial steps drop to or below this the search
        gives up and returns step 0.
    q : float
        Exponent of the relative-mass weight ``m~^q`` that swarm callers
        compose into the coefficient ``c = lam * m~^q``.
    """

    lam: float = 0.2
    gamma: float = 0.9
    h0: float = 1.0
    h_floor: float = 1e-14
    q: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 < self.lam < 1.0:
            raise ValueError(f"lam must lie in (0, 1), got {self.lam}")
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not self.h0 > 0.0:
            raise ValueError(f"h0 must be positive, got {self.h0}")
        if not 0.0 <= self.h_floor < self.h0:
            raise ValueError(f"h_floor must lie in [0, h0), got {self.h_floor}")
        if not self.q > 0.0:
            raise ValueError(f"q must be positive, got {self.q}")


def backtrack_batch(
    obj: Objective,
    positions: np.ndarray,
    grads: np.ndarray,
    c,
    params: BacktrackParams,
    f_current: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Run the ladder for a batch of agents at once.

    Parameters
    ----------
    obj : Objective
        Landscape evaluated in batches.
    positions, grads : ndarray, shape (n, d)
        Current points and their gradients.
    c : scalar or ndarray, shape (n,)
        Effective descent coefficient per agent.
    f_current : ndarray, shape (n,)
        Objective values at ``positions``, already known to the caller.

    Returns
    -------
    h : ndarray, shape (n,)
        Accepted step per agent; 0 marks a stalled agent.
    f_new : ndarray, shape (n,)
        Objective at the accepted trial point, or ``f_current`` where stalled.
    n_evals : int
        Total number of objective evaluations spent on trial points.
    """
    X = np.asarray(positions, dtype=float)
    G = np.asarray(grads, dtype=float)
    if X.ndim != 2 or G.shape != X.shape:
        raise ValueError(f"positions and grads must share a (n, d) shape, got {X.shape} and {G.shape}")
    n = X.shape[0]
    coeff = np.broadcast_to(np.asarray(c, dtype=float), (n,))
    f_base = np.asarray(f_current, dtype=float)
    if f_base.shape != (n,):
        raise ValueError(f"f_current must have shape ({n},), got {f_base.shape}")

    g_sq = np.sum(G * G, axis=1)
    h_try = np.full(n, float(params.h0))
    h_out = np.zeros(n)
    f_out = f_base.copy()
    active = np.ones(n, dtype=bool)
    n_evals = 0
    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        trial = X[idx] - h_try[idx][:, None] * G[idx]
        f_trial = obj.evaluate_many(trial)
        n_evals += idx.size
        accept = f_trial <= f_base[idx] - coeff[idx] * h_try[idx] * g_sq[idx]
        acc = idx[accept]
        h_out[acc] = h_try[acc]
        f_out[acc] = f_trial[accept]
        active[acc] = False
        rej = idx[~accept]
        h_try[rej] *= params.gamma
        stalled = rej[h_try[rej] <= params.h_floor]
        active[stalled] = False
    return h_out, f_out, n_evals


def backtrack(
    obj: Objective,
    x,
    g,
    c: float,
    params: BacktrackParams,
    f_x: float | None = None,
) -> tuple[float, float, int]:
    """Single-point ladder; the batch routine with one row.

    When ``f_x`` is omitted it is evaluated here and counted in ``n_evals``.
    Returns ``(h, f_new, n_evals)`` with the same stall convention as
    :func:`backtrack_batch`.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    g = np.atleast_1d(np.asarray(g, dtype=float))
    extra = 0
    if f_x is None:
        f_x = obj.evaluate(x)
        extra = 1
    h, f_new, n_evals = backtrack_batch(
        obj, x[None, :], g[None, :], float(c), params, np.array([float(f_x)])
    )
    return float(h[0]), float(f_new[0]), n_evals + extra
