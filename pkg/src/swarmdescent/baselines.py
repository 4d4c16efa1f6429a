"""Non-communicating baselines: fixed-step GD, backtracking GD, and Adam.

Each baseline runs ``n`` independent agents in lockstep sweeps.  An agent
retires once its own residual ``|x_next - x|`` falls below ``tolres``;
retired agents stop consuming evaluations.  The best final agent (lowest
objective value, ties by lowest index) provides the run's solution.

The backtracking variant uses the full descent coefficient ``lam`` for every
agent, which makes a single-agent run identical, bit for bit, to the swarm
dynamics with one agent.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linesearch import BacktrackParams, backtrack_batch
from .objectives import Objective
from .swarm import RunResult, StopReason, _row_norms

__all__ = ["BaselineMethod", "BaselineParams", "run_baseline"]


class BaselineMethod(Enum):
    """Baseline optimizers; values double as the CLI names."""

    GD_FIXED = "gd"
    GD_BACKTRACK = "gdbt"
    ADAM = "adam"


@dataclass(frozen=True)
class BaselineParams:
    """Parameters for one baseline run.

    ``h`` is the fixed step of GD and the step scale of Adam; the
    backtracking variant takes its ladder from ``backtrack`` instead.
    """

    method: BaselineMethod
    h: float = 0.1
    backtrack: BacktrackParams = BacktrackParams()
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    tolres: float = 1e-4
    max_iters: int = 10000

    def __post_init__(self) -> None:
        if not isinstance(self.method, BaselineMethod):
            raise ValueError(f"method must be a BaselineMethod, got {self.method!r}")
        if not self.h > 0.0:
            raise ValueError(f"h must be positive, got {self.h}")
        if not 0.0 <= self.adam_beta1 < 1.0 or not 0.0 <= self.adam_beta2 < 1.0:
            raise ValueError("adam betas must lie in [0, 1)")
        if not self.adam_eps > 0.0:
            raise ValueError(f"adam_eps must be positive, got {self.adam_eps}")
        if self.tolres < 0.0:
            raise ValueError(f"tolres must be non-negative, got {self.tolres}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")


def run_baseline(
    obj: Objective,
    init_positions,
    params: BaselineParams,
    keep_history: bool = False,
) -> RunResult:
    """Run independent agents of the chosen baseline until all retire.

    ``history``, when requested, holds a position-array snapshot after each
    sweep.  ``iterations`` counts sweeps, i.e. the longest agent's count.
    """
    X = np.array(init_positions, dtype=float, ndmin=2)
    if X.ndim != 2 or X.shape[1] != obj.dimension:
        raise ValueError(f"init_positions must be (n, {obj.dimension}), got shape {X.shape}")
    n = X.shape[0]
    method = params.method
    bt = params.backtrack
    active = np.ones(n, dtype=bool)
    objective_evals = 0
    gradient_evals = 0
    f_current: np.ndarray | None = None
    if method is BaselineMethod.GD_BACKTRACK:
        f_current = obj.evaluate_many(X)
        objective_evals += n
    if method is BaselineMethod.ADAM:
        mom1 = np.zeros_like(X)
        mom2 = np.zeros_like(X)
        t_step = np.zeros(n, dtype=int)
    history: list | None = [] if keep_history else None
    sweeps = 0
    # Fixed-step GD may genuinely diverge on steep landscapes; overflow then
    # floods an agent with inf/nan.  Such an agent retires (its residual
    # comparison is false) and simply never counts as a success.
    with np.errstate(over="ignore", invalid="ignore"):
        while active.any() and sweeps < params.max_iters:
            sweeps += 1
            idx = np.nonzero(active)[0]
            x_act = X[idx]
            grads = obj.gradient_many(x_act)
            gradient_evals += idx.size
            if method is BaselineMethod.GD_FIXED:
                x_next = x_act - params.h * grads
            elif method is BaselineMethod.GD_BACKTRACK:
                h, f_new, evals = backtrack_batch(obj, x_act, grads, bt.lam, bt, f_current[idx])
                objective_evals += evals
                x_next = x_act - h[:, None] * grads
                f_current[idx] = f_new
            else:
                t_step[idx] += 1
                mom1[idx] = params.adam_beta1 * mom1[idx] + (1.0 - params.adam_beta1) * grads
                mom2[idx] = params.adam_beta2 * mom2[idx] + (1.0 - params.adam_beta2) * grads * grads
                m_hat = mom1[idx] / (1.0 - params.adam_beta1 ** t_step[idx][:, None])
                v_hat = mom2[idx] / (1.0 - params.adam_beta2 ** t_step[idx][:, None])
                x_next = x_act - params.h * m_hat / (np.sqrt(v_hat) + params.adam_eps)
            residual = _row_norms(x_next - x_act)
            X[idx] = x_next
            active[idx] = residual >= params.tolres
            if history is not None:
                history.append(X.copy())
        if f_current is None:
            f_current = obj.evaluate_many(X)
            objective_evals += n
    stop = StopReason.MAX_ITERS if active.any() else StopReason.RESIDUAL
    # Diverged agents (nan height) must never be picked as the best one.
    i_best = int(np.argmin(np.where(np.isnan(f_current), np.inf, f_current)))
    return RunResult(
        x_sol=X[i_best].copy(),
        f_sol=float(f_current[i_best]),
        iterations=sweeps,
        objective_evals=objective_evals,
        gradient_evals=gradient_evals,
        stop_reason=stop,
        history=history,
    )
