"""Damped Newton iteration shared by the projection and circumcenter solvers."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEWTON_TOL = 1e-11
MAX_ITER = 100
MAX_HALVINGS = 60
ARMIJO = 1e-4


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    converged: bool
    reason: str = ""


def damped_newton(residual, jacobian, x0, feasible, tol=NEWTON_TOL, scale=1.0,
                  max_iter=MAX_ITER):
    """Solve residual(x) = 0 from x0 while keeping feasible(x) true.

    Steps are halved until the iterate is feasible and the residual norm
    satisfies the Armijo condition.  Convergence means
    |residual| <= tol * (1 + scale).  When no step is accepted but the
    Newton step is already at roundoff size, the iterate is accepted as
    converged.
    """
    x = np.asarray(x0, dtype=float).copy()
    if not feasible(x):
        return NewtonResult(x, np.inf, 0, False, "infeasible start")
    F = residual(x)
    nF = float(np.linalg.norm(F))
    target = tol * (1.0 + scale)
    for it in range(max_iter + 1):
        if not np.isfinite(nF):
            return NewtonResult(x, nF, it, False, "non-finite residual")
        if nF <= target:
            return NewtonResult(x, nF, it, True)
        if it == max_iter:
            break
        J = jacobian(x)
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -F, rcond=None)[0]
        if not np.all(np.isfinite(step)):
            return NewtonResult(x, nF, it, False, "singular Jacobian")
        t = 1.0
        accepted = False
        for _ in range(MAX_HALVINGS):
            xn = x + t * step
            if feasible(xn):
                Fn = residual(xn)
                nFn = float(np.linalg.norm(Fn))
                if nFn <= (1.0 - ARMIJO * t) * nF:
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            if np.linalg.norm(step) <= 1e-13 * (1.0 + np.linalg.norm(x)):
                return NewtonResult(x, nF, it, True, "roundoff floor")
            return NewtonResult(x, nF, it, False, "line search failed")
        x, F, nF = xn, Fn, nFn
    return NewtonResult(x, nF, max_iter, False, "max_iter reached")
