"""Brute-force checks that do not share code with the solvers.

Distances here are computed from ``fn.value`` and ``fn.gradient`` directly
rather than through :mod:`bregcc.bregman`, and the searches use plain grids
and bisection.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import optimize

from .legendre import Membership
from .linalg import as_points


class Method(str, Enum):
    GRID_SEARCH = "GridSearch"
    SCALAR_ROOT_FIND = "ScalarRootFind"
    CONSTRAINT_RESIDUAL = "ConstraintResidual"


@dataclass
class VerificationReport:
    claim: str
    method: Method
    worst_residual: float
    verdict: str
    tol: float
    reason: str = ""

    @property
    def passed(self):
        return self.verdict == "Pass"

    def to_dict(self):
        return {
            "claim": self.claim,
            "method": self.method.value,
            "worst_residual": self.worst_residual,
            "verdict": self.verdict,
            "tol": self.tol,
            "reason": self.reason,
        }


def _divergence(fn, x, y):
    return fn.value(x) - fn.value(y) - float(np.dot(fn.gradient(y), np.asarray(x) - np.asarray(y)))


def verify_equidistance(fn, points, candidate, mode="backward", tol=1e-8) -> VerificationReport:
    """Check that ``candidate`` is equidistant from all points.

    Backward mode uses D_f(candidate, q_i) and needs candidate in dom f;
    forward mode uses D_f(p_i, candidate) and needs candidate in int dom f.
    """
    pts = as_points(points)
    c = np.asarray(candidate, dtype=float).reshape(-1)
    claim = f"{mode} equidistance of {np.array2string(c, precision=10)} under {fn.name}"
    if c.shape[0] != pts.shape[1]:
        return VerificationReport(claim, Method.CONSTRAINT_RESIDUAL, np.inf, "Fail", tol,
                                  "dimension mismatch")
    member = fn.membership(c)
    if mode == "backward":
        if member is Membership.OUTSIDE:
            return VerificationReport(claim, Method.CONSTRAINT_RESIDUAL, np.inf, "Fail", tol,
                                      "candidate outside dom f")
        d = np.array([_divergence(fn, c, q) for q in pts])
    elif mode == "forward":
        if member is not Membership.INTERIOR:
            return VerificationReport(claim, Method.CONSTRAINT_RESIDUAL, np.inf, "Fail", tol,
                                      "candidate outside int dom f")
        d = np.array([_divergence(fn, p, c) for p in pts])
    else:
        raise ValueError(f"mode must be 'backward' or 'forward', got {mode!r}")
    gap = float(np.max(np.abs(d - d[0])))
    return VerificationReport(claim, Method.CONSTRAINT_RESIDUAL, gap,
                              "Pass" if gap <= tol else "Fail", tol)


def _gaps_vectorized(fn, pts, X, mode):
    codes = fn.membership_codes(X)
    ok = codes < 2 if mode == "backward" else codes == 0
    with np.errstate(invalid="ignore", divide="ignore"):
        fX = fn.value_batch(X)
        if mode == "backward":
            fq = np.array([fn.value(q) for q in pts])
            gq = np.array([fn.gradient(q) for q in pts])
            # D(x, q) = f(x) − f(q) − <∇f(q), x − q>
            D = fX[:, None] - fq[None, :] - (X @ gq.T - np.sum(gq * pts, axis=1)[None, :])
        else:
            fp = np.array([fn.value(p) for p in pts])
            G = np.full(X.shape, np.nan)
            G[ok] = fn.gradient_batch(X[ok])
            # D(p, y) = f(p) − f(y) − <∇f(y), p − y>
            D = fp[None, :] - fX[:, None] - (G @ pts.T - np.sum(G * X, axis=1)[:, None])
        gap = np.max(np.abs(D - D[:, :1]), axis=1)
    gap[~ok] = np.nan
    return gap


def _gaps(fn, pts, X, mode):
    """Max pairwise distance gap at each row of X; NaN where infeasible."""
    if getattr(fn, "vectorized", False):
        return _gaps_vectorized(fn, pts, X, mode)
    allowed = {Membership.INTERIOR}
    if mode == "backward":
        allowed.add(Membership.BOUNDARY)
    gap = np.full(X.shape[0], np.nan)
    for i, x in enumerate(X):
        if fn.membership(x) not in allowed:
            continue
        if mode == "backward":
            d = np.array([_divergence(fn, x, q) for q in pts])
        else:
            d = np.array([_divergence(fn, p, x) for p in pts])
        gap[i] = np.max(np.abs(d - d[0]))
    return gap


def grid_refine_search(fn, points, flat, mode="backward", grid_radius=1.0, levels=5,
                       per_axis=21, center=None, accept_gap=1e-3):
    """Multi-level grid search on a flat for the most equidistant point.

    The grid lives in orthonormal flat coordinates.  Each level recenters on
    the best feasible node and shrinks the radius tenfold.  Returns None when
    no feasible node was found or the best gap exceeds ``accept_gap``.
    """
    pts = as_points(points)
    U = flat.orthonormal_directions()
    k = U.shape[0]
    if k > 3:
        raise ValueError("grid search supports flats of dimension at most 3")
    if center is None:
        mean = pts.mean(axis=0)
        center = flat.base + ((mean - flat.base) @ U.T) @ U
    c = (np.asarray(center, dtype=float) - flat.base) @ U.T
    ticks = np.linspace(-1.0, 1.0, per_axis)
    offsets = np.stack(np.meshgrid(*([ticks] * k), indexing="ij"), axis=-1).reshape(-1, k)
    radius = float(grid_radius)
    best_gap, best = np.inf, None
    for _ in range(levels):
        C = c + radius * offsets
        X = flat.base + C @ U
        gap = _gaps(fn, pts, X, mode)
        if np.all(np.isnan(gap)):
            break
        i = int(np.nanargmin(gap))
        if gap[i] <= best_gap:
            best_gap, best, c = float(gap[i]), X[i], C[i]
        radius /= 10.0
    if best is None or best_gap > accept_gap:
        return None
    return best


def scalar_root_oracle(g, bracket, tol=1e-12, target=0.0):
    """Root of g(t) = target on the bracket by bisection, or None if the
    bracket shows no sign change."""
    a, b = bracket
    ga, gb = g(a) - target, g(b) - target
    if ga == 0:
        return float(a)
    if gb == 0:
        return float(b)
    if np.sign(ga) == np.sign(gb):
        return None
    return float(optimize.bisect(lambda t: g(t) - target, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
