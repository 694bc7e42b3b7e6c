"""Bregman distances and Bregman projections onto affine flats."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._newton import NEWTON_TOL, damped_newton
from .exceptions import InputError, NoProjectionError, UnsupportedFunctionError
from .legendre import LegendreFunction, Membership
from .linalg import AffineFlat, euclid_project


@dataclass
class ProjectionResult:
    point: np.ndarray
    residual: float
    iterations: int


def bregman_distance(fn: LegendreFunction, x, y) -> float:
    """D_f(x, y) = f(x) − f(y) − <∇f(y), x − y>.

    Returns +inf when y is not in int dom f or x is not in dom f.
    """
    x = fn._check(x)
    y = fn._check(y, "y")
    if x.shape != y.shape:
        raise InputError("x and y have different lengths")
    if fn.membership(y) is not Membership.INTERIOR:
        return np.inf
    fx = fn.value(x)
    if not np.isfinite(fx):
        return np.inf
    return float(fx - fn.value(y) - fn.gradient(y) @ (x - y))


def bregman_distance_dual_check(fn: LegendreFunction, x, y):
    """Return (D_f(x, y), D_{f*}(∇f(y), ∇f(x))); both should agree."""
    x = fn._check(x)
    y = fn._check(y, "y")
    fn._require_interior(x)
    fn._require_interior(y)
    g = fn.conjugate()
    return bregman_distance(fn, x, y), bregman_distance(g, fn.gradient(y), fn.gradient(x))


def pythagoras_gap(fn, u, y, z):
    """D_f(u, y) − D_f(u, z) − D_f(z, y); zero when z is the backward
    projection of y onto a flat through u."""
    return bregman_distance(fn, u, y) - bregman_distance(fn, u, z) - bregman_distance(fn, z, y)


def _interior_anchor(fn, flat):
    cands = [flat.base] + [flat.base + d for d in flat.directions]
    if flat.directions.shape[0]:
        cands.append(flat.base + flat.directions.mean(axis=0))
    for c in cands:
        if fn.is_interior(c):
            return c
    return None


def _warm_start(fn, flat, y):
    """Euclidean projection of y, shrunk toward an interior flat point if needed."""
    z = euclid_project(flat, y)
    if fn.is_interior(z):
        return z
    anchor = _interior_anchor(fn, flat)
    if anchor is None:
        raise NoProjectionError(
            f"{fn.name}: no interior starting point found on the flat",
            {"start": z},
        )
    t = 1.0
    for _ in range(60):
        t *= 0.5
        cand = anchor + t * (z - anchor)
        if fn.is_interior(cand):
            return cand
    return anchor


def _project(fn, flat, y, residual_at, jacobian_at, scale, tol):
    U = flat.orthonormal_directions()
    if U.shape[0] == 0:
        if not fn.is_interior(flat.base):
            raise NoProjectionError(f"{fn.name}: the flat is a point outside int dom f")
        return ProjectionResult(flat.base.copy(), 0.0, 0)
    z0 = _warm_start(fn, flat, y)

    def point(c):
        return flat.base + c @ U

    res = damped_newton(
        lambda c: U @ residual_at(point(c)),
        lambda c: U @ jacobian_at(point(c)) @ U.T,
        (z0 - flat.base) @ U.T,
        lambda c: fn.is_interior(point(c)),
        tol=tol,
        scale=scale(z0),
    )
    if not res.converged:
        raise NoProjectionError(
            f"{fn.name}: Newton failed ({res.reason})",
            {"point": point(res.x), "residual": res.residual, "iterations": res.iterations},
        )
    return ProjectionResult(point(res.x), res.residual, res.iterations)


def _check_target(fn, flat, y):
    y = fn._check(y, "y")
    if y.shape[0] != flat.ambient_dim:
        raise InputError("point and flat dimensions differ")
    fn._require_interior(y)
    return y


def backward_bregman_project(fn: LegendreFunction, flat: AffineFlat, y, tol=NEWTON_TOL):
    """argmin over the flat of D_f(·, y).

    Solves U(∇f(z) − ∇f(y)) = 0 in orthonormal flat coordinates.
    """
    y = _check_target(fn, flat, y)
    gy = fn.gradient(y)
    return _project(
        fn, flat, y,
        lambda z: fn.gradient(z) - gy,
        fn.hessian,
        lambda z0: float(np.linalg.norm(gy)),
        tol,
    )


def forward_bregman_project(fn: LegendreFunction, flat: AffineFlat, y, tol=NEWTON_TOL):
    """argmin over the flat of D_f(y, ·).

    Solves U ∇²f(z)(y − z) = 0 in orthonormal flat coordinates.
    """
    if not fn.allows_forward_projections:
        raise UnsupportedFunctionError(f"{fn.name} is not flagged for forward projections")
    y = _check_target(fn, flat, y)
    return _project(
        fn, flat, y,
        lambda z: fn.hessian(z) @ (y - z),
        lambda z: fn.hessian_directional(z, y - z) - fn.hessian(z),
        lambda z0: float(np.linalg.norm(fn.hessian(z0)) * np.linalg.norm(y)),
        tol,
    )
