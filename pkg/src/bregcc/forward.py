"""Forward Bregman circumcenters and pseudo-circumcenters.

For S = {p_0, ..., p_m} in dom f, y in int dom f is forward equidistant
from S exactly when <∇f(y), p_i − p_0> = η_i with η_i = f(p_i) − f(p_0).
The constraint is linear in w = ∇f(y), so the equidistance set is
∇f*(w_0 + M⊥) with M = span{p_i − p_0}.  The circumcenter additionally
asks y ∈ aff(S), a nonlinear condition handled by damped Newton; the
pseudo-circumcenter asks w ∈ aff(S), which stays linear.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._newton import NEWTON_TOL, damped_newton
from .backward import CC_TOL, verify_point
from .exceptions import DomainError, InputError, InvariantViolation
from .legendre import LegendreFunction, Membership, get_function
from .linalg import (
    AffineFlat,
    Kind,
    SolutionSet,
    affinely_independent,
    as_points,
    empty,
    euclid_project,
    gram,
    gram_formula_point,
    solve_affine_constraints,
)

N_RANDOM_RESTARTS = 8


@dataclass(frozen=True, eq=False)
class ForwardProblem:
    """Validated data for forward queries; ``etas`` holds η_1..η_m."""

    fn: LegendreFunction
    points: np.ndarray
    etas: np.ndarray

    @classmethod
    def build(cls, fn, points):
        fn = get_function(fn)
        pts = as_points(points)
        if fn.dimension is not None and pts.shape[1] != fn.dimension:
            raise InputError(f"points have length {pts.shape[1]}, expected {fn.dimension}")
        for i, p in enumerate(pts):
            if fn.membership(p) is Membership.OUTSIDE:
                raise DomainError(f"point {i} is not in dom {fn.name}", i)
        ref = [-t for t in fn.value_terms(pts[0])]
        etas = np.array([math.fsum(list(fn.value_terms(p)) + ref) for p in pts[1:]])
        return cls(fn, pts, etas)

    @property
    def m(self):
        return self.points.shape[0] - 1

    @property
    def n(self):
        return self.points.shape[1]

    @property
    def normals(self):
        """Rows p_i − p_0, spanning M."""
        return self.points[1:] - self.points[0]

    @property
    def M_flat(self):
        return AffineFlat(np.zeros(self.n), self.normals)

    @property
    def aff_flat(self):
        return AffineFlat.from_points(self.points)


def _as_problem(problem_or_fn, points=None):
    if isinstance(problem_or_fn, ForwardProblem):
        return problem_or_fn
    return ForwardProblem.build(problem_or_fn, points)


def _dual_system(pb):
    return solve_affine_constraints(AffineFlat.whole_space(pb.n), pb.normals, pb.etas)


def forward_E_representative(problem, points=None) -> SolutionSet:
    """Solve <w, p_i − p_0> = η_i and map a solution back by ∇f*.

    ``dual_point`` is the chosen w and ``null_basis`` spans M⊥ in w-space.
    When no tried w lies in int dom f* the result is Empty with status
    "no_interior_representative" and w kept as witness.
    """
    pb = _as_problem(problem, points)
    fn = pb.fn
    wsol = _dual_system(pb)
    if wsol.is_empty:
        return wsol
    cands = [wsol.point]
    if wsol.kind is Kind.FLAT:
        wflat = AffineFlat(wsol.point, wsol.null_basis)
        for hint in (pb.points.mean(axis=0), pb.points[0]):
            if fn.is_interior(hint):
                cands.append(euclid_project(wflat, fn.gradient(hint)))
    for w in cands:
        if fn.conjugate_membership(w) is Membership.INTERIOR:
            y = fn.conjugate_gradient(w)
            return SolutionSet(wsol.kind, y, wsol.null_basis, wsol.residual,
                               in_domain=True, dual_point=w)
    return empty("no_interior_representative", residual=wsol.residual,
                 witness=wsol.point, dual_point=wsol.point,
                 detail="the dual solution is outside int dom f*")


def forward_cc_residual(problem, alpha, points=None):
    """F(α)_i = <∇f(p), p_i − p_0> − η_i at p = p_0 + Σ α_j (p_j − p_0)."""
    pb = _as_problem(problem, points)
    D = pb.normals
    p = pb.points[0] + np.asarray(alpha, dtype=float) @ D
    return D @ pb.fn.gradient(p) - pb.etas


def forward_cc_jacobian(problem, alpha, points=None):
    """J_ij = <∇²f(p)(p_j − p_0), p_i − p_0>."""
    pb = _as_problem(problem, points)
    D = pb.normals
    p = pb.points[0] + np.asarray(alpha, dtype=float) @ D
    return D @ pb.fn.hessian(p) @ D.T


def _starts(pb, to_coords, rng, n_random):
    """Newton starting coordinates: p_0, the classical circumcenter, random."""
    D = pb.normals
    yield to_coords(pb.points[0])
    G = gram(D)
    rhs = 0.5 * (np.sum(pb.points[1:] ** 2, axis=1) - pb.points[0] @ pb.points[0]) - D @ pb.points[0]
    alpha = np.linalg.lstsq(G, rhs, rcond=None)[0]
    yield to_coords(pb.points[0] + alpha @ D)
    for _ in range(n_random):
        yield to_coords(pb.points[0] + rng.uniform(-0.5, 0.5, pb.m) @ D)


def forward_circumcenter(problem, points=None, seed=0, n_random=N_RANDOM_RESTARTS,
                         tol=NEWTON_TOL, cc_tol=CC_TOL) -> SolutionSet:
    """Point of aff(S) ∩ int dom f that is forward equidistant from S.

    Inconsistency of the linear dual system certifies emptiness (status
    "inconsistent").  If every Newton restart fails the result is Empty with
    status "numerical_nonexistence", which is not a proof.
    """
    pb = _as_problem(problem, points)
    fn = pb.fn
    wsol = _dual_system(pb)
    if wsol.is_empty:
        return empty("inconsistent", residual=wsol.residual,
                     detail="the dual linear system has no solution")
    p0 = pb.points[0]
    if pb.m == 0:
        if fn.is_interior(p0):
            return SolutionSet(Kind.UNIQUE, p0.copy(), np.zeros((0, pb.n)), in_domain=True)
        return empty("outside_domain", witness=p0.copy())

    if affinely_independent(pb.points):
        # Newton in α, the coefficients on p_j − p_0.
        B = pb.normals
        target = pb.etas
        to_coords = lambda p: np.linalg.lstsq(B.T, p - p0, rcond=None)[0]  # noqa: E731
    else:
        # Degenerate S: orthonormal coordinates on aff(S) and the reduced
        # system U(∇f(p) − w_0) = 0, which is equivalent once the dual
        # system is consistent.
        B = pb.aff_flat.orthonormal_directions()
        target = B @ wsol.point
        to_coords = lambda p: B @ (p - p0)  # noqa: E731

    def point(c):
        return p0 + c @ B

    def feasible(c):
        return fn.is_interior(point(c))

    centroid = pb.points.mean(axis=0)
    anchor = to_coords(centroid) if fn.is_interior(centroid) else None
    rng = np.random.default_rng(seed)
    scale = float(np.linalg.norm(target))
    best = None
    for c0 in _starts(pb, to_coords, rng, n_random):
        if not feasible(c0):
            if anchor is None:
                continue
            t = 1.0
            for _ in range(60):
                t *= 0.5
                if feasible(anchor + t * (c0 - anchor)):
                    break
            c0 = anchor + t * (c0 - anchor)
            if not feasible(c0):
                continue
        res = damped_newton(
            lambda c: B @ fn.gradient(point(c)) - target,
            lambda c: B @ fn.hessian(point(c)) @ B.T,
            c0, feasible, tol=tol, scale=scale,
        )
        if res.converged:
            p = point(res.x)
            sol = SolutionSet(Kind.UNIQUE, p, np.zeros((0, pb.n)), res.residual,
                              in_domain=True)
            ok, gap = verify_point(fn, pb.points, p, False, cc_tol)
            if not ok:
                sol.status = "unverified"
                sol.detail = f"equidistance gap {gap:.3g}"
            return sol
        if best is None or res.residual < best.residual:
            best = res
    witness = None if best is None else point(best.x)
    resid = np.inf if best is None else best.residual
    return empty("numerical_nonexistence", residual=resid, witness=witness,
                 detail="Newton did not converge from any start")


def _finish_pseudo(pb, w, resid, cc_tol):
    fn = pb.fn
    if fn.conjugate_membership(w) is not Membership.INTERIOR:
        return empty("outside_domain", residual=resid, witness=w, dual_point=w,
                     detail=f"the dual point lies outside int dom {fn.name}*")
    y = fn.conjugate_gradient(w)
    sol = SolutionSet(Kind.UNIQUE, y, np.zeros((0, pb.n)), resid, in_domain=True,
                      dual_point=w)
    ok, gap = verify_point(fn, pb.points, y, False, cc_tol)
    if not ok:
        sol.status = "unverified"
        sol.detail = f"equidistance gap {gap:.3g}"
    return sol


def forward_pseudo_circumcenter(problem, points=None, method="svd",
                                cc_tol=CC_TOL) -> SolutionSet:
    """∇f*(w*) where w* ∈ aff(S) solves <w, p_i − p_0> = η_i.

    ``method`` is "svd" (orthogonal factorization) or "gram" (explicit
    Gram-inverse formula, needs affinely independent S).
    """
    pb = _as_problem(problem, points)
    if method == "gram":
        if not affinely_independent(pb.points):
            raise InputError("the Gram formula needs affinely independent points")
        w = gram_formula_point(pb.points, pb.etas)
        resid = float(np.linalg.norm(pb.normals @ w - pb.etas)) if pb.m else 0.0
    elif method == "svd":
        sol = solve_affine_constraints(pb.aff_flat, pb.normals, pb.etas)
        if sol.is_empty:
            return sol
        if sol.kind is Kind.FLAT:
            raise InvariantViolation("pseudo-circumcenter system returned a flat")
        w, resid = sol.point, sol.residual
    else:
        raise InputError(f"unknown method {method!r}")
    return _finish_pseudo(pb, w, resid, cc_tol)


def forward_pseudo_via_projection(problem, points=None, y=None, cc_tol=CC_TOL) -> SolutionSet:
    """∇f*(P_aff(S)(∇f(y))) for a forward E point y."""
    pb = _as_problem(problem, points)
    fn = pb.fn
    if y is None:
        esol = forward_E_representative(pb)
        if esol.is_empty:
            return esol
        y = esol.point
    y = fn._check(y, "y")
    w = euclid_project(pb.aff_flat, fn.gradient(y))
    resid = float(np.linalg.norm(pb.normals @ w - pb.etas)) if pb.m else 0.0
    return _finish_pseudo(pb, w, resid, cc_tol)
