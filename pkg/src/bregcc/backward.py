"""Backward Bregman circumcenters and pseudo-circumcenters.

For S = {q_0, ..., q_m} in int dom f, x is backward equidistant from S
exactly when <∇f(q_i) − ∇f(q_0), x> = β_i for i = 1..m, where
β_i = <∇f(q_i), q_i> − f(q_i) − <∇f(q_0), q_0> + f(q_0).  The circumcenter
restricts this linear system to aff(S); the pseudo-circumcenter restricts it
to aff(∇f(S)).  Both are then intersected with dom f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bregman import bregman_distance, forward_bregman_project
from .exceptions import DomainError, InputError, InvariantViolation, UnsupportedFunctionError
from .legendre import LegendreFunction, Membership, get_function
from .linalg import (
    AffineFlat,
    Kind,
    SolutionSet,
    affinely_independent,
    as_points,
    empty,
    euclid_project,
    gram_formula_point,
    solve_affine_constraints,
)

CC_TOL = 1e-8


def _fenchel_term(fn, x, g):
    """Pieces of <∇f(x), x> − f(x), ready for math.fsum."""
    return list(g * x) + list(-fn.value_terms(x))


def equidistance_gap(fn, points, x, backward=True):
    """Largest |D_i − D_0| and largest D_i over the points.

    Backward distances are D_f(x, q_i); forward ones are D_f(q_i, x).
    """
    if backward:
        d = np.array([bregman_distance(fn, x, q) for q in points])
    else:
        d = np.array([bregman_distance(fn, q, x) for q in points])
    if not np.all(np.isfinite(d)):
        return np.inf, np.inf
    return float(np.max(np.abs(d - d[0]))), float(np.max(d))


def verify_point(fn, points, x, backward=True, cc_tol=CC_TOL):
    """True when x is equidistant to within cc_tol * (1 + max D)."""
    gap, dmax = equidistance_gap(fn, points, x, backward)
    return gap <= cc_tol * (1.0 + dmax), gap


@dataclass(frozen=True, eq=False)
class BackwardProblem:
    """Validated data for backward queries on a point set.

    ``normals[i-1] = ∇f(q_i) − ∇f(q_0)`` span the subspace L and ``betas``
    holds β_1..β_m computed with compensated summation.
    """

    fn: LegendreFunction
    points: np.ndarray
    gradients: np.ndarray
    betas: np.ndarray

    @classmethod
    def build(cls, fn, points):
        fn = get_function(fn)
        pts = as_points(points)
        if fn.dimension is not None and pts.shape[1] != fn.dimension:
            raise InputError(f"points have length {pts.shape[1]}, expected {fn.dimension}")
        for i, q in enumerate(pts):
            if fn.membership(q) is not Membership.INTERIOR:
                raise DomainError(f"point {i} is not in int dom {fn.name}", i)
        grads = np.array([fn.gradient(q) for q in pts])
        ref = _fenchel_term(fn, pts[0], grads[0])
        betas = np.array([
            math.fsum(_fenchel_term(fn, q, g) + [-t for t in ref])
            for q, g in zip(pts[1:], grads[1:])
        ])
        return cls(fn, pts, grads, betas)

    @property
    def m(self):
        return self.points.shape[0] - 1

    @property
    def n(self):
        return self.points.shape[1]

    @property
    def normals(self):
        return self.gradients[1:] - self.gradients[0]

    @property
    def L_flat(self):
        """span{∇f(q_i) − ∇f(q_0)} as a flat through the origin."""
        return AffineFlat(np.zeros(self.n), self.normals)

    @property
    def aff_flat(self):
        return AffineFlat.from_points(self.points)

    @property
    def gradient_flat(self):
        return AffineFlat.from_points(self.gradients)


def _as_problem(problem_or_fn, points=None):
    if isinstance(problem_or_fn, BackwardProblem):
        return problem_or_fn
    return BackwardProblem.build(problem_or_fn, points)


def backward_cc_system(problem):
    """The m×m system A α = B whose solutions give x = q_0 + Σ α_j (q_j − q_0).

    A_ij = <∇f(q_i) − ∇f(q_0), q_j − q_0>, B_i = β_i − <∇f(q_i) − ∇f(q_0), q_0>.
    """
    N = problem.normals
    D = problem.points[1:] - problem.points[0]
    return N @ D.T, problem.betas - N @ problem.points[0]


def backward_E_representative(problem, points=None) -> SolutionSet:
    """Solve the equidistance constraints over the whole space.

    The set is not intersected with dom f; ``in_domain`` reports where the
    particular (minimal-norm) solution lies.
    """
    pb = _as_problem(problem, points)
    sol = solve_affine_constraints(AffineFlat.whole_space(pb.n), pb.normals, pb.betas)
    if not sol.is_empty:
        sol.in_domain = pb.fn.in_domain(sol.point)
    return sol


def _finalize(pb, sol, cc_tol):
    """Apply the dom f filter and the post-hoc equidistance check."""
    if sol.is_empty:
        return sol
    fn = pb.fn
    inside = fn.in_domain(sol.point)
    if sol.kind is Kind.UNIQUE and not inside:
        return empty(
            "outside_domain", residual=sol.residual, witness=sol.point,
            detail=f"the solution of the linear system lies outside dom {fn.name}",
        )
    sol.in_domain = inside
    if inside:
        ok, gap = verify_point(fn, pb.points, sol.point, True, cc_tol)
        if not ok:
            sol.status = "unverified"
            sol.detail = f"equidistance gap {gap:.3g}"
    else:
        sol.detail = "particular point lies outside dom f; the flat is not intersected"
    return sol


def backward_circumcenter(problem, points=None, cc_tol=CC_TOL) -> SolutionSet:
    """Points of aff(S) ∩ dom f that are backward equidistant from S."""
    pb = _as_problem(problem, points)
    sol = solve_affine_constraints(pb.aff_flat, pb.normals, pb.betas)
    return _finalize(pb, sol, cc_tol)


def backward_pseudo_circumcenter(problem, points=None, method="svd",
                                 cc_tol=CC_TOL) -> SolutionSet:
    """Point of aff(∇f(S)) ∩ dom f that is backward equidistant from S.

    ``method="svd"`` uses the orthogonal-factorization solver and
    ``method="gram"`` the explicit Gram-inverse formula (requires affinely
    independent gradients).  The answer is empty or a single point.
    """
    pb = _as_problem(problem, points)
    if method == "gram":
        if not affinely_independent(pb.gradients):
            raise InputError("the Gram formula needs affinely independent gradients")
        p = gram_formula_point(pb.gradients, pb.betas)
        resid = float(np.linalg.norm(pb.normals @ p - pb.betas)) if pb.m else 0.0
        sol = SolutionSet(Kind.UNIQUE, p, np.zeros((0, pb.n)), resid)
    elif method == "svd":
        sol = solve_affine_constraints(pb.gradient_flat, pb.normals, pb.betas)
    else:
        raise InputError(f"unknown method {method!r}")
    if sol.kind is Kind.FLAT:
        raise InvariantViolation("pseudo-circumcenter system returned a flat")
    return _finalize(pb, sol, cc_tol)


def backward_pseudo_via_projection(problem, points=None, e_point=None,
                                   cc_tol=CC_TOL) -> SolutionSet:
    """Pseudo-circumcenter as the Euclidean projection of an E point onto aff(∇f(S))."""
    pb = _as_problem(problem, points)
    if e_point is None:
        esol = backward_E_representative(pb)
        if esol.is_empty:
            return esol
        e_point = esol.point
    p = euclid_project(pb.gradient_flat, np.asarray(e_point, dtype=float))
    resid = float(np.linalg.norm(pb.normals @ p - pb.betas)) if pb.m else 0.0
    sol = SolutionSet(Kind.UNIQUE, p, np.zeros((0, pb.n)), resid)
    return _finalize(pb, sol, cc_tol)


def interior_e_point(problem, points=None):
    """A point of the backward E set inside int dom f, or None.

    Tries the projection of the centroid of S onto the solution flat, then
    the minimal-norm solution.
    """
    pb = _as_problem(problem, points)
    esol = backward_E_representative(pb)
    if esol.is_empty:
        return None
    cands = []
    if esol.kind is Kind.FLAT:
        flat = AffineFlat(esol.point, esol.null_basis)
        cands.append(euclid_project(flat, pb.points.mean(axis=0)))
    cands.append(esol.point)
    for c in cands:
        if pb.fn.is_interior(c):
            return c
    return None


def backward_cc_via_forward_projection(problem, points=None, e_point=None,
                                       cc_tol=CC_TOL) -> SolutionSet:
    """Forward Bregman projection of an interior E point onto aff(S).

    The result is equidistance-checked; a failed check leaves the point in
    place with status "unverified".
    """
    pb = _as_problem(problem, points)
    fn = pb.fn
    if not fn.allows_forward_projections:
        raise UnsupportedFunctionError(f"{fn.name} is not flagged for forward projections")
    if e_point is None:
        e_point = interior_e_point(pb)
        if e_point is None:
            return empty("no_interior_representative",
                         detail="no point of the E set inside int dom f was found")
    e_point = fn._check(e_point, "e_point")
    fn._require_interior(e_point)
    if pb.m:
        r = pb.normals @ e_point - pb.betas
        if np.linalg.norm(r) > 1e-8 * (1 + np.linalg.norm(pb.betas)):
            raise InputError("e_point does not satisfy the equidistance constraints")
    proj = forward_bregman_project(fn, pb.aff_flat, e_point)
    sol = SolutionSet(Kind.UNIQUE, proj.point, np.zeros((0, pb.n)), proj.residual,
                      in_domain=True)
    ok, gap = verify_point(fn, pb.points, proj.point, True, cc_tol)
    if not ok:
        sol.status = "unverified"
        sol.detail = f"equidistance gap {gap:.3g}"
    return sol
