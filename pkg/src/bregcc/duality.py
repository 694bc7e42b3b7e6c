"""Cross-checks between backward objects under f and forward objects under f*.

Each check computes both sides independently and compares them.  Status is
"Match", "Mismatch" or "Inapplicable"; the last one is only used when a
computed point sits on the boundary of dom f, where the correspondence
says nothing, and the offending point is kept as ``witness``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .backward import BackwardProblem, backward_E_representative, backward_pseudo_circumcenter
from .exceptions import InvariantViolation
from .forward import (
    ForwardProblem,
    forward_circumcenter,
    forward_E_representative,
    forward_pseudo_circumcenter,
)
from .legendre import Membership, get_function
from .linalg import Kind, SolutionSet, as_points, empty

DUAL_TOL = 1e-7


@dataclass
class DualityReport:
    lhs: SolutionSet
    rhs: SolutionSet
    max_deviation: float
    status: str
    witness: Optional[np.ndarray] = None
    detail: str = ""


def _mapped_gradients(fn, points):
    """∇f(S), checking that no two points collapse."""
    pts = as_points(points)
    grads = np.array([fn.gradient(q) for q in pts])
    if len(np.unique(pts, axis=0)) != len(np.unique(grads, axis=0)):
        raise InvariantViolation("the gradient map merged distinct points")
    return pts, grads


def _map_solution(sol, mapper):
    if sol.is_empty:
        return sol
    return SolutionSet(sol.kind, mapper(sol.point), sol.null_basis, sol.residual,
                       sol.status, sol.in_domain, sol.witness, sol.dual_point, sol.detail)


def check_pseudo_duality(fn, points, dual_tol=DUAL_TOL) -> DualityReport:
    """Compare the backward pseudo-circumcenter under f with
    ∇f* of the forward pseudo-circumcenter under f* on ∇f(S).

    Both sides empty counts as a Match with deviation 0.
    """
    fn = get_function(fn)
    g = fn.conjugate()
    pts, grads = _mapped_gradients(fn, points)
    lhs = backward_pseudo_circumcenter(BackwardProblem.build(fn, pts))
    raw = forward_pseudo_circumcenter(ForwardProblem.build(g, grads))
    rhs = _map_solution(raw, fn.conjugate_gradient)
    if lhs.is_unique and fn.membership(lhs.point) is Membership.BOUNDARY:
        return DualityReport(lhs, rhs, np.nan, "Inapplicable", witness=lhs.point.copy(),
                             detail="the backward pseudo-circumcenter lies on bd dom f")
    if lhs.is_empty and rhs.is_empty:
        return DualityReport(lhs, rhs, 0.0, "Match", detail="both sides empty")
    if lhs.is_unique and rhs.is_unique:
        dev = float(np.max(np.abs(lhs.point - rhs.point)))
        return DualityReport(lhs, rhs, dev, "Match" if dev <= dual_tol else "Mismatch")
    return DualityReport(lhs, rhs, np.inf, "Mismatch", detail="only one side is nonempty")


def _flat_samples(sol, n_samples, rng):
    if sol.kind is Kind.UNIQUE:
        return [sol.point]
    out = [sol.point]
    for _ in range(n_samples):
        out.append(sol.point + rng.uniform(-0.5, 0.5, sol.null_basis.shape[0]) @ sol.null_basis)
    return out


def check_E_duality(fn, points, n_samples=5, seed=0, dual_tol=DUAL_TOL) -> DualityReport:
    """Sampled check of both equidistance-set correspondences.

    (i) backward E under f, restricted to int dom f, against ∇f* of the
    forward E set under f* on ∇f(S).  (ii) forward E under f against ∇f*
    of the backward E set under f* on ∇f(S).  Sampled points of each side
    are pushed to the other and tested against its linear constraints;
    ``max_deviation`` is the largest constraint residual seen.  The reported
    lhs/rhs are the sets of (i).
    """
    fn = get_function(fn)
    g = fn.conjugate()
    pts, grads = _mapped_gradients(fn, points)
    rng = np.random.default_rng(seed)

    bp = BackwardProblem.build(fn, pts)
    lhs = backward_E_representative(bp)
    fp_dual = ForwardProblem.build(g, grads)
    rhs_raw = forward_E_representative(fp_dual)
    # ∇f* undoes the ∇f = ∇g* step, so the mapped set is the dual solution flat
    rhs = rhs_raw
    if not rhs_raw.is_empty:
        rhs = SolutionSet(rhs_raw.kind, rhs_raw.dual_point.copy(), rhs_raw.null_basis,
                          rhs_raw.residual, in_domain=True, dual_point=rhs_raw.point)

    devs = []
    lhs_interior = []
    if not lhs.is_empty:
        lhs_interior = [x for x in _flat_samples(lhs, n_samples, rng) if fn.is_interior(x)]
    for x in lhs_interior:
        devs.append(np.max(np.abs(fp_dual.normals @ g.gradient(fn.gradient(x)) - fp_dual.etas),
                           initial=0.0))
    if not rhs.is_empty:
        for x in _flat_samples(rhs, n_samples, rng):
            if fn.is_interior(x):
                devs.append(np.max(np.abs(bp.normals @ x - bp.betas), initial=0.0))

    # (ii) forward E under f against the backward E of ∇f(S) under f*
    fp = ForwardProblem.build(fn, pts)
    fwd = forward_E_representative(fp)
    bp_dual = BackwardProblem.build(g, grads)
    if not fwd.is_empty:
        devs.append(np.max(np.abs(bp_dual.normals @ fwd.dual_point - bp_dual.betas), initial=0.0))
    bwd_dual = backward_E_representative(bp_dual)
    if not bwd_dual.is_empty:
        for w in _flat_samples(bwd_dual, n_samples, rng):
            if g.is_interior(w):
                y = g.gradient(w)
                devs.append(np.max(np.abs(fp.normals @ fn.gradient(y) - fp.etas), initial=0.0))

    if lhs.is_empty and rhs.is_empty:
        return DualityReport(lhs, rhs, 0.0, "Match", detail="both sides empty")
    if not lhs.is_empty and not lhs_interior and rhs.is_empty:
        return DualityReport(lhs, rhs, np.nan, "Inapplicable", witness=lhs.point.copy(),
                             detail="no sampled backward E point lies in int dom f")
    if lhs.is_empty != rhs.is_empty:
        return DualityReport(lhs, rhs, np.inf, "Mismatch", detail="only one side is nonempty")
    dev = float(max(devs)) if devs else 0.0
    return DualityReport(lhs, rhs, dev, "Match" if dev <= dual_tol else "Mismatch")


def alternative_operators(fn, points, seed=0):
    """The two mixed operators, each computed through f*.

    Returns (∇f*(forward circumcenter under f* of ∇f(S)),
    backward pseudo-circumcenter under f* of ∇f(S)).
    """
    fn = get_function(fn)
    g = fn.conjugate()
    pts, grads = _mapped_gradients(fn, points)
    if any(not fn.is_interior(q) for q in pts):
        raise InvariantViolation("alternative operators need S inside int dom f")
    first = forward_circumcenter(ForwardProblem.build(g, grads), seed=seed)
    first = _map_solution(first, fn.conjugate_gradient)
    if first.kind is Kind.UNIQUE and not fn.is_interior(first.point):
        first = empty("outside_domain", witness=first.point)
    second = backward_pseudo_circumcenter(BackwardProblem.build(g, grads))
    return first, second
