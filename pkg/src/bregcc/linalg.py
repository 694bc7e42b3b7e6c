"""Small dense linear algebra on affine flats.

Solves are done with an SVD so rank decisions are explicit.  The Gram
inverse formula is kept separately in :func:`gram_formula_point` as a
literal reference path for tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import InputError

RANK_TOL = 1e-10
RESID_TOL = 1e-8


class Kind(str, Enum):
    EMPTY = "Empty"
    UNIQUE = "UniquePoint"
    FLAT = "Flat"


def as_points(points, name="points"):
    """Coerce to a float array of shape (k, n) with k >= 1."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        # a flat list is read as scalar points in R^1
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise InputError(f"{name} must be a nonempty list of equal-length vectors")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class AffineFlat:
    """The set {base + Σ c_j d_j}; ``directions`` has shape (k, n) and may be rank deficient."""

    base: np.ndarray
    directions: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float).reshape(-1)
        dirs = np.asarray(self.directions, dtype=float)
        if dirs.size == 0:
            dirs = np.zeros((0, base.shape[0]))
        dirs = np.atleast_2d(dirs)
        if dirs.shape[1] != base.shape[0]:
            raise InputError(
                f"directions have length {dirs.shape[1]}, base has {base.shape[0]}"
            )
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "directions", dirs)

    @classmethod
    def from_points(cls, points):
        """aff of the given points, based at the first one."""
        pts = as_points(points)
        return cls(pts[0], pts[1:] - pts[0])

    @classmethod
    def whole_space(cls, n):
        return cls(np.zeros(n), np.eye(n))

    @property
    def ambient_dim(self):
        return self.base.shape[0]

    def orthonormal_directions(self, rank_tol=RANK_TOL):
        """Rows form an orthonormal basis of the direction space."""
        return _row_basis(self.directions, rank_tol)

    def rank(self, rank_tol=RANK_TOL):
        return self.orthonormal_directions(rank_tol).shape[0]

    def contains(self, x, tol=1e-10):
        x = np.asarray(x, dtype=float)
        return np.linalg.norm(x - euclid_project(self, x)) <= tol * (1 + np.linalg.norm(x))


@dataclass
class SolutionSet:
    """Result of a circumcenter-type query.

    ``point`` is the particular solution (None when Empty).  ``null_basis``
    has orthonormal rows and is empty unless ``kind`` is Flat.  ``status``
    refines the outcome: "ok", "inconsistent", "outside_domain",
    "numerical_nonexistence", "no_interior_representative", "unverified".
    ``witness`` keeps a computed point that was rejected (for instance one
    outside dom f).  ``dual_point`` holds the gradient-space solution for
    forward queries.
    """

    kind: Kind
    point: Optional[np.ndarray] = None
    null_basis: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    residual: float = 0.0
    status: str = "ok"
    in_domain: Optional[bool] = None
    witness: Optional[np.ndarray] = None
    dual_point: Optional[np.ndarray] = None
    detail: str = ""

    @property
    def is_empty(self):
        return self.kind is Kind.EMPTY

    @property
    def is_unique(self):
        return self.kind is Kind.UNIQUE

    def __repr__(self):
        pt = None if self.point is None else np.array2string(self.point, precision=6)
        return f"SolutionSet({self.kind.value}, point={pt}, status={self.status!r})"


def empty(status="inconsistent", residual=0.0, witness=None, detail="", dual_point=None):
    return SolutionSet(
        Kind.EMPTY, None, np.zeros((0, 0)), residual, status,
        witness=witness, detail=detail, dual_point=dual_point,
    )


def _row_basis(vectors, rank_tol=RANK_TOL):
    """Orthonormal rows spanning the row space, with a relative cutoff.

    Singular values equal to the cutoff count as zero.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    n = V.shape[1]
    if V.shape[0] == 0:
        return np.zeros((0, n))
    _, s, vt = np.linalg.svd(V, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((0, n))
    r = int(np.sum(s > rank_tol * s[0]))
    return vt[:r]


def gram(vectors):
    """Matrix of pairwise inner products."""
    V = np.asarray(vectors, dtype=float)
    if V.size == 0:
        raise InputError("gram needs at least one vector")
    V = np.atleast_2d(V)
    return V @ V.T


def affinely_independent(points, rank_tol=RANK_TOL):
    pts = as_points(points)
    if pts.shape[0] == 1:
        return True
    diffs = pts[1:] - pts[0]
    if diffs.shape[0] > diffs.shape[1]:
        return False
    return _row_basis(diffs, rank_tol).shape[0] == diffs.shape[0]


def euclid_project(flat: AffineFlat, x):
    """Nearest point of the flat to x in the Euclidean norm."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != flat.ambient_dim:
        raise InputError("point and flat dimensions differ")
    U = flat.orthonormal_directions()
    return flat.base + ((x - flat.base) @ U.T) @ U


def solve_affine_constraints(flat: AffineFlat, normals, rhs, rank_tol=RANK_TOL,
                             resid_tol=RESID_TOL) -> SolutionSet:
    """All x on the flat with <x, normals[i]> = rhs[i].

    The flat is parameterized as base + U^T c with U orthonormal, and the
    reduced system is solved by truncated SVD.  A least-squares residual
    above ``resid_tol * (1 + |b|)`` means no solution.
    """
    n = flat.ambient_dim
    N = np.asarray(normals, dtype=float)
    r = np.asarray(rhs, dtype=float).reshape(-1)
    if N.size == 0:
        N = np.zeros((0, n))
    N = np.atleast_2d(N)
    if N.shape[0] != r.shape[0]:
        raise InputError(f"{N.shape[0]} normals but {r.shape[0]} right-hand sides")
    if N.shape[1] != n:
        raise InputError(f"normals have length {N.shape[1]}, flat lives in R^{n}")

    U = flat.orthonormal_directions(rank_tol)
    b = r - N @ flat.base
    A = N @ U.T
    if U.shape[0] == 0 or A.shape[0] == 0:
        c = np.zeros(U.shape[0])
        null_c = np.eye(U.shape[0])
    else:
        u_, s, vt = np.linalg.svd(A, full_matrices=True)
        k = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
        c = vt[:k].T @ ((u_[:, :k].T @ b) / s[:k])
        null_c = vt[k:]
    res = float(np.linalg.norm(A @ c - b)) if A.shape[0] else 0.0
    if res > resid_tol * (1.0 + np.linalg.norm(b)):
        return empty("inconsistent", residual=res)
    x = flat.base + c @ U
    residual = float(np.linalg.norm(N @ x - r)) if N.shape[0] else 0.0
    if null_c.shape[0] == 0:
        return SolutionSet(Kind.UNIQUE, x, np.zeros((0, n)), residual)
    return SolutionSet(Kind.FLAT, x, null_c @ U, residual)


def gram_formula_point(z, lam):
    """Literal Gram-inverse formula for p in aff(z) with <p, z_i − z_0> = lam_i.

    p = z_0 + Σ α_j (z_j − z_0) with α = G^{-1} (lam − <z_0, z_i − z_0>)_i,
    where G is the Gram matrix of the differences.  Requires affinely
    independent z.
    """
    z = as_points(z, "z")
    lam = np.asarray(lam, dtype=float).reshape(-1)
    D = z[1:] - z[0]
    if D.shape[0] != lam.shape[0]:
        raise InputError("need one right-hand side per difference vector")
    if D.shape[0] == 0:
        return z[0].copy()
    alpha = np.linalg.inv(gram(D)) @ (lam - D @ z[0])
    return z[0] + alpha @ D


def classical_circumcenter(points, rank_tol=RANK_TOL) -> SolutionSet:
    """Euclidean circumcenter within aff(points), via the linear system
    <x, q_i − q_0> = (|q_i|² − |q_0|²)/2."""
    pts = as_points(points)
    N = pts[1:] - pts[0]
    rhs = 0.5 * (np.sum(pts[1:] ** 2, axis=1) - np.sum(pts[0] ** 2))
    sol = solve_affine_constraints(AffineFlat.from_points(pts), N, rhs, rank_tol)
    if not affinely_independent(pts, rank_tol):
        sol.detail = "points are affinely dependent"
    return sol
