import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from bregcc.exceptions import InputError
from bregcc.linalg import (
    AffineFlat,
    Kind,
    affinely_independent,
    classical_circumcenter,
    euclid_project,
    gram,
    gram_formula_point,
    solve_affine_constraints,
)

LN2 = math.log(2)


def test_gram_examples():
    assert_allclose(gram([(1, 0), (0, 1)]), np.eye(2))
    assert_allclose(gram([(1, 1)]), [[2.0]])


def test_gram_of_entropy_gradient_differences():
    # ln of the points (1,1,1), (1,2,1), (1,1,2), differenced against the first
    logs = np.log(np.array([(1, 1, 1), (1, 2, 1), (1, 1, 2)], dtype=float))
    G = gram(logs[1:] - logs[0])
    assert_allclose(G, [[LN2**2, 0], [0, LN2**2]], atol=1e-16)


def test_gram_empty_is_error():
    with pytest.raises(InputError):
        gram([])


def test_affinely_independent_examples():
    assert not affinely_independent([(1, 2, 1), (0.5, 1.5, 0.5), (1.5, 2.5, 1.5)])
    assert affinely_independent([(1, 1, 1), (1, 2, 1), (1, 1, 2)])
    assert affinely_independent([(3, 4)])
    # more points than the dimension allows
    assert not affinely_independent([(0, 0), (1, 0), (0, 1), (1, 1)])


def test_solve_classical_system():
    S = [(1, 1, 1), (1, 2, 1), (1, 1, 2)]
    sol = solve_affine_constraints(AffineFlat.from_points(S), [(0, 1, 0), (0, 0, 1)], [1.5, 1.5])
    assert sol.kind is Kind.UNIQUE
    assert_allclose(sol.point, [1, 1.5, 1.5], atol=1e-15)
    assert sol.null_basis.shape[0] == 0


def test_solve_without_constraints_is_whole_flat():
    sol = solve_affine_constraints(AffineFlat.whole_space(2), [], [])
    assert sol.kind is Kind.FLAT
    assert_allclose(sol.null_basis @ sol.null_basis.T, np.eye(2), atol=1e-15)


def test_solve_inconsistent_line():
    line = AffineFlat.from_points([(0, 0), (1, 0)])
    sol = solve_affine_constraints(line, [(0, 1)], [1.0])
    assert sol.kind is Kind.EMPTY
    assert sol.status == "inconsistent"


def test_solve_on_a_point_flat():
    pt = AffineFlat([1.0, 2.0], [])
    assert solve_affine_constraints(pt, [(1, 0)], [1.0]).kind is Kind.UNIQUE
    assert solve_affine_constraints(pt, [(1, 0)], [2.0]).kind is Kind.EMPTY


def test_solve_redundant_directions_and_constraints():
    # rank-deficient direction list and a duplicated constraint
    flat = AffineFlat([0, 0, 0], [(1, 0, 0), (2, 0, 0), (0, 1, 0)])
    sol = solve_affine_constraints(flat, [(1, 0, 0), (2, 0, 0)], [1.0, 2.0])
    assert sol.kind is Kind.FLAT
    assert_allclose(sol.point, [1, 0, 0], atol=1e-15)
    assert_allclose(np.abs(sol.null_basis), [[0, 1, 0]], atol=1e-15)


def test_solve_dimension_checks():
    flat = AffineFlat.whole_space(2)
    with pytest.raises(InputError):
        solve_affine_constraints(flat, [(1, 0, 0)], [1.0])
    with pytest.raises(InputError):
        solve_affine_constraints(flat, [(1, 0)], [1.0, 2.0])
    with pytest.raises(InputError):
        AffineFlat([0, 0], [(1, 0, 0)])


def test_euclid_project_examples():
    assert_allclose(euclid_project(AffineFlat([0, 0], [(1, 0)]), [3, 4]), [3, 0])
    plane = AffineFlat([1, 0, 0], [(0, 1, 0), (0, 0, 1)])
    assert_allclose(euclid_project(plane, [0, 2, 3]), [1, 2, 3])


def test_classical_circumcenter_dependent_points():
    sol = classical_circumcenter([(1, 2, 1), (0.5, 1.5, 0.5), (1.5, 2.5, 1.5)])
    assert sol.kind is Kind.EMPTY
    assert "dependent" in sol.detail


def test_gram_formula_singleton():
    assert_allclose(gram_formula_point([(2.0, 3.0)], []), [2.0, 3.0])


flats = st.tuples(st.integers(1, 5), st.integers(0, 4), st.integers(0, 2**32 - 1))


@settings(max_examples=80, deadline=None)
@given(flats)
def test_projection_orthogonal_and_idempotent(params):
    n, k, seed = params
    rng = np.random.default_rng(seed)
    flat = AffineFlat(rng.normal(size=n), rng.normal(size=(k, n)))
    x = rng.normal(size=n) * 3
    p = euclid_project(flat, x)
    if k:
        assert np.max(np.abs(flat.directions @ (x - p))) <= 1e-10 * (1 + np.linalg.norm(x))
    assert np.linalg.norm(euclid_project(flat, p) - p) <= 1e-12 * (1 + np.linalg.norm(p))
    assert flat.contains(p)


@settings(max_examples=80, deadline=None)
@given(flats, st.integers(0, 4))
def test_solutions_satisfy_constraints(params, m):
    n, k, seed = params
    rng = np.random.default_rng(seed)
    flat = AffineFlat(rng.normal(size=n), rng.normal(size=(k, n)))
    N = rng.normal(size=(m, n))
    # right-hand sides taken from a point on the flat so the system is consistent
    x0 = flat.base + (rng.normal(size=k) @ flat.directions if k else 0)
    rhs = N @ x0
    sol = solve_affine_constraints(flat, N, rhs)
    assert sol.kind is not Kind.EMPTY
    tol_lin = 1e-10 * (1 + np.linalg.norm(rhs))
    samples = [sol.point]
    if sol.kind is Kind.FLAT:
        assert_allclose(sol.null_basis @ sol.null_basis.T, np.eye(sol.null_basis.shape[0]), atol=1e-12)
        samples += [sol.point + rng.normal(size=sol.null_basis.shape[0]) @ sol.null_basis for _ in range(3)]
    for x in samples:
        if m:
            assert np.linalg.norm(N @ x - rhs) <= tol_lin * 10
        assert flat.contains(x, tol=1e-9)


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_solver_matches_gram_formula(n, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, n + 1))
    z = rng.normal(size=(m + 1, n))
    if np.linalg.svd(z[1:] - z[0], compute_uv=False)[-1] < 0.1:
        return
    lam = rng.normal(size=m)
    sol = solve_affine_constraints(AffineFlat.from_points(z), z[1:] - z[0], lam)
    assert sol.kind is Kind.UNIQUE
    p = gram_formula_point(z, lam)
    assert np.max(np.abs(sol.point - p)) <= 1e-10 * (1 + np.max(np.abs(p)))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_gram_positive_definite(k, seed):
    rng = np.random.default_rng(seed)
    V = rng.normal(size=(k, k + 2))
    assert np.linalg.eigvalsh(gram(V)).min() > 1e-10 * np.linalg.norm(V) ** 2


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_classical_circumcenter_is_equidistant(n, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, n + 1))
    S = rng.normal(size=(m + 1, n))
    if np.linalg.svd(S[1:] - S[0], compute_uv=False)[-1] < 0.1:
        return
    c = classical_circumcenter(S).point
    r = np.linalg.norm(S - c, axis=1)
    assert np.ptp(r) <= 1e-9 * (1 + r.max())
