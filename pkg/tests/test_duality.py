import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from bregcc.duality import alternative_operators, check_E_duality, check_pseudo_duality
from bregcc.exceptions import DomainError, InvariantViolation
from bregcc.legendre import get_function
from bregcc.linalg import affinely_independent
from sampling import random_independent_set

LN2 = math.log(2)
S1 = [(1, 1, 1), (1, 2, 1), (1, 1, 2)]
S2 = [(0.25, 0.25, 0.25), (0.25, 0.5, 0.25), (0.25, 0.25, 0.5)]
S_BURG = [(1, 2, 1), (0.5, 1.5, 0.5), (1.5, 2.5, 1.5)]


def test_boundary_point_is_inapplicable():
    rep = check_pseudo_duality("negative_entropy", S1)
    assert rep.status == "Inapplicable"
    assert_allclose(rep.witness, [0, 1 / LN2, 1 / LN2], atol=1e-12)
    assert np.isnan(rep.max_deviation)


def test_energy_matches():
    rep = check_pseudo_duality("energy", [(0, 0), (2, 0), (0, 2)])
    assert rep.status == "Match"
    assert rep.max_deviation <= 1e-12
    assert_allclose(rep.lhs.point, [1, 1], atol=1e-12)


def test_both_sides_empty_is_a_match():
    rep = check_pseudo_duality("burg_entropy", S_BURG)
    assert rep.status == "Match"
    assert rep.max_deviation == 0.0
    assert rep.lhs.is_empty and rep.rhs.is_empty


def test_fermi_dirac_example_both_empty():
    rep = check_pseudo_duality("fermi_dirac", S2)
    assert rep.status == "Match"
    assert rep.lhs.status == rep.rhs.status == "outside_domain"


@pytest.mark.parametrize("name", ["burg_entropy", "neg_sqrt"])
def test_open_domain_instances_match(name):
    rng = np.random.default_rng(0)
    unique = 0
    for _ in range(60):
        n = int(rng.integers(2, 5))
        q = random_independent_set(rng, name, n, int(rng.integers(1, n + 1)))
        fn = get_function(name)
        rep = check_pseudo_duality(fn, q)
        assert rep.status == "Match", rep.detail
        if rep.lhs.is_unique:
            unique += 1
            assert rep.max_deviation <= 1e-7
    assert unique >= 10


def test_E_duality_example():
    rep = check_E_duality("negative_entropy", S1)
    assert rep.status == "Match"
    assert rep.max_deviation <= 1e-12


def test_E_duality_without_interior_samples():
    rep = check_E_duality("burg_entropy", S_BURG)
    assert rep.status == "Inapplicable"
    assert rep.witness is not None


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["negative_entropy", "fermi_dirac", "burg_entropy", "energy"]),
       st.integers(0, 2**32 - 1))
def test_E_duality_never_mismatches(name, seed):
    rng = np.random.default_rng(seed)
    q = random_independent_set(rng, name, 3, int(rng.integers(1, 4)))
    rep = check_E_duality(name, q, seed=seed % 1000)
    assert rep.status in ("Match", "Inapplicable")
    if rep.status == "Match":
        assert rep.max_deviation <= 1e-7


def test_alternative_operators_example():
    first, second = alternative_operators("negative_entropy", S1)
    assert_allclose(first.point, [1, 1 / LN2, 1 / LN2], atol=1e-9)
    assert_allclose(second.point, [1, 2 * LN2 - 1, 2 * LN2 - 1], atol=1e-12)


def test_alternative_operators_need_interior_points():
    with pytest.raises(DomainError):
        alternative_operators("negative_entropy", [(0, 1), (1, 1)])


def test_gradient_collapse_is_detected(monkeypatch):
    fn = get_function("energy")
    monkeypatch.setattr(fn, "gradient", lambda x: np.zeros(2))
    with pytest.raises(InvariantViolation):
        check_pseudo_duality(fn, [(0, 0), (1, 0)])


def test_gradients_of_random_sets_stay_independent():
    # sanity check of the sampler used by the Burg acceptance suite
    rng = np.random.default_rng(1)
    fn = get_function("burg_entropy")
    q = random_independent_set(rng, "burg_entropy", 3, 2)
    assert affinely_independent([fn.gradient(x) for x in q])
