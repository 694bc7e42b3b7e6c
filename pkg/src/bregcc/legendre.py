"""Legendre functions: the separable catalog, their conjugates, and a registry.

Every function exposes its value, gradient, Hessian, conjugate gradient and a
three-way domain classifier.  Catalog members are separable, so they are
built from scalar callables that broadcast over numpy arrays.

The interior of a domain is taken with an absolute margin ``EPS_DOM``; a
point closer than that to an active bound counts as ``Boundary`` even when
the bound itself is open.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np
from scipy import special

from .exceptions import DomainError, InputError, UnsupportedFunctionError

EPS_DOM = 1e-12


class Membership(str, Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


_CODES = (Membership.INTERIOR, Membership.BOUNDARY, Membership.OUTSIDE)


@dataclass(frozen=True)
class Interval:
    """Per-coordinate domain of a separable function."""

    lo: float = -np.inf
    hi: float = np.inf
    lo_closed: bool = False
    hi_closed: bool = False

    @property
    def is_full_line(self):
        return np.isneginf(self.lo) and np.isposinf(self.hi)

    @property
    def is_open(self):
        return not (self.lo_closed or self.hi_closed)

    def codes(self, x):
        """0 for interior, 1 for boundary, 2 for outside, elementwise."""
        x = np.asarray(x, dtype=float)
        with np.errstate(invalid="ignore"):
            above = x >= self.lo if self.lo_closed else x > self.lo
            below = x <= self.hi if self.hi_closed else x < self.hi
            inside = above & below
            interior = np.ones_like(inside)
            if np.isfinite(self.lo):
                interior &= x - self.lo >= EPS_DOM
            if np.isfinite(self.hi):
                interior &= self.hi - x >= EPS_DOM
        out = np.full(x.shape, 2, dtype=np.int8)
        out[inside] = 1
        out[inside & interior] = 0
        return out


def _as_vector(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise InputError(f"{name} must be a vector, got shape {arr.shape}")
    return arr


class LegendreFunction:
    """A Legendre function on R^n given by callables.

    Parameters
    ----------
    name : str
    value, gradient, hessian : callable
        ``value`` must accept boundary points of the domain (limit
        conventions included); the other two are only called on interior
        points.  ``hessian`` returns an (n, n) matrix.
    conjugate_gradient : callable
        Inverse of ``gradient``, called on interior points of dom f*.
    membership, conjugate_membership : callable
        Map a vector to a :class:`Membership`.
    allows_forward_projections, conjugate_domain_open, domain_is_full_space : bool
        Capability flags.
    conjugate_value : callable, optional
        f*, needed for Fenchel-Young checks and dual distances.
    conjugate : callable, optional
        Zero-argument factory returning f* as a LegendreFunction.
    dimension : int, optional
        Fixes n; ``None`` accepts any length.
    """

    vectorized = False

    def __init__(
        self,
        name: str,
        *,
        value: Callable,
        gradient: Callable,
        hessian: Callable,
        conjugate_gradient: Callable,
        membership: Callable,
        conjugate_membership: Callable,
        allows_forward_projections: bool,
        conjugate_domain_open: bool,
        domain_is_full_space: bool = False,
        conjugate_value: Optional[Callable] = None,
        conjugate: Optional[Callable] = None,
        dimension: Optional[int] = None,
    ):
        self.name = name
        self._value = value
        self._gradient = gradient
        self._hessian = hessian
        self._conj_gradient = conjugate_gradient
        self._member = membership
        self._conj_member = conjugate_membership
        self._conj_value = conjugate_value
        self._conj_factory = conjugate
        self.allows_forward_projections = bool(allows_forward_projections)
        self.conjugate_domain_open = bool(conjugate_domain_open)
        self.domain_is_full_space = bool(domain_is_full_space)
        if dimension is not None and int(dimension) < 1:
            raise InputError("dimension must be a positive integer")
        self.dimension = None if dimension is None else int(dimension)

    def __repr__(self):
        dim = "" if self.dimension is None else f", dimension={self.dimension}"
        return f"{type(self).__name__}({self.name!r}{dim})"

    def with_dimension(self, dimension):
        """Return a copy whose inputs must have length ``dimension``."""
        other = copy.copy(self)
        if dimension is not None and int(dimension) < 1:
            raise InputError("dimension must be a positive integer")
        other.dimension = None if dimension is None else int(dimension)
        return other

    # -- validation helpers -------------------------------------------------
    def _check(self, x, name="x"):
        x = _as_vector(x, name)
        if self.dimension is not None and x.shape[0] != self.dimension:
            raise InputError(
                f"{self.name}: {name} has length {x.shape[0]}, expected {self.dimension}"
            )
        return x

    def _require_interior(self, x, conjugate=False):
        m = self.conjugate_membership(x) if conjugate else self.membership(x)
        if m is not Membership.INTERIOR:
            where = "int dom f*" if conjugate else "int dom f"
            coord = self._offending(x, conjugate)
            raise DomainError(
                f"{self.name}: point outside {where} (coordinate {coord})", coord
            )

    def _offending(self, x, conjugate):
        return None

    # -- public API ---------------------------------------------------------
    def membership(self, x) -> Membership:
        x = self._check(x)
        if not np.all(np.isfinite(x)):
            return Membership.OUTSIDE
        return self._member(x)

    def conjugate_membership(self, y) -> Membership:
        y = self._check(y, "y")
        if not np.all(np.isfinite(y)):
            return Membership.OUTSIDE
        return self._conj_member(y)

    def in_domain(self, x) -> bool:
        return self.membership(x) is not Membership.OUTSIDE

    def is_interior(self, x) -> bool:
        return self.membership(x) is Membership.INTERIOR

    def value(self, x) -> float:
        """f(x), or +inf outside dom f."""
        x = self._check(x)
        if self.membership(x) is Membership.OUTSIDE:
            return np.inf
        return float(self._value(x))

    def value_terms(self, x):
        """Additive pieces of f(x); used for compensated summation."""
        return np.array([self.value(x)])

    def gradient(self, x):
        x = self._check(x)
        self._require_interior(x)
        return np.asarray(self._gradient(x), dtype=float)

    def hessian(self, x):
        x = self._check(x)
        self._require_interior(x)
        return np.atleast_2d(np.asarray(self._hessian(x), dtype=float))

    def hessian_directional(self, x, v):
        """Matrix of partial derivatives of z -> H(z) v at z = x.

        Falls back to central differences for general functions.
        """
        x = self._check(x)
        v = self._check(v, "v")
        self._require_interior(x)
        n = x.shape[0]
        out = np.empty((n, n))
        for j in range(n):
            h = 1e-6 * max(1.0, abs(x[j]))
            e = np.zeros(n)
            e[j] = h
            out[:, j] = (self._hessian(x + e) @ v - self._hessian(x - e) @ v) / (2 * h)
        return out

    def conjugate_gradient(self, y):
        """∇f*(y), the inverse of the gradient map."""
        y = self._check(y, "y")
        self._require_interior(y, conjugate=True)
        return np.asarray(self._conj_gradient(y), dtype=float)

    def conjugate_value(self, y) -> float:
        if self._conj_value is None:
            raise UnsupportedFunctionError(f"{self.name}: no conjugate value available")
        y = self._check(y, "y")
        if self.conjugate_membership(y) is Membership.OUTSIDE:
            return np.inf
        return float(self._conj_value(y))

    def conjugate(self) -> "LegendreFunction":
        """f* as a LegendreFunction of the same dimension."""
        if self._conj_factory is None:
            raise UnsupportedFunctionError(f"{self.name}: conjugate not available")
        return self._conj_factory().with_dimension(self.dimension)


class SeparableLegendre(LegendreFunction):
    """f(x) = Σ φ(x_i) with φ given on an interval.

    ``d1``, ``d2``, ``d3`` are the first three derivatives of φ and ``d1_inv``
    inverts ``d1``.  All callables must broadcast over numpy arrays.
    """

    vectorized = True

    def __init__(
        self,
        name,
        phi,
        d1,
        d2,
        d3,
        d1_inv,
        domain: Interval,
        conjugate_domain: Interval,
        *,
        allows_forward_projections,
        conjugate_phi=None,
        conjugate=None,
        dimension=None,
    ):
        self.phi, self.d1, self.d2, self.d3, self.d1_inv = phi, d1, d2, d3, d1_inv
        self.domain = domain
        self.conjugate_domain = conjugate_domain
        self.conjugate_phi = conjugate_phi
        conj_value = None
        if conjugate_phi is not None:
            conj_value = lambda y: float(np.sum(conjugate_phi(y)))  # noqa: E731
        super().__init__(
            name,
            value=lambda x: float(np.sum(phi(x))),
            gradient=d1,
            hessian=lambda x: np.diag(d2(x)),
            conjugate_gradient=d1_inv,
            membership=lambda x: _CODES[int(domain.codes(x).max())],
            conjugate_membership=lambda y: _CODES[int(conjugate_domain.codes(y).max())],
            allows_forward_projections=allows_forward_projections,
            conjugate_domain_open=conjugate_domain.is_open,
            domain_is_full_space=domain.is_full_line,
            conjugate_value=conj_value,
            conjugate=conjugate,
            dimension=dimension,
        )

    def _offending(self, x, conjugate):
        codes = (self.conjugate_domain if conjugate else self.domain).codes(x)
        bad = np.flatnonzero(codes != 0)
        return int(bad[0]) if bad.size else None

    def value_terms(self, x):
        x = self._check(x)
        if self.membership(x) is Membership.OUTSIDE:
            return np.array([np.inf])
        return np.asarray(self.phi(x), dtype=float)

    def hessian_diag(self, x):
        x = self._check(x)
        self._require_interior(x)
        return np.asarray(self.d2(x), dtype=float) * np.ones_like(x)

    def hessian_directional(self, x, v):
        x = self._check(x)
        v = self._check(v, "v")
        self._require_interior(x)
        return np.diag(self.d3(x) * v)

    # Batched evaluators over the last axis.  No domain checks: callers
    # filter rows with ``membership_codes`` first.
    def membership_codes(self, X):
        return self.domain.codes(X).max(axis=-1)

    def value_batch(self, X):
        X = np.asarray(X, dtype=float)
        out = np.full(X.shape[:-1], np.inf)
        ok = self.membership_codes(X) < 2
        out[ok] = np.sum(self.phi(X[ok]), axis=-1)
        return out

    def gradient_batch(self, X):
        return np.asarray(self.d1(np.asarray(X, dtype=float)), dtype=float)


# ---------------------------------------------------------------------------
# Scalar pieces.  Each block lists φ, φ', φ'', φ''' and (φ')^{-1}.

def _zero(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _one(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _xlogx(x):
    return special.xlogy(x, x)


def _softplus(y):
    return np.logaddexp(0.0, y)


def _sigmoid_d2(y):
    s = special.expit(y)
    return s * (1.0 - s)


def _sigmoid_d3(y):
    s = special.expit(y)
    return s * (1.0 - s) * (1.0 - 2.0 * s)


_REAL = Interval()
_NONNEG = Interval(0.0, np.inf, lo_closed=True)
_POS = Interval(0.0, np.inf)
_NEG = Interval(-np.inf, 0.0)
_UNIT = Interval(0.0, 1.0, lo_closed=True, hi_closed=True)


def energy(dimension=None):
    """½‖x‖² on R^n; self-conjugate."""
    return SeparableLegendre(
        "energy",
        lambda x: 0.5 * x * x,
        lambda x: x.copy(),
        _one,
        _zero,
        lambda y: y.copy(),
        _REAL,
        _REAL,
        allows_forward_projections=True,
        conjugate_phi=lambda y: 0.5 * y * y,
        conjugate=energy,
        dimension=dimension,
    )


def negative_entropy(dimension=None):
    """Σ x ln x − x on [0, ∞)^n."""
    return SeparableLegendre(
        "negative_entropy",
        lambda x: _xlogx(x) - x,
        np.log,
        lambda x: 1.0 / x,
        lambda x: -1.0 / (x * x),
        np.exp,
        _NONNEG,
        _REAL,
        allows_forward_projections=True,
        conjugate_phi=np.exp,
        conjugate=exp_sum,
        dimension=dimension,
    )


def exp_sum(dimension=None):
    """Σ exp(y) on R^n, the conjugate of negative entropy."""
    return SeparableLegendre(
        "exp_sum",
        np.exp,
        np.exp,
        np.exp,
        np.exp,
        np.log,
        _REAL,
        _NONNEG,
        allows_forward_projections=False,
        conjugate_phi=lambda x: _xlogx(x) - x,
        conjugate=negative_entropy,
        dimension=dimension,
    )


def fermi_dirac(dimension=None):
    """Σ x ln x + (1 − x) ln(1 − x) on [0, 1]^n."""
    return SeparableLegendre(
        "fermi_dirac",
        lambda x: _xlogx(x) + _xlogx(1.0 - x),
        special.logit,
        lambda x: 1.0 / (x * (1.0 - x)),
        lambda x: (2.0 * x - 1.0) / (x * x * (1.0 - x) ** 2),
        special.expit,
        _UNIT,
        _REAL,
        allows_forward_projections=True,
        conjugate_phi=_softplus,
        conjugate=softplus_sum,
        dimension=dimension,
    )


def softplus_sum(dimension=None):
    """Σ ln(1 + exp(y)) on R^n, the conjugate of the Fermi-Dirac entropy."""
    return SeparableLegendre(
        "softplus_sum",
        _softplus,
        special.expit,
        _sigmoid_d2,
        _sigmoid_d3,
        special.logit,
        _REAL,
        _UNIT,
        allows_forward_projections=False,
        conjugate_phi=lambda x: _xlogx(x) + _xlogx(1.0 - x),
        conjugate=fermi_dirac,
        dimension=dimension,
    )


def burg_entropy(dimension=None):
    """−Σ ln x on (0, ∞)^n."""
    return SeparableLegendre(
        "burg_entropy",
        lambda x: -np.log(x),
        lambda x: -1.0 / x,
        lambda x: 1.0 / (x * x),
        lambda x: -2.0 / x**3,
        lambda y: -1.0 / y,
        _POS,
        _NEG,
        allows_forward_projections=False,
        conjugate_phi=lambda y: -1.0 - np.log(-y),
        conjugate=burg_conjugate,
        dimension=dimension,
    )


def burg_conjugate(dimension=None):
    """Σ (−1 − ln(−y)) on the open negative orthant."""
    return SeparableLegendre(
        "burg_conjugate",
        lambda y: -1.0 - np.log(-y),
        lambda y: -1.0 / y,
        lambda y: 1.0 / (y * y),
        lambda y: -2.0 / y**3,
        lambda x: -1.0 / x,
        _NEG,
        _POS,
        allows_forward_projections=False,
        conjugate_phi=lambda x: -np.log(x),
        conjugate=burg_entropy,
        dimension=dimension,
    )


def neg_sqrt(dimension=None):
    """−Σ √x on [0, ∞)^n."""
    return SeparableLegendre(
        "neg_sqrt",
        lambda x: -np.sqrt(x),
        lambda x: -0.5 / np.sqrt(x),
        lambda x: 0.25 * x**-1.5,
        lambda x: -0.375 * x**-2.5,
        lambda y: 0.25 / (y * y),
        _NONNEG,
        _NEG,
        allows_forward_projections=False,
        conjugate_phi=lambda y: -0.25 / y,
        conjugate=neg_sqrt_conjugate,
        dimension=dimension,
    )


def neg_sqrt_conjugate(dimension=None):
    """Σ −1/(4y) on the open negative orthant."""
    return SeparableLegendre(
        "neg_sqrt_conjugate",
        lambda y: -0.25 / y,
        lambda y: 0.25 / (y * y),
        lambda y: -0.5 / y**3,
        lambda y: 1.5 / y**4,
        lambda x: -0.5 / np.sqrt(x),
        _NEG,
        _NONNEG,
        allows_forward_projections=False,
        conjugate_phi=lambda x: -np.sqrt(x),
        conjugate=neg_sqrt,
        dimension=dimension,
    )


CATALOG = ("energy", "negative_entropy", "fermi_dirac", "burg_entropy", "neg_sqrt")

_BUILTIN = {
    "energy": energy,
    "negative_entropy": negative_entropy,
    "fermi_dirac": fermi_dirac,
    "burg_entropy": burg_entropy,
    "neg_sqrt": neg_sqrt,
    "exp_sum": exp_sum,
    "softplus_sum": softplus_sum,
    "burg_conjugate": burg_conjugate,
    "neg_sqrt_conjugate": neg_sqrt_conjugate,
}
_USER: dict = {}


def available_functions():
    """Names accepted by :func:`get_function`."""
    return sorted(set(_BUILTIN) | set(_USER))


def get_function(name, dimension=None) -> LegendreFunction:
    """Look up a function by name, optionally fixing its dimension."""
    if isinstance(name, LegendreFunction):
        return name if dimension is None else name.with_dimension(dimension)
    if name in _BUILTIN:
        return _BUILTIN[name](dimension)
    if name in _USER:
        return _USER[name].with_dimension(dimension)
    raise InputError(f"unknown function {name!r}; known: {', '.join(available_functions())}")


def validate_function(fn: LegendreFunction, points, tol=1e-8):
    """Round-trip and Fenchel-Young checks at the given interior points.

    Returns the worst relative error; raises InputError when it exceeds tol.
    """
    worst = 0.0
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        g = fn.gradient(x)
        back = fn.conjugate_gradient(g)
        worst = max(worst, np.linalg.norm(back - x) / (1 + np.linalg.norm(x)))
        if fn._conj_value is not None:
            fy = fn.value(x) + fn.conjugate_value(g) - float(x @ g)
            worst = max(worst, abs(fy) / (1 + abs(float(x @ g))))
    if worst > tol:
        raise InputError(f"{fn.name}: validation failed, worst error {worst:.3g}")
    return worst


def register_function(fn: LegendreFunction, sample_points=None, validate=True):
    """Make ``fn`` available by name.

    With ``validate`` the round-trip property is checked at
    ``sample_points`` (required in that case).
    """
    if fn.name in _BUILTIN:
        raise InputError(f"{fn.name!r} is a built-in name")
    if validate:
        if sample_points is None:
            raise InputError("validation needs sample_points inside int dom f")
        validate_function(fn, sample_points)
    _USER[fn.name] = fn
    return fn


def unregister_function(name):
    _USER.pop(name, None)
