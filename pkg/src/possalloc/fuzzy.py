"""Fuzzy numbers represented by their level sets, and weighting functions.

A fuzzy number is handled only through its level-set endpoints
``gamma -> [a1(gamma), a2(gamma)]`` for ``gamma`` in ``[0, 1]``.  All
endpoint functions are vectorised: they accept scalars or numpy arrays.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate

from .errors import DomainError, InvalidParameterError

DEFAULT_TABULATION_SIZE = 257
MONOTONE_SLACK = 1e-12
UNIT_INTEGRAL_TOL = 1e-8


class LevelInterval(NamedTuple):
    lower: float
    upper: float

    def contains(self, other: "LevelInterval", slack: float = 0.0) -> bool:
        return self.lower - slack <= other.lower and other.upper <= self.upper + slack

    def __add__(self, c):  # type: ignore[override]
        return LevelInterval(self.lower + c, self.upper + c)

    @property
    def width(self) -> float:
        return self.upper - self.lower


def _check_gamma(gamma):
    g = np.asarray(gamma, dtype=float)
    if np.any(~np.isfinite(g)) or np.any(g < 0.0) or np.any(g > 1.0):
        raise DomainError(f"level gamma must lie in [0, 1], got {gamma!r}")
    return g


class FuzzyNumber(ABC):
    """Level-set view of a fuzzy number.

    Subclasses implement :meth:`_endpoints`; everything else is derived
    from it.
    """

    kind = "general"

    @abstractmethod
    def _endpoints(self, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ...

    def endpoints(self, gamma):
        """Return ``(a1(gamma), a2(gamma))`` for scalar or array ``gamma``."""
        g = _check_gamma(gamma)
        a1, a2 = self._endpoints(g)
        if g.ndim == 0:
            return float(a1), float(a2)
        return a1, a2

    def level_set(self, gamma: float) -> LevelInterval:
        a1, a2 = self.endpoints(float(gamma))
        return LevelInterval(a1, a2)

    @property
    def support(self) -> LevelInterval:
        """Closure of the support, i.e. the level set at gamma = 0."""
        return self.level_set(0.0)

    @property
    def core(self) -> LevelInterval:
        return self.level_set(1.0)

    def shift(self, c: float) -> "FuzzyNumber":
        ep = self._endpoints
        return FunctionalFuzzyNumber(
            lambda g: ep(g)[0] + c, lambda g: ep(g)[1] + c, check=False
        )

    def scale(self, c: float) -> "FuzzyNumber":
        """Scale every level set by ``c > 0`` about the origin."""
        if not c > 0:
            raise InvalidParameterError(f"scale factor must be positive, got {c}")
        ep = self._endpoints
        return FunctionalFuzzyNumber(
            lambda g: c * ep(g)[0], lambda g: c * ep(g)[1], check=False
        )

    def tabulate(self, size: int = DEFAULT_TABULATION_SIZE) -> "TabulatedFuzzyNumber":
        gamma = np.linspace(0.0, 1.0, size)
        a1, a2 = self._endpoints(gamma)
        return TabulatedFuzzyNumber(gamma, a1, a2)

    def to_dict(self) -> dict:
        t = self.tabulate()
        return t.to_dict()


@dataclass(frozen=True)
class TriangularFuzzyNumber(FuzzyNumber):
    """Triangular fuzzy number with peak ``a`` and left/right spreads.

    Level sets are ``[a - (1-g) alpha, a + (1-g) beta]``.
    """

    a: float
    alpha: float
    beta: float
    kind = "triangular"

    def __post_init__(self):
        for name in ("a", "alpha", "beta"):
            if not np.isfinite(getattr(self, name)):
                raise InvalidParameterError(f"{name} must be finite")
        if self.alpha < 0 or self.beta < 0:
            raise InvalidParameterError(
                f"spreads must be non-negative, got alpha={self.alpha}, beta={self.beta}"
            )

    def _endpoints(self, gamma):
        s = 1.0 - gamma
        return self.a - s * self.alpha, self.a + s * self.beta

    def shift(self, c: float) -> "TriangularFuzzyNumber":
        return TriangularFuzzyNumber(self.a + c, self.alpha, self.beta)

    def scale(self, c: float) -> "TriangularFuzzyNumber":
        if not c > 0:
            raise InvalidParameterError(f"scale factor must be positive, got {c}")
        return TriangularFuzzyNumber(c * self.a, c * self.alpha, c * self.beta)

    def membership(self, t):
        """Membership degree A(t) from the triangular closed form."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        if self.alpha > 0:
            left = (t >= self.a - self.alpha) & (t <= self.a)
            out = np.where(left, 1.0 - (self.a - t) / self.alpha, out)
        if self.beta > 0:
            right = (t >= self.a) & (t <= self.a + self.beta)
            out = np.where(right, 1.0 - (t - self.a) / self.beta, out)
        out = np.where(t == self.a, 1.0, out)
        return out if out.ndim else float(out)

    def to_dict(self) -> dict:
        return {"kind": "triangular", "a": self.a, "alpha": self.alpha, "beta": self.beta}


def _check_nested(gamma, a1, a2, slack=MONOTONE_SLACK):
    if np.any(a1 > a2 + slack):
        i = int(np.argmax(a1 - a2))
        raise InvalidParameterError(
            f"empty level set at gamma={gamma[i]:.6g}: a1={a1[i]:.6g} > a2={a2[i]:.6g}"
        )
    if np.any(np.diff(a1) < -slack):
        raise InvalidParameterError("lower endpoint a1 must be non-decreasing in gamma")
    if np.any(np.diff(a2) > slack):
        raise InvalidParameterError("upper endpoint a2 must be non-increasing in gamma")


class TabulatedFuzzyNumber(FuzzyNumber):
    """Endpoints stored on a gamma grid and linearly interpolated between nodes."""

    kind = "tabulated"

    def __init__(self, gamma, a1, a2):
        gamma = np.array(gamma, dtype=float)
        a1 = np.array(a1, dtype=float)
        a2 = np.array(a2, dtype=float)
        if gamma.ndim != 1 or gamma.shape != a1.shape or gamma.shape != a2.shape:
            raise InvalidParameterError("gamma, a1 and a2 must be 1-d arrays of equal length")
        if gamma.size < 2:
            raise InvalidParameterError("a tabulated fuzzy number needs at least 2 nodes")
        if not (np.all(np.isfinite(a1)) and np.all(np.isfinite(a2))):
            raise InvalidParameterError("tabulated endpoints must be finite")
        if gamma[0] != 0.0 or gamma[-1] != 1.0 or np.any(np.diff(gamma) <= 0):
            raise InvalidParameterError("gamma grid must increase strictly from 0 to 1")
        _check_nested(gamma, a1, a2)
        for arr in (gamma, a1, a2):
            arr.flags.writeable = False
        self.gamma, self.a1, self.a2 = gamma, a1, a2

    def _endpoints(self, gamma):
        return np.interp(gamma, self.gamma, self.a1), np.interp(gamma, self.gamma, self.a2)

    def shift(self, c: float) -> "TabulatedFuzzyNumber":
        return TabulatedFuzzyNumber(self.gamma, self.a1 + c, self.a2 + c)

    def scale(self, c: float) -> "TabulatedFuzzyNumber":
        if not c > 0:
            raise InvalidParameterError(f"scale factor must be positive, got {c}")
        return TabulatedFuzzyNumber(self.gamma, c * self.a1, c * self.a2)

    def to_dict(self) -> dict:
        return {
            "kind": "tabulated",
            "gamma": self.gamma.tolist(),
            "a1": self.a1.tolist(),
            "a2": self.a2.tolist(),
        }

    def __eq__(self, other):
        if not isinstance(other, TabulatedFuzzyNumber):
            return NotImplemented
        return (
            np.array_equal(self.gamma, other.gamma)
            and np.array_equal(self.a1, other.a1)
            and np.array_equal(self.a2, other.a2)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"TabulatedFuzzyNumber(n={self.gamma.size}, support=[{self.a1[0]:g}, {self.a2[0]:g}])"


class FunctionalFuzzyNumber(FuzzyNumber):
    """General fuzzy number given by two vectorised endpoint callables.

    Nesting is checked on a grid of ``check_size`` levels unless
    ``check=False``.
    """

    def __init__(self, lower: Callable, upper: Callable, check: bool = True,
                 check_size: int = DEFAULT_TABULATION_SIZE):
        self._lower = lower
        self._upper = upper
        if check:
            g = np.linspace(0.0, 1.0, check_size)
            a1, a2 = self._endpoints(g)
            if not (np.all(np.isfinite(a1)) and np.all(np.isfinite(a2))):
                raise InvalidParameterError("endpoint functions returned non-finite values")
            _check_nested(g, a1, a2)

    def _endpoints(self, gamma):
        g = np.asarray(gamma, dtype=float)
        a1 = np.broadcast_to(np.asarray(self._lower(g), dtype=float), g.shape)
        a2 = np.broadcast_to(np.asarray(self._upper(g), dtype=float), g.shape)
        return a1, a2

    def __repr__(self):
        lo, hi = self.support
        return f"FunctionalFuzzyNumber(support=[{lo:g}, {hi:g}])"


def make_triangular(a: float, alpha: float, beta: float) -> TriangularFuzzyNumber:
    """Triangular fuzzy number with peak ``a``, left spread ``alpha``, right spread ``beta``."""
    return TriangularFuzzyNumber(float(a), float(alpha), float(beta))


def level_set(A: FuzzyNumber, gamma: float) -> LevelInterval:
    return A.level_set(gamma)


def shift(A: FuzzyNumber, c: float) -> FuzzyNumber:
    """Translate every level set of ``A`` by ``c``."""
    return A.shift(float(c))


def fuzzy_from_dict(doc: dict) -> FuzzyNumber:
    kind = doc.get("kind")
    if kind == "triangular":
        return make_triangular(doc["a"], doc["alpha"], doc["beta"])
    if kind == "tabulated":
        return TabulatedFuzzyNumber(doc["gamma"], doc["a1"], doc["a2"])
    raise InvalidParameterError(f"unknown fuzzy number kind {kind!r}")


# -- weighting functions ---------------------------------------------------


@dataclass(frozen=True)
class WeightingFunction:
    """Weighting of the level sets.

    ``func`` must be vectorised.  ``name`` is ``"default_2gamma"`` for the
    canonical ``f(g) = 2 g`` and ``"custom"`` otherwise;
    ``coefficients`` holds the polynomial form when there is one, which is
    what makes the weighting serialisable.
    """

    func: Callable = field(compare=False)
    name: str = "custom"
    coefficients: tuple | None = None

    def __call__(self, gamma):
        g = np.asarray(gamma, dtype=float)
        out = np.broadcast_to(np.asarray(self.func(g), dtype=float), g.shape)
        return out if out.ndim else float(out)

    @property
    def is_default(self) -> bool:
        return self.name == "default_2gamma"

    def to_dict(self) -> dict:
        if self.is_default:
            return {"kind": "default_2gamma"}
        if self.coefficients is not None:
            return {"kind": "polynomial", "coefficients": list(self.coefficients)}
        raise InvalidParameterError("weighting without a polynomial form cannot be serialised")


def default_weighting() -> WeightingFunction:
    return WeightingFunction(lambda g: 2.0 * g, "default_2gamma", (0.0, 2.0))


def uniform_weighting() -> WeightingFunction:
    return WeightingFunction(lambda g: np.ones_like(g), "uniform", (1.0,))


def polynomial_weighting(coefficients) -> WeightingFunction:
    """Weighting ``f(g) = sum_i c_i g**i``; ``(0, 2)`` gives the default."""
    coeffs = tuple(float(c) for c in coefficients)
    if coeffs in ((0.0, 2.0), (0.0, 2.0, 0.0)):
        return default_weighting()
    poly = np.polynomial.Polynomial(coeffs)
    return WeightingFunction(poly, "custom", coeffs)


def weighting_from_dict(doc: dict | None) -> WeightingFunction:
    if doc is None:
        return default_weighting()
    kind = doc.get("kind", "default_2gamma")
    if kind == "default_2gamma":
        return default_weighting()
    if kind == "uniform":
        return uniform_weighting()
    if kind == "polynomial":
        return polynomial_weighting(doc["coefficients"])
    raise InvalidParameterError(f"unknown weighting kind {kind!r}")


@dataclass(frozen=True)
class WeightingReport:
    integral: float
    min_value: float
    max_decrease: float
    failures: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.failures

    @property
    def integral_residual(self) -> float:
        return abs(self.integral - 1.0)


def validate_weighting(f: WeightingFunction, grid_size: int = DEFAULT_TABULATION_SIZE) -> WeightingReport:
    """Check non-negativity and monotonicity on a grid, and the unit integral.

    Monotonicity violations smaller than ``MONOTONE_SLACK`` are treated as
    floating-point noise.
    """
    if grid_size < 2:
        raise InvalidParameterError("grid_size must be at least 2")
    g = np.linspace(0.0, 1.0, grid_size)
    values = np.asarray(f(g), dtype=float)
    failures = []
    if not np.all(np.isfinite(values)):
        failures.append("non-finite weighting values on grid")
    min_value = float(np.min(values))
    if min_value < 0.0:
        failures.append(f"negative weighting value {min_value:.3g}")
    max_decrease = float(np.max(-np.diff(values), initial=0.0))
    if max_decrease > MONOTONE_SLACK:
        failures.append(f"weighting decreases by up to {max_decrease:.3g} between grid nodes")
    integral, _ = integrate.quad(lambda t: float(f(t)), 0.0, 1.0, epsabs=1e-13, epsrel=1e-13)
    if abs(integral - 1.0) > UNIT_INTEGRAL_TOL:
        failures.append(f"weighting integrates to {integral:.12g}, not 1")
    return WeightingReport(float(integral), min_value, max_decrease, tuple(failures))
