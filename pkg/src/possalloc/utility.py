"""Utility families with derivatives up to order 4 and risk indicators."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConcavityError, DomainError, IndicatorUndefinedError, InvalidParameterError

MAX_ORDER = 4


def _falling(c: float, n: int) -> float:
    """``c (c-1) ... (c-n+1)``."""
    out = 1.0
    for i in range(n):
        out *= c - i
    return out


class UtilityModel:
    """Base class: subclasses set ``domain`` and implement ``_derivative``."""

    family = "custom"
    domain: tuple[float, float] = (-math.inf, math.inf)

    def _derivative(self, w, n):
        raise NotImplementedError

    def in_domain(self, w) -> bool:
        w = np.asarray(w, dtype=float)
        lo, hi = self.domain
        return bool(np.all((w > lo) & (w < hi)))

    def derivative(self, w, n: int = 0):
        """``n``-th derivative at ``w`` (scalar or array), ``0 <= n <= 4``."""
        if not 0 <= n <= MAX_ORDER:
            raise InvalidParameterError(f"derivative order must be in 0..{MAX_ORDER}, got {n}")
        if not self.in_domain(w):
            raise DomainError(f"wealth {w!r} outside utility domain {self.domain}")
        out = self._derivative(np.asarray(w, dtype=float), n)
        return float(out) if np.ndim(out) == 0 else out

    def __call__(self, w):
        return self.derivative(w, 0)

    def derivatives(self, w: float, order: int = MAX_ORDER) -> list[float]:
        """``[u(w), u'(w), ..., u^(order)(w)]``."""
        return [self.derivative(float(w), n) for n in range(order + 1)]

    def sample_points(self, n: int = 41) -> np.ndarray:
        lo, hi = self.domain
        if math.isfinite(lo) and math.isfinite(hi):
            return np.linspace(lo, hi, n + 2)[1:-1]
        if math.isfinite(lo):
            return lo + np.geomspace(1e-3, 1e3, n)
        if math.isfinite(hi):
            return hi - np.geomspace(1e-3, 1e3, n)
        return np.linspace(-100.0, 100.0, n)

    def check_shape(self, points=None) -> None:
        """Raise unless ``u' > 0`` and ``u'' <= 0`` at the sampled points."""
        w = self.sample_points() if points is None else np.asarray(points, dtype=float)
        with np.errstate(all="ignore"):
            d1 = np.asarray(self._derivative(w, 1))
            d2 = np.asarray(self._derivative(w, 2))
        if np.any(~np.isfinite(d1)) or np.any(d1 <= 0):
            raise ConcavityError(f"{self.family} utility is not increasing on its domain")
        bad = w[np.asarray(d2 > 0)]
        if bad.size:
            raise ConcavityError(
                f"{self.family} utility is not concave: u''({bad[0]:.6g}) > 0"
            )


class CRRA(UtilityModel):
    """Power utility ``u(w) = w**a / a`` on ``w > 0``; requires ``a < 1``, ``a != 0``."""

    family = "crra"
    domain = (0.0, math.inf)

    def __init__(self, a: float, validate: bool = True):
        a = float(a)
        if a == 0.0:
            raise InvalidParameterError("CRRA parameter a must be non-zero")
        if a == 1.0:
            raise InvalidParameterError("CRRA parameter a = 1 (linear boundary) is excluded")
        self.a = a
        if validate:
            self.check_shape()

    def _derivative(self, w, n):
        return _falling(self.a, n) / self.a * w ** (self.a - n)

    def to_dict(self):
        return {"family": "crra", "a": self.a}

    def __repr__(self):
        return f"CRRA(a={self.a:g})"


class HARA(UtilityModel):
    """``u(w) = zeta * (delta + w/gamma)**(1 - gamma)`` where ``delta + w/gamma > 0``.

    ``zeta`` only fixes the sign and scale; increasing utility needs
    ``zeta * (1 - gamma) / gamma > 0``.  ``validate=False`` skips the shape
    check, which is useful for raw evaluation of the formula.
    """

    family = "hara"

    def __init__(self, zeta: float, delta: float, gamma: float, validate: bool = True):
        zeta, delta, gamma = float(zeta), float(delta), float(gamma)
        if gamma == 0.0 or gamma == 1.0:
            raise InvalidParameterError(f"HARA gamma must differ from 0 and 1, got {gamma}")
        if zeta == 0.0:
            raise InvalidParameterError("HARA zeta must be non-zero")
        self.zeta, self.delta, self.gamma = zeta, delta, gamma
        edge = -delta * gamma
        self.domain = (edge, math.inf) if gamma > 0 else (-math.inf, edge)
        if validate:
            if zeta * (1.0 - gamma) / gamma <= 0:
                raise ConcavityError(
                    "HARA utility is decreasing: need zeta*(1-gamma)/gamma > 0"
                )
            self.check_shape()

    def base(self, w):
        return self.delta + w / self.gamma

    def _derivative(self, w, n):
        g = self.gamma
        return self.zeta * _falling(1.0 - g, n) / g**n * self.base(w) ** (1.0 - g - n)

    def to_dict(self):
        return {"family": "hara", "zeta": self.zeta, "delta": self.delta, "gamma": self.gamma}

    def __repr__(self):
        return f"HARA(zeta={self.zeta:g}, delta={self.delta:g}, gamma={self.gamma:g})"


class CustomUtility(UtilityModel):
    """Utility given by explicit evaluators ``[u, u', u'', u''', u'''']``."""

    def __init__(self, derivatives: Sequence[Callable], domain=(-math.inf, math.inf),
                 validate: bool = True, source: str | None = None):
        if len(derivatives) != MAX_ORDER + 1:
            raise InvalidParameterError("custom utility needs evaluators for orders 0..4")
        self._funcs = tuple(derivatives)
        self.domain = (float(domain[0]), float(domain[1]))
        self.source = source
        if validate:
            self.check_shape()

    def _derivative(self, w, n):
        w = np.asarray(w, dtype=float)
        return np.broadcast_to(np.asarray(self._funcs[n](w), dtype=float), w.shape)

    def to_dict(self):
        if self.source is None:
            raise InvalidParameterError("custom utility built from callables cannot be serialised")
        lo, hi = self.domain
        return {"family": "custom", "u": self.source, "domain": [lo, hi]}

    @classmethod
    def from_expression(cls, expr: str, domain=(-math.inf, math.inf), validate: bool = True):
        """Build from a formula in ``w``; derivatives are taken symbolically.

        The expression is parsed by sympy, so config files holding it are
        trusted input.
        """
        import sympy

        w = sympy.Symbol("w", real=True)
        u = sympy.sympify(expr, locals={"w": w})
        funcs = [sympy.lambdify(w, sympy.diff(u, w, n), "numpy") for n in range(MAX_ORDER + 1)]
        return cls(funcs, domain, validate=validate, source=expr)


def utility_from_dict(doc: dict, validate: bool = True) -> UtilityModel:
    family = doc.get("family")
    if family == "crra":
        return CRRA(doc["a"], validate=validate)
    if family == "hara":
        return HARA(doc.get("zeta", 1.0), doc["delta"], doc["gamma"], validate=validate)
    if family == "custom":
        lo, hi = doc.get("domain", [-math.inf, math.inf])
        return CustomUtility.from_expression(doc["u"], (float(lo), float(hi)), validate=validate)
    raise InvalidParameterError(f"unknown utility family {family!r}")


@dataclass(frozen=True)
class RiskIndicators:
    risk_aversion: float
    prudence: float
    temperance: float

    def to_dict(self):
        return asdict(self)


def _ratio(num, den, what):
    if den == 0.0 or not math.isfinite(den):
        raise IndicatorUndefinedError(f"{what} undefined: vanishing denominator")
    return -num / den


def indicators(u: UtilityModel, w: float, strict: bool = True) -> RiskIndicators:
    """Absolute risk aversion, prudence and temperance at ``w``.

    With ``strict=False`` an undefined indicator is returned as NaN instead
    of raising.
    """
    _, d1, d2, d3, d4 = u.derivatives(w, 4)
    values = []
    for num, den, what in ((d2, d1, "risk aversion"), (d3, d2, "prudence"),
                           (d4, d3, "temperance")):
        try:
            values.append(_ratio(num, den, what))
        except IndicatorUndefinedError:
            if strict:
                raise
            values.append(math.nan)
    return RiskIndicators(*values)


@dataclass(frozen=True)
class IndicatorRatios:
    """Composite indicator ratios entering the allocation terms.

    ``temperance_ratio`` is ``T_u * P_u / r_u**3`` (that is
    ``u''''/u'' / r_u**3``), the combination produced by the third-order
    expansion.  ``temperance_over_prudence_ratio`` keeps
    ``T_u / (P_u r_u**3)`` for comparison.
    """

    inv_risk_aversion: float
    prudence_ratio: float
    prudence_sq_ratio: float
    temperance_ratio: float
    temperance_over_prudence_ratio: float

    def to_dict(self):
        return asdict(self)


def indicator_ratios(u: UtilityModel, w: float) -> IndicatorRatios:
    ind = indicators(u, w, strict=False)
    r, p, t = ind.risk_aversion, ind.prudence, ind.temperance
    if not (math.isfinite(r) and r != 0.0):
        raise IndicatorUndefinedError("risk aversion is zero or undefined")
    if not math.isfinite(p):
        raise IndicatorUndefinedError("prudence undefined")
    r3 = r**3
    if math.isfinite(t):
        temp = t * p / r3
        temp_printed = t / (p * r3) if p != 0.0 else math.nan
    else:
        temp = temp_printed = math.nan
    return IndicatorRatios(1.0 / r, p / r**2, p**2 / r3, temp, temp_printed)
