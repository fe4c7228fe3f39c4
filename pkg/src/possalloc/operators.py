"""Expected-utility operators on fuzzy numbers and the moments they induce.

Two operators are provided:

``T1``
    ``1/2 * int_0^1 [g(a1(t)) + g(a2(t))] f(t) dt`` (endpoint average)
``T2``
    ``int_0^1 [mean of g over [a1(t), a2(t)]] f(t) dt`` (interval average)

Both integrals over the level ``t`` use Gauss-Legendre quadrature; ``T2``
uses a second Gauss-Legendre rule for the inner interval mean.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import EvaluationError, InvalidParameterError, UnsupportedConfigurationError
from .fuzzy import FuzzyNumber, WeightingFunction, default_weighting

DEFAULT_OUTER_NODES = 64
DEFAULT_INNER_NODES = 32
MIN_NODES = 8
DEGENERATE_WIDTH = 1e-12


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


def _apply(g: Callable, x: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        y = np.asarray(g(x), dtype=float)
    return np.broadcast_to(y, x.shape)


def _finite_sum(values: np.ndarray, weights: np.ndarray, what: str) -> float:
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"non-finite integrand values while evaluating {what}")
    total = float(np.dot(values, weights))
    if not np.isfinite(total):
        raise EvaluationError(f"non-finite quadrature sum while evaluating {what}")
    return total


@dataclass(frozen=True)
class EUOperator:
    """An f-weighted expected-utility operator ``T(A, g)``.

    ``g`` must accept numpy arrays.  Call the operator directly:
    ``T(A, np.exp)``.
    """

    kind: str = "T1"
    weighting: WeightingFunction = field(default_factory=default_weighting)
    outer_nodes: int = DEFAULT_OUTER_NODES
    inner_nodes: int = DEFAULT_INNER_NODES

    def __post_init__(self):
        if self.kind not in ("T1", "T2"):
            raise InvalidParameterError(f"operator kind must be 'T1' or 'T2', got {self.kind!r}")
        if self.outer_nodes < MIN_NODES or self.inner_nodes < MIN_NODES:
            raise InvalidParameterError(f"quadrature needs at least {MIN_NODES} nodes")

    def __call__(self, A: FuzzyNumber, g: Callable) -> float:
        return geu(self, A, g)

    def with_nodes(self, outer: int | None = None, inner: int | None = None) -> "EUOperator":
        return EUOperator(self.kind, self.weighting,
                          outer or self.outer_nodes, inner or self.inner_nodes)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "outer_nodes": self.outer_nodes,
            "inner_nodes": self.inner_nodes,
            "weighting": self.weighting.to_dict(),
        }


def _level_means(T: EUOperator, a1: np.ndarray, a2: np.ndarray, g: Callable) -> np.ndarray:
    if T.kind == "T1":
        return 0.5 * (_apply(g, a1) + _apply(g, a2))
    t, wt = gauss_legendre(T.inner_nodes)
    width = a2 - a1
    x = a1[:, None] + width[:, None] * t[None, :]
    means = _apply(g, x) @ wt
    # degenerate level interval: the interval mean tends to the point value
    degenerate = width < DEGENERATE_WIDTH
    if np.any(degenerate):
        means = np.where(degenerate, _apply(g, a1), means)
    return means


def geu(T: EUOperator, A: FuzzyNumber, g: Callable) -> float:
    """Generalised possibilistic expected utility ``T(A, g)``."""
    gamma, wgt = gauss_legendre(T.outer_nodes)
    a1, a2 = A.endpoints(gamma)
    values = _level_means(T, np.asarray(a1), np.asarray(a2), g) * T.weighting(gamma)
    return _finite_sum(values, wgt, f"{T.kind}(A, g)")


def expected_value(f: WeightingFunction, A: FuzzyNumber, nodes: int = DEFAULT_OUTER_NODES) -> float:
    """Possibilistic mean: weighted average of level-interval midpoints."""
    gamma, wgt = gauss_legendre(nodes)
    a1, a2 = A.endpoints(gamma)
    mid = 0.5 * (np.asarray(a1) + np.asarray(a2))
    return _finite_sum(mid * f(gamma), wgt, "E_f(A)")


def moment(T: EUOperator, A: FuzzyNumber, k: int) -> float:
    """k-th raw moment ``T(A, x**k)``."""
    if k < 1:
        raise InvalidParameterError(f"moment order must be >= 1, got {k}")
    return geu(T, A, lambda x: x**k)


@dataclass(frozen=True)
class MomentSet:
    expected_value: float
    variance: float
    skewness: float
    kurtosis: float
    m2: float
    m3: float
    m4: float

    def to_dict(self) -> dict:
        return asdict(self)


def central_moments(T: EUOperator, A: FuzzyNumber) -> MomentSet:
    """Mean plus central moments of order 2-4, and raw moments about zero."""
    e = expected_value(T.weighting, A, T.outer_nodes)
    var = geu(T, A, lambda x: (x - e) ** 2)
    sk = geu(T, A, lambda x: (x - e) ** 3)
    kur = geu(T, A, lambda x: (x - e) ** 4)
    return MomentSet(e, var, sk, kur, moment(T, A, 2), moment(T, A, 3), moment(T, A, 4))


def triangular_closed_moments(a: float, alpha: float, beta: float,
                              weighting: WeightingFunction | None = None,
                              operator: EUOperator | None = None) -> MomentSet:
    """Closed-form moments of a triangular number under ``T1`` with ``f = 2g``.

    Central moments do not depend on the peak ``a``; the raw moments are
    recovered from them by binomial expansion around the mean.
    """
    if weighting is None and operator is not None:
        weighting = operator.weighting
    if weighting is not None and not weighting.is_default:
        raise UnsupportedConfigurationError(
            "closed-form triangular moments require the weighting f(g) = 2g"
        )
    if operator is not None and operator.kind != "T1":
        raise UnsupportedConfigurationError("closed-form triangular moments exist only for T1")
    if alpha < 0 or beta < 0:
        raise InvalidParameterError("spreads must be non-negative")
    e = a + (beta - alpha) / 6.0
    var = (alpha**2 + beta**2 + alpha * beta) / 18.0
    sk = 19.0 * (beta**3 - alpha**3) / 1080.0 + alpha * beta * (beta - alpha) / 72.0
    kur = (beta**2 * alpha**2 / 72.0 + 5.0 * (alpha**4 + beta**4) / 432.0
           + 2.0 * alpha * beta * (alpha**2 + beta**2) / 135.0)
    m2 = var + e**2
    m3 = sk + 3 * e * var + e**3
    m4 = kur + 4 * e * sk + 6 * e**2 * var + e**4
    return MomentSet(e, var, sk, kur, m2, m3, m4)


def check_d_property(T: EUOperator, A: FuzzyNumber, g: Callable, dg: Callable,
                     lam0: float, h: float = 1e-5) -> float:
    """Residual of the derivative-exchange property at ``lam0``.

    ``g(x, lam)`` is the parametric function and ``dg(x, lam)`` its partial
    derivative in ``lam``.  Returns
    ``|T(A, dg(., lam0)) - (T(A, g(., lam0+h)) - T(A, g(., lam0-h))) / 2h|``.
    """
    if not h > 0:
        raise InvalidParameterError("finite-difference step must be positive")
    lhs = geu(T, A, lambda x: dg(x, lam0))
    up = geu(T, A, lambda x: g(x, lam0 + h))
    down = geu(T, A, lambda x: g(x, lam0 - h))
    return abs(lhs - (up - down) / (2.0 * h))
