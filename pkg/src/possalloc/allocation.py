"""Approximate optimal allocation in the possibilistic standard model.

The investor holds wealth ``w0``, the risk-free return is ``r`` and the
excess return of the risky asset is the fuzzy number ``k*mu + A`` with
``E_f(A) = 0``.  Writing ``alpha(k)`` for the optimal amount in the risky
asset, this module computes the Taylor coefficients ``alpha'(0)``,
``alpha''(0)``, ``alpha'''(0)`` and the second and third order
approximations of ``alpha(k)``.

Two independent routes lead to the third order approximation:

* the derivative chain (:func:`alpha_prime0` ... :func:`approx_order3`),
  built from raw moments ``T(A, x**j)`` and the utility derivatives at ``w``;
* the six-term assembly (:func:`f_terms`, :func:`approx_order3_f_terms`),
  built from central moments and composite indicator ratios.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from functools import cached_property

from .errors import DegenerateModelError, DomainError, IndicatorUndefinedError, InvalidParameterError
from .fuzzy import FuzzyNumber
from .operators import EUOperator, MomentSet, central_moments, expected_value, moment
from .utility import RiskIndicators, UtilityModel, indicator_ratios, indicators

CENTERING_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class PortfolioModel:
    w0: float
    r: float
    k: float
    mu: float
    risk: FuzzyNumber
    utility: UtilityModel
    operator: EUOperator = field(default_factory=EUOperator)

    def __post_init__(self):
        if not self.mu > 0:
            raise InvalidParameterError(f"mu must be positive, got {self.mu}")
        if self.k < 0:
            raise InvalidParameterError(f"k must be non-negative, got {self.k}")
        e = expected_value(self.operator.weighting, self.risk, self.operator.outer_nodes)
        if abs(e) >= CENTERING_TOL:
            raise InvalidParameterError(f"risk component must be centred, E_f(A) = {e:.3g}")
        if not self.utility.in_domain(self.wealth):
            raise DomainError(
                f"wealth w = w0(1+r) = {self.wealth:g} outside utility domain {self.utility.domain}"
            )

    @property
    def wealth(self) -> float:
        """Risk-free future wealth ``w = w0 (1 + r)``; indicators are evaluated here."""
        return self.w0 * (1.0 + self.r)

    @property
    def mean_excess(self) -> float:
        return self.k * self.mu

    def with_k(self, k: float) -> "PortfolioModel":
        return replace(self, k=float(k))

    @classmethod
    def from_return(cls, B0: FuzzyNumber, r: float, w0: float, utility: UtilityModel,
                    operator: EUOperator | None = None, k: float | None = None,
                    mu: float | None = None) -> "PortfolioModel":
        """Build a model from the raw risky return ``B0``.

        The excess return ``B0 - r`` is split into its possibilistic mean
        ``k*mu`` and the centred part ``A``.  Only the product ``k*mu`` is
        identified; ``mu = 1`` unless given.
        """
        operator = operator or EUOperator()
        B = B0.shift(-r)
        e = expected_value(operator.weighting, B, operator.outer_nodes)
        if k is not None and mu is not None:
            if abs(k * mu - e) > CENTERING_TOL * max(1.0, abs(e)):
                raise InvalidParameterError(
                    f"k*mu = {k * mu:g} does not match the expected excess return {e:g}"
                )
        elif mu is not None:
            k = e / mu
        elif k is not None:
            if k == 0:
                raise InvalidParameterError("k = 0 leaves mu undetermined")
            mu = e / k
        else:
            mu, k = 1.0, e
        if k < 0 or mu <= 0:
            raise InvalidParameterError(
                f"expected excess return {e:g} must be non-negative for the standard model"
            )
        return cls(w0, r, k, mu, B.shift(-e), utility, operator)

    # cached per model; the dataclass is frozen so these never go stale
    @cached_property
    def moments(self) -> MomentSet:
        return central_moments(self.operator, self.risk)

    @cached_property
    def raw_moments(self) -> tuple[float, float, float]:
        return tuple(moment(self.operator, self.risk, j) for j in (2, 3, 4))

    @cached_property
    def indicators(self) -> RiskIndicators:
        return indicators(self.utility, self.wealth, strict=False)

    def describe(self) -> dict:
        return {
            "w0": self.w0, "r": self.r, "k": self.k, "mu": self.mu, "wealth": self.wealth,
            "risk": self.risk.to_dict(), "utility": self.utility.to_dict(),
            "operator": self.operator.to_dict(),
        }


def _second_moment(m: PortfolioModel) -> float:
    m2 = m.raw_moments[0]
    if not m2 > 0:
        raise DegenerateModelError(f"risk has non-positive second moment {m2:g}")
    return m2


def _risk_aversion(m: PortfolioModel) -> float:
    r = m.indicators.risk_aversion
    if not r > 0:
        raise DegenerateModelError(f"risk aversion at w must be positive, got {r:g}")
    return r


def alpha_prime0(m: PortfolioModel) -> float:
    """``alpha'(0) = mu / (T(A, x^2) r_u(w))``."""
    return m.mu / (_second_moment(m) * _risk_aversion(m))


def alpha_doubleprime0(m: PortfolioModel) -> float:
    """``alpha''(0) = P_u/r_u^2 * T(A, x^3) / T(A, x^2)^3 * mu^2``."""
    m2, m3, _ = m.raw_moments
    r = _risk_aversion(m)
    p = m.indicators.prudence
    if m3 == 0.0:
        return 0.0
    if p != p:
        raise IndicatorUndefinedError("prudence undefined at w")
    return p / r**2 * m3 / _second_moment(m) ** 3 * m.mu**2


def alpha_tripleprime0(m: PortfolioModel) -> float:
    """Third Taylor coefficient of the optimal allocation.

    Obtained by differentiating the cubic first-order condition three
    times at ``k = 0`` and solving the resulting linear relation::

        a3 V + 6 a1 mu^2 - 3 P (a1 a2 S + 3 mu a1^2 V) + (u''''/u'') a1^3 K = 0

    with ``V, S, K`` the raw moments of order 2, 3, 4 and
    ``u''''/u'' = T_u P_u``.
    """
    m2, m3, m4 = m.raw_moments
    v = _second_moment(m)
    a1 = alpha_prime0(m)
    a2 = alpha_doubleprime0(m)
    p = m.indicators.prudence
    if p != p:
        raise IndicatorUndefinedError("prudence undefined at w")
    d2 = m.utility.derivative(m.wealth, 2)
    d4 = m.utility.derivative(m.wealth, 4)
    fourth_over_second = d4 / d2
    rest = 6 * a1 * m.mu**2 - 3 * p * (a1 * a2 * m3 + 3 * m.mu * a1**2 * m2) \
        + fourth_over_second * a1**3 * m4
    return -rest / v


def approx_order2(m: PortfolioModel) -> float:
    k = m.k
    if k == 0:
        return 0.0
    return k * alpha_prime0(m) + 0.5 * k**2 * alpha_doubleprime0(m)


def approx_order3(m: PortfolioModel) -> float:
    k = m.k
    if k == 0:
        return 0.0
    return approx_order2(m) + k**3 / 6.0 * alpha_tripleprime0(m)


@dataclass(frozen=True)
class FTerms:
    f1: float
    f2: float
    f3: float
    f4: float
    f5: float
    f6: float

    def as_tuple(self):
        return (self.f1, self.f2, self.f3, self.f4, self.f5, self.f6)

    def to_dict(self):
        return asdict(self)


def f_terms(m: PortfolioModel) -> FTerms:
    """The six composite terms of the third-order formula.

    ``F1 = 1/(r Var)``, ``F2 = P/r^2 Sk/Var^3``, ``F3 = 1/(r Var^2)``,
    ``F4 = P^2/r^3 Sk^2/Var^5``, ``F5 = P/r^2 /Var^2``,
    ``F6 = T P / r^3 K/Var^4``.
    """
    mom = m.moments
    var, sk, kur = mom.variance, mom.skewness, mom.kurtosis
    if not var > 0:
        raise DegenerateModelError(f"risk has non-positive variance {var:g}")
    q = indicator_ratios(m.utility, m.wealth)
    if q.temperance_ratio != q.temperance_ratio:
        raise IndicatorUndefinedError("temperance ratio undefined at w")
    return FTerms(
        q.inv_risk_aversion / var,
        q.prudence_ratio * sk / var**3,
        q.inv_risk_aversion / var**2,
        q.prudence_sq_ratio * sk**2 / var**5,
        q.prudence_ratio / var**2,
        q.temperance_ratio * kur / var**4,
    )


def approx_order3_f_terms(m: PortfolioModel) -> float:
    """``k mu F1 + (k mu)^2 F2 / 2 - (k mu)^3 [F3 - F4/2 - 3 F5/2 + F6/6]``."""
    F = f_terms(m)
    x = m.k * m.mu
    return x * F.f1 + 0.5 * x**2 * F.f2 - x**3 * (F.f3 - 0.5 * F.f4 - 1.5 * F.f5 + F.f6 / 6.0)


@dataclass(frozen=True)
class AllocationResult:
    k: float
    alpha_order2: float
    alpha_order3: float
    alpha_prime0: float
    alpha_doubleprime0: float
    alpha_tripleprime0: float
    f_terms: FTerms
    alpha_order3_f_terms: float
    moments: MomentSet
    indicators: RiskIndicators

    def to_dict(self) -> dict:
        d = asdict(self)
        d["f_terms"] = self.f_terms.to_dict()
        d["moments"] = self.moments.to_dict()
        d["indicators"] = self.indicators.to_dict()
        return d


def allocate(m: PortfolioModel) -> AllocationResult:
    return AllocationResult(
        k=m.k,
        alpha_order2=approx_order2(m),
        alpha_order3=approx_order3(m),
        alpha_prime0=alpha_prime0(m),
        alpha_doubleprime0=alpha_doubleprime0(m),
        alpha_tripleprime0=alpha_tripleprime0(m),
        f_terms=f_terms(m),
        alpha_order3_f_terms=approx_order3_f_terms(m),
        moments=m.moments,
        indicators=m.indicators,
    )


# -- closed-form specialisations (T1, f = 2g, triangular risk) ---------------


def _tri_sums(alpha, beta):
    s = alpha**2 + beta**2 + alpha * beta
    sk = 19.0 * (beta**3 - alpha**3) / 1080.0 + alpha * beta * (beta - alpha) / 72.0
    kur = (beta**2 * alpha**2 / 72.0 + 5.0 * (alpha**4 + beta**4) / 432.0
           + 2.0 * alpha * beta * (alpha**2 + beta**2) / 135.0)
    return s, sk, kur


def crra_symmetric_order2(a: float, w: float, mu: float, k: float, spread: float) -> float:
    """Second-order allocation for CRRA and a symmetric triangular risk."""
    return 6.0 * mu * w / ((1.0 - a) * spread**2) * k


def crra_triangular_order2(a: float, w: float, mu: float, k: float,
                           alpha: float, beta: float) -> float:
    """Second-order allocation for CRRA utility and a centred triangular risk."""
    s, _, _ = _tri_sums(alpha, beta)
    skew_num = 5.7 * (beta**3 - alpha**3) + 4.5 * alpha * beta * (beta - alpha)
    return 18 * k * mu * w / ((1 - a) * s) * (
        1 + 0.5 * k * mu * (2 - a) / (1 - a) * skew_num / s**2
    )


def hara_order2(delta: float, gamma: float, w: float, mu: float, k: float,
                variance: float, skewness: float) -> float:
    """Second-order allocation for HARA utility in terms of the moments."""
    base = delta + w / gamma
    return (k * mu * base / variance
            + 0.5 * (k * mu) ** 2 * (gamma + 1) / gamma * base * skewness / variance**3)


def hara_triangular_order2(delta: float, gamma: float, w: float, mu: float, k: float,
                           alpha: float, beta: float) -> float:
    s, sk, _ = _tri_sums(alpha, beta)
    base = delta + w / gamma
    return (18 * mu * base / s * k
            + 18**3 / 2 * mu**2 * (gamma + 1) / gamma * base * sk / s**3 * k**2)


def crra_triangular_f_terms(a: float, w: float, alpha: float, beta: float) -> FTerms:
    """Closed-form F1..F6 for ``u = w**a / a`` and a centred triangular risk."""
    s, sk, kur = _tri_sums(alpha, beta)
    ra = w / (1 - a)
    pr = (2 - a) * w / (1 - a) ** 2
    psq = (2 - a) ** 2 * w / (1 - a) ** 3
    temp = (3 - a) * (2 - a) * w / (1 - a) ** 3
    return FTerms(
        ra * 18 / s,
        pr * 18**3 * sk / s**3,
        ra * 18**2 / s**2,
        psq * 18**5 * sk**2 / s**5,
        pr * 324 / s**2,
        temp * 18**4 * kur / s**4,
    )
