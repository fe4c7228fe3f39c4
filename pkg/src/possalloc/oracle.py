"""Direct numerical solution of the portfolio problem.

The total utility ``V(a) = T(A, u(w + a (k mu + x)))`` and its first two
derivatives are evaluated by quadrature with the exact utility
derivatives, never a Taylor expansion, so the solver can arbitrate the
approximations in :mod:`possalloc.allocation`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb, factorial

import numpy as np

from .allocation import PortfolioModel
from .errors import DomainError, InvalidParameterError, NoInteriorOptimumError
from .operators import geu


@dataclass(frozen=True)
class FocSolverConfig:
    bracket_init: float = 1.0
    bracket_growth: float = 2.0
    max_expansions: int = 60
    root_tolerance: float = 1e-10
    max_iterations: int = 200
    certificate_points: int = 21

    def __post_init__(self):
        if not self.bracket_init > 0:
            raise InvalidParameterError("bracket_init must be positive")
        if not self.bracket_growth > 1:
            raise InvalidParameterError("bracket_growth must exceed 1")
        if not self.root_tolerance > 0:
            raise InvalidParameterError("root_tolerance must be positive")
        if self.max_expansions < 1 or self.max_iterations < 1:
            raise InvalidParameterError("iteration limits must be positive")


@dataclass(frozen=True)
class OracleResult:
    alpha_star: float
    foc_residual: float
    v_at_star: float
    concavity_certificate: float
    converged: bool
    iterations: int = 0
    expansions: int = 0
    history: tuple = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "foc_residual": self.foc_residual,
            "v_at_star": self.v_at_star,
            "concavity_certificate": self.concavity_certificate,
            "converged": self.converged,
            "iterations": self.iterations,
            "expansions": self.expansions,
        }

    def history_monotone(self) -> bool:
        """True if V' is non-increasing in alpha over the evaluated points."""
        if len(self.history) < 2:
            return True
        pts = sorted(self.history)
        d = np.array([v for _, v in pts])
        return bool(np.all(np.diff(d) <= 1e-12 * max(1.0, float(np.max(np.abs(d))))))


def _payoff_range(m: PortfolioModel) -> tuple[float, float]:
    lo, hi = m.risk.support
    return m.mean_excess + lo, m.mean_excess + hi


def _check_domain(m: PortfolioModel, a: float) -> None:
    dom_lo, dom_hi = m.utility.domain
    for name, y in zip(("lower", "upper"), _payoff_range(m)):
        wealth = m.wealth + a * y
        if not dom_lo < wealth < dom_hi:
            raise DomainError(
                f"alpha={a:g}: wealth {wealth:g} at the {name} support endpoint "
                f"(excess return {y:g}) is outside the utility domain {m.utility.domain}"
            )


def feasible_interval(m: PortfolioModel) -> tuple[float, float]:
    """Open interval of allocations keeping wealth inside the utility domain."""
    dom_lo, dom_hi = m.utility.domain
    w = m.wealth
    lo, hi = -math.inf, math.inf
    for y in _payoff_range(m):
        if y > 0:
            hi = min(hi, (dom_hi - w) / y)
            lo = max(lo, (dom_lo - w) / y)
        elif y < 0:
            hi = min(hi, (dom_lo - w) / y)
            lo = max(lo, (dom_hi - w) / y)
    return lo, hi


def total_utility(m: PortfolioModel, a: float) -> float:
    _check_domain(m, a)
    u, w, x0 = m.utility, m.wealth, m.mean_excess
    return geu(m.operator, m.risk, lambda x: u.derivative(w + a * (x0 + x), 0))


def v_prime(m: PortfolioModel, a: float) -> float:
    _check_domain(m, a)
    u, w, x0 = m.utility, m.wealth, m.mean_excess
    return geu(m.operator, m.risk, lambda x: (x0 + x) * u.derivative(w + a * (x0 + x), 1))


def v_doubleprime(m: PortfolioModel, a: float) -> float:
    _check_domain(m, a)
    u, w, x0 = m.utility, m.wealth, m.mean_excess
    return geu(m.operator, m.risk, lambda x: (x0 + x) ** 2 * u.derivative(w + a * (x0 + x), 2))


def concavity_certificate(m: PortfolioModel, alphas) -> float:
    """Largest sampled ``V''``; a concave ``V`` keeps it at or below zero."""
    return max(v_doubleprime(m, float(a)) for a in alphas)


def _certificate_grid(m: PortfolioModel, a_star: float, n: int) -> np.ndarray:
    lo, hi = feasible_interval(m)
    span = max(abs(a_star), 1.0)
    left = max(min(0.0, a_star) - span, 0.5 * lo if math.isfinite(lo) else -math.inf)
    right = min(max(0.0, a_star) + span, 0.5 * hi if math.isfinite(hi) else math.inf)
    return np.linspace(left, right, n)


def solve_foc(m: PortfolioModel, cfg: FocSolverConfig | None = None) -> OracleResult:
    """Solve ``V'(alpha) = 0`` by bracket expansion and bisection.

    The bracket grows geometrically from ``bracket_init`` in the direction
    of ``sign V'(0)``.  Where a step would leave the feasible interval it
    is replaced by the midpoint towards the boundary.  Bisection then runs
    until the bracket cannot be split in floating point; ``converged``
    reports whether ``|V'(alpha*)| <= root_tolerance``.
    """
    cfg = cfg or FocSolverConfig()
    if m.k == 0:
        cert = concavity_certificate(m, _certificate_grid(m, 0.0, cfg.certificate_points))
        return OracleResult(0.0, abs(v_prime(m, 0.0)), total_utility(m, 0.0), cert, True)

    history = []

    def dv(a):
        d = v_prime(m, a)
        history.append((a, d))
        return d

    d0 = dv(0.0)
    if d0 == 0.0:
        lo_a = hi_a = 0.0
        expansions = 0
    else:
        sign = 1.0 if d0 > 0 else -1.0
        flo, fhi = feasible_interval(m)
        limit = fhi if sign > 0 else -flo
        inner, step, expansions = 0.0, cfg.bracket_init, 0
        while True:
            outer = step if step < limit else inner + 0.5 * (limit - inner)
            d = dv(sign * outer)
            if sign * d <= 0:
                break
            expansions += 1
            if expansions >= cfg.max_expansions or outer == inner:
                bound = sign * outer
                raise NoInteriorOptimumError(
                    f"V' keeps the sign of V'(0) up to alpha={bound:g} (V'={d:g}); "
                    f"no interior optimum within {cfg.max_expansions} bracket expansions",
                    boundary=bound, v_prime_at_boundary=d,
                )
            inner, step = outer, step * cfg.bracket_growth
        lo_a, hi_a = sorted((sign * inner, sign * outer))

    iterations = 0
    d_lo = v_prime(m, lo_a)
    d_hi = v_prime(m, hi_a)
    while iterations < cfg.max_iterations:
        mid = 0.5 * (lo_a + hi_a)
        if mid <= lo_a or mid >= hi_a:
            break
        d = dv(mid)
        iterations += 1
        if d == 0.0:
            lo_a = hi_a = mid
            d_lo = d_hi = d
            break
        if (d > 0) == (d_lo > 0):
            lo_a, d_lo = mid, d
        else:
            hi_a, d_hi = mid, d

    a_star, resid = (lo_a, d_lo) if abs(d_lo) <= abs(d_hi) else (hi_a, d_hi)
    cert = concavity_certificate(m, _certificate_grid(m, a_star, cfg.certificate_points))
    return OracleResult(
        alpha_star=a_star,
        foc_residual=abs(resid),
        v_at_star=total_utility(m, a_star),
        concavity_certificate=cert,
        converged=abs(resid) <= cfg.root_tolerance,
        iterations=iterations,
        expansions=expansions,
        history=tuple(history),
    )


def shifted_moment(m: PortfolioModel, j: int, k: float | None = None, direct: bool = False) -> float:
    """``T(A, (k mu + x)**j)`` for ``j <= 4``.

    By default this is the binomial expansion over the raw moments of
    ``A``; ``direct=True`` integrates the shifted power instead.
    """
    k = m.k if k is None else k
    c = k * m.mu
    if direct:
        return geu(m.operator, m.risk, lambda x: (c + x) ** j)
    if not 0 <= j <= 4:
        raise InvalidParameterError("binomial path supports powers 0..4")
    mom = m.moments
    raw = (1.0, mom.expected_value, mom.m2, mom.m3, mom.m4)
    return sum(comb(j, i) * c ** (j - i) * raw[i] for i in range(j + 1))


@dataclass(frozen=True)
class PolynomialFocResult:
    coefficients: tuple
    roots: tuple
    principal: float | None


def polynomial_foc(m: PortfolioModel, n: int, k: float | None = None,
                   reference: float | None = None) -> PolynomialFocResult:
    """Real roots of the order-``n`` polynomial first-order condition.

    ``sum_j u^(j+1)(w)/j! * a**j * T(A, (k mu + x)**(j+1)) = 0`` for
    ``j = 0..n``.  The root closest to ``reference`` (default: the oracle
    optimum) is returned as ``principal``.
    """
    if not 1 <= n <= 3:
        raise InvalidParameterError("polynomial order must be 1, 2 or 3")
    k = m.k if k is None else float(k)
    w = m.wealth
    coeffs = [m.utility.derivative(w, j + 1) / factorial(j) * shifted_moment(m, j + 1, k)
              for j in range(n + 1)]
    c = np.array(coeffs)
    while c.size > 1 and c[-1] == 0.0:
        c = c[:-1]
    if c.size == 1:
        roots: tuple = ()
    else:
        z = np.roots(c[::-1])
        real = z[np.abs(z.imag) <= 1e-9 * np.maximum(1.0, np.abs(z.real))].real
        roots = tuple(sorted(float(x) for x in real))
    principal = None
    if roots:
        if reference is None:
            reference = 0.0 if k == 0 else solve_foc(m.with_k(k)).alpha_star
        principal = min(roots, key=lambda x: abs(x - reference))
    return PolynomialFocResult(tuple(coeffs), roots, principal)


def divided_differences(m: PortfolioModel, ks, cfg: FocSolverConfig | None = None) -> list[list[float]]:
    """Newton divided-difference table of the oracle allocation over ``ks``.

    Bounded higher-order entries are evidence (not proof) that the optimal
    allocation is smooth in ``k`` over the sampled range.
    """
    ks = [float(k) for k in ks]
    table = [[solve_foc(m.with_k(k), cfg).alpha_star for k in ks]]
    for order in range(1, len(ks)):
        prev = table[-1]
        table.append([(prev[i + 1] - prev[i]) / (ks[i + order] - ks[i])
                      for i in range(len(prev) - 1)])
    return table
