"""Invariant checks behind ``possalloc verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import allocation as alloc
from . import oracle
from .errors import PossallocError
from .fuzzy import FuzzyNumber, TriangularFuzzyNumber, WeightingFunction, validate_weighting
from .operators import (EUOperator, central_moments, check_d_property, expected_value, geu,
                        triangular_closed_moments)

AXIOM_TOL = 1e-9
CONSTANT_TOL = 1e-12
MONOTONE_SLACK = 1e-12
D_PROPERTY_TOL = 1e-6
CLOSED_FORM_TOL = 1e-8
CONCAVITY_TOL = 1e-9
EQUIVALENCE_TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float
    threshold: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "residual": self.residual,
                "threshold": self.threshold, "detail": self.detail}


def _check(name, residual, threshold, detail=""):
    ok = bool(np.isfinite(residual)) and residual <= threshold
    return Check(name, ok, float(residual), threshold, detail)


def _failed(name, threshold, exc):
    return Check(name, False, math.nan, threshold, f"{type(exc).__name__}: {exc}")


# polynomial test functions for linearity and monotonicity
_G = lambda x: x**3 - 2.0 * x  # noqa: E731
_H = lambda x: 0.5 * x**2 + x + 1.0  # noqa: E731

# (name, g(x, lam), dg/dlam(x, lam), lam0)
D_BATTERY = (
    ("linear", lambda x, l: l * x, lambda x, l: x + 0 * l, 0.7),
    ("exp", lambda x, l: np.exp(l * x), lambda x, l: x * np.exp(l * x), 0.3),
    ("sin", lambda x, l: np.sin(l * x), lambda x, l: x * np.cos(l * x), 1.1),
    ("shifted-square", lambda x, l: (l + x) ** 2, lambda x, l: 2 * (l + x), 0.0),
    ("cubic-power", lambda x, l: (1.0 + 0.1 * l * x) ** 3,
     lambda x, l: 0.3 * x * (1.0 + 0.1 * l * x) ** 2, 0.5),
)


def axiom_checks(T: EUOperator, A: FuzzyNumber, prefix: str = "") -> list[Check]:
    tag = f"{prefix}{T.kind}"
    out = []
    try:
        e = expected_value(T.weighting, A, T.outer_nodes)
        out.append(_check(f"{tag}:axiom-a", abs(geu(T, A, lambda x: x) - e), AXIOM_TOL))
        out.append(_check(f"{tag}:axiom-b", abs(geu(T, A, lambda x: 7.0) - 7.0), CONSTANT_TOL))
        a, b = 1.7, -0.4
        lhs = geu(T, A, lambda x: a * _G(x) + b * _H(x))
        rhs = a * geu(T, A, _G) + b * geu(T, A, _H)
        out.append(_check(f"{tag}:axiom-c", abs(lhs - rhs), AXIOM_TOL))
        # x^2 <= x^2 + (x - c)^2 everywhere
        c = 0.5 * sum(A.support)
        gap = geu(T, A, lambda x: x**2) - geu(T, A, lambda x: x**2 + (x - c) ** 2)
        out.append(_check(f"{tag}:axiom-d", max(gap, 0.0), MONOTONE_SLACK))
    except PossallocError as exc:
        out.append(_failed(f"{tag}:axioms", AXIOM_TOL, exc))
    return out


def d_property_checks(T: EUOperator, A: FuzzyNumber, prefix: str = "") -> list[Check]:
    worst, where = 0.0, ""
    try:
        for name, g, dg, lam0 in D_BATTERY:
            res = check_d_property(T, A, g, dg, lam0, 1e-5)
            if res >= worst:
                worst, where = res, name
    except PossallocError as exc:
        return [_failed(f"{prefix}{T.kind}:D2", D_PROPERTY_TOL, exc)]
    return [_check(f"{prefix}{T.kind}:D2", worst, D_PROPERTY_TOL, f"worst: {where}")]


def closed_form_check(T: EUOperator, A: FuzzyNumber, prefix: str = "") -> list[Check]:
    if not (isinstance(A, TriangularFuzzyNumber) and T.kind == "T1" and T.weighting.is_default):
        return []
    q = central_moments(T, A)
    c = triangular_closed_moments(A.a, A.alpha, A.beta, operator=T)
    diff = max(abs(getattr(q, f) - getattr(c, f))
               for f in ("expected_value", "variance", "skewness", "kurtosis"))
    return [_check(f"{prefix}closed-form-moments", diff, CLOSED_FORM_TOL)]


def weighting_check(f: WeightingFunction, prefix: str = "") -> list[Check]:
    rep = validate_weighting(f)
    return [Check(f"{prefix}weighting", rep.valid, rep.integral_residual,
                  1e-8, "; ".join(rep.failures))]


def model_checks(m: alloc.PortfolioModel, cfg: oracle.FocSolverConfig | None = None,
                 prefix: str = "") -> list[Check]:
    cfg = cfg or oracle.FocSolverConfig()
    out = []
    a_star = None
    try:
        res = oracle.solve_foc(m, cfg)
        a_star = res.alpha_star
        out.append(Check(f"{prefix}oracle-residual", res.converged, res.foc_residual,
                         cfg.root_tolerance, f"alpha*={res.alpha_star:.12g}"))
        out.append(_check(f"{prefix}bisection-monotone", 0.0 if res.history_monotone() else 1.0, 0.0))
    except PossallocError as exc:
        out.append(_failed(f"{prefix}oracle-residual", cfg.root_tolerance, exc))
    try:
        hi = a_star if a_star is not None else cfg.bracket_init
        lo_f, hi_f = oracle.feasible_interval(m)
        grid = np.linspace(max(-abs(hi), 0.5 * lo_f), min(2 * abs(hi) + 1e-3, 0.5 * hi_f), 21)
        cert = oracle.concavity_certificate(m, grid)
        out.append(_check(f"{prefix}concavity", cert, CONCAVITY_TOL, "max sampled V''"))
    except PossallocError as exc:
        out.append(_failed(f"{prefix}concavity", CONCAVITY_TOL, exc))
    try:
        a = 0.5 * (a_star if a_star else cfg.bracket_init)
        h = 1e-5 * max(1.0, abs(a))
        fd = (oracle.total_utility(m, a + h) - oracle.total_utility(m, a - h)) / (2 * h)
        vp = oracle.v_prime(m, a)
        out.append(_check(f"{prefix}model-D2", abs(fd - vp) / max(1.0, abs(vp)), D_PROPERTY_TOL))
    except PossallocError as exc:
        out.append(_failed(f"{prefix}model-D2", D_PROPERTY_TOL, exc))
    try:
        chain = alloc.approx_order3(m)
        terms = alloc.approx_order3_f_terms(m)
        out.append(_check(f"{prefix}f-terms-vs-chain", abs(chain - terms), EQUIVALENCE_TOL))
    except PossallocError as exc:
        out.append(_failed(f"{prefix}f-terms-vs-chain", EQUIVALENCE_TOL, exc))
    return out


def risk_checks(A: FuzzyNumber, operators, prefix: str = "") -> list[Check]:
    out = []
    for T in operators:
        out += axiom_checks(T, A, prefix)
        out += d_property_checks(T, A, prefix)
        out += closed_form_check(T, A, prefix)
    return out


def document_checks(doc: dict, nodes: int | None = None) -> list[Check]:
    """All checks for one config document."""
    from . import config

    out = []
    op = config.parse_operator(doc, nodes)
    out += weighting_check(op.weighting)
    A = config.risk_for_moments(doc)
    ops = [EUOperator(kind, op.weighting, op.outer_nodes, op.inner_nodes) for kind in ("T1", "T2")]
    out += risk_checks(A, ops)
    try:
        config.parse_utility(doc, validate=True)
        out.append(Check("utility-shape", True, 0.0, 0.0, "increasing and concave"))
    except PossallocError as exc:
        out.append(_failed("utility-shape", 0.0, exc))
    try:
        m = config.parse_model(doc, nodes=nodes, validate_utility=False)
    except PossallocError as exc:
        out.append(_failed("model", 0.0, exc))
        return out
    if m.k == 0:
        m = m.with_k(0.1)
    out += model_checks(m, config.parse_solver(doc))
    return out


def benchmark_checks() -> list[Check]:
    from .benchmark import benchmark_models

    out = []
    for name, m in benchmark_models():
        prefix = f"{name}/"
        out += weighting_check(m.operator.weighting, prefix)
        out += risk_checks(m.risk, [m.operator], prefix)
        out += model_checks(m, prefix=prefix)
    return out
