"""Fixed suite of smooth, concave benchmark models.

The suite mixes both operators, CRRA and HARA investors, and symmetric,
skewed and non-triangular risks.  Every model keeps wealth well inside the
utility domain for ``k <= 0.2``.
"""

from __future__ import annotations

import numpy as np

from .allocation import PortfolioModel
from .fuzzy import FunctionalFuzzyNumber, FuzzyNumber, make_triangular, uniform_weighting
from .operators import EUOperator, expected_value
from .utility import CRRA, HARA

BENCHMARK_KS = (0.2, 0.1, 0.05, 0.025, 0.0125)


def centred_triangular(alpha: float, beta: float):
    """Triangular number with spreads ``alpha``, ``beta`` and ``E_f = 0`` for ``f = 2g``."""
    return make_triangular(-(beta - alpha) / 6.0, alpha, beta)


def centre(A: FuzzyNumber, op: EUOperator) -> FuzzyNumber:
    return A.shift(-expected_value(op.weighting, A, op.outer_nodes))


def _quadratic_risk(left: float, right: float) -> FuzzyNumber:
    # level sets shrink quadratically towards a point core
    return FunctionalFuzzyNumber(lambda g: -left * (1 - g) ** 2, lambda g: right * (1 - g) ** 2)


def benchmark_models(k: float = 0.1) -> list[tuple[str, PortfolioModel]]:
    t1 = EUOperator("T1")
    t2 = EUOperator("T2")
    t1u = EUOperator("T1", uniform_weighting())
    specs = [
        ("crra-sym-T1", 100.0, 0.0, 0.1, centred_triangular(2, 2), CRRA(0.5), t1),
        ("crra-skew-T1", 100.0, 0.0, 0.12, centred_triangular(1, 2.5), CRRA(-1.0), t1),
        ("crra-leftskew-T1", 50.0, 0.02, 0.08, centred_triangular(3, 1), CRRA(0.3), t1),
        ("crra-sym-T2", 100.0, 0.0, 0.1, None, CRRA(-2.0), t2),
        ("crra-skew-T2", 80.0, 0.05, 0.06, None, CRRA(0.2), t2),
        ("hara-sym-T1", 100.0, 0.0, 0.1, centred_triangular(2, 2), HARA(1.0, 1.0, 0.5), t1),
        ("hara-skew-T1", 60.0, 0.0, 0.25, centred_triangular(1.5, 3), HARA(-1.0, 2.0, 3.0), t1),
        ("hara-skew-T2", 120.0, 0.01, 0.07, None, HARA(2.0, 0.5, 0.25), t2),
        ("crra-quad-T1", 100.0, 0.0, 0.08, None, CRRA(0.5), t1),
        ("crra-skew-T1-uniform", 90.0, 0.0, 0.12, None, CRRA(-0.5), t1u),
    ]
    raw = {
        "crra-sym-T2": make_triangular(0.0, 1.5, 1.5),
        "crra-skew-T2": make_triangular(0.0, 2.0, 1.0),
        "hara-skew-T2": make_triangular(0.0, 1.0, 2.0),
        "crra-quad-T1": _quadratic_risk(1.0, 2.5),
        "crra-skew-T1-uniform": make_triangular(0.0, 1.0, 2.0),
    }
    out = []
    for name, w0, r, mu, A, u, op in specs:
        if A is None:
            A = centre(raw[name], op)
        out.append((name, PortfolioModel(w0, r, k, mu, A, u, op)))
    return out


def error_ratios(errors, ks=BENCHMARK_KS, power: int = 3) -> list[float]:
    """Ratios ``q(k_{i+1}) / q(k_i)`` with ``q = error / k**power``."""
    q = np.asarray(errors, dtype=float) / np.asarray(ks, dtype=float) ** power
    return (q[1:] / q[:-1]).tolist()
