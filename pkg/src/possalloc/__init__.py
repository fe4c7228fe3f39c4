"""Possibilistic standard portfolio choice under expected-utility operators."""

from .allocation import (AllocationResult, PortfolioModel, allocate, alpha_doubleprime0,
                         alpha_prime0, alpha_tripleprime0, approx_order2, approx_order3,
                         approx_order3_f_terms, f_terms)
from .fuzzy import (FuzzyNumber, LevelInterval, TabulatedFuzzyNumber, TriangularFuzzyNumber,
                    WeightingFunction, default_weighting, level_set, make_triangular, shift,
                    validate_weighting)
from .operators import (EUOperator, MomentSet, central_moments, check_d_property, expected_value,
                        geu, moment, triangular_closed_moments)
from .oracle import (FocSolverConfig, OracleResult, polynomial_foc, solve_foc, total_utility,
                     v_doubleprime, v_prime)
from .utility import CRRA, HARA, CustomUtility, indicator_ratios, indicators

__version__ = "0.1.0"
