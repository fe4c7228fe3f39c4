import math

import numpy as np
import pytest
from scipy import integrate

from possalloc.allocation import PortfolioModel, approx_order2
from possalloc.benchmark import centred_triangular
from possalloc.errors import DomainError, InvalidParameterError, NoInteriorOptimumError
from possalloc.operators import EUOperator
from possalloc.oracle import (FocSolverConfig, concavity_certificate, divided_differences,
                              feasible_interval, polynomial_foc, shifted_moment, solve_foc,
                              total_utility, v_doubleprime, v_prime)
from possalloc.utility import CRRA, CustomUtility


def example_model(k=0.1, op=None):
    return PortfolioModel(100.0, 0.0, k, 1.0, centred_triangular(2, 2), CRRA(0.5),
                          op or EUOperator("T1"))


def skewed_model(k=0.1, kind="T1"):
    return PortfolioModel(80.0, 0.02, k, 0.5, centred_triangular(1, 2.5), CRRA(-1.0), EUOperator(kind))


def linear_model(k=0.1):
    u = CustomUtility([lambda w: w, lambda w: 1.0 + 0 * w] + [lambda w: 0 * w] * 3, validate=False)
    return PortfolioModel(100.0, 0.0, k, 1.0, centred_triangular(1, 2), u)


def dense_t1(m, a):
    """Adaptive T1 reference with f = 2g, independent of the Gauss rule."""
    u, w, x0 = m.utility, m.wealth, m.mean_excess

    def integrand(g):
        lo, hi = m.risk.endpoints(g)
        return 0.5 * (u.derivative(w + a * (x0 + lo), 0) + u.derivative(w + a * (x0 + hi), 0)) * 2 * g

    return integrate.quad(integrand, 0, 1, epsabs=1e-13, epsrel=1e-13)[0]


def test_total_utility_at_zero_is_u_of_w():
    m = skewed_model()
    assert total_utility(m, 0.0) == pytest.approx(m.utility.derivative(m.wealth, 0), rel=1e-14)


def test_total_utility_linear():
    m = linear_model()
    for a in (-3.0, 0.5, 7.0):
        assert total_utility(m, a) == pytest.approx(100 + a * 0.1, abs=1e-12)
        assert v_prime(m, a) == pytest.approx(0.1, abs=1e-13)
        assert abs(v_doubleprime(m, a)) < 1e-15


@pytest.mark.parametrize("model", [example_model(), skewed_model()])
def test_total_utility_against_adaptive_reference(model):
    assert total_utility(model, 1.0) == pytest.approx(dense_t1(model, 1.0), abs=1e-9)
    assert total_utility(model, 25.0) == pytest.approx(dense_t1(model, 25.0), abs=1e-9)


@pytest.mark.parametrize("kind", ["T1", "T2"])
@pytest.mark.parametrize("a", [-5.0, 3.0, 20.0])
def test_derivatives_against_finite_differences(kind, a):
    m = skewed_model(kind=kind)
    h = 1e-5
    fd1 = (total_utility(m, a + h) - total_utility(m, a - h)) / (2 * h)
    assert v_prime(m, a) == pytest.approx(fd1, abs=1e-7)
    h = 1e-3
    fd2 = (total_utility(m, a + h) - 2 * total_utility(m, a) + total_utility(m, a - h)) / h**2
    assert v_doubleprime(m, a) == pytest.approx(fd2, abs=1e-5)
    assert v_doubleprime(m, a) <= 1e-9


def test_concavity_over_grid():
    m = example_model()
    lo, hi = feasible_interval(m)
    grid = np.linspace(0.9 * lo, 0.9 * hi, 41)
    assert concavity_certificate(m, grid) <= 1e-9


def test_feasible_interval_crra():
    m = example_model()
    lo, hi = feasible_interval(m)
    # payoffs run from 0.1 - 2 to 0.1 + 2
    assert hi == pytest.approx(100 / 1.9)
    assert lo == pytest.approx(-100 / 2.1)


def test_domain_error_names_endpoint():
    m = example_model()
    with pytest.raises(DomainError, match="lower support endpoint"):
        total_utility(m, 60.0)
    with pytest.raises(DomainError, match="upper support endpoint"):
        v_prime(m, -60.0)


def test_solve_k_zero():
    res = solve_foc(example_model(k=0.0))
    assert res.alpha_star == 0.0 and res.converged


def test_solve_small_k_near_order2():
    res = solve_foc(example_model(k=0.01))
    assert res.alpha_star == pytest.approx(3.0, rel=0.02)
    assert res.converged and res.foc_residual <= 1e-10
    assert res.concavity_certificate <= 1e-9
    assert res.history_monotone()


def test_solve_example_value():
    # independently confirmed by scipy minimize_scalar on the adaptive reference
    res = solve_foc(example_model(k=0.1))
    assert res.alpha_star == pytest.approx(28.89567, abs=5e-5)
    ref = _maximise_reference(example_model(k=0.1))
    assert res.alpha_star == pytest.approx(ref, abs=1e-4)


def _maximise_reference(m):
    from scipy.optimize import minimize_scalar

    out = minimize_scalar(lambda a: -dense_t1(m, a), bounds=(0, 50), method="bounded",
                          options={"xatol": 1e-8})
    return out.x


def test_small_initial_bracket_expands():
    m = skewed_model(k=0.2)
    res = solve_foc(m, FocSolverConfig(bracket_init=1e-3, bracket_growth=1.5))
    assert res.alpha_star == pytest.approx(solve_foc(m).alpha_star, rel=1e-12)
    assert res.expansions > 0


def test_linear_utility_has_no_interior_optimum():
    with pytest.raises(NoInteriorOptimumError) as info:
        solve_foc(linear_model())
    assert info.value.v_prime_at_boundary == pytest.approx(0.1)


def test_expansion_respects_domain_boundary():
    # the first trial point lies outside the feasible interval
    m = example_model()
    res = solve_foc(m, FocSolverConfig(bracket_init=500.0))
    assert res.alpha_star == pytest.approx(solve_foc(m).alpha_star, abs=1e-9)


def test_dominating_asset_has_no_interior_optimum():
    # every excess return is positive, so more of the risky asset is always better
    m = PortfolioModel(10.0, 0.0, 1.0, 1.0, centred_triangular(0.05, 0.05), CRRA(0.9))
    assert feasible_interval(m)[1] == math.inf
    with pytest.raises(NoInteriorOptimumError):
        solve_foc(m)


def test_solver_config_validation():
    with pytest.raises(InvalidParameterError):
        FocSolverConfig(bracket_growth=1.0)
    with pytest.raises(InvalidParameterError):
        FocSolverConfig(root_tolerance=0.0)


def test_result_serialises():
    d = solve_foc(skewed_model()).to_dict()
    assert set(d) >= {"alpha_star", "foc_residual", "concavity_certificate"}


# -- polynomial condition ---------------------------------------------------


@pytest.mark.parametrize("direct", [False, True])
def test_shifted_moments(direct):
    m = skewed_model()
    for j in range(5):
        ref = shifted_moment(m, j, 0.1, direct=True)
        assert shifted_moment(m, j, 0.1, direct=direct) == pytest.approx(ref, abs=1e-12)
    assert shifted_moment(m, 1, 0.1) == pytest.approx(0.05, abs=1e-14)


def test_polynomial_order1():
    m = skewed_model(k=0.05)
    u1 = m.utility.derivative(m.wealth, 1)
    u2 = m.utility.derivative(m.wealth, 2)
    x = m.k * m.mu
    expected = -u1 * x / (u2 * shifted_moment(m, 2))
    res = polynomial_foc(m, 1)
    assert res.roots == pytest.approx((expected,), rel=1e-12)
    assert res.principal == pytest.approx(expected, rel=1e-12)


def test_polynomial_order2_symmetric():
    m = example_model()
    errs = []
    ks = (0.1, 0.05, 0.025)
    for k in ks:
        truth = solve_foc(m.with_k(k)).alpha_star
        errs.append(abs(polynomial_foc(m, 2, k, reference=truth).principal - truth))
    ratios = [errs[i] / errs[i + 1] for i in range(2)]
    # at least cubic decay
    assert all(r > 6 for r in ratios)


def test_polynomial_k_zero():
    assert abs(polynomial_foc(skewed_model(), 3, 0.0).principal) < 1e-12


def test_polynomial_order_guard():
    with pytest.raises(InvalidParameterError):
        polynomial_foc(skewed_model(), 4)


def test_divided_differences_bounded():
    table = divided_differences(skewed_model(), [0.01, 0.02, 0.03, 0.04])
    assert len(table) == 4 and len(table[-1]) == 1
    assert all(math.isfinite(v) for row in table for v in row)


def test_oracle_agrees_with_approximation_for_tiny_k():
    m = skewed_model(k=1e-4)
    assert solve_foc(m).alpha_star == pytest.approx(approx_order2(m), rel=1e-6)
