import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from possalloc.errors import EvaluationError, InvalidParameterError, UnsupportedConfigurationError
from possalloc.fuzzy import (FunctionalFuzzyNumber, default_weighting, make_triangular,
                             uniform_weighting)
from possalloc.operators import (EUOperator, central_moments, check_d_property, expected_value,
                                 gauss_legendre, geu, moment, triangular_closed_moments)


def trapezoid_T2(A, g_mean, n=20001):
    """Outer trapezoid over the level, with an analytic inner interval mean."""
    gamma = np.linspace(0, 1, n)
    a1, a2 = A.endpoints(gamma)
    return trapezoid(g_mean(a1, a2) * 2 * gamma, gamma)


def test_gauss_legendre_integrates_polynomials():
    t, w = gauss_legendre(8)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    assert np.dot(w, t**15) == pytest.approx(1 / 16, abs=1e-15)


def test_t1_identity_gives_expected_value(T1, tri212):
    assert geu(T1, tri212, lambda x: x) == pytest.approx(2.5, abs=1e-13)
    assert expected_value(default_weighting(), tri212) == pytest.approx(2 + 3 / 6, abs=1e-13)


@pytest.mark.parametrize("kind", ["T1", "T2"])
def test_constant(kind, tri212):
    assert EUOperator(kind)(tri212, lambda x: 7.0) == pytest.approx(7.0, abs=1e-12)


def test_t2_square_against_trapezoid(T2):
    A = make_triangular(0, 3, 3)
    ref = trapezoid_T2(A, lambda a, b: (a * a + a * b + b * b) / 3)
    value = geu(T2, A, lambda x: x**2)
    # closed form: 3(1-g)^2 integrated against 2g is 1/2
    assert value == pytest.approx(0.5, abs=1e-13)
    assert value == pytest.approx(ref, abs=1e-8)


def test_t2_crisp_number_uses_point_value(T2):
    A = make_triangular(1.5, 0, 0)
    assert geu(T2, A, np.exp) == pytest.approx(np.exp(1.5), rel=1e-14)


def test_expected_value_symmetric():
    for a in (-3.0, 0.0, 4.2):
        assert expected_value(default_weighting(), make_triangular(a, 1.7, 1.7)) == pytest.approx(a, abs=1e-13)


def test_expected_value_tabulated_matches_t1(T1):
    A = FunctionalFuzzyNumber(lambda g: -np.sqrt(1 - g), lambda g: 2 * (1 - g) ** 3).tabulate(257)
    assert expected_value(T1.weighting, A) == pytest.approx(geu(T1, A, lambda x: x), abs=1e-10)


def test_moment_orders(T1, tri212):
    assert moment(T1, tri212, 1) == pytest.approx(expected_value(T1.weighting, tri212), abs=1e-13)
    assert moment(T1, make_triangular(0, 3, 3), 2) == pytest.approx(1.5, abs=1e-13)
    # 2 int g (1-g)^4 dg = 1/15
    assert moment(T1, make_triangular(0, 1, 1), 4) == pytest.approx(1 / 15, abs=1e-14)
    with pytest.raises(InvalidParameterError):
        moment(T1, tri212, 0)


def test_central_moments_symmetric(T1):
    mom = central_moments(T1, make_triangular(0, 3, 3))
    assert mom.variance == pytest.approx(1.5, abs=1e-13)
    assert abs(mom.skewness) < 1e-10


def test_central_equals_raw_when_centred(T2):
    A = make_triangular(-(2.5 - 1) / 6, 1, 2.5)
    mom = central_moments(T2, A)
    # T2 shares E_f with T1, so this triangular is centred for both
    assert abs(mom.expected_value) < 1e-14
    assert mom.variance == pytest.approx(mom.m2, abs=1e-10)
    assert mom.skewness == pytest.approx(mom.m3, abs=1e-10)
    assert mom.kurtosis == pytest.approx(mom.m4, abs=1e-10)


def test_closed_moments_examples():
    m = triangular_closed_moments(0, 3, 3)
    assert m.variance == 1.5 and m.skewness == 0.0
    assert triangular_closed_moments(0, 1, 1).kurtosis == pytest.approx(1 / 15, abs=1e-15)


def test_closed_moments_asymmetric_against_quadrature(T1):
    closed = triangular_closed_moments(0, 1, 2)
    assert closed.variance == pytest.approx(7 / 18, abs=1e-15)
    assert closed.skewness == pytest.approx(163 / 1080, abs=1e-15)
    quad = central_moments(T1, make_triangular(0, 1, 2))
    for f in ("expected_value", "variance", "skewness", "kurtosis", "m2", "m3", "m4"):
        assert getattr(quad, f) == pytest.approx(getattr(closed, f), abs=1e-12), f


def test_printed_square_skewness_disagrees_with_quadrature(T1):
    # the beta^2 - alpha^2 variant is off by 19/1080 * (7 - 3) for (1, 2)
    printed = 19 * (4 - 1) / 1080 + 2 / 72
    quad = central_moments(T1, make_triangular(0, 1, 2)).skewness
    assert abs(quad - printed) == pytest.approx(19 * 4 / 1080, abs=1e-12)


def test_closed_moments_unsupported():
    with pytest.raises(UnsupportedConfigurationError):
        triangular_closed_moments(0, 1, 1, weighting=uniform_weighting())
    with pytest.raises(UnsupportedConfigurationError):
        triangular_closed_moments(0, 1, 1, operator=EUOperator("T2"))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5))
def test_closed_form_matches_quadrature(alpha, beta, a):
    T1 = EUOperator("T1")
    quad = central_moments(T1, make_triangular(a, alpha, beta))
    closed = triangular_closed_moments(a, alpha, beta)
    for f in ("expected_value", "variance", "skewness", "kurtosis"):
        assert abs(getattr(quad, f) - getattr(closed, f)) < 1e-8


def test_non_finite_integrand_raises(T1):
    with pytest.raises(EvaluationError):
        geu(T1, make_triangular(0, 1, 1), np.log)


def test_operator_validation():
    with pytest.raises(InvalidParameterError):
        EUOperator("T3")
    with pytest.raises(InvalidParameterError):
        EUOperator("T1", outer_nodes=4)


# -- axioms ---------------------------------------------------------------

kinds = st.sampled_from(["T1", "T2"])
coef = st.floats(-3, 3)


def random_risk(a, alpha, beta, tabulated):
    A = make_triangular(a, alpha, beta)
    return A.tabulate(33) if tabulated else A


@settings(max_examples=50, deadline=None)
@given(kinds, st.floats(-3, 3), st.floats(0, 4), st.floats(0, 4), st.booleans(),
       st.lists(coef, min_size=4, max_size=4), st.lists(coef, min_size=3, max_size=3), coef, coef)
def test_axioms(kind, a, alpha, beta, tabulated, gc, hc, ca, cb):
    T = EUOperator(kind)
    A = random_risk(a, alpha, beta, tabulated)
    g = np.polynomial.Polynomial(gc)
    h = np.polynomial.Polynomial(hc)
    # (a) identity gives the possibilistic mean
    assert abs(geu(T, A, lambda x: x) - expected_value(T.weighting, A)) < 1e-9
    # (b) constants
    assert abs(geu(T, A, lambda x: ca) - ca) < 1e-12
    # (c) linearity
    lhs = geu(T, A, lambda x: ca * g(x) + cb * h(x))
    assert abs(lhs - ca * geu(T, A, g) - cb * geu(T, A, h)) < 1e-9
    # (d) monotonicity: g <= g + h^2 + 0.01
    assert geu(T, A, g) <= geu(T, A, lambda x: g(x) + h(x) ** 2 + 0.01) + 1e-12


# -- derivative exchange -------------------------------------------------


def test_d_property_linear(T1, T2, tri212):
    for T in (T1, T2):
        r = check_d_property(T, tri212, lambda x, l: l * x, lambda x, l: x, 0.4, 1e-3)
        assert r < 1e-8


def test_d_property_exponential(T1):
    A = make_triangular(0, 1, 1)
    r = check_d_property(T1, A, lambda x, l: np.exp(l * x), lambda x, l: x * np.exp(l * x), 0.3, 1e-5)
    assert r < 1e-7


def test_d_property_shifted_square(T1):
    # derivative in lam of T(A, (lam mu + x)^2) is 2 mu T(A, lam mu + x) = 2 mu^2 lam
    A = make_triangular(0, 2, 2)
    mu = 1.0
    g = lambda x, l: (l * mu + x) ** 2  # noqa: E731
    dg = lambda x, l: 2 * mu * (l * mu + x)  # noqa: E731
    assert check_d_property(T1, A, g, dg, 0.0, 1e-4) < 1e-8
    assert geu(T1, A, lambda x: dg(x, 0.6)) == pytest.approx(2 * mu**2 * 0.6, abs=1e-13)


@pytest.mark.parametrize("kind", ["T1", "T2"])
@pytest.mark.parametrize("lam0", [-0.8, 0.0, 0.35, 1.2])
def test_d_property_battery(kind, lam0):
    T = EUOperator(kind)
    A = make_triangular(0.3, 1.2, 2.1)
    battery = [
        (lambda x, l: np.exp(l * x), lambda x, l: x * np.exp(l * x)),
        (lambda x, l: np.sin(l * x), lambda x, l: x * np.cos(l * x)),
        (lambda x, l: 1 / (2 + l**2 + x**2), lambda x, l: -2 * l / (2 + l**2 + x**2) ** 2),
    ]
    for g, dg in battery:
        assert check_d_property(T, A, g, dg, lam0, 1e-5) < 1e-6
