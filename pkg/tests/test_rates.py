import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from infrate import (
    CONSTANT,
    BasisCpiModel,
    BasisExpansionRate,
    BasisFunctionSpec,
    CallableCpi,
    ConstantRate,
    CpiSeries,
    DomainError,
    ExponentialCpi,
    PiecewiseConstantRate,
    RateDomainError,
    RateFunction,
    accumulate,
    constant_accumulate,
    log_accumulation,
    log_linear_model,
    piecewise_affine_model,
    piecewise_product_accumulate,
    rate_from_cpi,
    real_value,
    tangent_exponential,
)
from infrate.presets import reference_trig_rate


class QuadratureOnly(RateFunction):
    """Route any rate through the generic quadrature path."""

    form = "test"

    def __init__(self, inner):
        super().__init__(inner.domain, inner.knots)
        self.inner = inner

    def _rate(self, t):
        return self.inner._rate(t)

    def _log1p(self, t):
        return self.inner._log1p(t)


class Affine(RateFunction):
    form = "test"

    def __init__(self, a, b):
        super().__init__()
        self.a, self.b = a, b

    def _rate(self, t):
        return self.a + self.b * t


# --- small worked cases ------------------------------------------------------


def test_two_point_constant_rate():
    s = CpiSeries([0, 1], [100, 110])
    for model in (piecewise_affine_model(s), log_linear_model(s)):
        r = rate_from_cpi(model)
        assert accumulate(r, 0, 1).rate == pytest.approx(0.1, rel=1e-12)
    ll = rate_from_cpi(log_linear_model(s))
    np.testing.assert_allclose(ll(np.linspace(0, 1, 7)), 0.1, rtol=1e-12)


def test_three_point_per_segment_rates():
    s = CpiSeries([0, 1, 2], [100, 110, 132])
    r = rate_from_cpi(log_linear_model(s))
    assert r(0.5) == pytest.approx(0.1)
    assert r(1.5) == pytest.approx(0.2)
    assert accumulate(r, 1, 2).rate == pytest.approx(0.2, rel=1e-12)
    assert accumulate(r, 0, 2).growth_factor == pytest.approx(1.32, rel=1e-12)


def test_knot_rule():
    r = PiecewiseConstantRate([0, 1, 2], [0.1, 0.2])
    assert r(1.0) == 0.2  # right limit at interior knot
    assert r(0.0) == 0.1
    assert r(2.0) == 0.2  # right end of domain takes the left limit
    s = CpiSeries([0, 1, 2], [100, 110, 132])
    ll = rate_from_cpi(log_linear_model(s))
    assert ll(1.0) == pytest.approx(0.2)
    assert ll(2.0) == pytest.approx(0.2)


def test_piecewise_product_oracle():
    # two half-unit segments at 10% and 20%
    got = piecewise_product_accumulate([0, 0.5, 1], [0.1, 0.2])
    assert got == pytest.approx(math.sqrt(1.1 * 1.2) - 1, rel=1e-15)
    r = PiecewiseConstantRate([0, 0.5, 1], [0.1, 0.2])
    assert accumulate(r, 0, 1).rate == pytest.approx(got, rel=1e-14)


def test_constant_accumulate_oracle():
    assert constant_accumulate(0.21, 0.5) == pytest.approx(0.1, rel=1e-14)
    assert constant_accumulate(0.0, 7) == 0.0
    with pytest.raises(RateDomainError):
        constant_accumulate(-1.0, 1)


def test_accumulation_result_fields():
    res = accumulate(ConstantRate(0.2), 0, 1)
    assert res.rate == pytest.approx(0.2)
    assert res.growth_factor == res.objective_ratio == pytest.approx(1.2)
    assert res.log_growth == pytest.approx(math.log(1.2))
    assert res.growth_factor > 0


def test_real_value():
    assert real_value(ConstantRate(0.2), 100, 0, 1) == pytest.approx(83.33333333, abs=1e-8)
    with pytest.raises(DomainError):
        real_value(ConstantRate(0.2), 0, 0, 1)


def test_example_rate_functions():
    iota1 = PiecewiseConstantRate([0, 1, 2], [0.1, 0.2])
    iota2 = Affine(0.1, 0.0)
    iota2._rate = lambda t: 0.1 + t**2 / 10
    iota3 = Affine(0.1, 0.1)
    iota4 = PiecewiseConstantRate([-1, 0, 1], [0.1, 0.2])
    got = [real_value(r, 100, 0, 1) for r in (iota1, iota2, iota3, iota4)]
    exact3 = 100 / math.exp(10 * (1.2 * math.log(1.2) - 1.1 * math.log(1.1)) - 1)
    np.testing.assert_allclose(got, [100 / 1.1, 88.26551047, exact3, 100 / 1.2], atol=1e-8)


def test_rate_domain_error_from_quadrature():
    with pytest.raises(RateDomainError):
        accumulate(Affine(0.0, -1.0), 0, 2)  # 1 + rate hits zero at t = 1
    with pytest.raises(RateDomainError):
        ConstantRate(-1.0)
    with pytest.raises(RateDomainError):
        PiecewiseConstantRate([0, 1], [-2.0])


def test_interval_checks():
    r = PiecewiseConstantRate([0, 1, 2], [0.1, 0.2])
    with pytest.raises(DomainError):
        accumulate(r, 1, 0.5)
    with pytest.raises(DomainError):
        accumulate(r, 0, 3)
    with pytest.raises(DomainError):
        r(-0.5)


def test_interval_log_accumulations_agree_with_single_calls():
    r = reference_trig_rate()
    edges = np.linspace(1993, 1995, 9)
    batch = r.interval_log_accumulations(edges)
    single = [log_accumulation(r, a, b) for a, b in zip(edges[:-1], edges[1:])]
    np.testing.assert_allclose(batch, single, atol=2e-10)


# --- constant and piecewise-constant branches --------------------------------


@given(st.floats(-0.5, 1.0, exclude_min=True), st.floats(0, 10, exclude_min=True))
def test_constant_case(rate, t):
    expected = (1 + rate) ** t
    for r in (ConstantRate(rate), BasisExpansionRate([CONSTANT], [rate])):
        growth = accumulate(r, 0, t).growth_factor
        assert abs(growth - expected) <= 1e-10 * expected


@st.composite
def knot_vectors(draw):
    n = draw(st.integers(1, 19))
    gaps = draw(st.lists(st.floats(0.01, 2), min_size=n, max_size=n))
    t0 = draw(st.floats(-5, 5))
    knots = t0 + np.concatenate([[0.0], np.cumsum(gaps)])
    assume(np.all(np.diff(knots) > 0))
    values = draw(
        st.lists(st.floats(-0.5, 1, exclude_min=True), min_size=n, max_size=n)
    )
    return knots, np.array(values)


@given(knot_vectors())
def test_piecewise_constant_case(kv):
    knots, values = kv
    expected = 1 + piecewise_product_accumulate(knots, values)
    r = PiecewiseConstantRate(knots, values)
    closed = accumulate(r, knots[0], knots[-1]).growth_factor
    assert closed == pytest.approx(expected, rel=1e-10)
    quad = accumulate(QuadratureOnly(r), knots[0], knots[-1]).growth_factor
    assert quad == pytest.approx(expected, rel=1e-9)


# --- composition ---------------------------------------------------------------


rates = st.sampled_from(
    [
        ConstantRate(0.07),
        PiecewiseConstantRate([1990, 1994, 1997.5, 2010], [0.03, -0.2, 0.5]),
        reference_trig_rate(),
        Affine(0.05, 0.0001),
    ]
)


@given(rates, st.floats(1990, 2009), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_chasles(rate, a, f1, f2):
    c = a + f1 * (2010 - a)
    b = a + f2 * (c - a)
    assume(a < b < c)
    ab = accumulate(rate, a, b).growth_factor
    bc = accumulate(rate, b, c).growth_factor
    ac = accumulate(rate, a, c).growth_factor
    assert ab * bc == pytest.approx(ac, rel=1e-9)


# --- CPI-derived rates -------------------------------------------------------


@st.composite
def series_strategy(draw):
    n = draw(st.integers(2, 25))
    gaps = draw(st.lists(st.floats(0.05, 2), min_size=n - 1, max_size=n - 1))
    times = 1990 + np.concatenate([[0.0], np.cumsum(gaps)])
    # log growth of at most 1 per year keeps node rounding at t ~ 2000 well
    # below the 1e-10 quadrature tolerance
    rates_ = draw(st.lists(st.floats(-1, 1), min_size=n - 1, max_size=n - 1))
    v0 = draw(st.floats(10, 500))
    values = v0 * np.exp(np.concatenate([[0.0], np.cumsum(np.asarray(rates_) * gaps)]))
    return CpiSeries(times, values)


@given(series_strategy(), st.data())
def test_interpolation_exactness(series, data):
    n = len(series)
    i = data.draw(st.integers(0, n - 2))
    j = data.draw(st.integers(i + 1, n - 1))
    t, v = series.times, series.values
    for model in (piecewise_affine_model(series), log_linear_model(series)):
        r = rate_from_cpi(model)
        assert accumulate(r, t[i], t[j]).growth_factor == pytest.approx(v[j] / v[i], rel=1e-9)
        # the generic quadrature path agrees with the exact one
        q = accumulate(QuadratureOnly(r), t[i], t[j]).growth_factor
        assert q == pytest.approx(v[j] / v[i], rel=1e-9)


@given(st.floats(1, 1000), st.floats(-0.3, 0.5), st.integers(3, 40))
def test_exponential_series_gives_constant_rate(scale, log_slope, n):
    times = np.linspace(2000, 2000 + (n - 1) / 12, n)
    series = CpiSeries(times, scale * np.exp(log_slope * (times - 2000)))
    r = rate_from_cpi(log_linear_model(series))
    mids = 0.5 * (times[:-1] + times[1:])
    rates_ = r(mids)
    assert np.ptp(rates_) <= 1e-12
    # constant-rate accumulation reproduces the exponential in t
    const = ConstantRate(float(np.expm1(log_slope)))
    for t in np.linspace(2000.1, 2003, 10):
        want = math.exp(log_slope * (t - 2000))
        assert accumulate(const, 2000, t).growth_factor == pytest.approx(want, rel=1e-12)


def test_tangent_examples():
    tan = tangent_exponential(ExponentialCpi(5, 2), 0.3)
    assert tan.scale == pytest.approx(5, rel=1e-14)
    assert tan.log_slope == pytest.approx(2, rel=1e-14)
    assert tan.rate == pytest.approx(math.e**2 - 1)
    a, b = 3.0, 7.0
    affine = CallableCpi(lambda x: a * x + b, lambda x: np.full_like(x, a))
    tan = tangent_exponential(affine, 2.0)
    assert tan.log_slope == pytest.approx(a / (a * 2 + b))
    assert tan(2.0) == pytest.approx(13.0)
    flat = CallableCpi(lambda x: np.full_like(x, 4.0), lambda x: np.zeros_like(x))
    tan = tangent_exponential(flat, 1.0)
    assert tan.log_slope == 0 and tan.scale == 4.0


def test_tangent_at_knot_uses_right_derivative():
    s = CpiSeries([0, 1, 2], [100, 110, 132])
    tan = tangent_exponential(piecewise_affine_model(s), 1.0)
    assert tan.log_slope == pytest.approx(22 / 110)


def test_tangent_outside_domain():
    s = CpiSeries([0, 1], [100, 110])
    with pytest.raises(DomainError):
        tangent_exponential(piecewise_affine_model(s), 5.0)


SMOOTH_MODELS = [
    BasisCpiModel(
        [CONSTANT, BasisFunctionSpec("power", 5, 1992), BasisFunctionSpec("power", 9, 1992)],
        [151.55846954, 53.87465039, -108.48707928],
    ),
    BasisCpiModel(
        [CONSTANT, BasisFunctionSpec("sin", 5), BasisFunctionSpec("xcos", 2)],
        [120.0, 3.0, 0.002],
    ),
    CallableCpi(lambda x: 100 + (x - 1990) ** 2, lambda x: 2 * (x - 1990)),
]


@given(st.sampled_from(SMOOTH_MODELS), st.floats(1993, 2002))
def test_tangent_second_order_contact(model, x):
    tan = tangent_exponential(model, x)
    assert tan(x) == pytest.approx(float(model(x)), rel=1e-12)

    def gap(h):
        return abs(float(tan(x + h)) - float(model(x + h)))

    h = 1e-3
    e1, e2 = gap(h), gap(h / 2)
    assume(e1 > 1e-9)
    # observed order, to one decimal
    order = math.log2(e1 / e2)
    assert round(order, 1) >= 2.0


@given(st.sampled_from(SMOOTH_MODELS), st.floats(1993, 2002))
def test_log_derivative_matches_finite_differences(model, x):
    h = 1e-5
    fd = (math.log(float(model(x + h))) - math.log(float(model(x - h)))) / (2 * h)
    got = float(model.log_derivative(x))
    assert got == pytest.approx(fd, rel=1e-6, abs=1e-9)
