"""Rate functions, CPI models, and accumulation over arbitrary intervals.

A rate function ``iota(t)`` is the per-unit-time rate of inflation (or
interest). Over an interval the growth factor is

    1 + iota(<t0, t1>) = exp( integral_{t0}^{t1} ln(1 + iota(u)) du )

and equals both ``CPI(t1) / CPI(t0)`` and ``X(t0) / X(t1)`` for the real
value ``X`` of a money unit. A CPI model determines its instantaneous rate
through ``iota(x) = exp((ln CPI)'(x)) - 1``.

All evaluators are vectorized and right-continuous at knots; at the right end
of a bounded domain the left limit is used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import design_matrix
from .errors import DomainError, IntegrandDomainError, RateDomainError
from .quadrature import DEFAULT_QUADRATURE, integrate, integrate_intervals

_DOMAIN_SLACK = 1e-9


def _as_array(t):
    return np.asarray(t, dtype=float)


def _check_in_domain(t, domain, what):
    lo, hi = domain
    t = _as_array(t)
    if t.size and (np.nanmin(t) < lo - _DOMAIN_SLACK or np.nanmax(t) > hi + _DOMAIN_SLACK):
        raise DomainError(f"{what}: time outside domain [{lo}, {hi}]")
    if np.isnan(t).any():
        raise DomainError(f"{what}: time is NaN")
    return t


def _segment_index(knots, t):
    """Index of the segment owning ``t`` under the right-limit rule."""
    idx = np.searchsorted(knots, t, side="right") - 1
    return np.clip(idx, 0, len(knots) - 2)


# --------------------------------------------------------------------------
# CPI models


class CpiModel:
    """Positive, piecewise-differentiable approximation of a price index.

    Subclasses implement ``_value`` and ``_derivative``; ``knots`` lists the
    interior points where the derivative may jump. When ``exact_log_ratio`` is
    true, accumulation uses ``ln CPI(t1) - ln CPI(t0)`` instead of quadrature.
    """

    exact_log_ratio = False

    def __init__(self, domain=(-math.inf, math.inf), knots=()):
        self.domain = (float(domain[0]), float(domain[1]))
        self.knots = np.asarray(knots, dtype=float)

    def __call__(self, t):
        t = _check_in_domain(t, self.domain, type(self).__name__)
        return self._value(t)

    def derivative(self, t):
        t = _check_in_domain(t, self.domain, type(self).__name__)
        return self._derivative(t)

    def log_derivative(self, t):
        t = _check_in_domain(t, self.domain, type(self).__name__)
        return self._derivative(t) / self._value(t)

    def log_ratio(self, t0, t1):
        return float(np.log(self(t1)) - np.log(self(t0)))

    def _value(self, t):
        raise NotImplementedError

    def _derivative(self, t):
        raise NotImplementedError


class ExponentialCpi(CpiModel):
    """``CPI(x) = scale * exp(log_slope * x)``."""

    exact_log_ratio = True

    def __init__(self, scale, log_slope, domain=(-math.inf, math.inf)):
        if not scale > 0:
            raise DomainError("scale must be positive")
        super().__init__(domain)
        self.scale = float(scale)
        self.log_slope = float(log_slope)

    def _value(self, t):
        return self.scale * np.exp(self.log_slope * t)

    def _derivative(self, t):
        return self.log_slope * self._value(t)

    def log_derivative(self, t):
        t = _check_in_domain(t, self.domain, "ExponentialCpi")
        return np.full_like(t, self.log_slope)

    def log_ratio(self, t0, t1):
        _check_in_domain([t0, t1], self.domain, "ExponentialCpi")
        return self.log_slope * (float(t1) - float(t0))


class PiecewiseAffineCpi(CpiModel):
    """Continuous piecewise-linear interpolant through the observations."""

    exact_log_ratio = True

    def __init__(self, times, values):
        t = np.array(times, dtype=float)
        v = np.array(values, dtype=float)
        super().__init__((t[0], t[-1]), t[1:-1])
        self.times, self.values = t, v
        self.slopes = np.diff(v) / np.diff(t)
        self.intercepts = v[:-1] - self.slopes * t[:-1]

    def _value(self, t):
        return np.interp(t, self.times, self.values)

    def _derivative(self, t):
        return self.slopes[_segment_index(self.times, t)]

    def segments(self):
        """``(t_start, t_end, slope, intercept)`` per segment; CPI = slope*t + intercept."""
        return list(zip(self.times[:-1], self.times[1:], self.slopes, self.intercepts))


class LogLinearCpi(CpiModel):
    """Interpolant that is exponential on each interval (linear in log space)."""

    exact_log_ratio = True

    def __init__(self, times, values):
        t = np.array(times, dtype=float)
        lv = np.log(np.array(values, dtype=float))
        super().__init__((t[0], t[-1]), t[1:-1])
        self.times, self.log_values = t, lv
        self.log_slopes = np.diff(lv) / np.diff(t)

    def _value(self, t):
        return np.exp(np.interp(t, self.times, self.log_values))

    def _derivative(self, t):
        return self.log_derivative(t) * self._value(t)

    def log_derivative(self, t):
        t = _check_in_domain(t, self.domain, "LogLinearCpi")
        return self.log_slopes[_segment_index(self.times, t)]

    def log_ratio(self, t0, t1):
        _check_in_domain([t0, t1], self.domain, "LogLinearCpi")
        lv = np.interp([t0, t1], self.times, self.log_values)
        return float(lv[1] - lv[0])


class BasisCpiModel(CpiModel):
    """Linear combination of basis functions with analytic derivative."""

    def __init__(self, basis, coefficients, domain=(-math.inf, math.inf)):
        super().__init__(domain)
        self.basis = tuple(basis)
        self.coefficients = np.asarray(coefficients, dtype=float)
        if self.coefficients.shape != (len(self.basis),):
            raise ValueError("one coefficient per basis function is required")

    def _value(self, t):
        flat = np.atleast_1d(t).ravel()
        out = design_matrix(self.basis, flat) @ self.coefficients
        return out.reshape(t.shape) if t.ndim else out[0]

    def _derivative(self, t):
        flat = np.atleast_1d(t).ravel()
        cols = [b.derivative(flat) for b in self.basis]
        out = np.column_stack(cols) @ self.coefficients if cols else np.zeros_like(flat)
        return out.reshape(t.shape) if t.ndim else out[0]


class CallableCpi(CpiModel):
    """Wrap user-supplied value and derivative callables."""

    def __init__(self, value, derivative, domain=(-math.inf, math.inf), knots=()):
        super().__init__(domain, knots)
        self._f, self._df = value, derivative

    def _value(self, t):
        return np.asarray(self._f(t), dtype=float)

    def _derivative(self, t):
        return np.asarray(self._df(t), dtype=float)


def piecewise_affine_model(series):
    """Piecewise-linear CPI through every observation (zero fitting error)."""
    return PiecewiseAffineCpi(series.times, series.values)


def log_linear_model(series):
    """Piecewise-exponential CPI through every observation."""
    return LogLinearCpi(series.times, series.values)


# --------------------------------------------------------------------------
# rate functions


class RateFunction:
    """Per-unit-time rate ``iota(t)`` on a closed domain.

    ``form`` is one of ``constant``, ``piecewise-constant``, ``from-cpi``,
    ``basis``.
    """

    form = "abstract"

    def __init__(self, domain=(-math.inf, math.inf), knots=()):
        self.domain = (float(domain[0]), float(domain[1]))
        self.knots = np.asarray(knots, dtype=float)

    def __call__(self, t):
        t = _check_in_domain(t, self.domain, f"{self.form} rate")
        return self._rate(t)

    def log1p(self, t):
        """``ln(1 + iota(t))``; NaN or -inf where ``1 + iota <= 0``."""
        t = _check_in_domain(t, self.domain, f"{self.form} rate")
        return self._log1p(t)

    def _rate(self, t):
        raise NotImplementedError

    def _log1p(self, t):
        r = self._rate(t)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(r > -1, np.log1p(np.maximum(r, -1)), np.nan)

    def _check_interval(self, t0, t1):
        t0, t1 = float(t0), float(t1)
        if not t0 <= t1:
            raise DomainError(f"need t0 <= t1, got [{t0}, {t1}]")
        _check_in_domain([t0, t1], self.domain, f"{self.form} rate")
        return t0, t1

    def log_accumulation(self, t0, t1, quad=None):
        t0, t1 = self._check_interval(t0, t1)
        try:
            return integrate(self._log1p, t0, t1, self.knots, quad or DEFAULT_QUADRATURE).value
        except IntegrandDomainError as exc:
            raise RateDomainError(f"1 + rate <= 0 at t={exc.where!r}") from None

    def interval_log_accumulations(self, edges, quad=None):
        """Log growth over each consecutive pair of ``edges``."""
        edges = np.asarray(edges, dtype=float)
        self._check_interval(edges[0], edges[-1])
        try:
            vals, _, _ = integrate_intervals(
                self._log1p, edges, self.knots, quad or DEFAULT_QUADRATURE
            )
        except IntegrandDomainError as exc:
            raise RateDomainError(f"1 + rate <= 0 at t={exc.where!r}") from None
        return vals


class ConstantRate(RateFunction):
    form = "constant"

    def __init__(self, rate, domain=(-math.inf, math.inf)):
        if not rate > -1:
            raise RateDomainError(f"constant rate must exceed -1, got {rate}")
        super().__init__(domain)
        self.rate = float(rate)

    def _rate(self, t):
        return np.full_like(t, self.rate)

    def log_accumulation(self, t0, t1, quad=None):
        t0, t1 = self._check_interval(t0, t1)
        return (t1 - t0) * math.log1p(self.rate)

    def interval_log_accumulations(self, edges, quad=None):
        edges = np.asarray(edges, dtype=float)
        self._check_interval(edges[0], edges[-1])
        return np.diff(edges) * math.log1p(self.rate)


class PiecewiseConstantRate(RateFunction):
    """Value ``values[k]`` on ``[knots[k], knots[k+1])``."""

    form = "piecewise-constant"

    def __init__(self, knots, values):
        k = np.array(knots, dtype=float)
        v = np.array(values, dtype=float)
        if k.ndim != 1 or k.size < 2 or v.shape != (k.size - 1,):
            raise DomainError("need n+1 knots and n values")
        if not np.all(np.diff(k) > 0):
            raise DomainError("knots must be strictly increasing")
        if not np.all(v > -1):
            raise RateDomainError("every piecewise rate must exceed -1")
        super().__init__((k[0], k[-1]), k[1:-1])
        self.breaks, self.values = k, v
        self._logs = np.log1p(v)
        self._cum = np.concatenate([[0.0], np.cumsum(np.diff(k) * self._logs)])

    def _rate(self, t):
        return self.values[_segment_index(self.breaks, t)]

    def _log1p(self, t):
        return self._logs[_segment_index(self.breaks, t)]

    def _cumulative(self, t):
        t = np.asarray(t, dtype=float)
        k = _segment_index(self.breaks, t)
        return self._cum[k] + (t - self.breaks[k]) * self._logs[k]

    def log_accumulation(self, t0, t1, quad=None):
        t0, t1 = self._check_interval(t0, t1)
        return float(self._cumulative(t1) - self._cumulative(t0))

    def interval_log_accumulations(self, edges, quad=None):
        edges = np.asarray(edges, dtype=float)
        self._check_interval(edges[0], edges[-1])
        return np.diff(self._cumulative(edges))


class CpiDerivedRate(RateFunction):
    """Instantaneous rate of a CPI model: ``exp((ln CPI)') - 1``."""

    form = "from-cpi"

    def __init__(self, model):
        super().__init__(model.domain, model.knots)
        self.model = model

    def _rate(self, t):
        return np.expm1(self.model.log_derivative(t))

    def _log1p(self, t):
        return self.model.log_derivative(t)

    def log_accumulation(self, t0, t1, quad=None):
        if self.model.exact_log_ratio:
            t0, t1 = self._check_interval(t0, t1)
            return self.model.log_ratio(t0, t1)
        return super().log_accumulation(t0, t1, quad)

    def interval_log_accumulations(self, edges, quad=None):
        if self.model.exact_log_ratio:
            edges = np.asarray(edges, dtype=float)
            self._check_interval(edges[0], edges[-1])
            return np.diff(np.log(self.model(edges)))
        return super().interval_log_accumulations(edges, quad)


class BasisExpansionRate(RateFunction):
    """``iota(t) = sum_j c_j phi_j(t)``."""

    form = "basis"

    def __init__(self, basis, coefficients, domain=(-math.inf, math.inf)):
        super().__init__(domain)
        self.basis = tuple(basis)
        self.coefficients = np.asarray(coefficients, dtype=float)
        if self.coefficients.shape != (len(self.basis),):
            raise ValueError("one coefficient per basis function is required")

    def _rate(self, t):
        flat = np.atleast_1d(t).ravel()
        out = design_matrix(self.basis, flat) @ self.coefficients
        return out.reshape(t.shape) if t.ndim else out[0]


# --------------------------------------------------------------------------
# operations


@dataclass(frozen=True)
class TangentExponential:
    """``F(x) = scale * exp(log_slope * x)`` touching a CPI model at ``anchor``."""

    scale: float
    log_slope: float
    anchor: float

    def __call__(self, x):
        return self.scale * np.exp(self.log_slope * np.asarray(x, dtype=float))

    @property
    def rate(self):
        """Per-unit-time rate of the constant inflation this exponential describes."""
        return math.expm1(self.log_slope)


@dataclass(frozen=True)
class AccumulationResult:
    rate: float
    growth_factor: float
    objective_ratio: float
    log_growth: float


def tangent_exponential(model, x):
    """Exponential with first-order contact with ``model`` at ``x``.

    At a knot the right-hand derivative is used.
    """
    x = float(x)
    value = float(model(x))
    slope = float(model.log_derivative(x))
    return TangentExponential(value * math.exp(-slope * x), slope, x)


def rate_from_cpi(model):
    return CpiDerivedRate(model)


def log_accumulation(rate, t0, t1, quad=None):
    """``integral_{t0}^{t1} ln(1 + rate(u)) du``."""
    return rate.log_accumulation(t0, t1, quad)


def accumulate(rate, t0, t1, quad=None):
    """Rate of inflation over ``[t0, t1]`` for a per-unit-time rate function."""
    lg = rate.log_accumulation(t0, t1, quad)
    growth = math.exp(lg)
    return AccumulationResult(growth - 1.0, growth, growth, lg)


def real_value(rate, x0, t0, t1, quad=None):
    """Real value at ``t1`` of an amount worth ``x0`` at ``t0``."""
    if not x0 > 0:
        raise DomainError(f"starting value must be positive, got {x0}")
    return x0 / accumulate(rate, t0, t1, quad).growth_factor


def constant_accumulate(rate, duration):
    """``(1 + rate) ** duration - 1``."""
    if not rate > -1:
        raise RateDomainError(f"rate must exceed -1, got {rate}")
    return (1.0 + rate) ** duration - 1.0


def piecewise_product_accumulate(knots, values):
    """``prod_i (1 + I_i) ** (t_{i+1} - t_i) - 1``."""
    k = np.asarray(knots, dtype=float)
    v = np.asarray(values, dtype=float)
    if k.ndim != 1 or k.size < 2 or v.shape != (k.size - 1,):
        raise DomainError("need n+1 knots and n values")
    if not np.all(np.diff(k) > 0):
        raise DomainError("knots must be strictly increasing")
    if not np.all(v > -1):
        raise RateDomainError("every rate must exceed -1")
    return float(np.prod((1.0 + v) ** np.diff(k))) - 1.0
