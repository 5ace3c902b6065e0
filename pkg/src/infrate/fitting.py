"""Reconstructing CPI trends and rate functions from observations.

Two routes are provided:

* Fit the CPI itself with basis functions (``BestPairTrend`` for a trend,
  ``BackwardElimination`` for what remains), combine both stages with
  :func:`cpi_model_from_fit`, then read the rate off the model.
* Fit the rate directly (``DirectRateFit``) by minimizing the gap between
  modelled growth factors and measured CPI ratios over every observation
  interval (:func:`functional_residual`).

The estimators follow the scikit-learn API: ``X`` holds observation times,
either 1-D or a single column, and ``y`` the CPI values or residuals.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from .basis import CONSTANT, BasisFunctionSpec, design_matrix, trend_pool, trig_pool
from .errors import DomainError, InfeasibleStartError, PositivityError, RateDomainError
from .quadrature import DEFAULT_QUADRATURE, integrate_intervals
from .rates import BasisCpiModel, BasisExpansionRate, CpiDerivedRate
from .timebase import CpiSeries

SIGNIFICANT_DIGITS = 12
_STRATEGIES = ("iterative", "one-shot", "exhaustive")
_MAX_SUBSETS = 5_000_000


def check_times(X):
    """Validate observation times; returns a 1-D float array."""
    X = check_array(X, ensure_2d=False, dtype=float, input_name="X")
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"X must hold a single time column, got shape {X.shape}")
        X = X[:, 0]
    return X


def check_time_series(X, y):
    t = check_times(X)
    y = check_array(y, ensure_2d=False, dtype=float, input_name="y")
    if y.ndim != 1:
        raise ValueError("y must be 1-D")
    check_consistent_length(t, y)
    return t, y


def _round(x):
    return float(f"{x:.{SIGNIFICANT_DIGITS}g}")


# singular values below this fraction of the largest are treated as zero
_RCOND = 1e-12


def _solve(A, y):
    # lstsq is SVD-based: minimum-norm solution when A is rank deficient
    coef, *_ = np.linalg.lstsq(A, y, rcond=_RCOND)
    r = A @ coef - y
    return coef, float(r @ r)


def _is_better(sse, best, rtol):
    return best is None or sse < best * (1 - rtol) - 1e-300


@dataclass(frozen=True)
class LinearFit:
    basis: tuple
    coefficients: np.ndarray
    sse: float
    domain: tuple = (-math.inf, math.inf)

    def predict(self, t):
        return design_matrix(self.basis, t) @ self.coefficients

    def sse_on(self, t, y):
        r = self.predict(t) - np.asarray(y, dtype=float)
        return float(r @ r)

    @property
    def names(self):
        return [b.name for b in self.basis]

    def to_dict(self):
        return {
            "kind": "linear-fit",
            "basis": [dict(b.to_dict(), name=b.name) for b in self.basis],
            "coefficients": [_round(c) for c in self.coefficients],
            "sse": _round(self.sse),
            "domain": list(self.domain),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            tuple(BasisFunctionSpec.from_dict(b) for b in d["basis"]),
            np.asarray(d["coefficients"], dtype=float),
            float(d["sse"]),
            tuple(d.get("domain", (-math.inf, math.inf))),
        )


def linear_least_squares(times, values, basis):
    """Least-squares coefficients of ``basis`` for the data ``(times, values)``."""
    t, y = check_time_series(times, values)
    basis = tuple(basis)
    if not basis:
        raise ValueError("at least one basis function is required")
    if t.size < len(basis):
        raise ValueError(f"{len(basis)} basis functions need at least as many data points")
    coef, sse = _solve(design_matrix(basis, t), y)
    return LinearFit(basis, coef, sse, (float(t.min()), float(t.max())))


class _LinearFitMixin(RegressorMixin):
    def predict(self, X):
        check_is_fitted(self, "coef_")
        return design_matrix(self.basis_, check_times(X)) @ self.coef_

    @property
    def fit_(self):
        check_is_fitted(self, "coef_")
        return LinearFit(tuple(self.basis_), self.coef_, self.sse_, self.domain_)

    def _store(self, basis, coef, sse, t):
        self.basis_ = list(basis)
        self.coef_ = coef
        self.sse_ = sse
        self.domain_ = (float(t.min()), float(t.max()))
        self.n_features_in_ = 1


class BasisRegression(_LinearFitMixin, BaseEstimator):
    """Ordinary least squares on a fixed list of basis functions.

    Parameters
    ----------
    basis : list of BasisFunctionSpec, default=None
        Columns of the design matrix; ``None`` means a constant only.
    """

    def __init__(self, basis=None):
        self.basis = basis

    def fit(self, X, y):
        fit = linear_least_squares(X, y, self.basis or [CONSTANT])
        self._store(fit.basis, fit.coefficients, fit.sse, check_times(X))
        return self


class BestPairTrend(_LinearFitMixin, BaseEstimator):
    """Best constant-plus-two trend over every unordered pair of a pool.

    Pairs whose sse agree to ``tie_rtol`` count as ties; the pair that comes
    first in pool order wins.

    Parameters
    ----------
    pool : list of BasisFunctionSpec, default=None
        Candidate trend functions; ``None`` uses :func:`trend_pool`.
    tie_rtol : float, default=1e-9
    """

    def __init__(self, pool=None, tie_rtol=1e-9):
        self.pool = pool
        self.tie_rtol = tie_rtol

    def fit(self, X, y):
        t, y = check_time_series(X, y)
        pool = list(self.pool) if self.pool is not None else trend_pool()
        if len(pool) < 2:
            raise ValueError("the pool needs at least two candidates")
        cols = design_matrix(pool, t)
        ones = np.ones_like(t)
        best = None
        n_pairs = 0
        for a, b in itertools.combinations(range(len(pool)), 2):
            coef, sse = _solve(np.column_stack([ones, cols[:, a], cols[:, b]]), y)
            n_pairs += 1
            if _is_better(sse, best and best[0], self.tie_rtol):
                best = (sse, a, b, coef)
        sse, a, b, coef = best
        self.pair_ = (pool[a], pool[b])
        self.n_pairs_ = n_pairs
        self._store([CONSTANT, pool[a], pool[b]], coef, sse, t)
        return self


def best_pair_trend(series, pool=None):
    est = BestPairTrend(pool=pool).fit(series.times, series.values)
    return est.fit_


class BackwardElimination(_LinearFitMixin, BaseEstimator):
    """Drop ``n_remove`` pool members with the least loss of accuracy.

    A constant column is always kept and never eliminated.

    ``strategy`` selects how "least loss" is searched:

    ``"iterative"``
        Remove one function at a time, each time the one whose absence gives
        the smallest refitted sse. Ties remove the later pool member.
    ``"one-shot"``
        Rank members by the sse of the full fit without them, and drop the
        ``n_remove`` cheapest at once.
    ``"exhaustive"``
        Try every subset of the surviving size and keep the best. Ties keep
        the subset that comes first in pool order.
    """

    def __init__(self, pool=None, n_remove=15, strategy="iterative", tie_rtol=1e-9):
        self.pool = pool
        self.n_remove = n_remove
        self.strategy = strategy
        self.tie_rtol = tie_rtol

    def fit(self, X, y):
        t, y = check_time_series(X, y)
        pool = list(self.pool) if self.pool is not None else trig_pool()
        if self.strategy not in _STRATEGIES:
            raise ValueError(f"strategy must be one of {_STRATEGIES}, got {self.strategy!r}")
        if not 0 <= self.n_remove < len(pool):
            raise ValueError(f"n_remove must be in [0, {len(pool)}), got {self.n_remove}")
        cols = design_matrix(pool, t)
        ones = np.ones_like(t)[:, None]

        def sse_of(keep):
            return _solve(np.hstack([ones, cols[:, list(keep)]]), y)

        history = []
        if self.strategy == "iterative":
            alive = list(range(len(pool)))
            for _ in range(self.n_remove):
                best = None
                # reverse order so that, among ties, the later member goes first
                for k in reversed(alive):
                    sse = sse_of([j for j in alive if j != k])[1]
                    if _is_better(sse, best and best[0], self.tie_rtol):
                        best = (sse, k)
                alive.remove(best[1])
                history.append((pool[best[1]], best[0]))
            keep = alive
        elif self.strategy == "one-shot":
            full = list(range(len(pool)))
            losses = sorted(
                (sse_of([j for j in full if j != k])[1], -k) for k in full
            )
            dropped = sorted(-k for _, k in losses[: self.n_remove])
            keep = [j for j in full if j not in dropped]
            history = [(pool[k], None) for k in dropped]
        else:
            size = len(pool) - self.n_remove
            if math.comb(len(pool), size) > _MAX_SUBSETS:
                raise ValueError("too many subsets for an exhaustive search")
            best = None
            for keep_try in itertools.combinations(range(len(pool)), size):
                sse = sse_of(keep_try)[1]
                if _is_better(sse, best and best[0], self.tie_rtol):
                    best = (sse, keep_try)
            keep = list(best[1])
            history = [(pool[k], None) for k in range(len(pool)) if k not in keep]

        coef, sse = sse_of(keep)
        self.support_ = np.isin(np.arange(len(pool)), keep)
        self.history_ = history
        self._store([CONSTANT] + [pool[k] for k in keep], coef, sse, t)
        return self


def greedy_backward_elimination(times, targets, pool=None, remove_count=15, strategy="iterative"):
    est = BackwardElimination(pool=pool, n_remove=remove_count, strategy=strategy)
    return est.fit(times, targets).fit_


def cpi_model_from_fit(trend, seasonal=None, domain=None, grid_step=1 / 1200):
    """Combine fitted stages into one CPI model with an analytic derivative.

    Raises:
        PositivityError: the model is not positive on a ``grid_step`` grid of
            ``domain`` (defaults to the span of the fitted data).
    """
    basis = list(trend.basis)
    coef = list(trend.coefficients)
    if seasonal is not None:
        basis += list(seasonal.basis)
        coef += list(seasonal.coefficients)
    lo, hi = domain or trend.domain
    model = BasisCpiModel(basis, coef, (lo, hi))
    if math.isfinite(lo) and math.isfinite(hi):
        n = max(2, int(math.ceil((hi - lo) / grid_step)) + 1)
        values = model(np.linspace(lo, hi, n))
        if not np.all(values > 0):
            raise PositivityError(f"fitted CPI model is not positive on [{lo}, {hi}]")
    return model


def functional_residual(rate, series, quad=None, form="ratio"):
    """Mismatch between a rate function and consecutive CPI observations.

    ``form="ratio"`` sums ``(exp(int ln(1+rate)) - v[i+1]/v[i])**2`` over the
    observation intervals. ``form="level"`` compounds from the first
    observation instead and sums ``(v[0] * growth(t0, t[i+1]) - v[i+1])**2``.
    """
    logs = rate.interval_log_accumulations(series.times, quad)
    v = series.values
    if form == "ratio":
        r = np.exp(logs) - v[1:] / v[:-1]
    elif form == "level":
        r = v[0] * np.exp(np.cumsum(logs)) - v[1:]
    else:
        raise ValueError(f"form must be 'ratio' or 'level', got {form!r}")
    return float(r @ r)


@dataclass(frozen=True)
class OptimizerConfig:
    max_evaluations: int = 2000
    simplex_scale: float = 0.01
    xatol: float = 1e-10
    fatol: float = 1e-18


@dataclass(frozen=True)
class RateFitReport:
    rate: BasisExpansionRate
    residual: float
    intervals_used: int
    init_residual: float = math.nan
    converged: bool = True
    evaluations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def coefficients(self):
        return self.rate.coefficients

    def to_dict(self):
        return {
            "kind": "rate-fit",
            "basis": [dict(b.to_dict(), name=b.name) for b in self.rate.basis],
            "coefficients": [_round(c) for c in self.rate.coefficients],
            "residual": _round(self.residual),
            "init_residual": _round(self.init_residual),
            "intervals_used": self.intervals_used,
            "converged": self.converged,
            "evaluations": self.evaluations,
            "domain": list(self.rate.domain),
        }

    @classmethod
    def from_dict(cls, d):
        rate = BasisExpansionRate(
            [BasisFunctionSpec.from_dict(b) for b in d["basis"]],
            d["coefficients"],
            tuple(d.get("domain", (-math.inf, math.inf))),
        )
        return cls(
            rate,
            float(d["residual"]),
            int(d["intervals_used"]),
            float(d.get("init_residual", math.nan)),
            bool(d.get("converged", True)),
            int(d.get("evaluations", 0)),
        )


def linearized_rate_guess(series, basis, quad=None):
    """Starting coefficients from ``ln(1 + rate) ~ rate``.

    Regresses the per-interval mean log growth onto the per-interval means of
    each basis function.
    """
    t = series.times
    dt = np.diff(t)
    target = np.diff(np.log(series.values)) / dt
    cols = []
    for b in basis:
        vals, _, _ = integrate_intervals(b, t, cfg=quad or DEFAULT_QUADRATURE)
        cols.append(vals / dt)
    coef, _ = _solve(np.column_stack(cols), target)
    return coef


class DirectRateFit(BaseEstimator):
    """Fit ``rate(t) = sum_j c_j phi_j(t)`` to CPI data through its growth factors.

    The objective is :func:`functional_residual`. It is minimized with a
    Nelder-Mead simplex started from ``init`` (or the linearized guess).
    Parameter vectors for which ``1 + rate`` is not positive score ``inf``.

    Parameters
    ----------
    basis : list of BasisFunctionSpec, default=None
        ``None`` fits a constant rate.
    init : array-like, default=None
    max_evaluations : int, default=2000
        Objective budget. ``0`` evaluates ``init`` without optimizing.
    simplex_scale : float, default=0.01
        Edge length of the initial simplex along each coordinate.
    """

    def __init__(
        self,
        basis=None,
        init=None,
        max_evaluations=2000,
        simplex_scale=0.01,
        xatol=1e-10,
        fatol=1e-18,
        quad=None,
    ):
        self.basis = basis
        self.init = init
        self.max_evaluations = max_evaluations
        self.simplex_scale = simplex_scale
        self.xatol = xatol
        self.fatol = fatol
        self.quad = quad

    def fit(self, X, y=None):
        series = X if isinstance(X, CpiSeries) else CpiSeries(*check_time_series(X, y))
        basis = tuple(self.basis or [CONSTANT])
        quad = self.quad or DEFAULT_QUADRATURE
        domain = series.span
        if self.init is None:
            x0 = linearized_rate_guess(series, basis, quad)
        else:
            x0 = np.asarray(self.init, dtype=float)
            if x0.shape != (len(basis),):
                raise ValueError("init needs one coefficient per basis function")

        def objective(c):
            try:
                return functional_residual(BasisExpansionRate(basis, c, domain), series, quad)
            except RateDomainError:
                return math.inf

        init_residual = objective(x0)
        best_x, best_f, nfev, converged = x0, init_residual, 1, True
        if self.max_evaluations > 0:
            simplex = np.vstack([x0, x0 + self.simplex_scale * np.eye(len(x0))])
            res = minimize(
                objective,
                x0,
                method="Nelder-Mead",
                options={
                    "maxfev": self.max_evaluations,
                    "initial_simplex": simplex,
                    "xatol": self.xatol,
                    "fatol": self.fatol,
                },
            )
            nfev += res.nfev
            converged = bool(res.status == 0)
            if res.fun <= best_f:
                best_x, best_f = res.x, float(res.fun)
        else:
            converged = False
        if not math.isfinite(best_f):
            raise InfeasibleStartError("no iterate kept 1 + rate positive on the data span")

        self.coef_ = np.asarray(best_x, dtype=float)
        self.basis_ = list(basis)
        self.rate_ = BasisExpansionRate(basis, self.coef_, domain)
        self.residual_ = best_f
        self.init_residual_ = init_residual
        self.converged_ = converged
        self.n_evaluations_ = nfev
        self.n_intervals_ = len(series) - 1
        self.n_features_in_ = 1
        return self

    def predict(self, X):
        """Fitted rate at times ``X``."""
        check_is_fitted(self, "coef_")
        return self.rate_(check_times(X))

    @property
    def report_(self):
        check_is_fitted(self, "coef_")
        return RateFitReport(
            self.rate_,
            self.residual_,
            self.n_intervals_,
            self.init_residual_,
            self.converged_,
            self.n_evaluations_,
        )


def fit_rate_direct(series, basis=None, init=None, quad=None, opt=None):
    opt = opt or OptimizerConfig()
    est = DirectRateFit(
        basis=basis,
        init=init,
        max_evaluations=opt.max_evaluations,
        simplex_scale=opt.simplex_scale,
        xatol=opt.xatol,
        fatol=opt.fatol,
        quad=quad,
    ).fit(series)
    return est.report_


@dataclass(frozen=True)
class CpiModelReport:
    """Two-stage CPI fit: trend plus seasonal component."""

    trend: LinearFit
    seasonal: LinearFit | None = None

    @property
    def sse(self):
        return self.seasonal.sse if self.seasonal is not None else self.trend.sse

    def model(self):
        return cpi_model_from_fit(self.trend, self.seasonal)

    def rate(self):
        return CpiDerivedRate(self.model())

    def to_dict(self):
        return {
            "kind": "cpi-model",
            "trend": self.trend.to_dict(),
            "seasonal": self.seasonal.to_dict() if self.seasonal is not None else None,
            "sse": _round(self.sse),
        }

    @classmethod
    def from_dict(cls, d):
        seasonal = d.get("seasonal")
        return cls(
            LinearFit.from_dict(d["trend"]),
            LinearFit.from_dict(seasonal) if seasonal else None,
        )


_KINDS = {"linear-fit": LinearFit, "rate-fit": RateFitReport, "cpi-model": CpiModelReport}


def dumps_report(report):
    return json.dumps(report.to_dict(), indent=2, allow_nan=True)


def loads_report(text):
    d = json.loads(text)
    try:
        cls = _KINDS[d["kind"]]
    except KeyError:
        raise DomainError(f"unknown report kind {d.get('kind')!r}") from None
    return cls.from_dict(d)


def save_report(report, path):
    Path(path).write_text(dumps_report(report) + "\n", encoding="utf-8")


def load_report(path):
    return loads_report(Path(path).read_text(encoding="utf-8"))


def report_rate(report):
    """The rate function described by any report kind."""
    if isinstance(report, RateFitReport):
        return report.rate
    if isinstance(report, CpiModelReport):
        return report.rate()
    if isinstance(report, LinearFit):
        return CpiDerivedRate(cpi_model_from_fit(report))
    raise TypeError(f"not a report: {report!r}")
