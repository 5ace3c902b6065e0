"""Adaptive Simpson quadrature with Richardson error control.

Subintervals are refined breadth-first and evaluated in batches, so ``f``
should accept numpy arrays; scalar-only callables are detected and looped.
Each leaf is accepted when ``|S_fine - S_coarse| / 15`` is within its share
of ``abs_tol`` (the share halves with every bisection). Refinement never
crosses a supplied knot; a knot node takes ``f``'s value there for the panel
to its right and the left limit for the panel to its left.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError, IntegrandDomainError

# refuse to track more live subintervals than this
_MAX_ACTIVE = 2_000_000


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_depth: int = 40
    initial_subdivisions: int = 1

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be > 0, got {self.abs_tol}")
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.initial_subdivisions < 1:
            raise ValueError("initial_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


class _Counted:
    def __init__(self, f):
        self.f = f
        self.count = 0
        self._vectorized = None

    def __call__(self, x):
        self.count += x.size
        if self._vectorized is None:
            try:
                y = np.asarray(self.f(x), dtype=float)
                self._vectorized = y.shape == x.shape
            except (TypeError, ValueError):
                self._vectorized = False
            if self._vectorized:
                return self._check(x, y)
        if self._vectorized:
            y = np.asarray(self.f(x), dtype=float)
        else:
            y = np.array([float(self.f(xi)) for xi in x])
        return self._check(x, y)

    @staticmethod
    def _check(x, y):
        bad = ~np.isfinite(y)
        if bad.any():
            where = float(x[bad][0])
            raise IntegrandDomainError(f"integrand is not finite at t={where!r}", where)
        return y


def _segment_edges(a, b, knots, n_sub):
    inner = np.asarray(sorted(k for k in np.asarray(knots, float).ravel() if a < k < b))
    edges = np.concatenate([[a], inner, [b]])
    if n_sub > 1:
        frac = np.arange(n_sub) / n_sub
        edges = np.concatenate(
            [lo + (hi - lo) * frac for lo, hi in zip(edges[:-1], edges[1:])] + [[b]]
        )
    return edges


def _adaptive(f, lo, hi, tol, max_depth, force, knots=()):
    """Integrate over each ``[lo[k], hi[k]]`` with absolute tolerance ``tol[k]``.

    Panels flagged in ``force`` are bisected at least once. A panel ending on
    one of ``knots`` samples its right end just below the knot, so a
    right-continuous ``f`` contributes its left limit there. Returns per-panel
    values, per-panel error estimates, and a flag per panel telling whether
    any leaf ran out of depth.
    """
    n = lo.size
    values = np.zeros(n)
    errors = np.zeros(n)
    exhausted = np.zeros(n, dtype=bool)
    if n == 0:
        return values, errors, exhausted

    seg = np.arange(n)
    a, b = lo.astype(float), hi.astype(float)
    m = 0.5 * (a + b)
    # neighbouring panels share endpoints; evaluate each node once
    b_node = np.where(np.isin(b, knots), np.nextafter(b, -np.inf), b)
    ends, inv = np.unique(np.concatenate([a, b_node]), return_inverse=True)
    fe = f(ends)
    fa, fb = fe[inv[:n]], fe[inv[n:]]
    fm = f(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    depth = np.zeros(n, dtype=int)
    tol = tol.astype(float)
    force = np.asarray(force, dtype=bool)

    while seg.size:
        if seg.size > _MAX_ACTIVE:
            raise AccuracyError(
                "quadrature refinement exploded; integrand is too rough",
                estimate=float(values.sum()),
                error_estimate=float("inf"),
            )
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        k = seg.size
        fy = f(np.concatenate([lm, rm]))
        flm, frm = fy[:k], fy[k:]
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        err = np.abs(delta) / 15.0
        # a lone Simpson panel can agree with itself by accident on periodic
        # integrands, so an interval with no breakpoints is split at least once
        ok = (err <= tol) & ~(force & (depth == 0))
        stuck = ~ok & (depth + 1 >= max_depth)
        done = ok | stuck
        if done.any():
            np.add.at(values, seg[done], (left + right + delta / 15.0)[done])
            np.add.at(errors, seg[done], err[done])
            if stuck.any():
                exhausted[seg[stuck]] = True
        go = ~done
        if not go.any():
            break
        # children: [a, m] then [m, b]
        seg = np.concatenate([seg[go], seg[go]])
        na = np.concatenate([a[go], m[go]])
        nb = np.concatenate([m[go], b[go]])
        nfa = np.concatenate([fa[go], fm[go]])
        nfm = np.concatenate([flm[go], frm[go]])
        nfb = np.concatenate([fm[go], fb[go]])
        whole = np.concatenate([left[go], right[go]])
        tol = np.concatenate([tol[go], tol[go]]) * 0.5
        depth = np.concatenate([depth[go], depth[go]]) + 1
        force = np.concatenate([force[go], force[go]])
        a, b, fa, fm, fb = na, nb, nfa, nfm, nfb
        m = 0.5 * (a + b)
    return values, errors, exhausted


def integrate(f, a, b, knots=(), cfg=None):
    """Integrate ``f`` over ``[a, b]`` to within ``cfg.abs_tol``.

    Args:
        f: Integrand, ideally vectorized over numpy arrays.
        a, b: Limits with ``a <= b``.
        knots: Interior breakpoints; no subinterval straddles one. Knots
            outside ``(a, b)`` are ignored.
        cfg: :class:`QuadratureConfig`; defaults to ``abs_tol=1e-10``.

    Returns:
        :class:`QuadratureResult`.

    Raises:
        IntegrandDomainError: ``f`` is not finite at some node.
        AccuracyError: Depth ran out before the tolerance was met. The
            exception carries the best estimate.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    a, b = float(a), float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a > b:
        raise DomainError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return QuadratureResult(0.0, 0.0, 0)
    edges = _segment_edges(a, b, knots, cfg.initial_subdivisions)
    widths = np.diff(edges)
    counted = _Counted(f)
    force = np.full(widths.size, widths.size == 1)
    vals, errs, exhausted = _adaptive(
        counted,
        edges[:-1],
        edges[1:],
        cfg.abs_tol * widths / (b - a),
        cfg.max_depth,
        force,
        np.asarray(knots, dtype=float).ravel(),
    )
    value, err = float(vals.sum()), float(errs.sum())
    if exhausted.any():
        raise AccuracyError(
            f"tolerance {cfg.abs_tol:g} not reached within depth {cfg.max_depth} "
            f"on [{a}, {b}]",
            estimate=value,
            error_estimate=err,
        )
    return QuadratureResult(value, err, counted.count)


def integrate_intervals(f, edges, knots=(), cfg=None):
    """Integrate ``f`` over each ``[edges[i], edges[i+1]]`` in one batched pass.

    Every interval gets the full ``cfg.abs_tol``. Returns ``(values, errors,
    evaluations)`` with one value and error per interval.
    """
    cfg = cfg or DEFAULT_QUADRATURE
    edges = np.asarray(edges, dtype=float).ravel()
    if edges.size < 2 or not np.all(np.diff(edges) >= 0):
        raise DomainError("edges must be a non-decreasing sequence of length >= 2")
    owner, lo, hi, tol, force = [], [], [], [], []
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        if a == b:
            continue
        sub = _segment_edges(a, b, knots, cfg.initial_subdivisions)
        w = np.diff(sub)
        owner.append(np.full(w.size, i))
        lo.append(sub[:-1])
        hi.append(sub[1:])
        tol.append(cfg.abs_tol * w / (b - a))
        force.append(np.full(w.size, w.size == 1))
    n = edges.size - 1
    if not owner:
        return np.zeros(n), np.zeros(n), 0
    owner = np.concatenate(owner)
    counted = _Counted(f)
    vals, errs, exhausted = _adaptive(
        counted,
        np.concatenate(lo),
        np.concatenate(hi),
        np.concatenate(tol),
        cfg.max_depth,
        np.concatenate(force),
        np.asarray(knots, dtype=float).ravel(),
    )
    values = np.bincount(owner, weights=vals, minlength=n)
    errors = np.bincount(owner, weights=errs, minlength=n)
    if exhausted.any():
        bad = int(owner[exhausted][0])
        raise AccuracyError(
            f"tolerance {cfg.abs_tol:g} not reached within depth {cfg.max_depth} "
            f"on [{edges[bad]}, {edges[bad + 1]}]",
            estimate=values,
            error_estimate=errors,
        )
    return values, errors, counted.count
