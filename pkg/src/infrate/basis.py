"""Named scalar basis functions of time, with closed-form derivatives.

Families (order matters for tie-breaking):

========  ===========================  ==========================
family    value at x                   parameters
========  ===========================  ==========================
power     (i/12) ** (x - y0)           i, y0
root      (x - y0) ** (i/12)           i, y0
log       ln(x - y0)                   y0
sin       sin(pi x / i)                i (any positive real)
cos       cos(pi x / i)                i
xsin      x sin(pi x / i)              i
xcos      x cos(pi x / i)              i
const     1
========  ===========================  ==========================
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

FAMILIES = ("power", "root", "log", "sin", "cos", "xsin", "xcos", "const")
_TRIG = ("sin", "cos", "xsin", "xcos")


def _num(x):
    return str(int(x)) if float(x).is_integer() else repr(float(x))


@dataclass(frozen=True)
class BasisFunctionSpec:
    family: str
    i: float = 0
    y0: float = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise DomainError(f"unknown basis family {self.family!r}")
        if self.family in ("power", "root") + _TRIG and not self.i > 0:
            raise DomainError(f"{self.family} needs a positive parameter i, got {self.i}")

    @property
    def name(self):
        f, i = self.family, self.i
        if f == "const":
            return "1"
        if f == "power":
            return f"({_num(i)}/12)^(x-{_num(self.y0)})"
        if f == "root":
            return f"(x-{_num(self.y0)})^({_num(i)}/12)"
        if f == "log":
            return f"ln(x-{_num(self.y0)})"
        frac = Fraction(float(i)).limit_denominator(1000)
        if frac.numerator == 1 and frac.denominator != 1:
            arg = f"{frac.denominator}*pi*x"
        elif frac == 1:
            arg = "pi*x"
        else:
            arg = f"pi*x/{_num(i)}"
        trig = f[1:] if f.startswith("x") else f
        return f"x*{trig}({arg})" if f.startswith("x") else f"{trig}({arg})"

    def __str__(self):
        return self.name

    def _check(self, x, out):
        bad = ~np.isfinite(out)
        if bad.any():
            where = np.broadcast_to(x, out.shape)[bad].ravel()[0]
            raise DomainError(f"basis function {self.name} is not evaluable at x={where!r}")
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        f = self.family
        with np.errstate(all="ignore"):
            if f == "const":
                out = np.ones_like(x)
            elif f == "power":
                out = (self.i / 12) ** (x - self.y0)
            elif f == "root":
                out = np.where(x - self.y0 >= 0, np.abs(x - self.y0) ** (self.i / 12), np.nan)
            elif f == "log":
                out = np.where(x - self.y0 > 0, np.log(np.abs(x - self.y0)), np.nan)
            else:
                w = np.pi / self.i
                base = np.sin(w * x) if f in ("sin", "xsin") else np.cos(w * x)
                out = x * base if f.startswith("x") else base
        return self._check(x, out)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        f = self.family
        with np.errstate(all="ignore"):
            if f == "const":
                out = np.zeros_like(x)
            elif f == "power":
                c = self.i / 12
                out = c ** (x - self.y0) * np.log(c)
            elif f == "root":
                p = self.i / 12
                d = x - self.y0
                out = np.where(d > 0, p * np.abs(d) ** (p - 1), np.nan)
            elif f == "log":
                d = x - self.y0
                out = np.where(d > 0, 1.0 / d, np.nan)
            else:
                w = np.pi / self.i
                s, c = np.sin(w * x), np.cos(w * x)
                if f == "sin":
                    out = w * c
                elif f == "cos":
                    out = -w * s
                elif f == "xsin":
                    out = s + x * w * c
                else:
                    out = c - x * w * s
        return self._check(x, out)

    def to_dict(self):
        return {"family": self.family, "i": float(self.i), "y0": float(self.y0)}

    @classmethod
    def from_dict(cls, d):
        return cls(d["family"], d.get("i", 0), d.get("y0", 0))


CONSTANT = BasisFunctionSpec("const")


def design_matrix(basis, x):
    """Columns are the basis members evaluated at ``x``."""
    x = np.asarray(x, dtype=float).ravel()
    if not basis:
        return np.empty((x.size, 0))
    return np.column_stack([np.broadcast_to(b(x), x.shape) for b in basis])


def trend_pool(bases=(1992, 1993), log_shifts=(1992, 1991), n=24, include_degenerate=False):
    """Candidate trend functions, in tie-breaking order.

    ``(12/12) ** (x - y0)`` is identically 1; it is dropped unless
    ``include_degenerate`` because it duplicates the always-present constant.
    """
    pool = []
    for y0 in bases:
        pool += [
            BasisFunctionSpec("power", i, y0)
            for i in range(1, n + 1)
            if include_degenerate or i != 12
        ]
    for y0 in bases:
        pool += [BasisFunctionSpec("root", i, y0) for i in range(1, n + 1)]
    pool += [BasisFunctionSpec("log", 0, y0) for y0 in log_shifts]
    return pool


def trig_pool(n=5):
    """``sin``, ``cos``, ``x sin``, ``x cos`` of ``pi x / i`` for ``i = 1..n``."""
    return [BasisFunctionSpec(f, i) for f in _TRIG for i in range(1, n + 1)]
