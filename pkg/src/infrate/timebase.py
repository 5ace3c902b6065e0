"""CPI observations on a decimal-year time axis.

Records are read from a two-column CSV. The time column is either a month
code ``YYYY.MM`` (exactly two digits after the dot) or a plain decimal year.
Month codes are converted once, at parse time::

    >>> month_code_to_time(MonthCode(1993, 6))
    1993.5
    >>> month_code_to_time(MonthCode(1993, 12))
    1994.0

The default ``"end"`` convention places month ``m`` at ``year + m/12`` so that
December rolls over to the next year. The ``"start"`` convention places it at
``year + (m - 1)/12``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import CsvParseError, DomainError

MONTH_CONVENTIONS = ("end", "start")

_MONTH_CODE = re.compile(r"^(\d{4})\.(\d{2})$")


@dataclass(frozen=True, order=True)
class MonthCode:
    year: int
    month: int

    def __post_init__(self):
        if not 1 <= self.month <= 12:
            raise DomainError(f"month must be in 1..12, got {self.month}")


@dataclass(frozen=True)
class CpiObservation:
    time: float
    value: float

    def __post_init__(self):
        if not math.isfinite(self.time):
            raise DomainError(f"observation time must be finite, got {self.time}")
        if not (math.isfinite(self.value) and self.value > 0):
            raise DomainError(f"CPI value must be positive, got {self.value}")


class CpiSeries:
    """Immutable, strictly increasing CPI observations (at least two).

    ``times`` and ``values`` are read-only float arrays.
    """

    __slots__ = ("_times", "_values")

    def __init__(self, times, values):
        t = np.array(times, dtype=float).ravel()
        v = np.array(values, dtype=float).ravel()
        if t.shape != v.shape:
            raise DomainError("times and values must have the same length")
        if t.size < 2:
            raise DomainError(f"a CPI series needs at least 2 observations, got {t.size}")
        if not np.all(np.isfinite(t)):
            raise DomainError("observation times must be finite")
        if not np.all(np.isfinite(v) & (v > 0)):
            raise DomainError("CPI values must be finite and positive")
        if not np.all(np.diff(t) > 0):
            raise DomainError("observation times must be strictly increasing")
        t.flags.writeable = False
        v.flags.writeable = False
        self._times = t
        self._values = v

    @classmethod
    def from_observations(cls, observations):
        obs = sorted(observations, key=lambda o: o.time)
        return cls([o.time for o in obs], [o.value for o in obs])

    @property
    def times(self):
        return self._times

    @property
    def values(self):
        return self._values

    @property
    def span(self):
        return float(self._times[0]), float(self._times[-1])

    @property
    def observations(self):
        return [CpiObservation(float(t), float(v)) for t, v in zip(self._times, self._values)]

    def scaled(self, factor):
        """Return a copy with every value multiplied by ``factor``."""
        return CpiSeries(self._times, self._values * factor)

    def __len__(self):
        return self._times.size

    def __eq__(self, other):
        if not isinstance(other, CpiSeries):
            return NotImplemented
        return np.array_equal(self._times, other._times) and np.array_equal(
            self._values, other._values
        )

    def __repr__(self):
        a, b = self.span
        return f"CpiSeries(n={len(self)}, span=[{a:.6g}, {b:.6g}])"


def month_code_to_time(code, convention="end"):
    """Convert a month code to decimal years."""
    if convention not in MONTH_CONVENTIONS:
        raise DomainError(f"unknown month convention {convention!r}")
    if not isinstance(code, MonthCode):
        code = MonthCode(*code)
    if convention == "start":
        return code.year + (code.month - 1) / 12
    if code.month == 12:
        return float(code.year + 1)
    return code.year + code.month / 12


def _parse_time(token, convention):
    m = _MONTH_CODE.match(token)
    if m:
        return month_code_to_time(MonthCode(int(m.group(1)), int(m.group(2))), convention)
    t = float(token)
    if not math.isfinite(t):
        raise DomainError(f"time must be finite, got {token!r}")
    return t


def parse_cpi_records(text, convention="end"):
    """Parse CSV text into observations, sorted by time.

    Unlike :func:`parse_cpi_csv` this does not require two or more records.
    """
    records = []
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2:
            raise CsvParseError(f"expected 2 columns, got {len(parts)}: {raw!r}", lineno)
        try:
            t = _parse_time(parts[0], convention)
        except DomainError as exc:
            raise CsvParseError(str(exc), lineno) from None
        except ValueError:
            raise CsvParseError(f"bad time field {parts[0]!r}", lineno) from None
        try:
            value = float(parts[1])
        except ValueError:
            raise CsvParseError(f"bad value field {parts[1]!r}", lineno) from None
        if not (math.isfinite(value) and value > 0):
            raise CsvParseError(f"CPI value must be positive, got {parts[1]!r}", lineno)
        if t in seen:
            raise CsvParseError(f"duplicate time {t!r} (first seen on line {seen[t]})", lineno)
        seen[t] = lineno
        records.append(CpiObservation(t, value))
    records.sort(key=lambda o: o.time)
    return records


def parse_cpi_csv(text, convention="end"):
    """Parse CSV text into a validated :class:`CpiSeries`."""
    records = parse_cpi_records(text, convention)
    if len(records) < 2:
        raise CsvParseError(f"a CPI series needs at least 2 observations, got {len(records)}")
    return CpiSeries.from_observations(records)


def read_cpi_csv(path, convention="end"):
    text = Path(path).read_text(encoding="utf-8")
    return parse_cpi_csv(text, convention)


def _format_time(t):
    s = repr(float(t))
    # keep decimal times from being re-read as month codes
    return s + "0" if _MONTH_CODE.match(s) else s


def format_cpi_csv(series):
    """Serialize a series with decimal times; inverse of :func:`parse_cpi_csv`."""
    lines = [f"{_format_time(t)},{float(v)!r}" for t, v in zip(series.times, series.values)]
    return "\n".join(lines) + "\n"


def series_log_ratios(series):
    """Consecutive ``((t_i, t_{i+1}), ln(v_{i+1}) - ln(v_i))`` pairs."""
    t = series.times
    lv = np.log(series.values)
    return [((float(a), float(b)), float(d)) for a, b, d in zip(t[:-1], t[1:], np.diff(lv))]


BUNDLED = {
    "bundled": "cpi_cz_nonregulated.csv",
    "bundled-printed": "cpi_cz_nonregulated_printed.csv",
}


def bundled_cpi_text(name="bundled"):
    """Raw text of a bundled CPI fixture (see ``BUNDLED`` for names)."""
    try:
        fname = BUNDLED[name]
    except KeyError:
        raise DomainError(f"unknown bundled series {name!r}; choose from {sorted(BUNDLED)}")
    return resources.files("infrate").joinpath("data").joinpath(fname).read_text(encoding="utf-8")


def load_bundled_cpi(name="bundled", convention="end"):
    """Monthly non-regulated price index, Czech Republic, 1993-2002."""
    return parse_cpi_csv(bundled_cpi_text(name), convention)
