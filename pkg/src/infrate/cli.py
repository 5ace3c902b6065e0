"""Command-line interface.

Usage examples::

    infrate accumulate --model const:0.2 --from 0 --to 1 --principal 100
    infrate accumulate --cpi bundled --model affine --from 1993.5 --to 1994
    infrate residual --cpi bundled --rate ref-trig
    infrate fit-trend --cpi bundled --month-convention start --out trend.json
    infrate sample --model pw:0,0.1,0.5,0.2,1 --from 0 --to 1 --step 0.25

Rate models (``--model`` / ``--rate``):

``const:I``                  constant rate I
``pw:t0,I0,t1,I1,...,tn``    piecewise-constant rate
``affine``, ``loglinear``    rate of the interpolated ``--cpi`` series
``fit:FILE``                 rate described by a saved fit report
``ref-trig``                 built-in trigonometric rate (alias ``paper-eq22``)

Exit status: 0 success, 1 usage or input error, 2 domain or accuracy error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .basis import CONSTANT, FAMILIES, BasisFunctionSpec, trig_pool
from .errors import AccuracyError, CsvParseError, DomainError, InfrateError
from .fitting import (
    BackwardElimination,
    BestPairTrend,
    CpiModelReport,
    DirectRateFit,
    LinearFit,
    dumps_report,
    functional_residual,
    load_report,
    report_rate,
    save_report,
)
from .presets import RATE_PRESETS, REFERENCE_TRIG_BASIS
from .quadrature import QuadratureConfig
from .rates import (
    ConstantRate,
    CpiDerivedRate,
    PiecewiseConstantRate,
    accumulate,
    log_linear_model,
    piecewise_affine_model,
)
from .timebase import BUNDLED, MONTH_CONVENTIONS, load_bundled_cpi, read_cpi_csv


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def fmt(x):
    return f"{x:.10g}"


def _emit(out, pairs, as_json):
    if as_json:
        out.write(json.dumps({k: v for k, v in pairs}, indent=2) + "\n")
        return
    width = max(len(k) for k, _ in pairs)
    for k, v in pairs:
        out.write(f"{k:<{width}}  {fmt(v) if isinstance(v, float) else v}\n")


def load_series(args):
    if args.cpi is None:
        raise UsageError("this command needs --cpi")
    if args.cpi in BUNDLED:
        return load_bundled_cpi(args.cpi, args.month_convention)
    try:
        return read_cpi_csv(args.cpi, args.month_convention)
    except OSError as exc:
        raise UsageError(f"cannot read {args.cpi}: {exc.strerror or exc}") from None


def _floats(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def build_cpi_model(desc, args):
    if desc == "affine":
        return piecewise_affine_model(load_series(args))
    if desc == "loglinear":
        return log_linear_model(load_series(args))
    if desc.startswith("fit:"):
        report = _load_report(desc[4:])
        if isinstance(report, CpiModelReport):
            return report.model()
        if isinstance(report, LinearFit):
            return CpiModelReport(report).model()
    raise UsageError(f"{desc!r} does not describe a CPI model")


def _load_report(path):
    try:
        return load_report(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{path}: not a fit report ({exc})") from None


def build_rate(desc, args):
    if desc is None:
        raise UsageError("a rate model is required (--model or --rate)")
    if desc in RATE_PRESETS:
        return RATE_PRESETS[desc]()
    if desc.startswith("const:"):
        vals = _floats(desc[6:])
        if len(vals) != 1:
            raise UsageError("const: takes one number")
        return ConstantRate(vals[0])
    if desc.startswith("pw:"):
        vals = _floats(desc[3:])
        if len(vals) < 3 or len(vals) % 2 == 0:
            raise UsageError("pw: needs t0,I0,t1,...,tn")
        return PiecewiseConstantRate(vals[0::2], vals[1::2])
    if desc in ("affine", "loglinear"):
        return CpiDerivedRate(build_cpi_model(desc, args))
    if desc.startswith("fit:"):
        return report_rate(_load_report(desc[4:]))
    raise UsageError(f"unknown rate model {desc!r}")


def parse_basis(text):
    """``const,sin:2,xcos:0.5,power:5:1992`` -> basis specs; ``ref-trig`` preset."""
    if text in ("ref-trig", "paper-eq22"):
        return list(REFERENCE_TRIG_BASIS)
    out = []
    for item in text.split(","):
        parts = item.strip().split(":")
        if parts[0] not in FAMILIES:
            raise UsageError(f"unknown basis family {parts[0]!r}")
        try:
            nums = [float(p) for p in parts[1:]]
        except ValueError:
            raise UsageError(f"bad basis parameters in {item!r}") from None
        out.append(BasisFunctionSpec(parts[0], *nums))
    return out


def _quad(args):
    return QuadratureConfig(abs_tol=args.tol)


def _write_report(args, report, out):
    if args.out:
        save_report(report, args.out)
    if args.json:
        out.write(dumps_report(report) + "\n")
        return True
    return False


# --------------------------------------------------------------------------
# commands


def cmd_validate(args, out):
    s = load_series(args)
    a, b = s.span
    _emit(
        out,
        [("observations", len(s)), ("intervals", len(s) - 1), ("first", a), ("last", b),
         ("min_value", float(s.values.min())), ("max_value", float(s.values.max()))],
        args.json,
    )


def cmd_rate_at(args, out):
    rate = build_rate(args.model, args)
    _emit(out, [("t", args.at), ("rate", float(rate(args.at)))], args.json)


def _interpolating(desc):
    return desc in ("affine", "loglinear")


def _check_principal(args):
    if args.principal is not None and not args.principal > 0:
        raise DomainError(f"principal must be positive, got {args.principal}")


def cmd_accumulate(args, out):
    _check_principal(args)
    rate = build_rate(args.model, args)
    res = accumulate(rate, args.t0, args.t1, _quad(args))
    pairs = [("rate", res.rate), ("growth_factor", res.growth_factor)]
    if args.principal is not None:
        pairs.append(("real_value", args.principal / res.growth_factor))
    _emit(out, pairs, args.json)
    if _interpolating(args.model) and not args.json:
        out.write(_convention_note(args, res))


def _convention_note(args, res):
    note = "note: interpolating models reproduce CPI ratios between observations exactly"
    other = next(c for c in MONTH_CONVENTIONS if c != args.month_convention)
    alt_args = argparse.Namespace(**{**vars(args), "month_convention": other})
    try:
        alt = accumulate(build_rate(args.model, alt_args), args.t0, args.t1, _quad(args))
    except DomainError:
        return note + "\n"
    if fmt(alt.rate) == fmt(res.rate):
        return note + "\n"
    return f"{note}\nnote: with --month-convention {other} the rate is {fmt(alt.rate)}\n"


def cmd_real_value(args, out):
    _check_principal(args)
    rate = build_rate(args.model, args)
    res = accumulate(rate, args.t0, args.t1, _quad(args))
    _emit(out, [("real_value", args.principal / res.growth_factor),
                ("growth_factor", res.growth_factor)], args.json)


def _linear_fit_lines(fit, label):
    lines = [(f"{label}_sse", fit.sse)]
    for b, c in zip(fit.basis, fit.coefficients):
        lines.append((f"{label}[{b.name}]", float(c)))
    return lines


def cmd_fit_trend(args, out):
    s = load_series(args)
    fit = BestPairTrend().fit(s.times, s.values).fit_
    if not _write_report(args, fit, out):
        _emit(out, _linear_fit_lines(fit, "trend"), False)


def cmd_fit_seasonal(args, out):
    s = load_series(args)
    if args.trend:
        trend = _load_report(args.trend)
        if isinstance(trend, CpiModelReport):
            trend = trend.trend
        if not isinstance(trend, LinearFit):
            raise UsageError(f"{args.trend} is not a trend fit")
    else:
        trend = BestPairTrend().fit(s.times, s.values).fit_
    rest = s.values - trend.predict(s.times)
    est = BackwardElimination(pool=trig_pool(), n_remove=args.remove, strategy=args.strategy)
    seasonal = est.fit(s.times, rest).fit_
    report = CpiModelReport(trend, seasonal)
    report.model()  # positivity check
    if not _write_report(args, report, out):
        _emit(out, _linear_fit_lines(trend, "trend") + _linear_fit_lines(seasonal, "seasonal"),
              False)


def cmd_fit_rate(args, out):
    s = load_series(args)
    basis = parse_basis(args.basis) if args.basis else [CONSTANT]
    init = _floats(args.init) if args.init else None
    est = DirectRateFit(basis=basis, init=init, max_evaluations=args.max_evals, quad=_quad(args))
    report = est.fit(s).report_
    if not _write_report(args, report, out):
        lines = [("residual", report.residual), ("init_residual", report.init_residual),
                 ("intervals", report.intervals_used), ("converged", str(report.converged)),
                 ("evaluations", report.evaluations)]
        lines += [(f"rate[{b.name}]", float(c)) for b, c in zip(basis, report.coefficients)]
        _emit(out, lines, False)


def cmd_residual(args, out):
    s = load_series(args)
    rate = build_rate(args.rate or args.model, args)
    value = functional_residual(rate, s, _quad(args), form=args.form)
    _emit(out, [("residual", value), ("intervals", len(s) - 1), ("form", args.form)], args.json)


def cmd_sample(args, out):
    if not args.step > 0:
        raise UsageError("--step must be positive")
    if not args.t1 > args.t0:
        raise UsageError("empty sampling range")
    n = int(np.floor((args.t1 - args.t0) / args.step + 1e-9))
    grid = args.t0 + args.step * np.arange(n + 1)
    if args.what == "cpi":
        f = build_cpi_model(args.model, args)
    else:
        f = build_rate(args.model, args)
    knots = np.asarray(f.knots, dtype=float)
    knots = knots[(knots >= args.t0) & (knots <= args.t1)]
    t = np.unique(np.concatenate([grid, knots, [args.t1]]))
    values = np.asarray(f(t), dtype=float)
    out.write(f"t,{args.what}\n")
    for ti, vi in zip(t, values):
        out.write(f"{fmt(ti)},{fmt(vi)}\n")


# --------------------------------------------------------------------------


def build_parser():
    p = _Parser(prog="infrate", description="Inflation accumulation for arbitrary rate functions.")
    common = _Parser(add_help=False)
    common.add_argument("--cpi", help="CPI CSV file, or 'bundled' / 'bundled-printed'")
    common.add_argument("--month-convention", choices=MONTH_CONVENTIONS, default="end",
                        help="where month codes sit within the year (default: end)")
    common.add_argument("--tol", type=float, default=1e-10, help="quadrature absolute tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    add("validate", cmd_validate, "check a CPI file")

    sp = add("rate-at", cmd_rate_at, "evaluate a rate function")
    sp.add_argument("--model", "--rate", dest="model", required=True)
    sp.add_argument("--at", type=float, required=True)

    for name, func, need_principal in (
        ("accumulate", cmd_accumulate, False),
        ("real-value", cmd_real_value, True),
    ):
        sp = add(name, func, f"{name.replace('-', ' ')} over an interval")
        sp.add_argument("--model", "--rate", dest="model", required=True)
        sp.add_argument("--from", dest="t0", type=float, required=True)
        sp.add_argument("--to", dest="t1", type=float, required=True)
        sp.add_argument("--principal", type=float, required=need_principal)

    sp = add("fit-trend", cmd_fit_trend, "best constant-plus-pair trend")
    sp.add_argument("--out", help="save the fit report here")

    sp = add("fit-seasonal", cmd_fit_seasonal, "trend plus eliminated trigonometric stage")
    sp.add_argument("--trend", help="saved trend report (default: fit one)")
    sp.add_argument("--remove", type=int, default=15)
    sp.add_argument("--strategy", choices=("iterative", "one-shot", "exhaustive"),
                    default="exhaustive")
    sp.add_argument("--out")

    sp = add("fit-rate", cmd_fit_rate, "fit a rate function directly to CPI ratios")
    sp.add_argument("--basis", help="e.g. const,sin:2,cos:1 or ref-trig")
    sp.add_argument("--init", help="comma-separated starting coefficients")
    sp.add_argument("--max-evals", type=int, default=2000)
    sp.add_argument("--out")

    sp = add("residual", cmd_residual, "growth-factor residual of a rate against CPI data")
    sp.add_argument("--rate", "--model", dest="rate", required=True)
    sp.add_argument("--form", choices=("ratio", "level"), default="ratio")
    sp.set_defaults(model=None)

    sp = add("sample", cmd_sample, "tabulate a rate or CPI model as CSV")
    sp.add_argument("--model", "--rate", dest="model", required=True)
    sp.add_argument("--from", dest="t0", type=float, required=True)
    sp.add_argument("--to", dest="t1", type=float, required=True)
    sp.add_argument("--step", type=float, required=True)
    sp.add_argument("--what", choices=("rate", "cpi"), default="rate")
    return p


def run(argv, out=None, err=None):
    """Run the CLI; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.func(args, out)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (UsageError, CsvParseError) as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (DomainError, AccuracyError, InfrateError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return 2
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
