"""Command line front end.

Commands::

    mlosc eval --alpha A --beta B --z RE IM
    mlosc integrate --alpha A --beta B --phase "x^2" --domain Q1
    mlosc verify {prop1,thm1,cor1,lem1,thm2,thm3,thm4,lem2} [options]
    mlosc replot report.csv

Exit codes: 0 success (verify: every verdict bounded), 2 invalid input,
3 quadrature budget exhausted, 4 unstable verdict, 5 violated preconditions.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from . import __version__
from .bounds import BOUNDED, BoundReport, fit_decay, log_grid, verify_cor1, verify_lemma1, verify_lemma2
from .bounds import verify_prop1, verify_theorem2, verify_theorem3, verify_theorem4, verify_thm1
from .errors import BudgetExceededError, InvalidParameterError, MLOscError, ParseError, PreconditionError
from .polynomials import BinaryCubic, PolyPhase, parse_polynomial
from .quadrature import Amplitude, Domain, IntegralSpec, integrate_generalized
from .special_functions import MLParams, mittag_leffler
from .svg import loglog_svg

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_UNSTABLE = 4
EXIT_PRECONDITION = 5

THEOREM_ALIASES = {
    "prop1": "prop1",
    "thm1": "thm1",
    "cor1": "cor1",
    "lem1": "lem1",
    "lemma1": "lem1",
    "thm2": "thm2",
    "thm3": "thm3",
    "thm4": "thm4",
    "lem2": "lem2",
    "lemma2": "lem2",
}

# column plotted on the horizontal axis of each report
PLOT_X = {
    "prop1": "t",
    "thm1": "mu",
    "cor1": "mu",
    "lem1": "mu",
    "thm2": "norm",
    "thm3_case1": "rhs",
    "thm3_case2": "rhs",
    "thm4": "rhs",
    "lem2": "rhs",
}

FOOTER_KEYS = ("c_fit", "c_fit_refined", "drift", "slope_fit", "growth", "note", "verdict")

# options that only name files; excluded from the provenance header
_PATH_KEYS = {"out", "plot", "config", "phase_file", "command", "theorem"}


# {{{ parsing helpers


def _parse_phase(args, dim: int | None = None) -> PolyPhase:
    if getattr(args, "phase_file", None):
        try:
            text = Path(args.phase_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(f"cannot read polynomial file: {exc}") from None
        return PolyPhase.from_text(text, dim)
    if args.phase is None:
        raise ParseError("a phase is required (--phase or --phase-file)")
    return parse_polynomial(args.phase, dim)


def _parse_domain(text: str, dim: int = 1) -> Domain:
    t = text.strip().lower()
    if t in ("disc", "unit_disc"):
        return Domain.unit_disc()
    if t.startswith("q") and t[1:].isdigit():
        return Domain.unit_cube(int(t[1:]))
    if t.startswith("interval:"):
        parts = t.split(":")
        if len(parts) != 3:
            raise ParseError(f"interval domain must look like interval:lo:hi, got {text!r}")
        try:
            return Domain.interval(float(parts[1]), float(parts[2]))
        except ValueError:
            raise ParseError(f"bad interval bounds in {text!r}") from None
    raise ParseError(f"unknown domain {text!r} (use Q<n>, interval:lo:hi or disc)")


def _parse_amplitude(text: str) -> Amplitude:
    t = text.strip()
    try:
        if t.startswith("bump:"):
            _, center, radius = t.split(":")
            return Amplitude.bump([float(c) for c in center.split(";")], float(radius))
        if t.startswith("poly:"):
            return Amplitude.polynomial(parse_polynomial(t[5:]))
        if t.startswith("const:"):
            t = t[6:]
        return Amplitude.constant(float(t))
    except ValueError as exc:
        if isinstance(exc, MLOscError):
            raise
        raise ParseError(f"bad amplitude {text!r}") from None


def _parse_kappa(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(k) for k in text.replace(";", ",").split(","))
    except ValueError:
        raise ParseError(f"bad multi-index {text!r}") from None


def _parse_grid(text: str) -> int:
    try:
        a, b = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise ParseError(f"grid must look like NxN, got {text!r}") from None
    if a != b or a < 2:
        raise ParseError("grid must be square with at least 2 points per axis")
    return a


def _parse_cubic(text: str) -> BinaryCubic:
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",")]
    except ValueError:
        raise ParseError(f"bad cubic {text!r}") from None
    if len(vals) != 4:
        raise ParseError("a binary cubic needs four coefficients a0,a1,a2,a3")
    return BinaryCubic(*vals)


# }}}


# {{{ argument parser


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (Monte Carlo sampling)")
    p.add_argument("--tol", type=float, default=None, help="quadrature tolerance")
    p.add_argument("--out", default=None, help="output file (CSV for integrate/verify)")
    p.add_argument("--config", default=None, help="key = value configuration file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlosc", description="Mittag-Leffler oscillatory integrals")
    parser.add_argument("--version", action="version", version=f"mlosc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate E_{alpha,beta}(z)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--z", type=float, nargs=2, metavar=("RE", "IM"), default=[0.0, 0.0])
    _common(p)

    p = sub.add_parser("integrate", help="integral of E(i P(x)) psi(x) over a domain")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--phase", default=None, help='inline polynomial, e.g. "3.14*x" or "x1^2*x2"')
    p.add_argument("--phase-file", default=None, help="polynomial file (lines: exponents coefficient)")
    p.add_argument("--domain", default="cube", help="Q<n>, interval:lo:hi or disc (default: unit cube)")
    p.add_argument("--amplitude", default="1", help="constant, poly:EXPR or bump:c1;c2:radius")
    p.add_argument("--budget", type=int, default=2_000_000)
    _common(p)

    p = sub.add_parser("verify", help="run a decay-estimate sweep")
    p.add_argument("theorem", help="prop1, thm1, cor1, lem1/lemma1, thm2, thm3, thm4, lem2/lemma2")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--phase", default=None)
    p.add_argument("--phase-file", default=None)
    p.add_argument("--kappa", default=None, help="multi-index, e.g. 2 or 1,1")
    p.add_argument("--range", type=float, nargs=2, default=None, metavar=("LO", "HI"),
                   help="sweep range for mu or t")
    p.add_argument("--points", type=int, default=24)
    p.add_argument("--method", choices=["grid", "monte_carlo"], default="grid")
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--delta", type=float, nargs="+", default=None)
    p.add_argument("--grid", default="9x9")
    p.add_argument("--scale", type=float, default=6.0)
    p.add_argument("--cubic", action="append", default=None, help="a0,a1,a2,a3 (repeatable)")
    p.add_argument("--amplitude", default="1")
    p.add_argument("--plot", default=None, help="SVG path (default: CSV path with .svg)")
    _common(p)

    p = sub.add_parser("replot", help="regenerate the SVG of a verify CSV")
    p.add_argument("csv")
    p.add_argument("--plot", default=None)
    _common(p)
    return parser


def _subparser(parser: argparse.ArgumentParser, name: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def load_config(path: str) -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read config file: {exc}") from None
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    # find the subcommand and config path first, so the file can satisfy
    # required flags before the full parse
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config or known.command not in COMMANDS:
        return parser.parse_args(argv)
    sp = _subparser(parser, known.command)
    actions = {a.dest: a for a in sp._actions if a.dest not in ("help", "config")}
    cfg = load_config(known.config)
    defaults = {}
    for key, value in cfg.items():
        if key not in actions:
            raise ParseError(f"unknown config key {key!r}")
        action = actions[key]
        conv = action.type or str
        try:
            if action.nargs in ("+", "*") or isinstance(action.nargs, int):
                items = [conv(v) for v in value.split()]
                defaults[key] = items
            elif isinstance(action, argparse._AppendAction):
                defaults[key] = [conv(v) for v in value.split()]
            else:
                defaults[key] = conv(value)
        except ValueError:
            raise ParseError(f"bad value for config key {key!r}: {value!r}") from None
        if action.required:
            action.required = False
    sp.set_defaults(**defaults)
    # flags given on the command line still win
    return parser.parse_args(argv)


# }}}


# {{{ output


def _num(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return repr(v)
    return str(v)


def _header(args: argparse.Namespace, extra: dict | None = None) -> list[str]:
    lines = [f"# mlosc {__version__} {args.command}" + (f" {args.theorem}" if args.command == "verify" else "")]
    settings = {k: v for k, v in vars(args).items() if k not in _PATH_KEYS}
    settings.update(extra or {})
    for key in sorted(settings):
        val = settings[key]
        if isinstance(val, list):
            val = " ".join(_num(v) for v in val)
        lines.append(f"# {key} = {_num(val) if val is not None else 'default'}")
    return lines


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    for line in header:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def reports_to_rows(reports: list[BoundReport]) -> list[list[str]]:
    params: list[str] = []
    extras: list[str] = []
    for rep in reports:
        params += [p for p in rep.param_names if p not in params]
        extras += [e for e in rep.extra_names if e not in extras]
    out = [["report", *params, "measured", "rhs", "ratio", "flag", *extras]]
    for rep in reports:
        for row in rep.rows:
            pd, ed = dict(row.params), dict(row.extra)
            out.append([rep.theorem_id, *(_num(pd.get(p, "")) for p in params), _num(row.measured),
                        _num(row.rhs), _num(row.ratio), row.flag, *(_num(ed.get(e, math.nan)) for e in extras)])
    for rep in reports:
        out.append(["c_fit", rep.theorem_id, _num(rep.c_fit)])
        out.append(["c_fit_refined", rep.theorem_id, _num(rep.c_fit_refined)])
        out.append(["drift", rep.theorem_id, _num(rep.drift)])
        if rep.slope_fit is not None:
            out.append(["slope_fit", rep.theorem_id, _num(rep.slope_fit)])
        for name, g in rep.growth:
            out.append(["growth", rep.theorem_id, name, _num(g)])
        out.append(["note", rep.theorem_id, "plot_x", PLOT_X.get(rep.theorem_id, "rhs")])
        for k, v in rep.notes:
            out.append(["note", rep.theorem_id, k, _num(v)])
    for rep in reports:
        out.append(["verdict", rep.theorem_id, rep.verdict])
    return out


def read_report_csv(text: str) -> dict:
    """Parse a verify CSV back into columns, per-report rows and footer entries."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rdr = list(csv.reader(lines))
    if not rdr or rdr[0][:1] != ["report"]:
        raise ParseError("not a verify report CSV")
    cols = rdr[0]
    data: dict[str, list[dict[str, str]]] = {}
    footer: list[list[str]] = []
    for r in rdr[1:]:
        if r and r[0] in FOOTER_KEYS:
            footer.append(r)
        elif r:
            data.setdefault(r[0], []).append(dict(zip(cols, r)))
    return {"columns": cols, "data": data, "footer": footer}


def svg_from_csv_text(text: str) -> str:
    """SVG of log measured against the report's plot column, with a fitted line.

    Several reports in one CSV (as for thm3) share the axes; the title lists
    every verdict.
    """
    parsed = read_report_csv(text)
    plot_x = {r[1]: r[3] for r in parsed["footer"] if r[0] == "note" and len(r) > 3 and r[2] == "plot_x"}
    verdicts = [f"{r[1]}: {r[2]}" for r in parsed["footer"] if r[0] == "verdict"]
    xs, ys = [], []
    xname = "rhs"
    for rid, rows in parsed["data"].items():
        xname = plot_x.get(rid, "rhs")
        for row in rows:
            try:
                x, y = float(row.get(xname, "")), float(row["measured"])
            except ValueError:
                continue
            if x > 0 and y > 0 and math.isfinite(x) and math.isfinite(y):
                xs.append(x)
                ys.append(y)
    slope = intercept = None
    if len(xs) >= 3:
        fit = fit_decay(list(zip(xs, ys)))
        slope, intercept = fit.slope, fit.intercept
    return loglog_svg(xs, ys, slope, intercept, title="; ".join(verdicts), xlabel=xname, ylabel="measured")


# }}}


# {{{ commands


def cmd_eval(args) -> int:
    z = complex(args.z[0], args.z[1])
    v = mittag_leffler(args.alpha, args.beta, z)
    _write(f"{v.real:.15g} {v.imag:.15g} {abs(v):.15g}\n", args.out)
    return EXIT_OK


def cmd_integrate(args) -> int:
    ml = MLParams(args.alpha, args.beta)
    if args.domain.strip().lower() == "cube":
        phase = _parse_phase(args)
        domain = Domain.unit_cube(phase.dim)
    else:
        domain = _parse_domain(args.domain, 1)
        phase = _parse_phase(args, domain.dim)
    amplitude = _parse_amplitude(args.amplitude)
    tol = 1e-7 if args.tol is None else args.tol
    spec = IntegralSpec(ml, phase, amplitude, domain)
    code, flag = EXIT_OK, ""
    try:
        res = integrate_generalized(spec, tol, args.budget)
    except BudgetExceededError as exc:
        res, code, flag = exc.result, EXIT_BUDGET, "budget_exceeded"
    header = _header(args, {"tol": tol})
    rows = [
        ["alpha", "beta", "phase_id", "domain", "re", "im", "abs", "err_est", "panels", "flag"],
        [_num(ml.alpha), _num(ml.beta), phase.to_expression(), domain.label(), _num(res.value.real),
         _num(res.value.imag), _num(abs(res.value)), _num(res.error_estimate), str(res.panels_used), flag],
    ]
    _write(_csv_text(header, rows), args.out)
    if code == EXIT_BUDGET:
        print("quadrature budget exhausted; best estimate written", file=sys.stderr)
    return code


def _ml_from(args, alpha: float, beta: float = 1.0) -> MLParams:
    if args.alpha is None:
        args.alpha = alpha
    if args.beta is None:
        args.beta = beta
    return MLParams(args.alpha, args.beta)


def _range(args, lo: float, hi: float) -> list[float]:
    if not args.range:
        args.range = [lo, hi]
    a, b = args.range
    if not (a > 0 and b > a):
        raise InvalidParameterError("--range needs 0 < LO < HI")
    if args.points < 3:
        raise InvalidParameterError("--points must be at least 3")
    return log_grid(a, b, args.points)


def run_verify(args) -> list[BoundReport]:
    name = THEOREM_ALIASES.get(args.theorem.lower())
    if name is None:
        raise ParseError(f"unknown theorem id {args.theorem!r}")
    if args.tol is None:
        args.tol = 1e-10 if name in ("thm3", "lem2") else 1e-7
    tol = args.tol
    if name == "prop1":
        ts = _range(args, 1.0, 1e6)
        grid = None
        if args.alpha is not None or args.beta is not None:
            ml = _ml_from(args, 0.5)
            grid = [(ml.alpha, ml.beta)]
        return [verify_prop1(grid, ts)]
    if name == "thm1":
        phase = _parse_phase(args)
        kappa = _parse_kappa(args.kappa) if args.kappa else (phase.degree,)
        return [verify_thm1(phase, kappa, _range(args, 1e-4, 1e-1), args.method, args.size, args.seed)]
    if name == "cor1":
        phase = _parse_phase(args) if (args.phase or args.phase_file) else None
        return [verify_cor1(phase, _range(args, 1.0, 1e3), tol)]
    if name == "lem1":
        phase = _parse_phase(args)
        kappa = _parse_kappa(args.kappa) if args.kappa else (phase.degree,)
        amp = _parse_amplitude(args.amplitude)
        return [verify_lemma1(phase, kappa, _ml_from(args, 0.5), _range(args, 10.0, 1e5), amp, tol)]
    if name == "thm2":
        families = [_parse_phase(args, args.n)] if (args.phase or args.phase_file) else None
        d = args.d if args.d is not None else (families[0].degree if families else 2)
        amp = _parse_amplitude(args.amplitude)
        return [verify_theorem2(d, args.n, _ml_from(args, 0.5), amp, families, _range(args, 10.0, 1e4), tol)]
    if name == "thm3":
        deltas = args.delta or [0.45, 0.75]
        args.delta = deltas
        return verify_theorem3(deltas, _parse_grid(args.grid), args.scale, tol=tol)
    if name == "thm4":
        cubics = [("custom", _parse_cubic(c)) for c in args.cubic] if args.cubic else None
        return [verify_theorem4(cubics, _ml_from(args, 0.5), _parse_amplitude(args.amplitude), tol)]
    return [verify_lemma2(_parse_grid(args.grid), args.scale, tol=tol)]


def cmd_verify(args) -> int:
    reports = run_verify(args)
    text = _csv_text(_header(args), reports_to_rows(reports))
    _write(text, args.out)
    plot = args.plot or (str(Path(args.out).with_suffix(".svg")) if args.out else None)
    if plot:
        _write(svg_from_csv_text(text), plot)
    verdicts = [r.verdict for r in reports]
    for r in reports:
        print(f"{r.theorem_id}: verdict {r.verdict}, c_fit {r.c_fit:.6g}", file=sys.stderr)
    return EXIT_OK if all(v == BOUNDED for v in verdicts) else EXIT_UNSTABLE


def cmd_replot(args) -> int:
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {args.csv}: {exc}") from None
    plot = args.plot or args.out or str(Path(args.csv).with_suffix(".svg"))
    _write(svg_from_csv_text(text), plot)
    return EXIT_OK


COMMANDS = {"eval": cmd_eval, "integrate": cmd_integrate, "verify": cmd_verify, "replot": cmd_replot}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "--replot":
        argv = ["replot", *argv[1:]]
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    except PreconditionError as exc:
        print(f"error: precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (MLOscError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
