"""Command-line interface: ``klorth verify``, ``klorth table`` and ``klorth eval``.

Exit status: 0 when every selected gating check passes, 2 when one fails,
64 on a usage error. A configuration file (``--config PATH``, INI format)
may hold one section per command whose keys are the long flag names; flags
given on the command line win.
"""

import argparse
import configparser
import csv
import io
import json
import math
import sys
from importlib import resources

import numpy as np

from . import __version__

EXIT_OK = 0
EXIT_FAIL = 2
EXIT_USAGE = 64

SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _float_list(values):
    out = []
    for v in values:
        out.extend(float(s) for s in v.replace(",", " ").split())
    return tuple(out)


def _build_parser():
    p = _Parser(prog="klorth", description="Index-integral identities and orthogonal polynomials "
                                           "for the Macdonald function of imaginary order.")
    p.add_argument("--version", action="version", version=f"klorth {__version__}")
    p.add_argument("--config", metavar="PATH", help="INI file with [verify], [table], [eval] sections")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    v = sub.add_parser("verify", help="run the identity checks")
    v.add_argument("--only", nargs="+", metavar="NAME", help="run these checks only")
    g = v.add_mutually_exclusive_group()
    g.add_argument("--all", dest="selection", action="store_const", const="all",
                   help="every check, EXTENDED ones included")
    g.add_argument("--mandatory", dest="selection", action="store_const", const="mandatory",
                   help="every check that gates the exit status (default)")
    v.add_argument("--json", metavar="PATH", help="write the JSON report here")
    v.add_argument("--csv", metavar="PATH", help="write one CSV row per grid point here")
    v.add_argument("--workers", type=int, metavar="N",
                   help="worker processes (default: $KLORTH_WORKERS or 1)")
    v.add_argument("--tol", action="append", metavar="NAME:ABS:REL", default=[],
                   help="override the tolerance of one check (repeatable)")
    v.add_argument("--quiet", action="store_true", help="print the summary line only")
    v.set_defaults(selection="mandatory")

    t = sub.add_parser("table", help="tabulate moments or an orthonormal basis")
    t.add_argument("what", choices=("moments", "basis"))
    t.add_argument("--x", type=float, help="argument of the KL-type weights")
    t.add_argument("--n", type=int, required=False, help="highest index or degree")
    t.add_argument("--weight", choices=("kl", "imk", "rek", "wilson"), default="kl")
    t.add_argument("--a", nargs="+", metavar="A", help="Wilson parameters, e.g. 0.6,0.8,1.0")
    t.add_argument("--csv", metavar="PATH", help="also write the table as CSV")

    e = sub.add_parser("eval", help="evaluate one function with an error estimate")
    e.add_argument("kind", choices=("kiu", "rek", "imk", "phi", "weight"),
                   help="kiu: K_{i tau}(x); rek / imk: Re / Im K_{1+i tau}(x); "
                        "phi: Phi(x) for parameters a; weight: Wilson-type weight w(tau)")
    e.add_argument("--tau", type=float, default=0.0)
    e.add_argument("--x", type=float)
    e.add_argument("--a", nargs="+", metavar="A")
    e.add_argument("--json", action="store_true", help="print a JSON object instead of text")
    return p, {"verify": v, "table": t, "eval": e}


# ----------------------------------------------------------------- config

def _config_defaults(sub, section):
    """Convert the keys of one config section into argparse defaults."""
    by_dest = {a.dest: a for a in sub._actions}
    out = {}
    for key, raw in section.items():
        dest = key.replace("-", "_")
        if dest in ("all", "mandatory"):
            if section.getboolean(key):
                out["selection"] = dest
            continue
        if dest not in by_dest or dest == "help":
            raise UsageError(f"unknown key {key!r} in config section [{section.name}]")
        act = by_dest[dest]
        if act.nargs == 0:
            out[dest] = section.getboolean(key)
        elif act.nargs in ("+", "*") or isinstance(act.default, list):
            out[dest] = raw.split()
        elif act.type is not None:
            try:
                out[dest] = act.type(raw)
            except ValueError:
                raise UsageError(f"bad value {raw!r} for {key!r} in config") from None
        else:
            out[dest] = raw
    return out


def _parse(argv):
    parser, subs = _build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cp = configparser.ConfigParser()
        try:
            with open(known.config) as fh:
                cp.read_file(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        for name, sub in subs.items():
            if cp.has_section(name):
                sub.set_defaults(**_config_defaults(sub, cp[name]))
    return parser.parse_args(argv)


# ----------------------------------------------------------------- output

def _num(v):
    """JSON-safe float: shortest round-trip repr, non-finite as null."""
    if v is None:
        return None
    v = float(v)
    return v if math.isfinite(v) else None


def _params(p):
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in p.items()}


def result_record(r):
    return {
        "name": r.name,
        "paper_ref": r.paper_ref,
        "params": _params(r.params),
        "lhs": _num(r.lhs_value),
        "rhs": _num(r.rhs_value),
        "abs_err": _num(r.abs_err),
        "rel_err": _num(r.rel_err),
        "tol_abs": _num(r.tol_abs),
        "tol_rel": _num(r.tol_rel),
        "status": r.status.value,
        "runtime_ms": _num(r.runtime_ms),
        "category": r.category.value,
        "variant": r.variant,
        "variant_errors": {k: _num(v) for k, v in r.variant_errors.items()},
        "message": r.message,
    }


def report_schema():
    """The JSON Schema that every ``verify --json`` report conforms to."""
    return json.loads(resources.files("klorth").joinpath("report.schema.json").read_text())


def report_document(report, config):
    return {
        "version": SCHEMA_VERSION,
        "config": config,
        "results": [result_record(r) for r in report.results],
        "summary": report.summary,
    }


_CSV_FIELDS = ("name", "params", "lhs", "rhs", "abs_err", "rel_err", "tol_abs", "tol_rel",
               "status", "variant", "category", "runtime_ms", "paper_ref")


def _csv_cell(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else str(v)


def _write_report_csv(path, report):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(_CSV_FIELDS)
        for r in report.results:
            rec = result_record(r)
            w.writerow([_csv_cell(rec[k]) for k in _CSV_FIELDS])


def _print_report(report, out, quiet):
    if not quiet:
        groups = {}
        for r in report.results:
            groups.setdefault(r.name, []).append(r)
        for name, rs in groups.items():
            counts = {}
            for r in rs:
                counts[r.status.value] = counts.get(r.status.value, 0) + 1
            worst = max(rs, key=lambda r: (not r.passed, r.rel_err if math.isfinite(r.rel_err) else math.inf))
            status = "FAIL" if any(r.status.value == "FAIL" for r in rs) else worst.status.value
            variants = sorted({r.variant for r in rs if r.variant})
            tag = f" [{', '.join(variants)}]" if variants else ""
            print(f"{status:<11} {name:<18} {rs[0].category.value:<9} points={len(rs):<4} "
                  f"max_abs={max(r.abs_err for r in rs):.2e} max_rel={max(r.rel_err for r in rs):.2e}{tag}",
                  file=out)
            for r in rs:
                if r.status.value == "FAIL":
                    msg = f" {r.message}" if r.message else ""
                    print(f"    {_params(r.params)} lhs={r.lhs_value!r} rhs={r.rhs_value!r} "
                          f"abs={r.abs_err:.3e} rel={r.rel_err:.3e}{msg}", file=out)
    s = report.summary
    print(f"summary: pass={s['pass']} fail={s['fail']} skip={s['skip']} adjudicated={s['adjudicated']}"
          f" gating_failures={len(report.gating_failures)}", file=out)


# ----------------------------------------------------------------- commands

def _tol_overrides(items, valid):
    out = {}
    for item in items:
        parts = item.split(":")
        if len(parts) != 3:
            raise UsageError(f"--tol expects NAME:ABS:REL, got {item!r}")
        name, a, r = parts
        if name not in valid:
            raise UsageError(f"--tol: unknown check {name!r}")
        try:
            ta, tr = float(a), float(r)
        except ValueError:
            raise UsageError(f"--tol: bad number in {item!r}") from None
        if not (math.isfinite(ta) and math.isfinite(tr)) or ta < 0 or tr < 0:
            raise UsageError(f"--tol: tolerances must be finite and non-negative in {item!r}")
        out[name] = {"tol_abs": ta, "tol_rel": tr}
    return out


def cmd_verify(args, out):
    from .verify import core

    reg = core.registry()
    overrides = _tol_overrides(args.tol, reg)
    if args.only:
        unknown = [n for n in args.only if n not in reg]
        if unknown:
            raise UsageError(str(core.UnknownCheck(unknown[0], reg)))
        selection = sorted(set(args.only))
    else:
        selection = core.ALL if args.selection == "all" else core.MANDATORY
    workers = args.workers if args.workers is not None else core.default_workers()
    if workers < 1:
        raise UsageError("--workers must be at least 1")
    report = core.run_suite(selection, workers=workers, overrides=overrides)
    config = {
        "selection": selection if isinstance(selection, str) else list(selection),
        "workers": workers,
        "tolerance_overrides": overrides,
        "klorth_version": __version__,
    }
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report_document(report, config), fh, indent=1)
            fh.write("\n")
    if args.csv:
        _write_report_csv(args.csv, report)
    _print_report(report, out, args.quiet)
    return EXIT_OK if report.ok else EXIT_FAIL


def moments_table(x, n):
    """Header and rows of mu_0..mu_n(x) by the three routes."""
    from .moments import MomentRoute, mu

    routes = (MomentRoute.COSH, MomentRoute.LAPLACE, MomentRoute.DIRECT)
    header = ["n", "x"] + [f"mu_{r.value}" for r in routes]
    rows = [[k, x] + [mu(k, x, r) for r in routes] for k in range(n + 1)]
    return header, rows


def basis_table(weight, n, x=None, a=None):
    """Header and rows: degree, A_n, B_n, leading coefficient and u-coefficients."""
    from .orthokl import WeightSpec, basis_for

    if weight == "wilson":
        spec = WeightSpec.wilson(a)
    else:
        spec = {"kl": WeightSpec.kl, "imk": WeightSpec.imk, "rek": WeightSpec.rek}[weight](x)
    b = basis_for(spec, n + 1)
    header = ["n", "A_n", "B_n", "leading"] + [f"c{j}" for j in range(n + 1)]
    rows = [[k, float(b.rec_A[k]), float(b.rec_B[k]), float(b.leading[k])]
            + [float(c) for c in b.coeffs[k, : n + 1]] for k in range(n + 1)]
    return header, rows


def _emit_table(header, rows, out, path):
    cells = [[_csv_cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) for i, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)), file=out)
    for r in cells:
        print("  ".join(c.rjust(w) for c, w in zip(r, widths)), file=out)
    if path:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(cells)


def cmd_table(args, out):
    if args.n is None or args.n < 0:
        raise UsageError("table needs --n N with N >= 0")
    if args.what == "moments":
        if args.x is None or not args.x > 0:
            raise UsageError("table moments needs --x X > 0")
        if args.n > 12:
            raise UsageError("table moments supports N <= 12")
        header, rows = moments_table(args.x, args.n)
    else:
        if args.n > 7:
            raise UsageError("table basis supports N <= 7")
        if args.weight == "wilson":
            if not args.a:
                raise UsageError("--weight wilson needs --a LIST")
            header, rows = basis_table("wilson", args.n, a=_params_a(args.a))
        else:
            if args.x is None or not args.x > 0:
                raise UsageError(f"--weight {args.weight} needs --x X > 0")
            header, rows = basis_table(args.weight, args.n, x=args.x)
    _emit_table(header, rows, out, args.csv)
    return EXIT_OK


def _params_a(raw):
    try:
        a = _float_list(raw)
    except ValueError:
        raise UsageError(f"--a: cannot parse {' '.join(raw)!r}") from None
    if len(a) < 3 or min(a) <= 0:
        raise UsageError("--a needs at least three positive parameters")
    return a


def _two_route(v, alt):
    return v, max(abs(v - alt), 4 * float(np.spacing(abs(v))))


def evaluate(kind, tau, x=None, a=None):
    """(value, error estimate) for ``klorth eval``.

    The estimate is the difference between two independent evaluations
    (floored at a few ulps), except for ``phi`` whose quadrature supplies
    its own.
    """
    from . import specfun, wilsongen

    if kind in ("kiu", "rek", "imk", "phi") and (x is None or not x > 0):
        raise UsageError(f"eval {kind} needs --x X > 0")
    if kind == "kiu":
        v = specfun.macdonald_imag(tau, x)
        alt = float(specfun._k_imag_contour(np.array([abs(tau)]), np.array([x]), 1e-13)[0])
        return _two_route(v, alt)
    if kind == "rek":
        v = specfun.macdonald_shifted(1.0, tau, x).real
        return _two_route(v, -specfun.macdonald_imag_dx(tau, x))
    if kind == "imk":
        v = specfun.macdonald_shifted(1.0, tau, x).imag
        return _two_route(v, tau * specfun.macdonald_imag(tau, x) / x)
    if a is None:
        raise UsageError(f"eval {kind} needs --a LIST")
    if kind == "phi":
        r = wilsongen.phi_result(x, a)
        return float(r.value), float(r.error_estimate)
    v = float(wilsongen.wilson_weight(tau, a))
    return _two_route(v, float(wilsongen.wilson_weight_direct(tau, a)))


def cmd_eval(args, out):
    a = _params_a(args.a) if args.a else None
    value, err = evaluate(args.kind, args.tau, args.x, a)
    if args.json:
        doc = {"kind": args.kind, "tau": args.tau, "x": args.x, "a": list(a) if a else None,
               "value": _num(value), "error_estimate": _num(err)}
        print(json.dumps(doc), file=out)
    else:
        print(f"{value!r} +/- {err:.1e}", file=out)
    return EXIT_OK


_COMMANDS = {"verify": cmd_verify, "table": cmd_table, "eval": cmd_eval}


def run(argv=None, out=None):
    """Run the CLI on ``argv``; returns the exit status."""
    from .specfun import DomainError

    out = out if out is not None else sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _parse(argv)
        return _COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(str(exc).rstrip(), file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, ValueError) as exc:
        print(f"klorth: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


def run_captured(argv):
    """Run and capture standard output; returns (status, text)."""
    buf = io.StringIO()
    status = run(argv, out=buf)
    return status, buf.getvalue()
