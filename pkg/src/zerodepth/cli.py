"""Command-line front end.

Subcommands::

    weight describe      condition verdicts + profile CSV
    legendre             Legendre sweep CSV
    asym compare         oracle vs asymptotic (--target laplace|fourier)
    apps {dc,poly,ls}    application pipelines

Exit codes: 0 success, 2 condition failure, 64 usage, 65 data format,
70 numeric failure.
"""
from __future__ import annotations

import argparse
import datetime
import logging
import math
import sys
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .applications import (depth_of_zero, ls_majorant, majorant_profile, poly_distance,
                           write_apps_csv)
from .errors import DataFormatError, RefusalError, ZeroDepthError
from .laplace import laplace_asymptotic, laplace_oracle, write_compare_csv
from .legendre import sweep, write_sweep_csv
from .poisson import SyntheticProfile, dump_profile_csv, profile_for
from .quadrature import QuadratureConfig
from .transforms import ComplexLogW, fourier_inverse_oracle, rho_bounds, write_fourier_csv
from .weights import (DCSequence, Majorant, PowerWeight, check_conditions, majorant_weight,
                      sequence_weight)

log = logging.getLogger("zerodepth")

EXIT_OK, EXIT_COND, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 64, 65, 70

FAMILIES = ("power", "sqrt", "factorial", "bang")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("weight")
    g.add_argument("--family", choices=FAMILIES, help="built-in weight family")
    g.add_argument("--alpha", type=float, default=0.5, help="power exponent in (0, 1)")
    g.add_argument("--beta", type=float, default=1.0, help="bang parameter")
    g.add_argument("--k", type=float, default=2.0, help="factorial power M_n = (n!)^k")
    g.add_argument("--scale", type=float, default=2.0, help="c in the synthetic c*sqrt(y)")
    g.add_argument("--sequence", metavar="FILE", help="file of log M_n, one per line")
    g.add_argument("--majorant", metavar="SPEC", help="inv-power[:beta] or CSV of xi,log M")
    g = p.add_argument_group("grid")
    g.add_argument("--s-start", type=float, default=0.1)
    g.add_argument("--s-stop", type=float, default=0.001)
    g.add_argument("--s-count", type=int, default=3)
    g.add_argument("--s-values", help="comma-separated s list (overrides the log grid)")
    p.add_argument("--p", type=float, default=math.inf, help="Fourier exponent p in [1, inf]")
    p.add_argument("--a", type=float, default=0.0, help="Laplace power y^a")
    p.add_argument("--out", metavar="FILE", help="CSV output (default stdout)")
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--y-cap", type=float, default=1e12, help="upper search limit for y_s")
    p.add_argument("--reproducible", action="store_true", help="omit the timestamp header")
    p.add_argument("--config", metavar="FILE", help="key=value file mirroring the flags")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser(defaults=None) -> argparse.ArgumentParser:
    parser = _Parser(prog="zerodepth", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    w = sub.add_parser("weight", help="weight diagnostics")
    wsub = w.add_subparsers(dest="action", required=True, parser_class=_Parser)
    d = wsub.add_parser("describe", help="condition verdicts and profile CSV")
    _common(d)
    d.add_argument("--y-grid", default="1:1e6:25", help="lo:hi:count for the profile CSV")

    lg = sub.add_parser("legendre", help="Legendre transform sweep")
    _common(lg)

    a = sub.add_parser("asym", help="oracle vs asymptotic comparison")
    asub = a.add_subparsers(dest="action", required=True, parser_class=_Parser)
    c = asub.add_parser("compare")
    _common(c)
    c.add_argument("--target", choices=("laplace", "fourier"), required=True)

    ap = sub.add_parser("apps", help="application pipelines")
    _common(ap)
    ap.add_argument("which", choices=("dc", "poly", "ls"))
    ap.add_argument("--with-oracle", action="store_true",
                    help="compute the Fourier-oracle sandwich (dc, poly)")

    if defaults:
        for leaf in (d, lg, c, ap):
            leaf.set_defaults(**defaults)
    return parser


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys mirror flags."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataFormatError(f"cannot read config {path}: {exc}")
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise DataFormatError(f"{path}:{i}: expected key=value")
        key = key.strip().lstrip("-").replace("-", "_")
        val = val.strip()
        if key in ("reproducible", "verbose", "with_oracle"):
            out[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            out[key] = val
    return out


def parse_args(argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    defaults = read_config(known.config) if known.config else None
    return build_parser(defaults).parse_args(argv)


# -- configuration helpers ---------------------------------------------------

def s_grid(args):
    if args.s_values is not None:
        try:
            vals = [float(v) for v in args.s_values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad --s-values {args.s_values!r}")
        if not vals:
            raise UsageError("empty s grid")
        return vals
    if args.s_count < 2:
        raise UsageError("--s-count must be at least 2")
    if not args.s_start > args.s_stop > 0:
        raise UsageError("need s-start > s-stop > 0 (s decreasing)")
    return list(np.geomspace(args.s_start, args.s_stop, args.s_count))


def quad_config(args) -> QuadratureConfig:
    if not args.rel_tol > 0:
        raise UsageError("--rel-tol must be positive")
    return QuadratureConfig().tightened(args.rel_tol)


def make_sequence(args) -> DCSequence:
    if args.sequence:
        return DCSequence.from_file(args.sequence)
    if args.family == "factorial":
        return DCSequence.factorial_power(args.k)
    if args.family == "bang":
        return DCSequence.bang(args.beta)
    raise UsageError("a sequence needs --sequence FILE or --family factorial|bang")


def make_weight(args):
    """Weight for ``args``; None for the synthetic profile."""
    n = sum(x is not None for x in (args.family, args.sequence, args.majorant))
    if n != 1:
        raise UsageError("give exactly one of --family, --sequence, --majorant")
    if args.majorant:
        return majorant_weight(Majorant.parse(args.majorant))
    if args.family == "power":
        if not 0 < args.alpha < 1:
            raise UsageError(f"--alpha must lie in (0, 1), got {args.alpha}")
        return PowerWeight(args.alpha)
    if args.family == "sqrt":
        return None
    return sequence_weight(make_sequence(args))


def make_profile(args):
    w = make_weight(args)
    if w is None:
        if not args.scale > 0:
            raise UsageError("--scale must be positive")
        return SyntheticProfile.sqrt_profile(args.scale)
    return profile_for(w, quad_config(args))


@contextmanager
def output(args):
    if args.out:
        fh = open(args.out, "w", newline="")
        try:
            yield fh
        finally:
            fh.close()
    else:
        yield sys.stdout


def header(args, fh):
    if not args.reproducible:
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
        fh.write(f"# zerodepth {__version__} {stamp}\n")


# -- commands ------------------------------------------------------------------

def cmd_weight_describe(args) -> int:
    prof = make_profile(args)
    if prof.weight is None:
        raise UsageError("weight describe needs a weight, not the synthetic profile")
    try:
        lo, hi, cnt = args.y_grid.split(":")
        ys = np.geomspace(float(lo), float(hi), int(cnt))
    except ValueError:
        raise UsageError(f"bad --y-grid {args.y_grid!r}")
    report = check_conditions(prof.weight, cfg=prof.quad)
    for line in report.lines():
        print(line, file=sys.stderr)
    with output(args) as fh:
        header(args, fh)
        dump_profile_csv(prof, ys, fh)
    failed = set(report.failed())
    # (iv) needs only one of its alternatives
    if not ({"iv-a", "iv-b"} <= failed):
        failed -= {"iv-a", "iv-b"}
    return EXIT_COND if failed else EXIT_OK


def cmd_legendre_sweep(args) -> int:
    prof = make_profile(args)
    grid = s_grid(args)
    if any(s <= 0 for s in grid):
        raise UsageError("legendre needs s > 0")
    rows = sweep(prof, grid, y_cap=args.y_cap)
    with output(args) as fh:
        header(args, fh)
        write_sweep_csv(rows, fh)
    return EXIT_OK


def _trend(gaps, errs) -> str:
    """``decreasing`` if each gap is below its predecessor within error brackets."""
    pairs = [(g, e) for g, e in zip(gaps, errs) if math.isfinite(g)]
    if len(pairs) < 2:
        return "undetermined"
    ok = all(g1 <= g0 + e0 + e1 for (g0, e0), (g1, e1) in zip(pairs, pairs[1:]))
    return "decreasing" if ok else "not-decreasing"


def cmd_asym_compare(args) -> int:
    prof = make_profile(args)
    grid = s_grid(args)
    gaps, errs = [], []
    with output(args) as fh:
        header(args, fh)
        if args.target == "laplace":
            rows = []
            for s in grid:
                try:
                    res = laplace_oracle(prof, args.a, s, y_cap=args.y_cap)
                    asym = laplace_asymptotic(prof, args.a, s, point=res.point)
                    r1 = res.ratio_minus_1()
                    rows.append([s, asym.log_abs, res.log_value.log_abs, r1, res.eta,
                                 res.k_final, res.tail_bound_log])
                    gaps.append(abs(r1))
                    errs.append(res.rel_error)
                except (ArithmeticError, ZeroDepthError) as exc:
                    log.warning("s=%g: %s", s, exc)
                    rows.append([s] + [math.nan] * 6)
                    gaps.append(math.nan)
                    errs.append(math.nan)
            write_compare_csv(rows, fh)
        else:
            if not args.p >= 1:
                raise UsageError("--p must lie in [1, inf]")
            clw = ComplexLogW(prof)
            rows = []
            for s in grid:
                if s <= 0:
                    rows.append([s, args.p, -math.inf, 0.0, math.nan, math.nan, math.nan, 0.0])
                    continue
                try:
                    res = fourier_inverse_oracle(clw, args.p, s, y_cap=args.y_cap)
                    b = rho_bounds(prof, args.p, s, y_cap=args.y_cap)
                    rows.append([s, args.p, res.value.log_abs, res.value.phase, b.asym_log,
                                 b.upper_log, b.coarse_log, res.omega])
                    gaps.append(abs(res.value.log_abs - b.asym_log))
                    errs.append(res.rel_error)
                except (ArithmeticError, ZeroDepthError) as exc:
                    log.warning("s=%g: %s", s, exc)
                    rows.append([s, args.p] + [math.nan] * 6)
                    gaps.append(math.nan)
                    errs.append(math.nan)
            write_fourier_csv(rows, fh)
        fh.write(f"# trend: {_trend(gaps, errs)}\n")
    return EXIT_OK


def cmd_applications(args) -> int:
    grid = s_grid(args)
    if any(s <= 0 for s in grid):
        raise UsageError("applications need s > 0")
    rows = []
    if args.which == "ls":
        if not args.majorant:
            raise UsageError("apps ls needs --majorant")
        maj = Majorant.parse(args.majorant)
        report = check_conditions(maj)
        prof = majorant_profile(maj, quad=quad_config(args))
        for s in grid:
            rows.append(ls_majorant(maj, s, prof=prof, conditions=report, y_cap=args.y_cap).row())
    elif args.which == "dc":
        seq = make_sequence(args)
        prof = profile_for(sequence_weight(seq), quad_config(args))
        report = check_conditions(prof.weight, which=("iii",))
        for s in grid:
            rows.append(depth_of_zero(seq, s, args.with_oracle, prof=prof,
                                      conditions=report, y_cap=args.y_cap).row())
    else:
        prof = make_profile(args)
        if prof.weight is None:
            raise UsageError("apps poly needs a weight")
        report = check_conditions(prof.weight, which=("i", "ii", "iii", "iv-a", "iv-b"))
        for s in grid:
            rows.append(poly_distance(prof.weight, s, args.with_oracle, prof=prof,
                                      conditions=report, y_cap=args.y_cap).row())
    with output(args) as fh:
        header(args, fh)
        write_apps_csv(rows, fh)
    return EXIT_OK


def run(args) -> int:
    if args.cmd == "weight":
        return cmd_weight_describe(args)
    if args.cmd == "legendre":
        return cmd_legendre_sweep(args)
    if args.cmd == "asym":
        return cmd_asym_compare(args)
    return cmd_applications(args)


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parse_args(argv)
    except DataFormatError as exc:
        print(f"zerodepth: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        print(f"zerodepth: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RefusalError as exc:
        print(f"zerodepth: refused: {exc}", file=sys.stderr)
        return EXIT_COND
    except DataFormatError as exc:
        print(f"zerodepth: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ArithmeticError, ZeroDepthError, ValueError) as exc:
        print(f"zerodepth: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    raise SystemExit(main())
