"""
Command-line front end.

Subcommands::

    eppm design   --q 11                    # difference set + verification
    eppm bounds   --preset short --out b.csv # analytic union-bound curves
    eppm simulate --scheme eppm --q 11 ...  # Monte-Carlo BER with bounds
    eppm frontier --target-ber 1e-5         # efficiency vs required SNR

Options may also come from ``--config FILE`` holding ``key = value`` lines
(keys spelled like the long flags, without dashes); flags on the command
line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Sequence

import numpy as np

from . import analysis, svg
from .channel import MonteCarloConfig, run_ber_sweep
from .constellation import (
    Constellation,
    Scheme,
    build_aeppm,
    build_eppm,
    build_mppm,
    build_ook,
    build_ppm,
)
from .designs import (
    construct,
    expand_incidence,
    format_difference_set,
    load_difference_set,
    verify_difference_set,
)
from .errors import EppmError, InvalidParameters, NotFound, ParseError, VerificationFailed

CSV_SCHEMA_VERSION = 1
CSV_COLUMNS = ("scheme", "q", "k", "lambda", "m", "gamma_db", "eta", "ser_bound",
               "ber_bound", "trials", "symbol_errors", "bit_errors", "ser_sim",
               "ber_sim", "ci95")
FRONTIER_COLUMNS = ("scheme", "q", "k", "lambda", "m", "eta", "required_gamma_db")

EXIT_OK, EXIT_USAGE, EXIT_CONSTRUCTION = 0, 2, 3


class UsageError(Exception):
    pass


PRESETS = {
    "short": [
        analysis.SchemeSpec(Scheme.PPM, 8),
        analysis.SchemeSpec(Scheme.MPPM, 12, 2, m=64),
        analysis.SchemeSpec(Scheme.EPPM, 11, 5, 2, m=8),
        analysis.SchemeSpec(Scheme.AEPPM, 11, 5, 2, m=16),
    ],
    "long": [
        analysis.SchemeSpec(Scheme.PPM, 64),
        analysis.SchemeSpec(Scheme.MPPM, 12, 2, m=64),
        analysis.SchemeSpec(Scheme.EPPM, 67, 33, 16, m=64),
        analysis.SchemeSpec(Scheme.AEPPM, 67, 33, 16, m=128),
    ],
}


def _add_scheme_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=["ppm", "mppm", "eppm", "aeppm", "ook"])
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--m", type=int, help="mapped symbol count (power of two)")
    p.add_argument("--design-file", help="load the difference set from this file")


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-start-db", type=float)
    p.add_argument("--gamma-stop-db", type=float)
    p.add_argument("--gamma-step-db", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eppm", description=__doc__.split("\n\n")[0])
    parser.add_argument("--config", help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", help="construct and verify a difference set")
    p.add_argument("--q", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--design-file")
    p.add_argument("--budget", type=int)
    p.add_argument("--out")

    p = sub.add_parser("bounds", help="union-bound curves as CSV")
    _add_scheme_args(p)
    _add_grid_args(p)
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out")
    p.add_argument("--svg")

    p = sub.add_parser("simulate", help="Monte-Carlo BER sweep as CSV")
    _add_scheme_args(p)
    _add_grid_args(p)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-trials", type=int)
    p.add_argument("--target-errors", type=int)
    p.add_argument("--target-ber", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--svg")

    p = sub.add_parser("frontier", help="spectral efficiency vs required SNR")
    p.add_argument("--target-ber", type=float)
    p.add_argument("--out")
    p.add_argument("--svg")
    return parser


DEFAULTS = {
    "gamma_start_db": 0.0,
    "gamma_stop_db": 16.0,
    "gamma_step_db": 1.0,
    "max_trials": 10**6,
    "target_errors": 100,
    "workers": 1,
    "target_ber_frontier": 1e-5,
    "budget": 10**8,
}


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _get(args, name):
    v = getattr(args, name, None)
    return DEFAULTS[name] if v is None else v


def gamma_grid(args) -> np.ndarray:
    start = _get(args, "gamma_start_db")
    stop = _get(args, "gamma_stop_db")
    step = _get(args, "gamma_step_db")
    if not step > 0:
        raise UsageError("--gamma-step-db must be positive")
    if stop < start:
        raise UsageError("--gamma-stop-db must not be below --gamma-start-db")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def _resolve_design(args):
    if getattr(args, "design_file", None):
        with open(args.design_file) as fh:
            return load_difference_set(fh)
    if args.q is None:
        raise UsageError("--q is required")
    return construct(args.q, args.k, args.lam, budget=_get(args, "budget"))


def _with_mapping(c: Constellation, m: int | None) -> Constellation:
    if m is None or m == c.m_mapped:
        return c
    if m < 2 or m & (m - 1) or m > c.m_mapped:
        raise UsageError(f"--m must be a power of two in [2, {c.m_mapped}]")
    if c.scheme is Scheme.AEPPM:
        mapped = np.concatenate([np.arange(m // 2), c.q + np.arange(m // 2)])
    else:
        mapped = np.arange(m)
    return Constellation(c.scheme, c.q, c.k, c.lam, c.codewords, mapped, c.residues)


def build_constellation(args) -> Constellation:
    scheme = args.scheme
    if scheme is None:
        raise UsageError("--scheme is required")
    if scheme == "ook":
        return build_ook()
    if scheme in ("eppm", "aeppm"):
        ds = _resolve_design(args)
        inc = expand_incidence(ds)
        c = build_eppm(inc, ds.residues) if scheme == "eppm" else build_aeppm(inc, ds.residues)
    elif args.q is None:
        raise UsageError("--q is required")
    elif scheme == "ppm":
        c = build_ppm(args.q)
    else:
        if args.k is None:
            raise UsageError("--k is required for mppm")
        c = build_mppm(args.q, args.k)
    return _with_mapping(c, args.m)


def scheme_spec(args) -> analysis.SchemeSpec:
    scheme = Scheme(args.scheme.upper()) if args.scheme else None
    if scheme is None:
        raise UsageError("--scheme or --preset is required")
    if scheme is Scheme.OOK:
        return analysis.SchemeSpec(Scheme.OOK, 1)
    if scheme in (Scheme.EPPM, Scheme.AEPPM):
        ds = _resolve_design(args)
        return analysis.SchemeSpec(scheme, ds.q, ds.k, ds.lam, args.m)
    if args.q is None:
        raise UsageError("--q is required")
    if scheme is Scheme.PPM:
        return analysis.SchemeSpec(scheme, args.q, 1, 0, args.m)
    if args.k is None:
        raise UsageError("--k is required for mppm")
    if not 1 <= args.k < args.q:
        raise UsageError("mppm needs 1 <= k < q")
    return analysis.SchemeSpec(scheme, args.q, args.k, None, args.m)


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _row(spec: analysis.SchemeSpec, gamma_db, ser_b, ber_b, est=None) -> list[str]:
    row = [str(spec.scheme), _num(spec.q), _num(spec.k), _num(spec.lam), _num(spec.m),
           _num(gamma_db), _num(spec.eta), _num(ser_b), _num(ber_b)]
    if est is None:
        row += [""] * 6
    else:
        row += [_num(est.trials), _num(est.symbol_errors), _num(est.bit_errors),
                _num(est.ser), _num(est.ber), _num(est.ci95_halfwidth)]
    return row


def _emit(rows: Sequence[Sequence[str]], header: Sequence[str], out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _write_svg(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


def cmd_design(args) -> int:
    if args.design_file is None and args.q is None:
        raise UsageError("--q or --design-file is required")
    ds = _resolve_design(args)
    report = verify_difference_set(ds)
    inc = expand_incidence(ds)
    text = (f"# ({ds.q},{ds.k},{ds.lam}) cyclic difference set, "
            f"codeword distance {ds.params.distance}\n{format_difference_set(ds)}\n")
    lines = [f"# {ln}" for ln in report.summary().splitlines()]
    lines.append(f"# distinct pairwise row dot products: "
                 f"{sorted(set((inc.rows.astype(int) @ inc.rows.T.astype(int))[~np.eye(ds.q, dtype=bool)].tolist()))}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
        print("\n".join(lines))
    else:
        sys.stdout.write(text)
        print("\n".join(lines))
    return EXIT_OK if report.passed else EXIT_CONSTRUCTION


def cmd_bounds(args) -> int:
    specs = PRESETS[args.preset] if args.preset else [scheme_spec(args)]
    grid = gamma_grid(args)
    rows, series = [], []
    for spec in specs:
        curve = analysis.bound_curve(spec, grid)
        for g, s, b in curve.points:
            rows.append(_row(spec, g, s, b))
        series.append(svg.Series(spec.label, curve.gamma_db.tolist(), curve.ber_bound.tolist()))
    _emit(rows, CSV_COLUMNS, args.out)
    if args.svg:
        _write_svg(args.svg, svg.render(series, "Union bound on BER", "gamma (dB)",
                                        "BER", log_y=True))
    return EXIT_OK


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("EPPM_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"EPPM_SEED is not an integer: {env!r}") from None
    return 1


def cmd_simulate(args) -> int:
    c = build_constellation(args)
    spec = analysis.SchemeSpec.from_constellation(c)
    grid = gamma_grid(args)
    workers = _get(args, "workers")
    if workers < 1:
        raise UsageError("--workers must be >= 1")
    try:
        cfg = MonteCarloConfig(seed=_seed(args), max_trials=_get(args, "max_trials"),
                               target_errors=_get(args, "target_errors"),
                               target_ber=args.target_ber)
    except InvalidParameters as exc:
        raise UsageError(str(exc)) from None
    estimates = run_ber_sweep(c, grid.tolist(), cfg, workers=workers)
    curve = analysis.bound_curve(spec, grid)
    rows = [_row(spec, g, s, b, est)
            for (g, s, b), est in zip(curve.points, estimates)]
    _emit(rows, CSV_COLUMNS, args.out)
    if args.svg:
        series = [svg.Series("union bound", grid.tolist(), curve.ber_bound.tolist()),
                  svg.Series("simulation", grid.tolist(), [e.ber for e in estimates])]
        _write_svg(args.svg, svg.render(series, f"BER of {spec.label}", "gamma (dB)",
                                        "BER", log_y=True))
    return EXIT_OK


def cmd_frontier(args) -> int:
    target = args.target_ber if args.target_ber is not None else DEFAULTS["target_ber_frontier"]
    if not 0 < target < 0.5:
        raise UsageError("--target-ber must lie in (0, 0.5)")
    points = analysis.spectral_efficiency_frontier(analysis.frontier_schemes(), target)
    rows = [[str(p.spec.scheme), _num(p.spec.q), _num(p.spec.k), _num(p.spec.lam),
             _num(p.spec.m), _num(p.eta), _num(p.required_gamma_db)] for p in points]
    _emit(rows, FRONTIER_COLUMNS, args.out)
    if args.svg:
        series = []
        for scheme in (Scheme.OOK, Scheme.PPM, Scheme.MPPM, Scheme.EPPM, Scheme.AEPPM):
            fam = [p for p in points if p.spec.scheme is scheme]
            series.append(svg.Series(str(scheme), [p.required_gamma_db for p in fam],
                                     [p.eta for p in fam]))
        _write_svg(args.svg, svg.render(series, f"Spectral efficiency at BER {target:g}",
                                        "required gamma (dB)", "bits per slot",
                                        lines=False))
    return EXIT_OK


COMMANDS = {"design": cmd_design, "bounds": cmd_bounds, "simulate": cmd_simulate,
            "frontier": cmd_frontier}


def _apply_config(parser: argparse.ArgumentParser, conf: dict[str, str]) -> None:
    # string defaults go through each action's type conversion
    conf = {("lam" if k == "lambda" else k): v for k, v in conf.items()}
    for action in parser._actions:  # noqa: SLF001
        if isinstance(action, argparse._SubParsersAction):  # noqa: SLF001
            for sub in action.choices.values():
                known = {a.dest for a in sub._actions}  # noqa: SLF001
                sub.set_defaults(**{k: v for k, v in conf.items() if k in known})


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    parser = build_parser()
    try:
        if known.config:
            _apply_config(parser, read_config(known.config))
    except (UsageError, OSError) as exc:
        print(f"eppm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, InvalidParameters, ParseError) as exc:
        print(f"eppm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotFound, VerificationFailed) as exc:
        print(f"eppm: construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (EppmError, OSError) as exc:
        print(f"eppm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
