"""Command-line front end.

Subcommands: phase-diagram, bifurcation, gap, finite-thetac, mu-critical
(parallel sweeps writing CSV), plus solve (one point) and constants.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 every point failed.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import finite_chain, thermodynamic
from .numerics import Tolerance
from .sweep import SWEEP_KINDS, ResultRow, SweepSpec, emit_csv, run_sweep, write_rows

__all__ = ["parse_config", "main"]

_EPILOG = """\
grids accept a single value (2), a comma list (3,4,5) or an inclusive
range start:stop:step (0.5:8:0.5).

CSV columns per kind:
  phase-diagram  mu,theta_c,W_star,x,status
  bifurcation    mu,theta,W,delta,value,status
  gap            mu,W1,f0_per,f0,gap,delta_opt,status
  finite-thetac  mu,L,theta_c,W_star,x,status
  mu-critical    L,mu_c,status
  solve          mu,theta[,L],W,delta,value,status
  constants      c1,c2,C,status
"""

_CONFIG_KEYS = {"mu", "theta", "L", "out", "workers", "abs_tol", "rel_tol"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        raise UsageError(message)


def _parse_range(text: str, integer: bool = False) -> list:
    """Expand '2', '3,4,5' or 'start:stop:step' (endpoints within half-step)."""
    def one(tok: str):
        try:
            val = float(tok)
        except ValueError:
            raise UsageError(f"malformed number {tok!r}") from None
        if integer:
            if val != int(val):
                raise UsageError(f"expected an integer, got {tok!r}")
            return int(val)
        return val

    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise UsageError(f"bad range {text!r}")
        out, k = [], 0
        while True:
            val = start + k * step
            if val > stop + step / 2:
                break
            out.append(int(val) if integer else val)
            k += 1
        return out
    return [one(tok) for tok in text.split(",") if tok != ""]


def _read_config(path: str) -> dict:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, val = line.partition("=")
                key = key.strip()
                if key not in _CONFIG_KEYS:
                    raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
                values[key] = val.strip()
    except OSError as err:
        raise UsageError(f"cannot read config file {path}: {err}") from None
    return values


def _build_parser() -> _Parser:
    parser = _Parser(prog="peierls",
                     description="Dimerized tight-binding rings: free-energy "
                                 "minima, critical temperatures, bifurcations.",
                     epilog=_EPILOG,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in (*SWEEP_KINDS, "solve", "constants"):
        p = sub.add_parser(kind, epilog=_EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--mu", help="stiffness value, list or range")
        p.add_argument("--theta", help="temperature value, list or range")
        p.add_argument("--L", help="even ring length, list or range")
        p.add_argument("--out", help="output CSV path (default stdout for solve/constants)")
        p.add_argument("--workers", help="parallel workers (default: cpu count)")
        p.add_argument("--abs-tol", dest="abs_tol", help="absolute tolerance (default 1e-10)")
        p.add_argument("--rel-tol", dest="rel_tol", help="relative tolerance (default 1e-10)")
        p.add_argument("--config", help="key=value defaults file; flags override")
    return parser


def _merged_options(args) -> dict:
    opts = {k: getattr(args, k) for k in ("mu", "theta", "L", "out", "workers",
                                          "abs_tol", "rel_tol")}
    if args.config:
        for key, val in _read_config(args.config).items():
            if opts.get(key) is None:
                opts[key] = val
    return opts


def _number(opts, key, default=None, cast=float):
    raw = opts.get(key)
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise UsageError(f"malformed value for --{key.replace('_', '-')}: {raw!r}") from None


def _tolerances(opts) -> Tolerance:
    abs_tol = _number(opts, "abs_tol", 1e-10)
    rel_tol = _number(opts, "rel_tol", 1e-10)
    try:
        return Tolerance(abs_tol=abs_tol, rel_tol=rel_tol)
    except ValueError as err:
        raise UsageError(str(err)) from None


def parse_config(argv) -> SweepSpec:
    """Tokens (plus an optional key=value file) to a validated SweepSpec."""
    args = _build_parser().parse_args(argv)
    if args.kind not in SWEEP_KINDS:
        raise UsageError(f"{args.kind} is not a sweep command")
    opts = _merged_options(args)

    def need(key, integer=False):
        if opts.get(key) is None:
            raise UsageError(f"{args.kind} requires --{key}")
        return _parse_range(opts[key], integer=integer)

    if args.kind in ("phase-diagram", "gap"):
        grid = [(mu,) for mu in need("mu")]
    elif args.kind == "bifurcation":
        mus = need("mu")
        if len(mus) != 1:
            raise UsageError("bifurcation wants a single --mu")
        grid = [(mus[0], th) for th in need("theta")]
    elif args.kind == "finite-thetac":
        grid = [(mu, L) for mu in need("mu") for L in need("L", integer=True)]
    else:  # mu-critical
        grid = [(L,) for L in need("L", integer=True)]

    if opts.get("out") is None:
        raise UsageError(f"{args.kind} requires --out")
    workers = _number(opts, "workers", os.cpu_count() or 1, cast=int)
    if workers < 1:
        raise UsageError(f"workers must be >= 1, got {workers}")
    try:
        return SweepSpec(kind=args.kind, grid=grid, output_path=opts["out"],
                         workers=workers, tolerances=_tolerances(opts))
    except ValueError as err:
        raise UsageError(str(err)) from None


def _solve_rows(opts) -> list[ResultRow]:
    mu = _number(opts, "mu")
    theta = _number(opts, "theta")
    if mu is None or theta is None:
        raise UsageError("solve requires --mu and --theta")
    L = _number(opts, "L", cast=int)
    if theta <= 0:
        raise UsageError(f"solve needs theta > 0, got {theta}")
    try:
        params = finite_chain.ModelParams(mu=mu, theta=theta, L=L)
    except ValueError as err:
        raise UsageError(str(err)) from None
    inputs = {"mu": mu, "theta": theta}
    if L is not None:
        inputs["L"] = L
    try:
        if L is not None:
            state, value = finite_chain.minimize_dimer_finite(params)
        else:
            state, value = thermodynamic.minimize_dimer_thermo(params)
        outputs = {"W": state.W, "delta": state.delta, "value": value}
        return [ResultRow(inputs=inputs, outputs=outputs)]
    except (ValueError, RuntimeError) as err:
        return [ResultRow(inputs=inputs, outputs={"W": "", "delta": "", "value": ""},
                          status=f"error: {err}")]


def _constants_rows() -> list[ResultRow]:
    c = thermodynamic.asymptotic_constants()
    return [ResultRow(inputs={}, outputs={"c1": c.c1, "c2": c.c2, "C": c.C_prefactor})]


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parsed = _build_parser().parse_args(argv)
        if parsed.kind in SWEEP_KINDS:
            spec = parse_config(argv)
            rows = run_sweep(spec)
            out_path = spec.output_path
        else:
            opts = _merged_options(parsed)
            rows = _solve_rows(opts) if parsed.kind == "solve" else _constants_rows()
            out_path = opts.get("out")
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1

    try:
        if out_path is None:
            write_rows(rows, sys.stdout)
        else:
            emit_csv(rows, out_path)
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    if all(row.status != "ok" for row in rows):
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
