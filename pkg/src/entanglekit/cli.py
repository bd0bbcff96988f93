"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 bad parameters, 3 numerical
failure, 4 I/O error.  Option values come from the command line first, then
from ``--config`` (flat ``key = value`` lines using the flag names), then
from the built-in defaults.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import analytic, landscape, oracle, verify
from .output import emit, render_csv, render_json, render_report
from .params import ParameterError, SystemParams, derive_scales, from_dimensionless

log = logging.getLogger("entanglekit")

EXIT_OK, EXIT_VERIFY, EXIT_PARAMS, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

DEFAULTS = {
    "m1": 1.0,
    "m2": 1.0,
    "omega": 1.0,
    "B_over_b": 1.0,
    "K": 0.0,
    "hbar": 1.0,
    "t": 0.0,
    "n": 256,
    "rank_epsilon": oracle.RANK_EPSILON,
    "format": "csv",
    "seed": 0,
    "top": 10,
    "alpha_min": 0.01,
    "alpha_max": 100.0,
    "beta_min": 0.05,
    "beta_max": 1.5,
    "n_alpha": 201,
    "n_beta": 146,
    "t_max": 5.0,
    "t_unit": "tau",
    "steps": 51,
    "oracle": False,
    "T": 2.0,
    "verify_n": 128,
}
COMMAND_DEFAULTS = {"reverse": {"n": 128, "steps": 21}}


def _add_physics(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("system parameters")
    g.add_argument("--m1", type=float)
    g.add_argument("--m2", type=float)
    g.add_argument("--omega", type=float)
    width = g.add_mutually_exclusive_group()
    width.add_argument("--B", type=float, help="CM packet width (length)")
    width.add_argument("--B-over-b", dest="B_over_b", type=float, help="CM packet width in units of b")
    g.add_argument("--K", type=float, help="mean CM wavenumber")
    g.add_argument("--hbar", type=float)
    g.add_argument("--alpha", type=float, help="m1/m2; with --beta uses M = 1")
    g.add_argument("--beta", type=float, help="B/b; with --alpha uses M = 1")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file")
    p.add_argument("--output", "-o", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int, help="worker threads (env ENTANGLEKIT_JOBS)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entanglekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="closed-form linear entropy and time scales")
    _add_physics(p)
    p.add_argument("--t", type=float)
    _add_common(p)

    p = sub.add_parser("schmidt", help="numerical Schmidt spectrum on a momentum grid")
    _add_physics(p)
    p.add_argument("--t", type=float)
    p.add_argument("--n", type=int, help="grid points per axis (8..512)")
    p.add_argument("--rank-epsilon", dest="rank_epsilon", type=float)
    p.add_argument("--top", type=int, help="number of eigenvalues to report")
    _add_common(p)

    p = sub.add_parser("landscape", help="Delta_0 and tau/tau_B over (m1/m2, B/b)")
    p.add_argument("--preset", choices=sorted(landscape.PRESETS))
    p.add_argument("--alpha-min", dest="alpha_min", type=float)
    p.add_argument("--alpha-max", dest="alpha_max", type=float)
    p.add_argument("--beta-min", dest="beta_min", type=float)
    p.add_argument("--beta-max", dest="beta_max", type=float)
    p.add_argument("--n-alpha", dest="n_alpha", type=int)
    p.add_argument("--n-beta", dest="n_beta", type=int)
    _add_common(p)

    p = sub.add_parser("evolve", help="Delta(t) time series")
    _add_physics(p)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--t-unit", dest="t_unit", choices=("tau", "tau_B", "abs"), help="unit of --t-max")
    p.add_argument("--steps", type=int)
    p.add_argument("--oracle", action="store_true", default=None, help="add the grid oracle column")
    p.add_argument("--n", type=int)
    _add_common(p)

    p = sub.add_parser("reverse", help="time-reversed scenario over [0, 2T]")
    _add_physics(p)
    p.add_argument("--T", type=float, help="reversal time")
    p.add_argument("--t-unit", dest="t_unit", choices=("tau", "tau_B", "abs"), help="unit of --T")
    p.add_argument("--steps", type=int)
    p.add_argument("--n", type=int)
    _add_common(p)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--n", dest="verify_n", type=int)
    p.add_argument("--inject-fault", dest="inject_fault", choices=verify.FAULTS, help="test hook")
    _add_common(p)
    return parser


def read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def _convert(parser: argparse.ArgumentParser, dest: str, text: str):
    for action in parser._actions:
        if action.dest == dest:
            if action.nargs == 0:
                return text.lower() in ("1", "true", "yes", "on")
            conv = action.type or str
            try:
                value = conv(text)
            except ValueError as exc:
                raise ParameterError(f"config value for {dest!r}: {exc}") from None
            if action.choices is not None and value not in action.choices:
                raise ParameterError(f"config value for {dest!r} must be one of {action.choices}")
            return value
    raise ParameterError(f"unknown config key {dest!r}")


def resolve(args: argparse.Namespace, subparser: argparse.ArgumentParser) -> argparse.Namespace:
    if getattr(args, "config", None):
        for dest, text in read_config(args.config).items():
            if dest in ("B", "B_over_b") and (args.B is not None or args.B_over_b is not None):
                continue
            if getattr(args, dest, None) is None:
                setattr(args, dest, _convert(subparser, dest, text))
    defaults = {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}
    for dest, value in defaults.items():
        if hasattr(args, dest) and getattr(args, dest) is None:
            if dest == "B_over_b" and getattr(args, "B", None) is not None:
                continue
            setattr(args, dest, value)
    if getattr(args, "jobs", None) is None:
        env = os.environ.get("ENTANGLEKIT_JOBS")
        try:
            args.jobs = int(env) if env else 1
        except ValueError:
            raise ParameterError(f"ENTANGLEKIT_JOBS must be an integer, got {env!r}") from None
    if args.jobs < 1:
        raise ParameterError("--jobs must be >= 1")
    return args


def params_from_args(args) -> SystemParams:
    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise ParameterError("--alpha and --beta must be given together")
        return from_dimensionless(args.alpha, args.beta, omega=args.omega, hbar=args.hbar, K=args.K)
    if args.B is not None:
        return SystemParams(args.m1, args.m2, args.omega, args.B, K=args.K, hbar=args.hbar)
    probe = SystemParams(args.m1, args.m2, args.omega, 1.0, K=args.K, hbar=args.hbar)
    if not args.B_over_b > 0:
        raise ParameterError(f"--B-over-b must be positive, got {args.B_over_b!r}")
    return SystemParams(args.m1, args.m2, args.omega, args.B_over_b * probe.b, K=args.K, hbar=args.hbar)


def _time_in_units(value: float, unit: str, params: SystemParams) -> float:
    sc = derive_scales(params)
    return value * {"tau": sc.tau, "tau_B": sc.tau_B, "abs": 1.0}[unit]


def _params_report(params: SystemParams) -> dict:
    sc = derive_scales(params)
    return {
        "m1": params.m1,
        "m2": params.m2,
        "omega": params.omega,
        "B": params.B,
        "K": params.K,
        "hbar": params.hbar,
        "M": sc.M,
        "mu": sc.mu,
        "b": sc.b,
        "B0": sc.B0,
        "alpha": sc.alpha,
        "beta": sc.beta,
        "tau_B": sc.tau_B,
        "tau": sc.tau,
        "tau_ratio": sc.tau_ratio,
    }


def cmd_entropy(args) -> int:
    params = params_from_args(args)
    sc = derive_scales(params)
    report = _params_report(params)
    report.update(
        t=args.t,
        delta0=analytic.initial_linear_entropy(sc.alpha, sc.beta),
        delta=analytic.linear_entropy(args.t, params),
    )
    emit(render_report(report, args.format), args.output)
    return EXIT_OK


def cmd_schmidt(args) -> int:
    params = params_from_args(args)
    grid = oracle.build_grid(params, args.t, args.n)
    wave = oracle.sample_wave(params, args.t, grid)
    res = oracle.schmidt_decompose(wave, args.rank_epsilon)
    report = _params_report(params)
    report.update(
        t=args.t,
        lambdas=res.lambdas[: args.top],
        sum_lambda=float(np.sum(res.lambdas)),
        rank=res.rank,
        rank_epsilon=res.rank_epsilon,
        truncated_weight=res.truncated_weight,
        linear_entropy=res.entropies.linear,
        von_neumann_entropy=res.entropies.von_neumann,
        renyi2_entropy=res.entropies.renyi2,
        linear_entropy_closed_form=analytic.linear_entropy(args.t, params),
        recon_residual=res.recon_residual,
        grid={
            "n": grid.n,
            "k1_center": grid.k1_center,
            "k2_center": grid.k2_center,
            "k1_halfspan": grid.k1_halfspan,
            "k2_halfspan": grid.k2_halfspan,
            "norm_deficit": wave.norm_deficit,
        },
    )
    emit(render_report(report, args.format), args.output)
    return EXIT_OK


def cmd_landscape(args) -> int:
    if args.preset:
        table = landscape.preset_sweep(args.preset)
    else:
        table = landscape.sweep(
            (args.alpha_min, args.alpha_max), (args.beta_min, args.beta_max), args.n_alpha, args.n_beta
        )
    if args.format == "json":
        text = render_json({"meta": table.meta, "columns": landscape.LANDSCAPE_COLUMNS, "rows": list(table.rows())})
    else:
        text = render_csv(landscape.LANDSCAPE_COLUMNS, table.rows())
    emit(text, args.output)
    return EXIT_OK


def _emit_series(series, args) -> None:
    if args.format == "json":
        text = render_json({"meta": series.meta, "columns": landscape.SERIES_COLUMNS, "rows": list(series.rows())})
    else:
        text = render_csv(landscape.SERIES_COLUMNS, series.rows())
    emit(text, args.output)


def cmd_evolve(args) -> int:
    params = params_from_args(args)
    t_max = _time_in_units(args.t_max, args.t_unit, params)
    series = landscape.time_series(params, t_max, args.steps, with_oracle=args.oracle, n=args.n, jobs=args.jobs)
    _emit_series(series, args)
    return EXIT_OK


def cmd_reverse(args) -> int:
    params = params_from_args(args)
    T = _time_in_units(args.T, args.t_unit, params)
    series = landscape.time_reversal_series(params, T, args.steps, n=args.n, jobs=args.jobs)
    _emit_series(series, args)
    return EXIT_OK


def cmd_verify(args) -> int:
    result = verify.run_all(n=args.verify_n, seed=args.seed, fault=args.inject_fault)
    emit(render_json(result), args.output)
    for check in result["checks"]:
        log.info("%s %s", "PASS" if check["passed"] else "FAIL", check["name"])
    return EXIT_OK if result["passed"] else EXIT_VERIFY


COMMANDS = {
    "entropy": cmd_entropy,
    "schmidt": cmd_schmidt,
    "landscape": cmd_landscape,
    "evolve": cmd_evolve,
    "reverse": cmd_reverse,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        resolve(args, subparser)
        return COMMANDS[args.command](args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except (oracle.GridError, oracle.DecompositionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
