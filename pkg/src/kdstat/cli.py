"""
Command-line front end.

Subcommands
-----------
``test2``     two-sample homogeneity t-test on two CSV files
``dep``       independence t-test on two paired CSV files
``simulate``  empirical rejection rates for a named scenario
``power``     exact (Monte Carlo) and large-sample power curves

Exit status is 0 on success, 2 when the data are statistically degenerate
(too few rows, constant samples, zero bandwidth, ``|R| >= 1``) and 1 for
usage, input or configuration errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, DegeneracyError, KdstatError
from .grouped import GroupSpec, load_csv, load_group_spec
from .homogeneity import (
    PowerParams,
    approx_power,
    exact_power_mc,
    homogeneity_df,
    homogeneity_test,
)
from .independence import dependence_test, local_alt_power, nu_count
from .simgen import (
    ScenarioId,
    default_workers,
    empirical_rejection,
    parse_tests,
    rates_to_csv,
    rates_to_json,
    spec_for_test,
)
from .statdist import t_upper_quantile

METRICS = {
    "kd-euclid": "I",
    "kd-laplace": "II",
    "kd-gauss": "III",
    "euclid-energy": "IV",
    "mmd-laplace": "V",
    "mmd-gauss": "VI",
}


class UsageError(KdstatError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for degenerate data here.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _round(obj):
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(f"{x:.12g}") if math.isfinite(x) else x
    return obj


def dumps(doc) -> str:
    """Canonical JSON: sorted keys, floats rounded to 12 significant digits."""
    return json.dumps(_round(doc), sort_keys=True, indent=2) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _alpha(text: str) -> float:
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < a < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {a}")
    return a


def _alphas(text: str) -> tuple[float, ...]:
    return tuple(_alpha(t) for t in text.split(",") if t.strip())


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _nonneg(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {v}")
    return v


def _spec_for(groups: str | None, metric: str, dim: int) -> GroupSpec:
    if groups is not None:
        return load_group_spec(groups).with_dim(dim)
    return spec_for_test(METRICS[metric], dim)


def _cmd_test2(args) -> int:
    x = load_csv(args.x, has_header=args.header)
    y = load_csv(args.y, has_header=args.header)
    g = _spec_for(args.groups, args.metric, x.shape[1])
    res = homogeneity_test(x, y, g, alpha=args.alpha)
    doc = res.to_dict()
    doc["alpha"] = args.alpha
    doc["group_spec"] = res.metric.spec.to_dict()
    doc["bandwidths"] = None if res.metric.bandwidths is None else list(res.metric.bandwidths)
    _emit(dumps(doc), args.output)
    return 0


def _cmd_dep(args) -> int:
    x = load_csv(args.x, has_header=args.header)
    y = load_csv(args.y, has_header=args.header)
    gx = _spec_for(args.groups_x, args.metric, x.shape[1])
    gy = _spec_for(args.groups_y, args.metric, y.shape[1])
    res = dependence_test(x, y, gx, gy, alpha=args.alpha)
    doc = res.to_dict()
    doc["alpha"] = args.alpha
    doc["group_spec_x"] = res.metric_x.spec.to_dict()
    doc["group_spec_y"] = res.metric_y.spec.to_dict()
    _emit(dumps(doc), args.output)
    return 0


def _cmd_simulate(args) -> int:
    sid = ScenarioId.parse(args.scenario, n=args.n, m=args.m, p=args.p, beta=args.beta, phi=args.phi)
    tests = parse_tests(args.tests)
    rows = empirical_rejection(
        sid, tests, args.reps, args.alphas, seed=args.seed,
        workers=args.threads, group_size=args.group_size,
    )
    text = rates_to_json(rows) if args.format == "json" else rates_to_csv(rows)
    _emit(text, args.output)
    return 0


def _grid(text: str) -> list[float]:
    # "a:b" is an integer grid, anything else a comma list.
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":"))
        return [float(v) for v in range(lo, hi + 1)]
    return [float(v) for v in text.split(",") if v.strip()]


def _cmd_power(args) -> int:
    grid = _grid(args.grid)
    rows = []
    if args.kind == "dep":
        nu = nu_count(args.n)
        if nu < 2:
            raise ConfigurationError("the independence power curve needs n >= 5")
        t = float(t_upper_quantile(args.alpha, nu - 1))
        for psi0 in grid:
            phi = local_alt_power(psi0, nu, t)
            rows.append({"psi0": psi0, "t": t, "phi": phi, "power": 1.0 - phi})
        meta = {"kind": "dep", "n": args.n, "nu": nu}
    else:
        n, m = args.n, args.m
        df = homogeneity_df(n, m)
        t = float(t_upper_quantile(args.alpha, df))
        for s in grid:
            pp = PowerParams(
                sigma_sq=args.sigma_sq, sigma_x_sq=args.sigma_x_sq, sigma_y_sq=args.sigma_y_sq,
                delta=s / math.sqrt(n * m), delta0=s, alpha0=m / n,
            )
            exact = exact_power_mc(pp, n, m, t, reps=args.reps, seed=args.seed, workers=args.threads)
            approx = approx_power(pp, t)
            rows.append({
                "s": s, "t": t,
                "phi_exact": exact, "phi_approx": approx,
                "power_exact": 1.0 - exact, "power_approx": 1.0 - approx,
            })
        meta = {"kind": "test2", "n": n, "m": m, "df": df, "reps": args.reps, "seed": args.seed}
    meta["alpha"] = args.alpha
    if args.format == "csv":
        keys = list(rows[0])
        lines = [",".join(keys)]
        for r in rows:
            lines.append(",".join(f"{r[k]:.12g}" for k in keys))
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(dumps({"meta": meta, "curve": rows}), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kdstat", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def data_opts(sp, groups):
        sp.add_argument("--x", required=True, help="CSV file, one observation per row")
        sp.add_argument("--y", required=True, help="CSV file, one observation per row")
        for flag in groups:
            sp.add_argument(flag, default=None, help="JSON group spec (overrides --metric)")
        sp.add_argument("--metric", choices=sorted(METRICS), default="kd-euclid")
        sp.add_argument("--alpha", type=_alpha, default=0.05)
        sp.add_argument("--header", action="store_true", help="skip the first CSV line")
        sp.add_argument("--output", "-o", default=None, help="write here instead of stdout")

    sp = sub.add_parser("test2", help="two-sample homogeneity t-test")
    data_opts(sp, ["--groups"])
    sp.set_defaults(func=_cmd_test2)

    sp = sub.add_parser("dep", help="independence t-test")
    data_opts(sp, ["--groups-x", "--groups-y"])
    sp.set_defaults(func=_cmd_dep)

    sp = sub.add_parser("simulate", help="empirical rejection rates for a scenario")
    sp.add_argument("--scenario", required=True, help="e.g. H1.1, H2.3, D2.1, P.2")
    sp.add_argument("--n", type=_positive, default=50)
    sp.add_argument("--m", type=_positive, default=50)
    sp.add_argument("--p", type=_positive, default=50)
    sp.add_argument("--beta", type=float, default=0.5)
    sp.add_argument("--phi", type=float, default=0.5, help="AR(1) coefficient for D1.2")
    sp.add_argument("--group-size", type=_positive, default=None,
                    help="group size for tests I-III (default 2 for H3, else 1)")
    sp.add_argument("--reps", type=_positive, default=1000)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--tests", default="I,II,III,IV,V,VI")
    sp.add_argument("--alphas", type=_alphas, default=(0.05, 0.10))
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--threads", type=_positive, default=None)
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("power", help="power curves")
    sp.add_argument("--kind", choices=("test2", "dep"), default="test2")
    sp.add_argument("--n", type=_positive, default=10)
    sp.add_argument("--m", type=_positive, default=10)
    sp.add_argument("--alpha", type=_alpha, default=0.05)
    sp.add_argument("--grid", default="0:10", help="signal values: 'a:b' or comma list")
    sp.add_argument("--sigma-sq", type=float, default=1.0)
    sp.add_argument("--sigma-x-sq", type=float, default=1.0)
    sp.add_argument("--sigma-y-sq", type=float, default=1.0)
    sp.add_argument("--reps", type=_positive, default=50_000)
    sp.add_argument("--seed", type=_nonneg, default=0)
    sp.add_argument("--threads", type=_positive, default=None)
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--output", "-o", default=None)
    sp.set_defaults(func=_cmd_power)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "threads", None) is None and hasattr(args, "threads"):
            args.threads = default_workers()
        return args.func(args)
    except DegeneracyError as exc:
        print(f"kdstat: degenerate data: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"kdstat: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (KdstatError, OSError) as exc:
        print(f"kdstat: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
