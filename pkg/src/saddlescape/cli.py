"""Command line front end: run experiments, scale dimensions, verify, derive."""

from __future__ import annotations

import argparse
import json
import sys

from .core import DivergenceError, ParameterError
from .harness import (
    ExperimentConfig,
    derive_params_for,
    run_dimension_scaling,
    run_experiment,
    run_verify,
)
from .testbed import registry_ids

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_DIVERGED = 3


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(EXIT_USAGE)


def _coerce(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    try:
        return int(low)
    except ValueError:
        pass
    try:
        return float(low)
    except ValueError:
        pass
    return low


def read_config(path: str) -> dict:
    """Flat key = value file; # starts a comment, blank lines are skipped."""
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = _coerce(val)
    return values


def _parse_x0(text: str) -> tuple:
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError as exc:
        raise ParameterError(f"bad x0 {text!r}: {exc}") from None


_RUN_FIELDS = {
    "alg": "algorithm", "fn": "landscape", "mode": "mode", "trials": "trials",
    "seed": "seed", "steps": "steps", "out": "out", "jobs": "jobs",
    "eta": "eta", "r": "radius", "sigma": "sigma", "m": "batch",
    "M": "outer_batch", "eps": "eps", "delta": "delta", "delta_f": "delta_f",
    "ncf_steps": "ncf_steps", "pert": "exploit_step", "g_thresh": "grad_threshold",
    "t_thresh": "cooldown", "threshold": "threshold", "theta": "theta",
    "gamma": "gamma", "nce_radius": "nce_radius", "x0": "x0",
    "trust_region": "trust_region",
}


def _build_run_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        for key, val in read_config(args.config).items():
            if key in _RUN_FIELDS:
                values[_RUN_FIELDS[key]] = val
            elif key in _RUN_FIELDS.values():
                values[key] = val
            else:
                raise ParameterError(f"unknown config key {key!r}")
    for flag, field in _RUN_FIELDS.items():
        given = getattr(args, flag, None)
        if given is not None:
            values[field] = given
    if isinstance(values.get("x0"), str):
        values["x0"] = _parse_x0(values["x0"])
    if "algorithm" not in values or "landscape" not in values:
        raise ParameterError("--alg and --fn are required (flag or config file)")
    values.setdefault("mode", "experiment")
    values.setdefault("trials", 100)
    values.setdefault("seed", 0)
    return ExperimentConfig(**values)


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alg", help="algorithm id: nc, ancgd, snc, pgd, pagd, psgd")
    p.add_argument("--fn", help="landscape id, e.g. quartic, cubic, highdim-10")
    p.add_argument("--mode", choices=["paper", "experiment"], help="parameter source")
    p.add_argument("--trials", type=int, help="number of seeded trials (default 100)")
    p.add_argument("--seed", type=int, help="base seed (default 0)")
    p.add_argument("--steps", type=int, help="iteration budget per trial")
    p.add_argument("--out", help="output path; writes .csv and .summary.json")
    p.add_argument("--jobs", type=int, help="worker processes (or SADDLESCAPE_JOBS)")
    p.add_argument("--eta", type=float, help="step size")
    p.add_argument("--r", type=float, help="perturbation/probe radius")
    p.add_argument("--sigma", type=float, help="gradient noise level")
    p.add_argument("--m", type=int, help="curvature-search minibatch size")
    p.add_argument("--M", type=int, help="outer SGD minibatch size")
    p.add_argument("--eps", type=float, help="target accuracy")
    p.add_argument("--delta", type=float, help="failure probability")
    p.add_argument("--delta-f", dest="delta_f", type=float, help="initial gap bound")
    p.add_argument("--ncf-steps", dest="ncf_steps", type=int, help="curvature-search length")
    p.add_argument("--pert", type=float, help="exploit step length")
    p.add_argument("--g-thresh", dest="g_thresh", type=float, help="gradient trigger")
    p.add_argument("--t-thresh", dest="t_thresh", type=int, help="trigger cooldown steps")
    p.add_argument("--threshold", type=float, help="escape decrease threshold")
    p.add_argument("--theta", type=float, help="momentum parameter")
    p.add_argument("--gamma", type=float, help="certificate curvature parameter")
    p.add_argument("--nce-radius", dest="nce_radius", type=float, help="momentum-reset step")
    p.add_argument("--x0", help="start point, comma separated (default: first saddle)")
    p.add_argument("--trust-region", dest="trust_region", type=float, help="divergence bound")
    p.add_argument("--config", help="flat key = value config file; flags override it")


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _build_run_config(args)
    result = run_experiment(cfg)
    print(
        f"alg={cfg.algorithm} fn={cfg.landscape} mode={cfg.mode} "
        f"trials={len(result.rows)} threshold={result.threshold:g} "
        f"escape_rate={result.escape_rate:.4f} "
        f"fraction_below={result.fail_rate:.4f} "
        f"mean_decrease={sum(r.decrease for r in result.rows) / len(result.rows):.6f}"
    )
    if cfg.out:
        print(f"wrote {cfg.out if cfg.out.endswith('.csv') else cfg.out + '.csv'}")
    return EXIT_OK


def _cmd_dimscale(args: argparse.Namespace) -> int:
    try:
        ps = [int(p) for p in args.p.split(",") if p.strip()]
    except ValueError:
        raise ParameterError(f"bad --p list {args.p!r}") from None
    if not ps:
        raise ParameterError("--p must list at least one exponent")
    rows = run_dimension_scaling(
        ps, trials=args.trials, seed=args.seed, jobs=args.jobs, out=args.out
    )
    for row in rows:
        print(
            f"p={row['p']} n={row['n']} nc[{row['nc_steps']} steps]="
            f"{row['nc_escape_rate']:.4f} pgd[{row['pgd_steps']} steps]="
            f"{row['pgd_escape_rate']:.4f}"
        )
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    ids = None
    if args.fn:
        ids = [part.strip() for part in args.fn.split(",") if part.strip()]
    report = run_verify(ids=ids)
    for entry in report.entries:
        for check in entry["checks"]:
            status = "ok" if check["ok"] else "FAIL"
            print(f"{status:4s} {entry['landscape']}: {check['name']}: {check['detail']}")
    if not report.ok:
        print(f"verification failed: {len(report.failures)} check(s)")
        return EXIT_VERIFY
    print(f"verification passed: {len(report.entries)} landscape(s)")
    return EXIT_OK


def _cmd_params(args: argparse.Namespace) -> int:
    out = derive_params_for(
        args.alg,
        ell=args.ell,
        rho=args.rho,
        eps=args.eps,
        delta=args.delta,
        n=args.n,
        delta_f=args.delta_f,
        ell_tilde=args.ell_tilde,
    )
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="saddlescape",
        description="Escape saddle points with gradient-only negative-curvature search.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="run seeded trials of one algorithm on one landscape")
    _add_run_flags(p_run)
    p_run.set_defaults(func=_cmd_run)

    p_dim = sub.add_parser("dimscale", help="escape rates across dimensions 10**p")
    p_dim.add_argument("--p", default="1,2,3", help="comma list of exponents")
    p_dim.add_argument("--trials", type=int, default=100)
    p_dim.add_argument("--seed", type=int, default=0)
    p_dim.add_argument("--jobs", type=int, default=None)
    p_dim.add_argument("--out", help="CSV output path")
    p_dim.set_defaults(func=_cmd_dimscale)

    p_ver = sub.add_parser("verify", help="audit landscape gradients, saddles, spectra")
    p_ver.add_argument("--fn", help=f"comma list of ids (default registry: {registry_ids()})")
    p_ver.set_defaults(func=_cmd_verify)

    p_par = sub.add_parser("params", help="print derived constants for an algorithm")
    p_par.add_argument("--alg", required=True, help="nc, ncf, ancgd, or snc")
    p_par.add_argument("--ell", type=float, required=True)
    p_par.add_argument("--rho", type=float, required=True)
    p_par.add_argument("--eps", type=float, required=True)
    p_par.add_argument("--delta", type=float, default=0.1)
    p_par.add_argument("--n", type=int, required=True)
    p_par.add_argument("--delta-f", dest="delta_f", type=float, default=1.0)
    p_par.add_argument("--ell-tilde", dest="ell_tilde", type=float, default=None)
    p_par.set_defaults(func=_cmd_params)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DivergenceError as exc:
        sys.stderr.write(f"diverged: {exc}\n")
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
