"""Command-line interface: ``dcsbm <subcommand> ...``.

Data goes to ``--out`` or stdout; progress and diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import io as dio
from .core import compute_stats
from .experiment import records_to_csv, run_experiment, summary_to_csv
from .likelihood import DEFAULT_BUDGET, log_c, log_joint, log_profile_sup, mle_params
from .marginal import log_marginal_bracket, log_marginal_exact
from .sampler import GeneratorConfig, generate, make_rng
from .selection import select_k
from .sweeps import all_sweeps

log = logging.getLogger("dcsbm")


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_generate(args):
    fixed = {}
    mode = "hierarchical"
    if args.params:
        p = dio.load_json(args.params, "params")
        mode = "fixed"
        fixed = dict(pi=p.pi, lambda_tilde=p.lambda_tilde, weights=p.weights)
        if args.labels:
            fixed["labels"] = dio.load_json(args.labels, "labels").z
        elif p.weights is not None:
            raise ValueError("params carry node weights; pass --labels with the matching labelling")
        args.k0 = p.k
    if args.k0 is None:
        raise ValueError("generate: give --k0 or --params")
    rho = args.rho if args.rho is not None else 1.0
    cfg = GeneratorConfig(n=args.n, k0=args.k0, mode=mode, seed=args.seed, rho=rho, **fixed)
    params, z, x = generate(cfg)
    _emit(dio.format_network(x), args.out)
    if args.labels_out:
        dio.save_json(args.labels_out, z)
    if args.params_out:
        dio.save_json(args.params_out, params)


def _labels(args, n):
    z = dio.load_json(args.labels, "labels")
    if z.n != n:
        raise dio.FormatError(f"labels have length {z.n} but the network has {n} nodes")
    return z


def cmd_stats(args):
    x = dio.read_network(args.network)
    z = _labels(args, x.n)
    s = compute_stats(x, z)
    _emit(dio.dumps(s), args.out)


def cmd_loglik(args):
    x = dio.read_network(args.network)
    z = _labels(args, x.n)
    out = {"log_c": log_c(x), "log_profile_sup": log_profile_sup(x, z)}
    if args.params:
        out["log_joint"] = log_joint(x, z, dio.load_json(args.params, "params"))
    else:
        out["log_joint_at_mle"] = log_joint(x, z, mle_params(x, z))
    _emit(dio.dumps(out), args.out)


def cmd_marginal(args):
    x = dio.read_network(args.network)
    if args.backend == "exact":
        ev = log_marginal_exact(x, args.k, budget=args.budget)
    else:
        ev = log_marginal_bracket(x, args.k, strategy=args.strategy, restarts=args.restarts,
                                  rng=make_rng(args.seed), budget=args.budget)
    _emit(dio.dumps(ev), args.out)


def cmd_select(args):
    x = dio.read_network(args.network)
    report = select_k(x, args.k_max, args.backend, budget=args.budget,
                      allow_partial=args.allow_partial, strategy=args.strategy,
                      restarts=args.restarts, seed=args.seed)
    for w in report.warnings:
        log.warning(w)
    _emit(dio.dumps(report), args.out)


def cmd_check(args):
    results = all_sweeps(seed=args.seed, quick=args.quick)
    lines = [r.line() for r in results]
    _emit("\n".join(lines) + "\n", args.out)
    failed = [r for r in results if not r.passed]
    for r in failed:
        log.error("%s failed; witness: %s", r.name, r.witness)
    return 1 if failed else 0


def cmd_experiment(args):
    cfg = dio.load_json(args.config, "config")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.backend is not None:
        cfg.backend = args.backend
    if args.k_max is not None:
        cfg.k_max = args.k_max
    if args.budget is not None:
        cfg.budget = args.budget
    records, summary = run_experiment(cfg, workers=args.workers)
    out = args.out or cfg.output
    _emit(records_to_csv(records, cfg.k_max, timing=args.timing), out)
    if args.summary:
        _emit(summary_to_csv(summary), args.summary)
    for n, acc in summary.items():
        log.info("n=%d accuracy=%.3f", n, acc)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcsbm", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, backend=True):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                       help="max labellings for exhaustive enumeration")
        if backend:
            p.add_argument("--backend", choices=("exact", "bracket"), default="exact")
            p.add_argument("--strategy", choices=("greedy", "exhaustive"), default="greedy")
            p.add_argument("--restarts", type=int, default=10)

    p = sub.add_parser("generate", help="sample a network")
    common(p, backend=False)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k0", type=int)
    p.add_argument("--rho", type=float)
    p.add_argument("--params", help="fixed-parameter JSON (otherwise draw from the prior)")
    p.add_argument("--labels", help="fixed labels JSON, used with --params")
    p.add_argument("--labels-out")
    p.add_argument("--params-out")
    p.set_defaults(func=cmd_generate)

    for name, func, helptext in (("stats", cmd_stats, "sufficient statistics"),
                                 ("loglik", cmd_loglik, "joint and profile log-likelihood")):
        p = sub.add_parser(name, help=helptext)
        common(p, backend=False)
        p.add_argument("network")
        p.add_argument("--labels", required=True)
        if name == "loglik":
            p.add_argument("--params")
        p.set_defaults(func=func)

    p = sub.add_parser("marginal", help="log marginal likelihood for one k")
    common(p)
    p.add_argument("network")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_marginal)

    p = sub.add_parser("select", help="estimate the number of communities")
    common(p)
    p.add_argument("network")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--allow-partial", action="store_true")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("check", help="run the inequality sweeps")
    common(p, backend=False)
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("experiment", help="Monte Carlo accuracy experiment")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--summary", default=None, help="write per-n accuracy CSV here")
    p.add_argument("--backend", choices=("exact", "bracket"), default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="fill the runtime_ms column")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args) or 0
    except (dio.FormatError, ValueError, RuntimeError) as err:
        log.error("%s", err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
