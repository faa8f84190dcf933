"""Command-line entry point: ``crkdg {run,convergence,cfl-table,equivalence-check}``.

Exit status is 0 when every asserted property passes, 1 when one fails and 2
for configuration or runtime errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMBA_NUM_THREADS")


def _parser():
    p = argparse.ArgumentParser(prog="crkdg", description="Compact and classical RKDG solvers.")
    p.add_argument("--output-dir", type=Path, default=Path("crkdg-output"), help="directory for CSV files")
    p.add_argument("--threads", type=int, default=None, help="thread count for numba and BLAS")
    p.add_argument("--seed", type=int, default=0, help="seed for randomised checks")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="march one configured scenario")
    run.add_argument("config", type=Path)
    conv = sub.add_parser("convergence", help="error/order table over the configured meshes")
    conv.add_argument("config", type=Path)
    sub.add_parser("cfl-table", help="maximum linear-stability CFL numbers")
    eq = sub.add_parser("equivalence-check", help="compact step vs single-step form; tableau identities")
    eq.add_argument("--fields", type=int, default=50)
    return p


def _report(checks):
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 1


def _cmd_run(args):
    from .harness.config import load_config
    from .harness.output import write_contour, write_profile, write_samples
    from .harness.properties import check_run, total_variation
    from .harness.reference import REFERENCE_RUNS, l1_distance, reference_solution
    from .harness.runner import build_solver, run_scenario

    cfg = load_config(args.config)
    scen = cfg.scenario
    space0, _, limiter0 = build_solver(scen)
    u0 = scen.initial_field(space0)
    if scen.limit_initial:
        u0 = limiter0(u0)
    tv0 = total_variation(space0, u0) if scen.dim == 1 else None
    res = run_scenario(scen)
    out = args.output_dir
    if cfg.output.profile:
        write_profile(out / "profile.csv", res.space, scen.law, res.u)
    if cfg.output.samples:
        write_samples(out / "samples.csv", res.space, scen.law, res.u, cfg.output.samples)
    if cfg.output.contour and scen.dim == 2:
        write_contour(out / "contour.csv", res.space, res.u)
    ref_l1 = None
    if cfg.properties.max_reference_l1 is not None and cfg.name in REFERENCE_RUNS:
        x, means = reference_solution(cfg.name, cfg.variant)
        ref_l1 = l1_distance(res.space, res.u, x, means)
    print(f"{scen.name}: N={scen.cells} k={scen.degree} {scen.scheme}, {res.steps} steps, "
          f"{res.wall_time:.2f}s, max drift {res.max_drift:.3e}")
    if res.errors:
        print("errors: " + ", ".join(f"{k}={v:.4e}" for k, v in res.errors.items()))
    return _report(check_run(res, cfg.properties, tv0, ref_l1))


def _cmd_convergence(args):
    from .errors import ConfigurationError
    from .harness.config import load_config
    from .harness.output import write_errors
    from .harness.properties import check_convergence
    from .harness.runner import convergence_study

    cfg = load_config(args.config)
    if not cfg.convergence_cells:
        raise ConfigurationError("[convergence] cells is required for the convergence command")
    rep = convergence_study(cfg.scenario, cfg.convergence_cells)
    (a, b), = cfg.scenario.domain[:1]
    if cfg.output.errors:
        write_errors(args.output_dir / "errors.csv", rep, length=b - a)
    print(rep.format())
    return _report(check_convergence(rep, cfg.properties))


def _cmd_cfl(args):
    from .harness.output import write_table
    from .harness.properties import Check
    from .vonneumann import cfl_table

    rows = cfl_table()
    write_table(args.output_dir / "cfl_table.csv", ["order", "scheme", "tableau", "k", "cfl"], rows)
    print("order,scheme,tableau,k,cfl")
    for order, scheme, tab, k, c in rows:
        print(f"{order},{scheme},{tab},{k},{c:.4f}")
    second = [c for order, *_, c in rows if order == 2]
    # second-order compact and classical steps coincide for linear problems
    return _report([Check("second_order_match", abs(second[0] - second[1]) <= 1e-3,
                          f"crkdg {second[0]:.4f} vs rkdg {second[1]:.4f}")])


def _cmd_equivalence(args):
    from .harness.checks import equivalence_checks, tableau_checks

    return _report(equivalence_checks(args.seed, args.fields) + tableau_checks())


COMMANDS = {"run": _cmd_run, "convergence": _cmd_convergence, "cfl-table": _cmd_cfl,
            "equivalence-check": _cmd_equivalence}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads is not None:
        if args.threads < 1:
            print("error: --threads must be positive", file=sys.stderr)
            return 2
        for var in _THREAD_VARS:
            os.environ[var] = str(args.threads)
    from .errors import CRKDGError

    if args.threads is not None:
        from . import _kernels

        _kernels.set_threads(args.threads)
    try:
        return COMMANDS[args.command](args)
    except CRKDGError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
