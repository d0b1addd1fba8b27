"""Command-line surface.

Subcommands:
    simulate    --config PATH [--out DIR]
    equilibrate --config PATH [--tol T]
    verify      [--quick]
    loja        --ledger CSV [--tail N]

Exit codes: 0 success, 1 usage, 2 configuration, 3 numerical failure,
4 self-test failure.
"""

import argparse
import os
import sys

from vesflow.errors import ConfigError, InsufficientTail, IoError, VesflowError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_SELFTEST = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def make_parser():
    parser = _Parser(prog="vesflow", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_sim = sub.add_parser("simulate", help="run a configured simulation")
    p_sim.add_argument("--config", required=True, help="JSON configuration file")
    p_sim.add_argument("--out", default=None, help="override the output directory")

    p_eq = sub.add_parser("equilibrate", help="relax the configured initial phase to a critical point")
    p_eq.add_argument("--config", required=True, help="JSON configuration file")
    p_eq.add_argument("--tol", type=float, default=None,
                      help="residual |z|_2 target (default: tolerances.equilibrium)")

    p_ver = sub.add_parser("verify", help="run the operator/identity self-test battery")
    p_ver.add_argument("--quick", action="store_true", help="single grid, fewer random trials")

    p_loja = sub.add_parser("loja", help="decay-exponent fit from a ledger CSV")
    p_loja.add_argument("--ledger", required=True, help="ledger CSV produced by simulate")
    p_loja.add_argument("--tail", type=int, default=None, help="use only the last N rows")
    return parser


def _cmd_simulate(args):
    from vesflow.config import load_config
    from vesflow.runner import run

    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = run(cfg, output_dir=args.out, log=print)
    except VesflowError as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    rows = result.ledger.rows
    print(f"finished at t = {result.final_state.t:.9g} after {result.final_state.step} steps")
    print(f"E(0) = {rows[0].e_total:.9g}  E(end) = {rows[-1].e_total:.9g}  "
          f"max |residual| = {max(abs(r.residual) for r in rows):.3e}")
    if result.report.steady_reached:
        print(f"steady state at t = {result.report.steady_time:.9g}")
    return EXIT_OK


def _cmd_equilibrate(args):
    from vesflow.config import build_setup, load_config
    from vesflow.errors import NotConverged
    from vesflow.grid import FaceVelocity
    from vesflow.io import write_checkpoint
    from vesflow.simulation import find_equilibrium

    try:
        cfg = load_config(args.config)
        setup = build_setup(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    tol = args.tol if args.tol is not None else cfg.tolerances.equilibrium
    try:
        psi_bar, history = find_equilibrium(setup.psi0, setup.params, tol)
    except (NotConverged, VesflowError) as exc:
        print(f"equilibration failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    outdir = cfg.output_dir
    os.makedirs(outdir, exist_ok=True)
    path = os.path.join(outdir, "equilibrium.bin")
    write_checkpoint(psi_bar, FaceVelocity.zeros(setup.grid), path)
    print(f"converged in {len(history) - 1} iterations, residual {history[-1]:.6e}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_verify(args):
    from vesflow.selfcheck import run_battery

    results = run_battery(quick=args.quick)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.name}  ({r.detail})")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_SELFTEST


def _cmd_loja(args):
    from vesflow.io import read_ledger_csv
    from vesflow.simulation import default_e_inf_hat, lojasiewicz_estimate

    try:
        cols = read_ledger_csv(args.ledger)
    except IoError as exc:
        print(f"ledger error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    e = cols["E_total"]
    z = cols["z_l2"]
    if args.tail is not None:
        e = e[-args.tail:]
        z = z[-args.tail:]
    try:
        e_inf = default_e_inf_hat(e)
        fit = lojasiewicz_estimate(e, z, e_inf)
    except InsufficientTail as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"theta_hat = {fit.theta_hat:.9g}")
    print(f"slope = {fit.slope:.9g}  r_squared = {fit.r_squared:.9g}  "
          f"n = {fit.n_samples}  e_inf_hat = {fit.e_inf_hat:.9g}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "simulate": _cmd_simulate,
        "equilibrate": _cmd_equilibrate,
        "verify": _cmd_verify,
        "loja": _cmd_loja,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
