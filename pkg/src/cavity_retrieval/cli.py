"""Command-line front end.

Subcommands: point, sweep, optimize, check, dump-trajectory.  All frequencies
on the command line are MHz (nu-convention), times are ns.  Exit codes:
0 success, 1 validation error, 2 check-suite failure, 3 partial sweep failure.
"""

from __future__ import annotations

import argparse
import sys

from .checks import run_checks
from .dynamics import dump_trajectory_csv, simulate
from .efficiency import retrieval_efficiency
from .errors import ConfigError, RetrievalError
from .homodyne import dump_phase_csv, optimize_lo_frequency, phase_profile
from .model import PhysicalParams, Pulse, TimeGrid, angular_to_mhz
from .optimize import joint_refine, two_stage
from .sweep import (MODE_DETUNE_OPT, MODE_NO_DETUNE_OPT, GridAxis, SweepConfig,
                    config_kwargs_from_file, run_point, run_sweep,
                    write_sweep_csv)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CHECK_FAILED = 2
EXIT_PARTIAL_SWEEP = 3


def _add_physics_flags(sub, grid_axes=False):
    sub.add_argument("--kappa", type=float, default=9.0,
                     help="cavity decay rate / 2pi in MHz (default 9)")
    sub.add_argument("--gamma", type=float, default=3.0,
                     help="polarization decay rate / 2pi in MHz (default 3)")
    sub.add_argument("--C", type=float, default=None,
                     help="cooperativity w^2/(kappa gamma)")
    sub.add_argument("--w", type=float, default=None,
                     help="collective coupling / 2pi in MHz")
    sub.add_argument("--tau", type=float, default=150.0,
                     help="pulse FWHM in ns (default 150)")
    sub.add_argument("--rel-tol", type=float, default=1e-10,
                     help="solver tolerance (default 1e-10)")
    if grid_axes:
        sub.add_argument("--Delta", type=str, default=None,
                         help="laser-atom detuning / 2pi in MHz, or min:max:steps")
        sub.add_argument("--Omega", type=str, default=None,
                         help="peak Rabi frequency / 2pi in MHz, or min:max:steps")
    else:
        sub.add_argument("--Delta", type=float, default=0.0,
                         help="laser-atom detuning / 2pi in MHz")
        sub.add_argument("--Omega", type=float, default=80.0,
                         help="peak Rabi frequency / 2pi in MHz")


def _point_config(args, mode) -> SweepConfig:
    return SweepConfig(kappa_mhz=args.kappa, gamma_mhz=args.gamma, C=args.C,
                       w_mhz=args.w, tau_ns=args.tau, mode=mode,
                       objective=args.objective, rel_tol=args.rel_tol)


def _params_and_pulse(args, delta_mhz):
    params = PhysicalParams.from_mhz(args.kappa, args.gamma, C=args.C,
                                     w_mhz=args.w, Delta_mhz=args.Delta,
                                     delta_mhz=delta_mhz)
    return params, Pulse.from_mhz(args.Omega, args.tau)


def _cmd_point(args) -> int:
    if args.C is None and args.w is None:
        args.C = 100.0
    mode = MODE_NO_DETUNE_OPT if (args.no_detune_opt or args.delta is not None) \
        else MODE_DETUNE_OPT
    config = _point_config(args, mode)
    result = run_point(config, args.Delta, args.Omega, delta_mhz=args.delta)
    if result.error and "ZeroField" not in result.error:
        print(f"error: {result.error}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"Delta     = {result.Delta_mhz:.4g} MHz")
    print(f"Omega     = {result.Omega_mhz:.4g} MHz")
    print(f"delta_opt = {result.delta_opt_mhz:.4g} MHz"
          + ("  (fixed)" if mode == MODE_NO_DETUNE_OPT else ""))
    if result.nu_opt_mhz == result.nu_opt_mhz:
        print(f"nu_opt    = {result.nu_opt_mhz:.4g} MHz")
        print(f"eta       = {result.eta:.4g}")
        print(f"chi       = {result.chi:.4g}")
        print(f"chi*eta   = {result.chi_eta:.4g}")
    else:
        print(f"eta       = {result.eta:.4g}")
        print(f"note      : {result.error}")
    if args.dump or args.dump_phase:
        params, pulse = _params_and_pulse(args, result.delta_opt_mhz)
        grid = TimeGrid.for_pulse(params, pulse, rel_tol=args.rel_tol,
                                  abs_tol=args.rel_tol)
        traj, _ = simulate(params, pulse, grid)
        if args.dump:
            dump_trajectory_csv(traj, args.dump)
            print(f"trajectory -> {args.dump}")
        if args.dump_phase:
            hres = optimize_lo_frequency(traj)
            dump_phase_csv(phase_profile(traj, hres.omega_opt), args.dump_phase)
            print(f"phase profile -> {args.dump_phase}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    kwargs = config_kwargs_from_file(args.config) if args.config else {}
    if args.kappa != 9.0 or "kappa_mhz" not in kwargs:
        kwargs["kappa_mhz"] = args.kappa
    if args.gamma != 3.0 or "gamma_mhz" not in kwargs:
        kwargs["gamma_mhz"] = args.gamma
    if args.C is not None:
        kwargs["C"] = args.C
        kwargs.pop("w_mhz", None)
    if args.w is not None:
        kwargs["w_mhz"] = args.w
        if args.C is None:
            kwargs.pop("C", None)
    if args.tau != 150.0 or "tau_ns" not in kwargs:
        kwargs["tau_ns"] = args.tau
    if args.Delta is not None:
        kwargs["delta_grid"] = GridAxis.parse(args.Delta)
    if args.Omega is not None:
        kwargs["omega_grid"] = GridAxis.parse(args.Omega)
    if args.no_detune_opt:
        kwargs["mode"] = MODE_NO_DETUNE_OPT
    if args.objective is not None:
        kwargs["objective"] = args.objective
    if args.jobs is not None:
        kwargs["jobs"] = args.jobs
    if args.rel_tol != 1e-10:
        kwargs["rel_tol"] = args.rel_tol
    if args.out is not None:
        kwargs["out"] = args.out
    if kwargs.get("C") is None and kwargs.get("w_mhz") is None:
        kwargs["C"] = 100.0
    config = SweepConfig(**kwargs)

    total = config.delta_grid.steps * config.omega_grid.steps

    def progress(done, n):
        if args.quiet:
            return
        if done == n or done % max(1, n // 20) == 0:
            print(f"\r{done}/{n} points", end="", file=sys.stderr, flush=True)

    results = run_sweep(config, progress=progress)
    if not args.quiet:
        print(file=sys.stderr)
    write_sweep_csv(results, config, config.out)
    failed = sum(1 for r in results if r.error and "ZeroField" not in r.error)
    print(f"{len(results)} rows -> {config.out} ({failed} failed)")
    return EXIT_PARTIAL_SWEEP if failed else EXIT_OK


def _cmd_optimize(args) -> int:
    if args.C is None and args.w is None:
        args.C = 100.0
    params, pulse = _params_and_pulse(args, 0.0)
    result = two_stage(params, pulse, rel_tol=args.rel_tol)
    if args.joint:
        result = joint_refine(result, rel_tol=args.rel_tol)
    print(f"stage     = {result.stage}")
    print(f"delta_opt = {angular_to_mhz(result.delta_opt):.4g} MHz")
    print(f"nu_opt    = {angular_to_mhz(result.omega_opt):.4g} MHz")
    print(f"eta       = {result.eta:.4g}")
    print(f"chi       = {result.chi:.4g}")
    print(f"chi*eta   = {result.chi_eta:.4g}")
    print(f"solves    = {result.evaluations}")
    return EXIT_OK


def _cmd_check(args) -> int:
    results = run_checks(suite=args.suite, rel_tol=args.rel_tol)
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        failures += not r.passed
        print(f"[{mark}] {r.suite:16s} {r.name:{width}s}  "
              f"measured {r.measured}  expected {r.expected}")
    print(f"{len(results) - failures}/{len(results)} checks passed")
    return EXIT_CHECK_FAILED if failures else EXIT_OK


def _cmd_dump_trajectory(args) -> int:
    if args.C is None and args.w is None:
        args.C = 100.0
    params, pulse = _params_and_pulse(args, args.delta)
    grid = TimeGrid.for_pulse(params, pulse, rel_tol=args.rel_tol,
                              abs_tol=args.rel_tol)
    traj, report = simulate(params, pulse, grid)
    dump_trajectory_csv(traj, args.out)
    eta = retrieval_efficiency(traj)
    print(f"{len(traj.times)} samples -> {args.out} (eta = {eta:.4g}, "
          f"{report.steps_accepted} steps)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-retrieval",
        description="Single-photon retrieval simulation, homodyne matching "
                    "and detuning optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    point = sub.add_parser("point", help="evaluate one parameter point")
    _add_physics_flags(point)
    point.add_argument("--delta", type=float, default=None,
                       help="fix the cavity detuning / 2pi in MHz")
    point.add_argument("--no-detune-opt", action="store_true",
                       help="keep delta fixed (default 0) instead of optimizing")
    point.add_argument("--objective", choices=["eta", "chi-eta"], default="eta")
    point.add_argument("--dump", metavar="PATH", default=None,
                       help="write the trajectory CSV")
    point.add_argument("--dump-phase", metavar="PATH", default=None,
                       help="write the phase-profile CSV")
    point.set_defaults(func=_cmd_point)

    sweep = sub.add_parser("sweep", help="run a (Delta, Omega) grid sweep")
    _add_physics_flags(sweep, grid_axes=True)
    sweep.add_argument("--config", metavar="PATH", default=None,
                       help="INI config file; flags override its values")
    sweep.add_argument("--no-detune-opt", action="store_true")
    sweep.add_argument("--objective", choices=["eta", "chi-eta"], default=None)
    sweep.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: all cores)")
    sweep.add_argument("--out", metavar="PATH", default=None,
                       help="output CSV path (default sweep.csv)")
    sweep.add_argument("--quiet", action="store_true")
    sweep.set_defaults(func=_cmd_sweep)

    opt = sub.add_parser("optimize", help="two-stage detuning optimization")
    _add_physics_flags(opt)
    opt.add_argument("--joint", action="store_true",
                     help="follow with joint coordinate-descent refinement")
    opt.set_defaults(func=_cmd_optimize)

    check = sub.add_parser("check", help="run invariant and regression suites")
    check.add_argument("--suite", choices=["all", "invariants", "paper-regression"],
                       default="all")
    check.add_argument("--rel-tol", type=float, default=1e-10,
                       help="solver tolerance used by the checks")
    check.set_defaults(func=_cmd_check)

    dump = sub.add_parser("dump-trajectory", help="simulate and write a CSV")
    _add_physics_flags(dump)
    dump.add_argument("--delta", type=float, default=0.0,
                      help="cavity detuning / 2pi in MHz (default 0)")
    dump.add_argument("--out", metavar="PATH", required=True)
    dump.set_defaults(func=_cmd_dump_trajectory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, RetrievalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
