"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .baselines import DegenerateChannelError
from .harness import SCHEMES, SweepError, SweepSpec, run_sweep, write_csv, write_plot_data
from .model import ConfigError, derive_rng, generate_channel_instance, load_scenario
from .mse import analytic_mse
from .simo import DegenerateBeamformerError, solve_simo, solve_simo_multistart
from .siso import solve_siso

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_VERIFY", "EXIT_USAGE", "EXIT_NUMERIC"]

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

_VAR_ALIASES = {
    "power_db": "power_db", "p": "power_db", "power": "power_db",
    "est_error_var": "est_error_var", "se": "est_error_var",
    "num_rx_antennas": "num_rx_antennas", "nr": "num_rx_antennas",
}
_NUMERIC_ERRORS = (np.linalg.LinAlgError, FloatingPointError, DegenerateChannelError,
                   DegenerateBeamformerError, SweepError, ArithmeticError)


class UsageError(Exception):
    pass


def _overrides(pairs: list[str]) -> dict[str, str]:
    out = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise UsageError(f"--set expects key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _fmt(z: complex) -> str:
    return f"{z.real:+.6g}{z.imag:+.6g}j"


def cmd_single(args) -> int:
    scenario = load_scenario(args.scenario, _overrides(args.set))
    config = scenario.config
    if args.n_starts < 1:
        raise UsageError("--n-starts must be >= 1")
    if scenario.est_channels is not None:
        est = scenario.est_channels
    else:
        est = generate_channel_instance(config, derive_rng(scenario.master_seed, 0)).est_channel

    print(f"K={config.num_wds} N_r={config.num_rx_antennas} noise_var={config.noise_var:g}")
    if config.num_rx_antennas == 1:
        sol = solve_siso(est, config)
        design = sol.design
        print(f"denoise factor w = {sol.denoise_factor:.10g}")
        print(f"k* = {sol.k_star} (WDs at full power, in quality order: "
              f"{list(sol.sorted_order[:sol.k_star])})")
    else:
        if args.n_starts > 1:
            trace = solve_simo_multistart(est, config, args.n_starts,
                                          rng=derive_rng(scenario.master_seed, 1))
        else:
            trace = solve_simo(est, config)
        design = trace.final_design
        print(f"AO iterations = {trace.iterations} converged={trace.converged} "
              f"best start={trace.start_index}")
        print("w = [" + ", ".join(_fmt(z) for z in design.rx_beamformer) + "]")

    print(f"{'wd':>4} {'|b_k|':>12} {'phase(rad)':>12} {'sqrt(P_k)':>12}")
    for k, b in enumerate(design.tx_coeff):
        print(f"{k:>4} {abs(b):>12.6g} {np.angle(b):>12.6g} "
              f"{np.sqrt(config.power_budget[k]):>12.6g}")

    mse = analytic_mse(design, est, config)
    print(f"misalignment = {mse.misalignment:.10g}")
    print(f"csi_related  = {mse.csi_related:.10g}")
    print(f"noise        = {mse.noise:.10g}")
    print(f"total MSE    = {mse.total:.10g}")
    print(f"objective    = {mse.total * config.num_wds**2:.10g}")

    if args.dump:
        doc = {
            "tx_coeff": [[z.real, z.imag] for z in design.tx_coeff],
            "rx_beamformer": [[z.real, z.imag] for z in design.rx_beamformer],
            "mse": {"misalignment": mse.misalignment, "csi_related": mse.csi_related,
                    "noise": mse.noise, "total": mse.total},
        }
        Path(args.dump).write_text(json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _parse_grid(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--grid must be comma-separated numbers, got {text!r}") from None


def cmd_sweep(args) -> int:
    variable = _VAR_ALIASES.get(args.var.lower())
    if variable is None:
        raise UsageError(f"unknown --var {args.var!r}")
    schemes = tuple(s.strip() for s in args.schemes.split(",") if s.strip())
    scenario = load_scenario(args.scenario, _overrides(args.set))
    seed = scenario.master_seed if args.seed is None else args.seed
    try:
        spec = SweepSpec(swept_variable=variable, grid=tuple(_parse_grid(args.grid)),
                         trials=args.trials, schemes=schemes, master_seed=seed,
                         base_config=scenario.config, n_starts=args.n_starts)
    except ConfigError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.threads is not None and args.threads < 1:
        raise UsageError("--threads must be >= 1")

    result = run_sweep(spec, workers=args.threads)
    write_csv(result, args.out)
    if args.plot_data:
        write_plot_data(result, args.plot_data)
    print(f"wrote {len(spec.grid) * len(spec.schemes)} rows to {args.out}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_checks

    results = run_checks(args.level)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"verification FAILED: first failing check is {failed[0].name}")
        return EXIT_VERIFY
    print(f"verification passed ({len(results)} checks)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aircomp",
        description="Transceiver design for over-the-air computation with imperfect CSI.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("single", help="solve one instance and print the design")
    p.add_argument("scenario", help="JSON scenario file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a scenario field (value parsed as JSON); repeatable")
    p.add_argument("--dump", metavar="PATH", help="also write the design as JSON")
    p.add_argument("--n-starts", type=int, default=1,
                   help="AO starts for N_r > 1, the first being the matched init (default 1)")
    p.set_defaults(func=cmd_single)

    p = sub.add_parser(
        "sweep", help="Monte Carlo sweep of all schemes",
        description="Sweep one variable and write mean MSE per grid point and scheme. "
                    "Power grid values (--var power_db) are in dB, P = 10^(dB/10); "
                    "the other variables are linear.")
    p.add_argument("scenario", help="JSON scenario file giving the base configuration")
    p.add_argument("--var", required=True,
                   help="power_db (alias p; grid in dB), est_error_var (alias se) "
                        "or num_rx_antennas (alias nr)")
    p.add_argument("--grid", required=True,
                   help="comma-separated, strictly increasing values; dB when sweeping power")
    p.add_argument("--trials", type=int, default=200, help="channel draws per grid point")
    p.add_argument("--schemes", default=",".join(SCHEMES),
                   help=f"comma-separated subset of {','.join(SCHEMES)}")
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default: the scenario's master_seed)")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plot-data", metavar="PATH", help="also write gnuplot-ready blocks")
    p.add_argument("--threads", type=int, default=None,
                   help="worker processes (default: $AIRCOMP_THREADS or 1)")
    p.add_argument("--n-starts", type=int, default=1, help="AO starts for N_r > 1")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a scenario field; repeatable")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check the solvers against oracles and closed forms")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
