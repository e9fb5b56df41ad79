"""Command-line entry points: headless runs, orientation sweeps, the live
server, and filter design inspection.

Exit codes: 0 success, 2 configuration error, 3 numeric divergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from .config import ConfigError, SimConfig, load_config_file
from .dsp import design_butterworth, frequency_response
from .sim import NumericDivergenceError, oracle_sweep, run_simulation, write_csv, write_sweep_csv

EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _load(path: str | None, seed: int | None = None) -> SimConfig:
    config = load_config_file(path) if path else SimConfig()
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    return config


def _cmd_simulate(args) -> int:
    config = _load(args.config, args.seed)
    records, status = run_simulation(config)
    write_csv(records, args.out)
    if status.converged:
        print(
            f"converged: {status.solution_deg:.2f} deg "
            f"at t = {status.convergence_time:.1f} s"
        )
    else:
        print("not converged")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    config = _load(args.config)
    result = oracle_sweep(config, grid_step=args.step, n_jobs=args.jobs)
    write_sweep_csv(result, args.out)
    for theta, j in result.maxima:
        print(f"local maximum: {theta:.1f} deg (J = {j:.4f})")
    print(f"wrote {result.theta_deg.size} grid points to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    from .server import serve  # deferred: pulls in asyncio/websockets

    config = _load(args.config)
    serve(config, args.port, host=args.host)
    return 0


def _cmd_filters(args) -> int:
    kind = {"lp": "lowpass", "hp": "highpass"}[args.kind]
    coeffs = design_butterworth(kind, args.fc, args.fs)
    print(f"{kind} butterworth, fc = {args.fc} Hz at fs = {args.fs} Hz")
    for name in ("b0", "b1", "b2", "a1", "a2"):
        print(f"  {name} = {getattr(coeffs, name)!r}")
    mag = abs(frequency_response(coeffs, args.fc, args.fs))
    print(f"  |H(fc)| = {mag:.6f} ({20 * math.log10(mag):+.4f} dB, target -3.0103 dB)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exerseek",
        description="Exercise-trajectory orientation optimizer and simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a headless closed-loop experiment")
    sim.add_argument("--config", help="JSON config file (defaults when omitted)")
    sim.add_argument("--out", required=True, help="telemetry CSV destination")
    sim.add_argument("--seed", type=int, default=None, help="override config seed")
    sim.set_defaults(func=_cmd_simulate)

    sweep = sub.add_parser("sweep", help="brute-force the orientation landscape")
    sweep.add_argument("--config", help="JSON config file")
    sweep.add_argument("--step", type=float, default=1.0, help="grid step, degrees")
    sweep.add_argument("--out", required=True, help="sweep CSV destination")
    sweep.add_argument("--jobs", type=int, default=None, help="worker processes")
    sweep.set_defaults(func=_cmd_sweep)

    srv = sub.add_parser("serve", help="serve the live loop over WebSocket")
    srv.add_argument("--config", help="JSON config file")
    srv.add_argument("--port", type=int, required=True)
    srv.add_argument("--host", default="127.0.0.1")
    srv.set_defaults(func=_cmd_serve)

    filt = sub.add_parser("filters", help="print biquad coefficients for a cutoff")
    filt.add_argument("--fs", type=float, required=True, help="sample rate, Hz")
    filt.add_argument("--fc", type=float, required=True, help="cutoff, Hz")
    filt.add_argument("--kind", choices=("lp", "hp"), required=True)
    filt.set_defaults(func=_cmd_filters)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericDivergenceError as exc:
        print(f"numeric divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
