"""Command-line entry point: parameter sweeps and verification suites,
emitted as CSV with metadata headers.

Exit codes: 0 on success, 1 on a configuration error, 2 when a verification
suite (psi-check, covert-check) reports failures.
"""

import argparse
import sys

import numpy as np

from .experiments import SweepConfig, run_covert_check, run_fig3, run_fig4, run_optimize_dump, run_psi_check
from .reports import emit_csv


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the CLI contract reserves 2 for
    # verification failures, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


class ConfigError(ValueError):
    pass


def parse_sigma_grid(spec: str):
    """Inclusive arithmetic grid from 'start:step:stop'."""
    try:
        start, step, stop = (float(p) for p in spec.split(":"))
    except ValueError:
        raise ConfigError(f"bad --sigma-grid {spec!r}, expected start:step:stop")
    if step <= 0.0 or stop < start:
        raise ConfigError("sigma grid needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(start + k * step) for k in range(count))


def parse_antennas(spec: str):
    """(N, M) from 'NxM'."""
    try:
        n, m = (int(p) for p in spec.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad --antennas {spec!r}, expected NxM")
    return n, m


def _int_list(spec: str):
    return [int(p) for p in spec.split(",") if p]


def _float_list(spec: str):
    return [float(p) for p in spec.split(",") if p]


def _add_common(sub):
    sub.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    sub.add_argument("--out", default=None, help="output CSV path (default: <command>.csv)")
    sub.add_argument("--draws", type=int, default=2000, help="channel draws per grid point")
    sub.add_argument("--sigma-grid", default="0.1:0.1:6.0", help="start:step:stop")
    sub.add_argument("--antennas", default="4x1", help="jammer x bob antennas, NxM")
    sub.add_argument("--epsilon", type=float, default=0.1, help="covertness requirement")
    sub.add_argument("--slots", type=int, default=20000, help="detector slots per hypothesis")
    sub.add_argument("--threads", type=int, default=1, help="worker threads over grid points")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="covertjam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fig3", parents=[], help="null-space vs full-space no-CSI sweep (M=1)")
    _add_common(p)

    p = sub.add_parser("fig4", help="global optimizer vs suboptimal schemes sweep")
    _add_common(p)
    p.add_argument("--restarts", type=int, default=8, help="alternating-optimizer starts")
    p.add_argument("--schemes", default="", help="comma list of scheme tags (default: all applicable)")

    p = sub.add_parser("psi-check", help="Beta-prime distribution verification suite")
    _add_common(p)
    p.add_argument("--d-list", default="1,2,4,8", help="comma list of direction counts")
    p.add_argument("--samples", type=int, default=10000, help="samples per d")
    p.add_argument("--random-v", action="store_true", help="random orthonormal frames instead of canonical")
    p.add_argument("--mismatch", type=int, default=0, help="reference-d offset (negative control)")

    p = sub.add_parser("covert-check", help="covertness criterion verification suite")
    _add_common(p)
    p.add_argument("--eps-list", default="0.05,0.1,0.2", help="comma list of epsilon values")
    p.add_argument("--uses", type=int, default=100, help="channel uses per slot (n)")
    p.add_argument("--channels", type=int, default=20, help="channel draws per epsilon")
    p.add_argument("--pa-scale", type=float, default=1.0, help="Alice power multiplier (negative control)")

    p = sub.add_parser("optimize", help="single-realization strategy dump")
    _add_common(p)
    p.add_argument("--sigma", type=float, default=1.0, help="noise-to-jam ratio for the dump")
    return parser


def _run(args) -> int:
    n, m = parse_antennas(args.antennas)
    if args.command == "fig3":
        cfg = SweepConfig(
            sigma_grid=parse_sigma_grid(args.sigma_grid),
            n_channel_draws=args.draws,
            master_seed=args.seed,
            antennas=(n, m),
            epsilon=args.epsilon,
        )
        report = run_fig3(cfg, n_threads=args.threads)
    elif args.command == "fig4":
        cfg = SweepConfig(
            sigma_grid=parse_sigma_grid(args.sigma_grid),
            n_channel_draws=args.draws,
            master_seed=args.seed,
            antennas=(n, m),
            epsilon=args.epsilon,
            schemes=tuple(t for t in args.schemes.split(",") if t),
        )
        report = run_fig4(cfg, n_threads=args.threads, restarts=args.restarts)
    elif args.command == "psi-check":
        report = run_psi_check(
            _int_list(args.d_list), args.samples, args.seed,
            random_v=args.random_v, d_mismatch=args.mismatch,
        )
    elif args.command == "covert-check":
        report = run_covert_check(
            _float_list(args.eps_list), args.uses, args.slots, args.channels, args.seed,
            p_a_scale=args.pa_scale, N=n,
        )
    else:
        report = run_optimize_dump(args.seed, n, m, args.sigma)

    out = args.out if args.out is not None else f"{args.command}.csv"
    emit_csv(report, out)
    print(f"wrote {out} ({len(report.rows)} rows)")

    if report.kind in ("psi-check", "covert-check"):
        failures = sum(1 for row in report.rows if not row[-1])
        if failures:
            print(f"verification failures: {failures}/{len(report.rows)} rows", file=sys.stderr)
            return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
