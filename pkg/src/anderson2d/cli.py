"""Command-line entry point.

Exit codes: 0 success, 2 config error, 3 solver non-convergence,
4 internal inconsistency (a structural identity failed numerically).
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .choquard import SelfDualInconsistencyError
from .harness import ConfigError, RunConfig, run
from .operator import SolverError
from .spectral import SpectralInconsistencyError
from .variational import NotFoundError


def _float_list(text):
    return tuple(float(v) for v in text.split(","))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anderson2d",
        description="Anderson operator toolkit on the flat 2-torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    default_root = os.environ.get("ANDERSON2D_OUT_ROOT", "runs")

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None,
                       help=f"output directory (default under {default_root})")

    p = sub.add_parser("sample-noise", help="draw a seeded white-noise field")
    common(p)
    p.add_argument("--cutoff", type=int, default=None)

    p = sub.add_parser("diagnose-heat", help="heat kernel / Green diagnostics")
    common(p)
    p.add_argument("--times", type=_float_list, default=None)

    p = sub.add_parser("spectrum", help="low eigenpairs of -H_c + a")
    common(p)
    p.add_argument("--potential", default=None)
    p.add_argument("--count", type=int, default=None)

    p = sub.add_parser("kato-check", help="Kato moduli and resolvent sweeps")
    common(p)
    p.add_argument("--potential", default=None)
    p.add_argument("--sweep", default=None,
                   help="r=...,T=...,lambda=... comma-separated sweeps")

    for name in ("solve-mp", "solve-fountain"):
        p = sub.add_parser(name, help="variational saddle search")
        common(p)
        p.add_argument("--potential", default=None)
        p.add_argument("--nonlinearity", default=None,
                       help="pow3 or pow:<ell>")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--count", type=int, default=None)

    p = sub.add_parser("solve-choquard", help="self-dual Choquard minimizer")
    common(p)
    p.add_argument("--a", dest="a_spec", default=None)
    p.add_argument("--w", dest="w_spec", default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--init", default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=None)
    return parser


def _parse_sweep(text):
    out = {}
    for part in text.split(";"):
        key, _, vals = part.partition("=")
        out[key.strip()] = tuple(float(v) for v in vals.split(","))
    return out


def config_from_args(args):
    if args.config:
        config = RunConfig.from_json(Path(args.config).read_text())
        config.command = args.command
    else:
        config = RunConfig(command=args.command)
    overrides = {
        "n": "n", "seed": "seed", "out": "out", "cutoff": "cutoff",
        "times": "times", "potential": "potential",
        "count": "count", "nonlinearity": "nonlinearity", "tol": "tol",
        "max_iter": "max_iter", "a_spec": "a_spec", "w_spec": "w_spec",
        "p": "p", "q": "q", "init": "init",
    }
    for arg_name, field in overrides.items():
        val = getattr(args, arg_name, None)
        if val is not None:
            setattr(config, field, val)
    if getattr(args, "sweep", None):
        sweeps = _parse_sweep(args.sweep)
        if "r" in sweeps:
            config.sweep_r = sweeps["r"]
        if "T" in sweeps:
            config.sweep_T = sweeps["T"]
        if "lambda" in sweeps:
            config.sweep_lambda = sweeps["lambda"]
    if args.out is None and not args.config:
        root = os.environ.get("ANDERSON2D_OUT_ROOT", "runs")
        config.out = str(Path(root) / args.command)
    return config


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        manifest = run(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SolverError, NotFoundError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except (SpectralInconsistencyError, SelfDualInconsistencyError) as exc:
        print(f"internal inconsistency: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {len(manifest.checksums)} artifacts to {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
