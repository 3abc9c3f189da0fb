"""Command-line front end: landau-ee verify|scan|kernels --config <path>.

Override precedence for output directory, job count, and seed:
command-line flag > environment variable (LANDAU_EE_OUT, LANDAU_EE_JOBS)
> config file.
"""

import argparse
import os
import sys

from .config import load_config
from .errors import ConfigError, LandauError


def _parser():
    p = argparse.ArgumentParser(
        prog="landau-ee",
        description=(
            "Entanglement-entropy studies for the 2D Fermi gas in a "
            "perturbed constant magnetic field"
        ),
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (
        ("verify", "run every identity/property suite and report tolerances"),
        ("scan", "run the area-law scan and write CSV/JSON/SVG outputs"),
        ("kernels", "evaluate and cross-check Landau kernels at config points"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("--config", required=True, help="path to the INI config")
        cmd.add_argument("--out", help="output directory (scan)")
        cmd.add_argument("--jobs", type=int, help="parallel row jobs (scan)")
        cmd.add_argument("--seed", type=int, help="seed for randomized suites")
    return p


def _overrides(args):
    over = {}
    env_out = os.environ.get("LANDAU_EE_OUT")
    env_jobs = os.environ.get("LANDAU_EE_JOBS")
    if env_out:
        over[("run", "out")] = env_out
    if env_jobs:
        try:
            over[("run", "jobs")] = int(env_jobs)
        except ValueError:
            raise ConfigError(f"LANDAU_EE_JOBS must be an integer, got {env_jobs!r}")
    if args.out is not None:
        over[("run", "out")] = args.out
    if args.jobs is not None:
        over[("run", "jobs")] = args.jobs
    if args.seed is not None:
        over[("run", "seed")] = args.seed
    return over


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=_overrides(args))
    except ConfigError as bad:
        print(f"config error: {bad}", file=sys.stderr)
        return 2

    try:
        if args.command == "verify":
            from .verify import cmd_verify

            code, lines = cmd_verify(cfg)
            print("\n".join(lines))
            return code
        if args.command == "kernels":
            from .verify import cmd_kernels

            code, lines = cmd_kernels(cfg)
            print("\n".join(lines))
            return code
        from .study import cmd_scan

        table, written = cmd_scan(cfg)
        n_scales = len({row.L for row in table.rows})
        print(f"scan complete: {len(table.rows)} rows over {n_scales} scales")
        for path in written:
            print(f"wrote {path}")
        return 0
    except LandauError as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
