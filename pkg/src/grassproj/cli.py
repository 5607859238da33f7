"""Command-line front end.

Subcommands: gen, sweep, verify, haar, stats.  Every command is a pure
function of its flags and input files; reruns are byte-identical.  Exit
codes: 0 success, 1 invariant violation, 2 config error, 3 I/O error,
4 file-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import dset, lab, verify
from . import randgrass as rg
from .errors import GrassprojError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_FORMAT = 4


def _default_threads() -> int:
    env = os.environ.get("GRASSPROJ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grassproj",
        description="Desk-scale experiments for discretized projection machinery",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a discretized set file")
    kind = p_gen.add_mutually_exclusive_group(required=True)
    kind.add_argument("--ball", action="store_true", help="cells meeting B(0, delta^theta)")
    kind.add_argument("--cantor", action="store_true", help="digit-set Cantor product")
    kind.add_argument("--slice-union", action="store_true", help="plane-union-line set in R^3")
    kind.add_argument("--from-lattice", metavar="PATH", help="reinterpret a lattice file as cells")
    p_gen.add_argument("--n", type=int, default=2)
    p_gen.add_argument("--k", type=int, help="scale exponent (delta = 2^-k)")
    p_gen.add_argument("--theta", type=float, default=0.5, help="ball radius exponent")
    p_gen.add_argument("--base", type=int, default=4)
    p_gen.add_argument("--digits", default="0,3", help="comma-separated digit set")
    p_gen.add_argument("--levels", type=int, default=5)
    p_gen.add_argument("--side", type=int, default=4)
    p_gen.add_argument("-o", "--output", required=True)

    p_sweep = sub.add_parser("sweep", help="projection sweep over random or given directions")
    p_sweep.add_argument("--set", dest="set_path", required=True)
    p_sweep.add_argument("--m", type=int, default=1, help="projection dimension")
    p_sweep.add_argument("--alpha", type=float, required=True)
    p_sweep.add_argument("--eps", type=float, required=True)
    p_sweep.add_argument("--mu", help="GrassmannSample file; omit to draw Haar directions")
    p_sweep.add_argument("--dirs", type=int, default=64, help="number of Haar directions")
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--threads", type=int, default=None)
    p_sweep.add_argument("--plot", action="store_true", help="also render a PNG figure")
    p_sweep.add_argument("-o", "--output", required=True, help="output prefix (.json/.csv)")

    p_verify = sub.add_parser("verify", help="run a named invariant suite")
    p_verify.add_argument("--suite", required=True, choices=sorted(verify.SUITES))
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--exhaustive-cube", type=int, default=3,
                          help="cube dimension for the exhaustive uct scan")
    p_verify.add_argument("--reproducer", default="verify_reproducer.json",
                          help="where to dump a minimal reproducer on violation")

    p_haar = sub.add_parser("haar", help="emit a GrassmannSample file of Haar directions")
    p_haar.add_argument("--n", type=int, required=True)
    p_haar.add_argument("--m", type=int, required=True)
    p_haar.add_argument("--count", type=int, required=True)
    p_haar.add_argument("--seed", type=int, default=0)
    p_haar.add_argument("-o", "--output", required=True)

    p_stats = sub.add_parser("stats", help="non-concentration statistics report")
    p_stats.add_argument("--set", dest="set_path", help="set file for the Frostman statistic")
    p_stats.add_argument("--mu", help="sample file for the Grassmannian statistic")
    p_stats.add_argument("--kappa", type=float, required=True)
    p_stats.add_argument("--k", type=int, default=None, help="dyadic depth for the mu statistic")
    p_stats.add_argument("--probes", type=int, default=32)
    p_stats.add_argument("--seed", type=int, default=0)
    p_stats.add_argument("--json", dest="json_out", help="also write the report as JSON")
    p_stats.add_argument("--plot", action="store_true", help="render the profile figure")

    return parser


def _load_set(path: str) -> dset.DiscretizedSet:
    if not os.path.exists(path):
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    try:
        return dset.load_set(path)
    except (ValueError, IndexError) as exc:
        print(f"error: bad set file {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_FORMAT)


def _load_mu(path: str) -> rg.GrassmannSample:
    if not os.path.exists(path):
        print(f"error: no such file: {path}", file=sys.stderr)
        raise SystemExit(EXIT_IO)
    try:
        return rg.load_sample(path)
    except (ValueError, IndexError, GrassprojError) as exc:
        print(f"error: bad sample file {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_FORMAT)


def cmd_gen(args) -> int:
    from .lattice_cover import load_lattice

    try:
        if args.ball:
            if args.k is None:
                raise ValueError("--ball needs --k")
            a = lab.gen_ball(args.n, args.k, args.theta)
        elif args.cantor:
            digits = tuple(int(d) for d in args.digits.split(","))
            log2b = args.base.bit_length() - 1
            k = args.k if args.k is not None else args.levels * log2b
            a = lab.gen_cantor_product(args.base, digits, args.n, k)
        elif args.slice_union:
            if args.k is None:
                raise ValueError("--slice-union needs --k")
            a = lab.gen_slice_union(args.k, args.side)
        else:
            if args.k is None:
                raise ValueError("--from-lattice needs --k")
            z = load_lattice(args.from_lattice)
            a = dset.DiscretizedSet(z.dim, args.k, sorted(z.elements))
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GrassprojError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        dset.save_set(a, args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"cells: {a.cell_count}")
    print(f"box-dimension proxy: {dset.box_dimension_proxy(a):.4f}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    a = _load_set(args.set_path)
    if args.mu:
        mu = _load_mu(args.mu)
    else:
        if not (0 < args.m < a.n):
            print(f"error: need 0 < m < n = {a.n}", file=sys.stderr)
            return EXIT_CONFIG
        mu = rg.GrassmannSample.from_haar(a.n, args.m, args.dirs, rg.Rng(args.seed))
    threads = args.threads if args.threads is not None else _default_threads()
    try:
        report = lab.projection_sweep(a, mu, args.eps, args.alpha, threads=threads)
    except (GrassprojError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report.write_json(args.output + ".json")
        report.write_csv(args.output + ".csv")
        if args.plot:
            from .plotting import render_sweep_figure

            render_sweep_figure(report, args.output + ".png")
    except OSError as exc:
        print(f"error: cannot write reports: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"directions: {len(report.records)}")
    print(f"exceptional fraction: {report.exceptional_fraction:.17g}")
    return EXIT_OK


def cmd_verify(args) -> int:
    fn = verify.SUITES[args.suite]
    kwargs = {"seed": args.seed}
    if args.trials is not None:
        kwargs["trials"] = args.trials
    if args.suite == "uct":
        kwargs.pop("trials", None)
        kwargs["cube_dim"] = args.exhaustive_cube
        if args.trials is not None:
            kwargs["random_trials"] = args.trials
    try:
        result = fn(**kwargs)
    except (GrassprojError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"suite {result.suite}: checked {result.checked} instances, "
          f"{result.violations} violations")
    if not result.passed:
        with open(args.reproducer, "w", encoding="utf-8") as fh:
            json.dump(result.reproducer, fh, indent=2)
        print(f"reproducer written to {args.reproducer}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_haar(args) -> int:
    if not (0 < args.m < args.n) or args.count < 1:
        print("error: need 0 < m < n and count >= 1", file=sys.stderr)
        return EXIT_CONFIG
    mu = rg.GrassmannSample.from_haar(args.n, args.m, args.count, rg.Rng(args.seed))
    try:
        rg.save_sample(mu, args.output)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {args.count} Haar directions in Gr(R^{args.n}, {args.m})")
    return EXIT_OK


def cmd_stats(args) -> int:
    if not args.set_path and not args.mu:
        print("error: stats needs --set and/or --mu", file=sys.stderr)
        return EXIT_CONFIG
    payload = {}
    if args.set_path:
        a = _load_set(args.set_path)
        try:
            profile = dset.frostman_profile(a, args.kappa)
        except (GrassprojError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        stat = max(r for _, r in profile)
        payload["frostman"] = {
            "kappa": args.kappa,
            "cells": a.cell_count,
            "stat": float(f"{stat:.17g}"),
            "profile": [[float(f"{r:.17g}") for r in p] for p in profile],
        }
        print(f"frostman_stat(kappa={args.kappa:g}) = {stat:.17g} over {a.cell_count} cells")
        if args.plot:
            from .plotting import render_frostman_figure

            render_frostman_figure(profile, args.kappa, (args.json_out or "frostman") + ".png")
    if args.mu:
        mu = _load_mu(args.mu)
        depth = args.k if args.k is not None else 8
        try:
            stat = rg.noncon_stat(mu, args.kappa, depth, args.probes, rg.Rng(args.seed))
        except (GrassprojError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        payload["noncon"] = {
            "kappa": args.kappa,
            "k": depth,
            "probes": args.probes,
            "stat": float(f"{stat:.17g}"),
        }
        print(f"noncon_stat(kappa={args.kappa:g}, k={depth}) = {stat:.17g}")
    if args.json_out:
        try:
            with open(args.json_out, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
        except OSError as exc:
            print(f"error: cannot write {args.json_out}: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "haar": cmd_haar,
    "stats": cmd_stats,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags, which matches the config-error code
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code)


if __name__ == "__main__":
    sys.exit(main())
