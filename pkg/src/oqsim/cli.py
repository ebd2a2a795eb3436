"""Command-line entry point: ``oqsim run|demo|bench``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ArgumentError, QuantumError


def _pairs(items):
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise ArgumentError(f"--set expects key=value, got {item!r}")
        try:
            out[key] = float(value)
        except ValueError:
            out[key] = value
    return out


def _dims(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ArgumentError(f"--dims expects comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise ArgumentError("--dims needs at least one positive size")
    return vals


def _run(args):
    from .scenario import load_scenario, run_scenario

    spec = load_scenario(args.file)
    res = run_scenario(spec, out=args.out, solver=args.solver, ntraj=args.ntraj,
                       seed=args.seed, workers=args.workers, jumps=args.jumps,
                       param_overrides=_pairs(args.set))
    if args.out is None:
        res.table.to_csv(sys.stdout)
    else:
        print(f"wrote {args.out}", file=sys.stderr)
    if "fidelity" in res.meta:
        print(f"fidelity {res.meta['fidelity']:.6f}", file=sys.stderr)


def _demo(args):
    from .demos import run_demo

    res = run_demo(args.name, full_scale=args.full_scale, overrides=_pairs(args.set),
                   workers=args.workers, seed=args.seed)
    for path in res.write(args.out):
        print(f"wrote {path}", file=sys.stderr)


def _bench(args):
    from .bench import bench_kernels, bench_model

    if args.model == "kernels":
        report = bench_kernels()
    else:
        report = bench_model(args.model, _dims(args.dims), solver=args.solver,
                             workers=args.workers, ntraj=args.ntraj, seed=args.seed)
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    print(text)


def build_parser():
    p = argparse.ArgumentParser(prog="oqsim", description="Open quantum system dynamics.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="solve a JSON scenario file")
    r.add_argument("file")
    r.add_argument("--out", help="CSV path (default: stdout, no sidecars)")
    r.add_argument("--solver", choices=("me", "mc", "es"))
    r.add_argument("--ntraj", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--workers", type=int)
    r.add_argument("--jumps", help="JSON file for Monte-Carlo jump records")
    r.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a scenario parameter")
    r.set_defaults(func=_run)

    d = sub.add_parser("demo", help="run a built-in demo")
    d.add_argument("name")
    d.add_argument("--out", default=".", help="output directory")
    d.add_argument("--full-scale", action="store_true")
    d.add_argument("--workers", type=int)
    d.add_argument("--seed", type=int)
    d.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a demo parameter")
    d.set_defaults(func=_demo)

    b = sub.add_parser("bench", help="time a model over a size sweep")
    b.add_argument("model", help="coupled-oscillators, trilinear, spin-chain or kernels")
    b.add_argument("--dims", default="2", help="comma-separated sizes")
    b.add_argument("--solver", choices=("me", "mc", "es"), default="me")
    b.add_argument("--workers", type=int)
    b.add_argument("--ntraj", type=int, default=100)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="also write the JSON report here")
    b.set_defaults(func=_bench)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ArgumentError as exc:
        print(f"oqsim: error: {exc}", file=sys.stderr)
        return 2
    except (QuantumError, OSError) as exc:
        print(f"oqsim: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
