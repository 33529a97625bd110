"""Command-line front end.

Subcommands: gen (hard instances), test (single independence test), power
(Monte-Carlo sweeps to CSV), audit (farness certificate), bounds
(inequality suite), calibrate (threshold cache).

Exit codes: 0 accept / suite pass, 1 reject / suite violation, 2 usage or
regime error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import bounds as bounds_mod
from .dist import BayesNet, DenseDistribution, product_net, sample_dense, \
    to_dense
from .errors import BnitError
from .instances import farness_audit, gen_mixture_of_products, \
    gen_mixture_of_trees, gen_paninski
from .rng import RngState
from .sweeps import Cell, ExperimentManifest, rows_to_csv, run_manifest, \
    scaling_manifest, write_csv
from .testers import TesterConfig, calibrate_threshold, \
    independence_test_degree_d


def _gen_instance(family: str, n: int, d: int, eps: float, seed: int,
                  require_even: bool) -> dict:
    rng = RngState(seed).split("gen", family, n, d, eps)
    doc: dict = {"family": family, "n": n, "d": d, "eps": eps, "seed": seed}
    if family == "mixture_trees":
        params, net = gen_mixture_of_trees(n, d, eps, rng,
                                           require_even=require_even)
        doc["params"] = params.to_json_dict()
        doc["net"] = net.to_json_dict()
    elif family == "mixture_products":
        params, net = gen_mixture_of_products(n, d, eps, rng)
        doc["params"] = params.to_json_dict()
        doc["net"] = net.to_json_dict()
    elif family == "paninski":
        params, dense = gen_paninski(n, eps, rng)
        doc["params"] = params.to_json_dict()
        doc["dense"] = dense.to_json_dict()
    elif family == "product":
        net = product_net(rng.generator().uniform(0.05, 0.95, n))
        doc["net"] = net.to_json_dict()
    else:
        raise BnitError(f"unknown family {family!r}")
    return doc


def cmd_gen(args) -> int:
    doc = _gen_instance(args.family, args.n, args.d, args.eps, args.seed,
                        args.require_even)
    out = args.out or f"{args.family}_n{args.n}_d{args.d}.json"
    with open(out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")
    print(f"wrote {out}")
    if args.n <= 14:
        dense = (DenseDistribution.from_json_dict(doc["dense"])
                 if "dense" in doc
                 else to_dense(BayesNet.from_json_dict(doc["net"])))
        mass = dense.mass
        print(f"dense summary: support {len(mass)}, "
              f"min {mass.min():.3e}, max {mass.max():.3e}")
    return 0


def _load_instance(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BnitError(f"cannot read instance file {path}: {exc}") from exc
    if "net" not in doc and "dense" not in doc:
        raise BnitError(f"instance file {path} has neither 'net' nor 'dense'")
    return doc


def cmd_test(args) -> int:
    config = TesterConfig(eps=args.eps,
                          threshold_mode="calibrated" if args.calibrated
                          else "analytic")
    rng = RngState(args.seed).split("test")
    if args.product:
        n, d = args.n, args.d
        source = product_net(
            RngState(args.seed).split("inst").generator().uniform(
                0.05, 0.95, n))
    else:
        if not args.instance:
            raise BnitError("pass an instance file or --product")
        doc = _load_instance(args.instance)
        n = int(doc["n"])
        d = args.d if args.d is not None else int(doc.get("d", 1))
        if "net" in doc:
            source = BayesNet.from_json_dict(doc["net"])
        else:
            dense = DenseDistribution.from_json_dict(doc["dense"])
            draw = rng.split("draw")
            source = lambda m: sample_dense(dense, draw, m)
    report = independence_test_degree_d(source, n, d, args.eps,
                                        config=config, rng=rng,
                                        m_override=args.m,
                                        threads=args.threads)
    print(json.dumps(report.to_json_dict()))
    return 0 if report.accepted else 1


def _int_list(text: str) -> list:
    return [int(v) for v in text.split(",") if v]


def cmd_power(args) -> int:
    if args.suite == "scaling":
        manifest = scaling_manifest(args.seed, trials=args.trials)
    else:
        if args.family is None or args.n is None:
            raise BnitError("power needs --family and --n (or --suite "
                            "scaling)")
        ns = _int_list(args.n)
        ms = _int_list(args.m) if args.m else [None]
        cells = tuple(Cell(args.family, n, args.d, args.eps, m=m)
                      for n in ns for m in ms)
        manifest = ExperimentManifest(cells=cells, trials=args.trials,
                                      root_seed=args.seed)
    rows = run_manifest(manifest, threads=args.threads,
                        stable_timing=args.stable_timing)
    if args.out:
        write_csv(rows, args.out)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(rows_to_csv(rows))
    return 0


def cmd_audit(args) -> int:
    doc = _load_instance(args.instance)
    dense = (DenseDistribution.from_json_dict(doc["dense"])
             if "dense" in doc
             else to_dense(BayesNet.from_json_dict(doc["net"])))
    bipartitions = [[i] for i in range(dense.n)]
    d = int(doc.get("d", 0))
    if doc.get("family") == "mixture_trees" and d > 1:
        bipartitions.append(list(range(d - 1)))
    elif doc.get("family") == "mixture_products" and d >= 1:
        bipartitions.append(list(range(d)))
    cert = farness_audit(dense, bipartitions=bipartitions,
                         restarts=args.restarts)
    print(json.dumps(cert.to_json_dict()))
    return 0


def cmd_bounds(args) -> int:
    results = bounds_mod.run_suite(args.suite)
    violations = 0
    for r in results:
        print(json.dumps(r.to_json_dict()))
        violations += r.violations
    return 0 if violations == 0 else 1


def cmd_calibrate(args) -> int:
    rng = RngState(args.seed).split("calibration", args.k, args.eps, args.m)
    tau = calibrate_threshold(args.k, args.eps, args.m, args.trials, rng)
    print(json.dumps({"domain_size": args.k, "eps": args.eps, "m": args.m,
                      "threshold": tau}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bnit",
        description="Independence testing for bounded-degree binary "
                    "Bayes nets")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a hard instance file")
    p.add_argument("family", choices=["product", "mixture_trees",
                                      "mixture_products", "paninski"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--require-even", action="store_true",
                   help="refuse an odd child count instead of leaving one "
                        "child unpaired (mixture_trees only)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("test", help="run the independence tester once")
    p.add_argument("instance", nargs="?",
                   help="instance JSON file (omit with --product)")
    p.add_argument("--product", action="store_true",
                   help="test a random product net instead of a file")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--m", type=int, default=None,
                   help="override the sample budget")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--calibrated", action="store_true",
                   help="use Monte-Carlo calibrated thresholds")
    p.set_defaults(func=cmd_test, d_default=2)

    p = sub.add_parser("power", help="Monte-Carlo power sweep to CSV")
    p.add_argument("--family")
    p.add_argument("--n", help="comma-separated list")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--m", help="comma-separated list of sample budgets")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--suite", choices=["scaling"],
                   help="preset manifest instead of an explicit grid")
    p.add_argument("--stable-timing", action="store_true",
                   help="write 0.0 runtimes for byte-reproducible CSV")
    p.set_defaults(func=cmd_power)

    p = sub.add_parser("audit", help="farness certificate for an instance")
    p.add_argument("instance")
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("bounds", help="run the inequality check suite")
    p.add_argument("--suite", choices=["exact", "mc", "all"], default="all")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("calibrate", help="calibrate an identity-test "
                                         "threshold")
    p.add_argument("--k", type=int, required=True, help="domain size")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, default=4000)
    p.add_argument("--seed", type=int, default=0x5EED)
    p.set_defaults(func=cmd_calibrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "test" and args.product and args.d is None:
        args.d = 2
    try:
        return args.func(args)
    except BnitError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
