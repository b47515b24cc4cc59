"""Command line front end: prove, verify, search-dual, selftest."""

from __future__ import annotations

import argparse
import json
import sys

from .zn import DEFAULT_SEED, FactorFound, strong_pseudoprime
from .cm import QuadOrder
from .dual import search_dual
from .prover import ProveConfig, prove
from .verifier import verify

EXIT_PRIME = 0
EXIT_COMPOSITE = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 64


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cide",
        description="Primality proving via dual elliptic pseudoprime pairs "
                    "and cyclotomy tests",
    )
    sub = parser.add_subparsers(dest="command")

    p_prove = sub.add_parser("prove", help="prove a number prime and write a certificate")
    p_prove.add_argument("number", type=int)
    p_prove.add_argument("--disc-bound", type=int, default=None, metavar="N")
    p_prove.add_argument("--seed", type=int, default=None, metavar="N")
    p_prove.add_argument("--budget", type=int, default=None, metavar="N",
                         help="search budget per discriminant")
    p_prove.add_argument("--out", type=str, default=None, metavar="PATH")
    p_prove.add_argument("--json", action="store_true",
                         help="also mirror the certificate as JSON")

    p_verify = sub.add_parser("verify", help="verify a certificate file")
    p_verify.add_argument("path", type=str)

    p_search = sub.add_parser("search-dual", help="search a dual pseudoprime partner")
    p_search.add_argument("number", type=int)
    p_search.add_argument("--disc-bound", type=int, default=600, metavar="N")
    p_search.add_argument("--seed", type=int, default=None, metavar="N")
    p_search.add_argument("--budget", type=int, default=64, metavar="N")
    p_search.add_argument("--json", action="store_true")

    sub.add_parser("selftest", help="run the exhaustive small-field oracle suites")
    return parser


def _cmd_prove(args) -> int:
    config = ProveConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.disc_bound is not None:
        config.disc_bound = args.disc_bound
    if args.budget is not None:
        config.search_budget = args.budget
    try:
        result = prove(args.number, config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if result.status == "prime":
        cert = result.certificate
        text = cert.to_text()
        out = args.out or f"cide-{args.number}.cert"
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"prime: {cert.n} (and partner {cert.m}); certificate written to {out}")
        if args.json:
            json_out = out + ".json"
            with open(json_out, "w", encoding="utf-8") as fh:
                fh.write(cert.to_json())
            print(f"json mirror written to {json_out}")
        ops = result.report.get("stage_ops", {})
        print("stage ops: " + ", ".join(f"{k}={v}" for k, v in sorted(ops.items())))
        return EXIT_PRIME
    if result.status == "composite":
        print(f"composite: {args.number} {result.evidence}")
        return EXIT_COMPOSITE
    print(f"inconclusive: {args.number} (budgets exhausted)")
    return EXIT_INCONCLUSIVE


def _cmd_verify(args) -> int:
    try:
        with open(args.path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    outcome = verify(text)
    if outcome.valid:
        print("valid")
        return 0
    print(f"invalid: {outcome.reason}")
    return 1


def _cmd_search_dual(args) -> int:
    n = args.number
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    if n < 7 or n % 2 == 0 or n % 3 == 0:
        print("error: need n >= 7 coprime to 6", file=sys.stderr)
        return EXIT_USAGE
    if not strong_pseudoprime(n, seed=seed):
        print(f"composite: {n} fails the strong pseudoprime gate")
        return EXIT_COMPOSITE
    from .prover import _disc_stream

    for disc in _disc_stream(args.disc_bound):
        order = QuadOrder.from_disc(disc)
        try:
            pair = search_dual(n, [order], budget=args.budget, seed=seed)
        except FactorFound as exc:
            if n % exc.d == 0:
                print(f"composite: factor {exc.d}")
                return EXIT_COMPOSITE
            continue
        if pair is None:
            continue
        if args.json:
            print(json.dumps({
                "n": str(pair.n), "m": str(pair.m), "disc": pair.order.disc,
                "mu": [str(pair.mu.a), str(pair.mu.b)],
                "curve_m": [str(pair.curve_m.a), str(pair.curve_m.b)],
                "curve_n": [str(pair.curve_n.a), str(pair.curve_n.b)],
            }))
        else:
            print(f"dual pair: m={pair.m} n={pair.n} disc={pair.order.disc} "
                  f"mu=({pair.mu.a}{pair.mu.b:+d}*sqrt({pair.order.disc}))/2")
        return 0
    print("not found")
    return EXIT_INCONCLUSIVE


def _cmd_selftest() -> int:
    """Exhaustive small-field checks; prints one line per suite."""
    from math import gcd as _gcd

    from . import ec, zn
    from .cm import QuadOrder, cornacchia_split, NoSplit

    failures = 0

    def report(name, ok):
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
        failures += 0 if ok else 1

    ok = True
    for p in (5, 7):
        for a in range(p):
            for b in range(p):
                if (4 * a ** 3 + 27 * b ** 2) % p == 0:
                    continue
                curve = ec.CurveParams(a, b, p)
                pts = [ec.INFINITY] + [(x, y) for x in range(p) for y in range(p)
                                       if (y * y - curve.f(x)) % p == 0]
                for pt in pts:
                    for qt in pts:
                        left = ec.partial_add(pt, qt, curve)
                        if left != ec.partial_add(qt, pt, curve):
                            ok = False
                size = len(pts)
                if any(ec.scalar_mul(size, pt, curve) is not ec.INFINITY for pt in pts):
                    ok = False
    report("group law / commutativity / order annihilation (F5, F7)", ok)

    ok = True
    for p in (5, 7, 11):
        for a_ in range(1, p):
            want = zn.jacobi(a_, p)
            is_sq = any(x * x % p == a_ for x in range(1, p))
            if want != (1 if is_sq else -1):
                ok = False
    report("jacobi symbol vs square tables", ok)

    ok = True
    o3 = QuadOrder(d=3, f=1)
    for p in (7, 13, 31, 43, 61, 67, 73, 79, 97, 103):
        got = cornacchia_split(p, o3)
        if p % 3 == 1:
            ok &= not isinstance(got, NoSplit) and got.norm == p
        else:
            ok &= isinstance(got, NoSplit)
    report("cornacchia splitting mod small primes (disc -3)", ok)

    ok = all(zn.strong_pseudoprime(p) for p in (7, 11, 13, 101, 997)) and \
        not any(zn.strong_pseudoprime(c) for c in (9, 561, 1105, 1729))
    report("strong pseudoprime gate", ok)

    print("selftest:", "ok" if failures == 0 else f"{failures} failing suites")
    return 0 if failures == 0 else 1


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "prove":
        return _cmd_prove(args)
    if args.command == "verify":
        return _cmd_verify(args)
    if args.command == "search-dual":
        return _cmd_search_dual(args)
    if args.command == "selftest":
        return _cmd_selftest()
    parser.print_help()
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
