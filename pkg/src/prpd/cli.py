"""Batch command-line driver: build, verify, certify, demo, check.

Every command is a deterministic function of its flags (including seeds).
Reports pair each measurement with the bound it is judged against; exit
code 0 means every bound was met. Records are emitted as JSON lines with
exact rationals rendered as numerator/denominator strings.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from .errors import PrpdError
from .recursion import (MODE_CERTIFIED, MODE_EXACT, RecursionParams, ledger_check,
                        ledger_from_dict, ledger_to_dict, measure_robust_error,
                        recursive_prpd, inductive_seed_bounds)
from .robp import random_robp, serialize_robp
from .saks_zhou import (SzSchedule, armoni_pow, exact_power_approximator,
                        sz_error_bound, sz_power)
from .sampler import certify, enumeration_sampler, expander_walk_sampler
from . import saks_zhou
from .bits import int_to_bits
from .robp import inf_norm, mat_pow, mat_sub
import random


def _frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from exc


def _fmt(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


_INCIDENTAL_ARGS = {"func", "out", "records"}


def _build_id(args: argparse.Namespace) -> str:
    blob = json.dumps(
        {k: str(v) for k, v in sorted(vars(args).items()) if k not in _INCIDENTAL_ARGS},
        sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


class Reporter:
    def __init__(self, out_path=None):
        self.records = []
        self.out_path = out_path

    def emit(self, record: dict) -> None:
        self.records.append(record)

    def flush(self, show_records: bool) -> None:
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        if self.out_path:
            with open(self.out_path, "w") as fh:
                fh.write("\n".join(lines) + "\n")
        if show_records or not self.out_path:
            for line in lines:
                print(line)


def _params_from_args(args) -> RecursionParams:
    return RecursionParams(
        gamma=args.gamma,
        k=args.k,
        c=args.c,
        sampler_mode=args.sampler_mode,
    )


def cmd_build_prpd(args) -> int:
    start = time.time()
    rep = Reporter(args.out)
    prpd, ledger = recursive_prpd(args.n, args.w, eps=args.eps, params=_params_from_args(args))
    report = ledger_check(ledger)
    rep.emit({"record": "config", "command": "build-prpd", "build_id": _build_id(args),
              "n": args.n, "w": args.w, "k": ledger.k, "gamma": _fmt(ledger.gamma),
              "c": ledger.c, "sampler_mode": ledger.sampler_mode})
    for node in ledger.nodes:
        so_b, si_b = inductive_seed_bounds(node.h, node.k, ledger.n_padded, ledger.w,
                                         ledger.gamma, ledger.c)
        rep.emit({"record": "node", "h": node.h, "k": node.k, "kind": node.kind,
                  "s_out": node.s_out, "s_in": node.s_in, "mu": node.mu,
                  "s_out_bound": round(so_b, 3), "s_in_bound": round(si_b, 3),
                  "mu_cap": node.mu_cap, "error_bound": _fmt(node.error_bound)})
    rep.emit({"record": "ledger", "ledger": ledger_to_dict(ledger)})
    rep.emit({"record": "summary", "checks": len(report.checks),
              "failures": len(report.failures()), "ok": report.ok,
              "top_s_out": prpd.s_out, "top_s_in": prpd.s_in, "top_mu": prpd.mu})
    rep.flush(show_records=args.records)
    print(f"build-prpd n={args.n} w={args.w} k={ledger.k} gamma={_fmt(ledger.gamma)} "
          f"mode={ledger.sampler_mode} runtime={time.time() - start:.3f}s")
    print(f"{'h':>3} {'k':>3} {'kind':>8} {'s_out':>6} {'s_in':>6} {'mu':>6} "
          f"{'s_out_bound':>12} {'s_in_bound':>11} {'mu_cap':>7}")
    for node in ledger.nodes:
        so_b, si_b = inductive_seed_bounds(node.h, node.k, ledger.n_padded, ledger.w,
                                         ledger.gamma, ledger.c)
        print(f"{node.h:>3} {node.k:>3} {node.kind:>8} {node.s_out:>6} {node.s_in:>6} "
              f"{node.mu:>6} {so_b:>12.1f} {si_b:>11.1f} {node.mu_cap:>7}")
    print(f"ledger check: {len(report.checks)} inequalities, "
          f"{len(report.failures())} failures -> {'ok' if report.ok else 'FAIL'}")
    for fail in report.failures():
        print(f"  FAIL ({fail.h},{fail.k}) {fail.name}: {fail.lhs} > {fail.rhs}")
    return 0 if report.ok else 1


def cmd_verify_error(args) -> int:
    start = time.time()
    rep = Reporter(args.out)
    prpd, ledger = recursive_prpd(args.n, args.w, eps=args.eps, params=_params_from_args(args))
    bound = ledger.top.error_bound
    worst = None
    ok = True
    rep.emit({"record": "config", "command": "verify-error", "build_id": _build_id(args),
              "n": args.n, "w": args.w, "k": ledger.k, "gamma": _fmt(ledger.gamma),
              "robps": args.robps, "seed": args.seed, "bound": _fmt(bound)})
    for t in range(args.robps):
        program = random_robp(ledger.n_padded, args.w, seed=args.seed * 100003 + t)
        err = measure_robust_error(prpd, program)
        within = err <= bound
        ok = ok and within
        if worst is None or err > worst[0]:
            worst = (err, program)
        rep.emit({"record": "instance", "index": t, "measured": _fmt(err),
                  "bound": _fmt(bound), "within": within})
    rep.emit({"record": "worst", "measured": _fmt(worst[0]),
              "robp": serialize_robp(worst[1])})
    rep.emit({"record": "summary", "ok": ok})
    rep.flush(show_records=args.records)
    print(f"verify-error n={args.n} w={args.w} k={ledger.k}: {args.robps} programs, "
          f"worst measured {_fmt(worst[0])} vs bound {_fmt(bound)} "
          f"runtime={time.time() - start:.3f}s -> {'ok' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_certify_sampler(args) -> int:
    start = time.time()
    rep = Reporter(args.out)
    if args.kind == "enumeration":
        g = enumeration_sampler(args.m, n=args.n)
    else:
        g = expander_walk_sampler(args.n, args.d if args.d is not None else args.m,
                                  args.m, seed=args.seed)
    ok, profile = certify(g, args.eps, args.delta)
    rep.emit({"record": "certificate", "kind": args.kind, "n": g.n, "d": g.d, "m": g.m,
              "eps": _fmt(args.eps), "delta": _fmt(args.delta),
              "method": g.cert.method if ok else "none",
              "max_tv": _fmt(profile.max_tv),
              "bad_x_count": profile.bad_count(args.eps),
              "certified": ok})
    rep.flush(show_records=args.records)
    print(f"certify-sampler {args.kind} n={g.n} d={g.d} m={g.m}: "
          f"max TV {_fmt(profile.max_tv)}, bad x {profile.bad_count(args.eps)}/{1 << g.n} "
          f"at eps={_fmt(args.eps)} delta={_fmt(args.delta)} "
          f"runtime={time.time() - start:.3f}s -> {'certified' if ok else 'REFUSED'}")
    return 0 if ok else 1


def cmd_sz_demo(args) -> int:
    start = time.time()
    rep = Reporter(args.out)
    rng = random.Random(args.seed)
    n = args.n1 ** args.n2
    bound = sz_error_bound(n, args.w, args.d)
    rep.emit({"record": "config", "command": "sz-demo", "build_id": _build_id(args),
              "w": args.w, "n1": args.n1, "n2": args.n2, "d": args.d,
              "approximator": args.approximator, "seed": args.seed,
              "matrices": args.matrices, "bound": _fmt(bound)})
    ok = True
    for t in range(args.matrices):
        m = _random_substochastic(rng, args.w)
        offsets = tuple(int_to_bits(rng.randrange(1 << args.d), args.d)
                        for _ in range(args.n2))
        if args.approximator == "exact":
            approx = exact_power_approximator(args.n1)
            y = ""
            schedule = SzSchedule(n1=args.n1, n2=args.n2, d=args.d,
                                  eps=Fraction(0), y=y, offsets=offsets)
        else:
            eps = args.eps if args.eps is not None else Fraction(1, 64)
            dd = saks_zhou.grid_bits(args.n1, args.w, eps)
            prpd_len = args.n1 * dd
            from .pdist import uniform_prpd
            gen = uniform_prpd(prpd_len)
            samp = enumeration_sampler(gen.seed_len, n=0)
            approx = lambda mat, yy: armoni_pow(mat, args.n1, gen, samp, yy, eps)
            schedule = SzSchedule(n1=args.n1, n2=args.n2, d=args.d,
                                  eps=Fraction(eps), y="", offsets=offsets)
        result = sz_power(m, schedule, approx)
        err = inf_norm(mat_sub(result, mat_pow(m, n)))
        within = err <= bound
        ok = ok and within
        rep.emit({"record": "instance", "index": t, "measured": _fmt(err),
                  "bound": _fmt(bound), "within": within})
    rep.emit({"record": "summary", "ok": ok})
    rep.flush(show_records=args.records)
    print(f"runtime={time.time() - start:.3f}s")
    print(f"sz-demo w={args.w} n={args.n1}^{args.n2} d={args.d} "
          f"({args.approximator}): {args.matrices} matrices vs bound {_fmt(bound)} -> "
          f"{'ok' if ok else 'FAIL'}")
    return 0 if ok else 1


def _random_substochastic(rng, w: int) -> tuple:
    rows = []
    for _ in range(w):
        raw = [rng.randrange(0, 64) for _ in range(w)]
        den = max(sum(raw), 1) + rng.randrange(0, 32)
        rows.append(tuple(Fraction(v, den) for v in raw))
    return tuple(rows)


def cmd_ledger_check(args) -> int:
    rep = Reporter(args.out)
    with open(args.ledger) as fh:
        payload = json.load(fh)
    if isinstance(payload, dict) and payload.get("record") == "ledger":
        payload = payload["ledger"]
    ledger = ledger_from_dict(payload)
    report = ledger_check(ledger, c=args.c)
    for chk in report.checks:
        rep.emit({"record": "check", "h": chk.h, "k": chk.k, "name": chk.name,
                  "lhs": chk.lhs, "rhs": chk.rhs, "ok": chk.ok, "slack": chk.slack})
    rep.emit({"record": "summary", "ok": report.ok, "checks": len(report.checks),
              "failures": len(report.failures())})
    rep.flush(show_records=args.records)
    print(f"ledger-check: {len(report.checks)} inequalities, "
          f"{len(report.failures())} failures -> {'ok' if report.ok else 'FAIL'}")
    for fail in report.failures():
        print(f"  FAIL ({fail.h},{fail.k}) {fail.name}: {fail.lhs} > {fail.rhs}")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prpd",
        description="exactly-verifiable pseudorandom pseudodistributions, desk scale",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write JSON-line records to this path")
        p.add_argument("--records", action="store_true",
                       help="also print records to stdout when --out is given")

    p = sub.add_parser("build-prpd", help="build a generator and check its ledger")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--eps", type=_frac, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--gamma", type=_frac, default=None)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--sampler-mode", choices=[MODE_EXACT, MODE_CERTIFIED], default=MODE_EXACT)
    common(p)
    p.set_defaults(func=cmd_build_prpd)

    p = sub.add_parser("verify-error", help="measure robust error against the cascade bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--eps", type=_frac, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--gamma", type=_frac, default=None)
    p.add_argument("--c", type=int, default=1)
    p.add_argument("--sampler-mode", choices=[MODE_EXACT, MODE_CERTIFIED], default=MODE_EXACT)
    p.add_argument("--robps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_verify_error)

    p = sub.add_parser("certify-sampler", help="brute-force a sampler certificate")
    p.add_argument("--kind", choices=["enumeration", "expander-walk"], default="expander-walk")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--eps", type=_frac, required=True)
    p.add_argument("--delta", type=_frac, required=True)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_certify_sampler)

    p = sub.add_parser("sz-demo", help="snap-powering chain against its error bound")
    p.add_argument("--w", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--eps", type=_frac, default=None)
    p.add_argument("--approximator", choices=["exact", "armoni"], default="exact")
    p.add_argument("--matrices", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_sz_demo)

    p = sub.add_parser("ledger-check", help="re-verify an exported ledger")
    p.add_argument("--ledger", required=True)
    p.add_argument("--c", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_ledger_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PrpdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
