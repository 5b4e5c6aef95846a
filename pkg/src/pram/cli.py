"""Command-line front end.

Subcommands: quad (native quadratic sweep), poly (fixture-backed field),
scan (p-rationality scanner), check (formula cross-validation ledger).
Text output mirrors the reference table shape: per prime p, the prime
ideal list as [p, [coords]~, e, f], then one line
S=[. . .] rk(A_S)=R A_S=[. . .] per subset in binary order.

Exit codes: 0 success (warnings allowed), 2 invalid input, 3 resource
limits, 4 fixture verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from . import formulas as fm
from . import scan as sc
from . import sramdriver as sd
from .backend import QuadBackend
from .numutil import primes_in
from .quadfield import NotPrincipal, ResourceError


def _field_from_args(args):
    if getattr(args, "fixture", None):
        from . import genfield

        return genfield.load_fixture(args.fixture)
    return QuadBackend(args.d)


def _format_prime_line(pr) -> str:
    p, alpha = pr.two_elt
    coords = ", ".join(str(c) for c in alpha)
    return f"[{p}, [{coords}]~, {pr.e}, {pr.f}]"


def _format_report_line(rep: sd.SRamReport) -> str:
    mask = ", ".join(str(b) for b in rep.mask)
    if rep.error:
        return f"S=[{mask}] error: {rep.error}"
    inv = ", ".join(str(x) for x in rep.invariants_n)
    return f"S=[{mask}] rk(A_S)={rep.rank} A_S=[{inv}]"


def _sweep_one_prime(payload):
    kind, spec, p, cfg = payload
    if kind == "quad":
        F = QuadBackend(spec)
    else:
        from . import genfield

        F = genfield.load_fixture(spec)
    return p, sd.sweep_prime(F, p, cfg)


def _run_sweep(F, kind, spec, args) -> tuple[list, list[str]]:
    cfg = sd.SweepConfig(bp=args.bp, Bp=args.Bp, n0=args.n0, delta=args.delta)
    ps = list(primes_in(cfg.bp, cfg.Bp))
    if kind == "poly":
        ps = [p for p in ps if F.supports_prime(p)]
    jobs = args.jobs or 1
    results = {}
    if jobs > 1 and len(ps) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for p, reports in pool.map(
                _sweep_one_prime, [(kind, spec, p, cfg) for p in ps]
            ):
                results[p] = reports
    else:
        for p in ps:
            results[p] = sd.sweep_prime(F, p, cfg)
    warnings = []
    ordered = []
    for p in sorted(results):
        for rep in results[p]:
            ordered.append(rep)
            if rep.error:
                warnings.append(f"p={p} S={list(rep.mask)}: {rep.error}")
            elif not rep.stable:
                warnings.append(
                    f"p={p} S={list(rep.mask)}: invariants not stabilized "
                    f"(n={rep.n}, delta={rep.delta})"
                )
            elif rep.ambiguous:
                warnings.append(
                    f"p={p} S={list(rep.mask)}: torsion/growing split ambiguous"
                )
    return ordered, warnings


def _emit_text(F, reports, warnings, out):
    by_p = {}
    for rep in reports:
        by_p.setdefault(rep.p, []).append(rep)
    for p in sorted(by_p):
        print(file=out)
        print(f"p={p}", file=out)
        for pr in F.primes_above(p):
            print(_format_prime_line(pr), file=out)
        for rep in by_p[p]:
            print(_format_report_line(rep), file=out)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)


def report_document(F, reports, warnings) -> dict:
    return {
        "version": __version__,
        "field": F.describe(),
        "records": [
            {
                "p": rep.p,
                "S": list(rep.mask),
                "n": rep.n,
                "delta": rep.delta,
                "invariants_n": list(rep.invariants_n),
                "invariants_n_delta": list(rep.invariants_nd),
                "rank": rep.rank,
                "rtilde": rep.rtilde,
                "torsion": list(rep.torsion),
                "stable": rep.stable,
                "ambiguous": rep.ambiguous,
                "s_rational": rep.s_rational,
                "error": rep.error,
            }
            for rep in reports
        ],
        "warnings": warnings,
    }


def _emit(F, reports, warnings, args, out):
    if args.format == "json":
        json.dump(report_document(F, reports, warnings), out, indent=1)
        print(file=out)
    else:
        _emit_text(F, reports, warnings, out)


def cmd_quad(args, out) -> int:
    try:
        F = QuadBackend(args.d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        reports, warnings = _run_sweep(F, "quad", args.d, args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    _emit(F, reports, warnings, args, out)
    return 0


def cmd_poly(args, out) -> int:
    from . import genfield

    try:
        F = genfield.load_fixture(args.fixture)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except genfield.FixtureError as exc:
        print(f"fixture verification failed: {exc}", file=sys.stderr)
        return 4
    try:
        reports, warnings = _run_sweep(F, "poly", args.fixture, args)
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3
    _emit(F, reports, warnings, args, out)
    return 0


def cmd_scan(args, out) -> int:
    try:
        res = sc.scan_range(args.d, args.pmin, args.pmax, jobs=args.jobs or 1)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"d={res.d} range=[{res.p_min}, {res.p_max}]", file=out)
    print(f"suspects: {', '.join(map(str, res.suspects)) or '(none)'}", file=out)
    for p, torsion in res.verified:
        shape = " x ".join(f"Z/{t}" for t in torsion) if torsion else "1"
        print(f"verified p={p}: T = {shape}", file=out)
    print(f"confirmed: {', '.join(map(str, res.confirmed)) or '(none)'}", file=out)
    return 0


def cmd_check(args, out) -> int:
    if getattr(args, "fixture", None):
        print(
            "error: formula cross-checks are defined for the quadratic "
            "backend (use quad/poly sweeps for fixture fields)",
            file=sys.stderr,
        )
        return 2
    p = args.p
    if p == 2:
        print("error: formula checks require odd p", file=sys.stderr)
        return 2
    try:
        F = QuadBackend(args.d)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    primes = F.primes_above(p)
    reports = {r.mask: r for r in sd.sweep_prime(F, p, sd.SweepConfig())}
    print(f"d={args.d} p={p}: rank-formula ledger", file=out)
    ok = True
    for mask in sorted(reports):
        rep = reports[mask]
        S = [pr for pr, b in zip(primes, mask) if b]
        pred = fm.predicted_rank(F, p, S)
        match = "ok" if pred == rep.rank else "MISMATCH"
        ok &= pred == rep.rank
        print(
            f"S={list(mask)} predicted={pred} measured={rep.rank} {match}",
            file=out,
        )
    full = reports[max(reports)]
    tpred = fm.predicted_torsion_rank_P(F, p)
    print(
        f"torsion rank at S=P: predicted={tpred} measured={len(full.torsion)} "
        f"{'ok' if tpred == len(full.torsion) else 'MISMATCH'}",
        file=out,
    )
    ok &= tpred == len(full.torsion)
    rep = fm.check_decomposition(F, p)
    print(
        f"decomposition: v(T)={rep.v_torsion} = class {rep.v_class_term} "
        f"+ v(R)={rep.v_regulator} + v(W)={rep.v_w} "
        f"(0 <= class <= v(h)={rep.v_h}) {'ok' if rep.consistent else 'MISMATCH'}",
        file=out,
    )
    ok &= rep.consistent
    return 0 if ok else 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="pram",
        description="S-ramified abelian pro-p Galois group computations",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--bp", type=int, default=2)
        sp.add_argument("--Bp", type=int, default=5000)
        sp.add_argument("--n0", type=int, default=6)
        sp.add_argument("--delta", type=int, default=4)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--jobs", type=int, default=os.cpu_count())

    q = sub.add_parser("quad", help="sweep a native quadratic field Q(sqrt d)")
    q.add_argument("--d", type=int, required=True)
    common(q)
    q.set_defaults(func=cmd_quad)

    pl = sub.add_parser("poly", help="sweep a fixture-backed number field")
    pl.add_argument("--fixture", required=True)
    common(pl)
    pl.set_defaults(func=cmd_poly)

    s = sub.add_parser("scan", help="p-rationality scan of a real quadratic field")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--pmin", type=int, default=3)
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_scan)

    c = sub.add_parser("check", help="formula cross-validation for one (K, p)")
    c.add_argument("--d", type=int)
    c.add_argument("--fixture")
    c.add_argument("--p", type=int, required=True)
    c.set_defaults(func=cmd_check)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "check" and args.d is None and not args.fixture:
        print("error: check needs --d or --fixture", file=sys.stderr)
        return 2
    try:
        return args.func(args, sys.stdout)
    except NotPrincipal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
