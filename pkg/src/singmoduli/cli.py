"""Command-line front end for reproducible experiments.

Subcommands:

  partition          p(n) by the singular-trace route, cross-checked
                     against the recurrence and convergent-series oracles
  hd build           exact Hhat and H coefficients for D = 1 - 24n
  hd check           degree, perfect-power exponent, irreducibility
  bounds kappa       recompute the uniform remainder constant
  bounds separation  main-term gap and sector verdicts (one n or a range)
  masser verify      cross-evaluate P at a CM point through the modular
                     polynomial route against the direct evaluation
  tables             regenerate the a*h = 12 rows and diff the fixtures
  crosscheck         compare built Hhat coefficients against an external
                     table file (lines "n: c_h, ..., c_0")

Common flags: --n N | --range A..B, --prec BITS, --terms T,
--format {json,csv,text}, --modpoly PATH, --crosscheck PATH, --threads K.
Environment variables with the prefix SINGMODULI_ (SINGMODULI_PREC,
SINGMODULI_TERMS, SINGMODULI_FORMAT, SINGMODULI_THREADS,
SINGMODULI_MODPOLY) supply defaults for the matching flags.

Output is deterministic for a fixed config: reports carry no timestamps,
iteration orders are fixed, and JSON is emitted with sorted keys.  Exit
status is 0 only if every verdict in the requested report passed; usage
errors exit 2, computational failures exit 1.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import bounds, fixtures
from .masser import eval_MD, load_modular_polynomial, masser_C, modular_polynomial
from .modeval import eval_atomic, eval_modular
from .oracles import euler_p, rademacher_p, rademacher_policy_K
from .polyops import irreducible_over_Q, perfect_power_structure
from .precision import EvalContext, local_prec
from .qforms import QuadForm, class_number, cm_point, cusp_invariants, gamma06_representatives
from .trace import build_Hhat, assemble_H, partition_bo, singular_forms

ENV_PREFIX = "SINGMODULI_"


def _env(name: str, fallback=None):
    return os.environ.get(ENV_PREFIX + name, fallback)


def _parse_range(text: str):
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError("range must look like A..B")
    try:
        lo, hi = int(lo), int(hi)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("range endpoints must be integers") from exc
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError("range must satisfy 1 <= A <= B")
    return (lo, hi)


def _n_list(args) -> list:
    if getattr(args, "range", None):
        lo, hi = args.range
        return list(range(lo, hi + 1))
    if getattr(args, "n", None) is None:
        raise SystemExit("either --n or --range is required for this command")
    return [args.n]


def _context(args) -> EvalContext | None:
    if args.prec is None and args.terms is None:
        return None
    prec = args.prec if args.prec is not None else 128
    if prec < 64:
        raise SystemExit("--prec must be at least 64")
    return EvalContext(prec=prec, terms=args.terms)


# ----------------------------------------------------------------------
# report rendering
# ----------------------------------------------------------------------

def _flatten(prefix: str, value, into: dict):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten("%s.%s" % (prefix, k) if prefix else str(k), value[k], into)
    elif isinstance(value, (list, tuple)):
        into[prefix] = " ".join(str(v) for v in value)
    else:
        into[prefix] = value


def emit(report: dict, fmt: str, stream=None) -> None:
    stream = stream or sys.stdout
    if fmt == "json":
        stream.write(json.dumps(report, sort_keys=True, indent=2, default=str))
        stream.write("\n")
        return
    rows = report.get("rows")
    scalars = {k: v for k, v in report.items() if k != "rows"}
    if fmt == "csv":
        flat_rows = []
        for row in rows if isinstance(rows, list) else []:
            flat: dict = {}
            _flatten("", row, flat)
            flat_rows.append(flat)
        if flat_rows:
            cols = sorted({c for r in flat_rows for c in r})
            stream.write(",".join(cols) + "\n")
            for r in flat_rows:
                stream.write(",".join(str(r.get(c, "")) for c in cols) + "\n")
        else:
            flat: dict = {}
            _flatten("", scalars, flat)
            cols = sorted(flat)
            stream.write(",".join(cols) + "\n")
            stream.write(",".join(str(flat[c]) for c in cols) + "\n")
        return
    if fmt == "text":
        for k in sorted(scalars):
            stream.write("%s: %s\n" % (k, scalars[k]))
        for row in rows if isinstance(rows, list) else []:
            flat = {}
            _flatten("", row, flat)
            stream.write("  " + "  ".join("%s=%s" % (k, flat[k]) for k in sorted(flat)) + "\n")
        return
    raise SystemExit("unknown format %r" % fmt)


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_partition(args) -> dict:
    ctx = _context(args)
    ns = _n_list(args)
    table = euler_p(max(ns))
    rows = []
    ok = True
    for n in ns:
        cert = partition_bo(n, ctx=ctx, threads=args.threads)
        reference = table[n]
        series, _ = rademacher_p(n, rademacher_policy_K(n), ctx)
        agree = cert.p == reference == series
        ok = ok and agree
        rows.append({
            "n": n,
            "p": str(cert.p),
            "recurrence": str(reference),
            "series": str(series),
            "agree": agree,
            "residual": cert.residual,
            "err_bound": cert.err_bound,
            "prec": cert.prec,
            "forms": cert.nforms,
        })
    return {"command": "partition", "rows": rows, "ok": ok}


def _hhat_payload(n: int, ctx, threads: int) -> dict:
    hhat = build_Hhat(1 - 24 * n, ctx=ctx, threads=threads)
    H = assemble_H(1 - 24 * n, ctx=ctx, threads=threads)
    return {
        "n": n,
        "D": hhat.D,
        "degree": hhat.h,
        "prec": hhat.prec,
        "scale": -hhat.D,
        "hhat_scaled": [str(w) for w in hhat.scaled],
        "h_degree": H.degree,
        "h_coeffs": [str(c) for c in H.coeffs],
        "conductors": [f for (f, _e, _p) in H.factors],
    }


def cmd_hd_build(args) -> dict:
    ctx = _context(args)
    rows = [_hhat_payload(n, ctx, args.threads) for n in _n_list(args)]
    return {"command": "hd-build", "rows": rows, "ok": True}


def cmd_hd_check(args) -> dict:
    ctx = _context(args)
    rows = []
    ok = True
    for n in _n_list(args):
        D = 1 - 24 * n
        hhat = build_Hhat(D, ctx=ctx, threads=args.threads)
        e, base = perfect_power_structure([Fraction(w) for w in hhat.scaled])
        cert = irreducible_over_Q(base)
        expected = class_number(D)
        good = bool(cert) and e == 1 and hhat.h == expected
        ok = ok and good
        rows.append({
            "n": n,
            "D": D,
            "degree": hhat.h,
            "class_number": expected,
            "power_exponent": e,
            "irreducible": bool(cert),
            "method": cert.method,
            "ok": good,
        })
    return {"command": "hd-check", "rows": rows, "ok": ok}


def cmd_bounds_kappa(args) -> dict:
    prec = args.prec if args.prec is not None else 160
    cert = bounds.kappa_certificate(prec=prec)
    dom = bounds.coefficient_domination(lmax=args.lmax, ctx=_context(args))
    return {
        "command": "bounds-kappa",
        "kappa_upper": cert.upper,
        "kappa_claimed": cert.claimed,
        "terms": cert.terms,
        "tail": cert.tail,
        "certificate_ok": cert.ok,
        "domination_lmax": args.lmax,
        "domination_ok": dom.ok,
        "rows": [{"l": r.index, "exact_upper": r.exact_upper, "bound": r.bound,
                  "ok": r.ok} for r in dom.rows],
        "ok": cert.ok and dom.ok,
    }


def cmd_bounds_separation(args) -> dict:
    ctx = _context(args)
    if getattr(args, "range", None):
        lo, hi = args.range
        sweep = bounds.separation_range(lo, hi, ctx=ctx)
        return {
            "command": "bounds-separation",
            "lo": lo,
            "hi": hi,
            "checked": sweep.checked,
            "failures": list(sweep.failures),
            "worst_angle_margin": sweep.worst_angle_margin,
            "min_gap_over_2kappa": sweep.min_gap_over_2kappa,
            "rows": [],
            "ok": sweep.ok,
        }
    if args.n is None:
        raise SystemExit("either --n or --range is required for this command")
    rep = bounds.separation_report(args.n, ctx=ctx)
    return {
        "command": "bounds-separation",
        "n": rep.n,
        "kappa": rep.kappa,
        "products": list(rep.products),
        "m12": rep.m12,
        "min_gap": rep.min_gap,
        "gap_ok": rep.gap_ok,
        "angle": rep.angle,
        "angle_margin": rep.angle_margin,
        "angle_ok": rep.angle_ok,
        "sector_ok": rep.sector_ok,
        "table_checked": rep.table_checked,
        "table_ok": rep.table_ok,
        "rows": [{
            "form": [r.form.a, r.form.b, r.form.c],
            "gamma": r.gamma,
            "h": r.h,
            "zeta_exp": r.zeta_exp,
            "phi": str(r.phi),
            "matches": r.matches,
        } for r in rep.rows],
        "ok": rep.ok,
    }


def cmd_masser_verify(args) -> dict:
    n = args.n if args.n is not None else 1
    prec = args.prec if args.prec is not None else 256
    if prec < 64:
        raise SystemExit("--prec must be at least 64")
    ctx = EvalContext(prec=prec, terms=args.terms)
    D = 1 - 24 * n
    if args.modpoly:
        phi = load_modular_polynomial(args.modpoly)
        source = args.modpoly
    else:
        phi = modular_polynomial(-D)
        source = "in-process"
    _, rows = singular_forms(n)
    # first primitive class in the deterministic ordering
    Q = next(Qn for (f, _r, _rep, Qn) in rows if f == 1)
    tau = cm_point(Q, prec)
    jq = eval_atomic("j", tau, ctx)
    c_direct = eval_modular("C", tau, ctx)
    c_phi = masser_C(phi, jq, ctx)
    md = eval_MD(Q, phi, ctx)
    p_direct = eval_modular("P", tau, ctx)
    with local_prec(prec + 16):
        c_gap = abs(c_phi.val - c_direct.val)
        md_gap = abs(md.val - p_direct.val)
        tol = 1e-15
        ok = bool(c_gap < tol and md_gap < tol)
        report = {
            "command": "masser-verify",
            "n": n,
            "D": D,
            "form": [Q.a, Q.b, Q.c],
            "phi_level": phi.m,
            "phi_source": source,
            "prec": prec,
            "c_gap": float(c_gap),
            "md_gap": float(md_gap),
            "c_ball": float(c_phi.err + c_direct.err),
            "md_ball": float(md.err + p_direct.err),
            "tolerance": tol,
            "rows": [],
            "ok": ok,
        }
    return report


def cmd_tables(args) -> dict:
    pair = (args.n, args.n + 1) if args.n is not None else (54, 55)
    rows = []
    ok = True
    for n in pair:
        expected = {}
        for row in fixtures.main_term_rows(n):
            Q = row.form(n)
            expected[(Q.a, Q.b, Q.c)] = row
        computed = {}
        for (Qred, rep, _Qn) in gamma06_representatives(1 - 24 * n):
            if Qred.a * rep.width() == 12:
                computed[(Qred.a, Qred.b, Qred.c)] = (rep.label, cusp_invariants(Qred, n))
        keys = sorted(set(expected) | set(computed))
        for key in keys:
            row = expected.get(key)
            hit = computed.get(key)
            match = (row is not None and hit is not None
                     and hit[0] == row.gamma and hit[1].h == row.h
                     and hit[1].zeta_exp == row.zeta_exp and hit[1].phi == row.phi)
            ok = ok and match
            rows.append({
                "n": n,
                "parity": "odd" if n % 2 else "even",
                "form": list(key),
                "gamma": hit[0] if hit else None,
                "h": hit[1].h if hit else None,
                "zeta_exp": hit[1].zeta_exp if hit else None,
                "phi": str(hit[1].phi) if hit else None,
                "in_fixture": row is not None,
                "matches": match,
            })
    return {"command": "tables", "rows": rows, "ok": ok}


def _parse_crosscheck_line(line: str):
    head, sep, tail = line.partition(":")
    if not sep:
        raise ValueError("missing ':' in line %r" % line.strip())
    n = int(head.strip())
    coeffs = [int(tok.strip()) for tok in tail.split(",") if tok.strip()]
    if not coeffs:
        raise ValueError("no coefficients in line %r" % line.strip())
    return n, coeffs


def cmd_crosscheck(args) -> dict:
    path = args.crosscheck or args.file
    if not path:
        raise SystemExit("crosscheck requires --file PATH (or --crosscheck PATH)")
    ctx = _context(args)
    wanted = set(_n_list(args)) if (args.n or getattr(args, "range", None)) else None
    rows = []
    ok = True
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            n, listed = _parse_crosscheck_line(line)
            if wanted is not None and n not in wanted:
                continue
            hhat = build_Hhat(1 - 24 * n, ctx=ctx, threads=args.threads)
            match = list(hhat.scaled) == listed
            ok = ok and match
            rows.append({
                "n": n,
                "listed_degree": len(listed) - 1,
                "built_degree": hhat.h,
                "matches": match,
            })
    if not rows:
        raise SystemExit("no usable lines in %s" % path)
    return {"command": "crosscheck", "file": path, "rows": rows, "ok": ok}


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None,
                        help="single index n >= 1 (discriminant 1 - 24n)")
    common.add_argument("--range", type=_parse_range, default=None,
                        metavar="A..B", help="inclusive range of n")
    common.add_argument("--prec", type=int,
                        default=int(_env("PREC")) if _env("PREC") else None,
                        help="working precision in bits (>= 64)")
    common.add_argument("--terms", type=int,
                        default=int(_env("TERMS")) if _env("TERMS") else None,
                        help="series truncation override")
    common.add_argument("--format", choices=("json", "csv", "text"),
                        default=_env("FORMAT", "json"), help="output format")
    common.add_argument("--threads", type=int,
                        default=int(_env("THREADS", "1")),
                        help="worker processes for per-form evaluation")
    common.add_argument("--modpoly", default=_env("MODPOLY"),
                        help="path to a stored modular polynomial table")
    common.add_argument("--crosscheck", default=_env("CROSSCHECK"),
                        help="path to an external coefficient table")

    parser = argparse.ArgumentParser(
        prog="singmoduli",
        description="partition numbers as traces of singular moduli")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("partition", parents=[common],
                   help="p(n) from the trace, checked against oracles"
                   ).set_defaults(func=cmd_partition)

    hd = sub.add_parser("hd", help="class polynomial operations")
    hdsub = hd.add_subparsers(dest="subcommand", required=True)
    hdsub.add_parser("build", parents=[common],
                     help="exact Hhat and H coefficients"
                     ).set_defaults(func=cmd_hd_build)
    hdsub.add_parser("check", parents=[common],
                     help="degree, perfect power, irreducibility"
                     ).set_defaults(func=cmd_hd_check)

    bnd = sub.add_parser("bounds", help="analytic certificates")
    bndsub = bnd.add_subparsers(dest="subcommand", required=True)
    kp = bndsub.add_parser("kappa", parents=[common],
                           help="recompute the remainder constant")
    kp.add_argument("--lmax", type=int, default=30,
                    help="domination check up to this coefficient index")
    kp.set_defaults(func=cmd_bounds_kappa)
    bndsub.add_parser("separation", parents=[common],
                      help="main-term gap and sector verdicts"
                      ).set_defaults(func=cmd_bounds_separation)

    ms = sub.add_parser("masser", help="modular polynomial route")
    mssub = ms.add_subparsers(dest="subcommand", required=True)
    mssub.add_parser("verify", parents=[common],
                     help="compare the Phi route against direct evaluation"
                     ).set_defaults(func=cmd_masser_verify)

    sub.add_parser("tables", parents=[common],
                   help="regenerate the a*h = 12 rows and diff fixtures"
                   ).set_defaults(func=cmd_tables)

    cc = sub.add_parser("crosscheck", parents=[common],
                        help="compare built coefficients with a table file")
    cc.add_argument("--file", default=None, help="table path (one 'n: c_h, ..., c_0' per line)")
    cc.set_defaults(func=cmd_crosscheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (SystemExit, KeyboardInterrupt):
        raise
    except Exception as exc:  # propagate module errors as a nonzero exit
        sys.stderr.write("error: %s\n" % exc)
        return 1
    emit(report, args.format)
    return 0 if report.get("ok", False) else 1


if __name__ == "__main__":
    sys.exit(main())
