"""Command line: sweeps, figure data, verification reports, L-function gaps, Euler products.

Exit status: 0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .arg_tracker import DEFAULT_LADDER, arg_at
from .errors import ConfigError, DomainError, ZetaGapsError, exit_code
from .euler_arg import EulerArgConfig, FixedN, GonekTSquared, euler_arg, euler_arg_sigma
from .gap_stats import normalized, q15, read_csv
from .lfunc import FamilyKind, LFamily, dirichlet_scan, ingest_zeros, normalized_gap
from .primes import PrimeTable
from .sweep import Route, SweepConfig, run_sweep

log = logging.getLogger("zetagaps")

REFERENCE_LINES = {1: [3.0], 2: [3.18]}
# absolute tolerance when recomputing a row from its 15-digit ordinates
ROW_TOL = 1e-7


def _ladder(text):
    try:
        vals = tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad delta ladder {text!r}") from exc
    return tuple(sorted(vals, reverse=True))


def _family(text):
    try:
        return LFamily.parse(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _common(p):
    p.add_argument("--family", type=_family, default=LFamily(FamilyKind.ZETA),
                   help="zeta | dirichlet:<q>:<index> | cusp:<k>")
    p.add_argument("--from-n", type=int, default=2)
    p.add_argument("--to-n", type=int, default=1000)
    p.add_argument("--route", choices=[r.value for r in Route], default="both")
    p.add_argument("--delta-ladder", type=_ladder, default=DEFAULT_LADDER)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--checkpoint-every", type=int, default=1000)
    p.add_argument("--out", default="sweep")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--precision", choices=["double", "extended"], default="double")
    p.add_argument("--prime-cache", default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="zetagaps", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="zeros, gaps and the inequality chain over an index range")
    _common(p)
    p.add_argument("--fresh", action="store_true", help="ignore an existing checkpoint")

    p = sub.add_parser("figure", help="plot data for the g' (1) or g (2) figure")
    _common(p)
    p.add_argument("--which", type=int, choices=[1, 2], default=1)
    p.add_argument("--data", default=None, help="existing sweep CSV (otherwise a sweep is run)")

    p = sub.add_parser("verify", help="re-check a sweep CSV and report violations")
    p.add_argument("--data", required=True)
    p.add_argument("--monitor", default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("lgaps", help="normalized gaps for an L-function family")
    _common(p)
    p.add_argument("--to-t", type=float, default=None, help="scan height (Dirichlet)")
    p.add_argument("--ingest", default=None, help="ordinate file for ingested families")

    p = sub.add_parser("euler-arg", help="Euler-product argument at given ordinates")
    _common(p)
    p.add_argument("--t", required=True, help="comma-separated ordinates")
    p.add_argument("--cutoff", default="gonek", help="gonek or a fixed number of primes")
    p.add_argument("--delta", type=float, default=1e-6)
    p.add_argument("--sigma", type=float, default=None, help="evaluate at this real part instead")

    p = sub.add_parser("primes", help="build or inspect the prime cache")
    p.add_argument("--prime-cache", required=True)
    p.add_argument("--count", type=int, default=None, help="ensure this many primes are cached")
    return ap


def _config(args, route=None):
    return SweepConfig(n_lo=args.from_n, n_hi=args.to_n,
                       route=Route(route or args.route), family=args.family,
                       ladder=args.delta_ladder, parallelism=args.parallelism,
                       checkpoint_every=args.checkpoint_every, out=args.out,
                       fmt=args.format, precision=args.precision)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=1, sort_keys=True)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_sweep(args):
    cfg = _config(args)
    summary, mon = run_sweep(cfg, fresh=args.fresh)
    _emit({"summary": summary.to_json(), "monitor": {
        "h1_multiple_candidates": len(mon.h1_events), "h2_events": len(mon.h2_events),
        "route_disagreements": len(mon.route_disagreements),
        "residual_failures": len(mon.residual_failures)}})
    return 0


def cmd_figure(args):
    if args.data:
        data = Path(args.data)
    else:
        cfg = _config(args, route="trans" if args.route == "both" else None)
        data = cfg.paths["data"]
        if not data.exists() or not cfg.paths["summary"].exists():
            run_sweep(cfg)
    field = "g_prime" if args.which == 1 else "g"
    out = Path(f"{args.out}.fig{args.which}.dat")
    with open(data) as fh, open(out, "w") as w:
        w.write(f"# n {field}\n")
        for rec in read_csv(fh):
            w.write(f"{rec.n} {format(getattr(rec, field), '.15g')}\n")
    sidecar = Path(str(out) + ".lines.json")
    sidecar.write_text(json.dumps({"figure": args.which, "column": field,
                                   "reference_lines": REFERENCE_LINES[args.which]}) + "\n")
    _emit({"data": str(out), "reference_lines": str(sidecar)})
    return 0


def verify_file(data, monitor=None):
    """Recompute every row of a sweep CSV and collect violations."""
    report = {"rows": 0, "corrupted_rows": [],
              "violations": {"gpb1": 0, "gpb2": 0, "bup": 0, "bound3": 0, "hyp2": 0},
              "db_max": None, "min_slack_gpb1": None, "h2_events": [],
              "running_max_g_prime": [], "max_g_prime": None, "argmax_n": None}
    prev = None
    best = -math.inf
    min_slack = math.inf
    db_max = None
    with open(data) as fh:
        for lineno, rec in enumerate(read_csv(fh), start=2):
            report["rows"] += 1
            problems = []
            g, gp = normalized(rec.t_n, rec.t_next)
            slack = 1.0 - (rec.a_next - rec.a_n) / math.pi - gp
            for name, stored, value in (("g", rec.g, g), ("g_prime", rec.g_prime, gp),
                                        ("slack_gpb1", rec.slack_gpb1, slack)):
                if not abs(stored - value) <= ROW_TOL:
                    problems.append({"field": name, "stored": stored, "recomputed": q15(value)})
            if rec.db != rec.b_next - rec.b_n:
                problems.append({"field": "db", "stored": rec.db, "recomputed": rec.b_next - rec.b_n})
            if prev is not None:
                if rec.n != prev.n + 1:
                    problems.append({"field": "n", "stored": rec.n, "recomputed": prev.n + 1})
                if rec.t_n != prev.t_next:
                    problems.append({"field": "t_n", "stored": rec.t_n, "recomputed": prev.t_next})
                if rec.a_n != prev.a_next or rec.b_n != prev.b_next:
                    problems.append({"field": "a_n/b_n", "stored": [rec.a_n, rec.b_n],
                                     "recomputed": [prev.a_next, prev.b_next]})
            if problems:
                report["corrupted_rows"].append({"line": lineno, "n": rec.n, "problems": problems})
            v = report["violations"]
            v["gpb1"] += int(not slack > 0)
            v["gpb2"] += int(gp > 3.0 + max(0, -rec.db))
            v["bup"] += int(rec.db > 1)
            v["bound3"] += int(gp >= 3.0)
            v["hyp2"] += int(abs(rec.db) > 1)
            if abs(rec.db) > 1:
                report["h2_events"].append({"n": rec.n, "db": rec.db})
            min_slack = min(min_slack, slack)
            db_max = -rec.db if db_max is None else max(db_max, -rec.db)
            if gp > best:
                best = gp
                report["running_max_g_prime"].append({"n": rec.n, "g_prime": q15(gp)})
                report["argmax_n"] = rec.n
            prev = rec
    report["db_max"] = db_max
    report["min_slack_gpb1"] = q15(min_slack) if report["rows"] else None
    report["max_g_prime"] = q15(best) if report["rows"] else None
    report["reference_lines"] = {"3": bool(best < 3.0), "5": bool(best < 5.0)}
    mon_path = Path(monitor) if monitor else Path(str(data).rsplit(".", 1)[0] + ".monitor.json")
    if mon_path.exists():
        mon = json.loads(mon_path.read_text())
        report["h1_events"] = mon.get("h1_events", [])
        report["h1_multiple_candidates"] = mon.get("h1_multiple_candidates", 0)
    else:
        report["h1_events"] = None
    return report


def cmd_verify(args):
    _emit(verify_file(args.data, args.monitor), args.out)
    return 0


def lgaps(family: LFamily, zeros):
    """Normalized gaps of consecutive zeros, with running-maximum annotations."""
    rows = []
    for z0, z1 in zip(zeros, zeros[1:]):
        if family.normalization(z0.t) <= 0:
            continue
        rows.append((z0.n, z0.t, z1.t, normalized_gap(family, z0.t, z1.t)))
    gaps = np.array([r[3] for r in rows])
    summary = {"family": family.label, "count": len(rows)}
    if rows:
        k = int(np.argmax(gaps))
        summary.update({"range": [rows[0][0], rows[-1][0]], "mean": q15(math.fsum(gaps) / gaps.size),
                        "max": q15(gaps[k]), "argmax_n": rows[k][0],
                        "below_3": bool(gaps.max() < 3.0), "below_5": bool(gaps.max() < 5.0)})
    return rows, summary


def cmd_lgaps(args):
    fam = args.family
    if args.ingest:
        zeros = ingest_zeros(args.ingest, fam)
    elif fam.kind is FamilyKind.DIRICHLET:
        if args.to_t is None:
            raise ConfigError("--to-t is required for a Dirichlet scan")
        zeros = dirichlet_scan(fam.character, 0.0, args.to_t)
        zeros = [z for z in zeros if args.from_n <= z.n <= args.to_n] if args.to_n else zeros
    else:
        raise ConfigError("lgaps needs --ingest for this family")
    rows, summary = lgaps(fam, zeros)
    out = Path(f"{args.out}.lgaps.csv")
    with open(out, "w") as fh:
        fh.write("n,t_n,t_next,gap\n")
        for n, a, b, g in rows:
            fh.write(f"{n},{a:.15g},{b:.15g},{g:.15g}\n")
    Path(f"{args.out}.lgaps.summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    _emit(summary)
    return 0


def cmd_euler_arg(args):
    import os
    if args.prime_cache:
        os.environ["ZETAGAPS_PRIME_CACHE"] = args.prime_cache
    chi = args.family.character
    rule = GonekTSquared() if args.cutoff == "gonek" else FixedN(int(args.cutoff))
    cfg = EulerArgConfig(cutoff_rule=rule, delta=args.delta)
    out = []
    for t in (float(x) for x in args.t.split(",")):
        row = {"t": t}
        if args.sigma is not None:
            n = rule.resolve(t, cfg.prime_cap)
            row["euler_arg"] = q15(euler_arg_sigma(t, chi, args.sigma, n))
        else:
            row["euler_arg"] = q15(euler_arg(t, chi, cfg))
            if chi is None:
                row["tracked_arg"] = q15(arg_at(t, args.delta).a)
        out.append(row)
    _emit(out)
    return 0


def cmd_primes(args):
    table = PrimeTable(args.prime_cache)
    if args.count:
        table.first(args.count)
    _emit({"cache": args.prime_cache, "count": len(table),
           "largest": int(table.first(len(table))[-1]) if len(table) else None})
    return 0


COMMANDS = {"sweep": cmd_sweep, "figure": cmd_figure, "verify": cmd_verify,
            "lgaps": cmd_lgaps, "euler-arg": cmd_euler_arg, "primes": cmd_primes}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ZetaGapsError, OSError, DomainError, ValueError) as exc:
        code = exit_code(exc)
        category = {2: "CONFIG", 3: "NUMERIC", 4: "IO"}[code]
        print(f"error [{category}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
