"""Command-line interface.

Exit codes: 0 all good / all PASS, 1 a verification failed, 2 usage or
ingestion problem, 3 computational error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .curve import CurveModel, bad_primes, point
from .harness import ingest, run_batch, run_record
from .padic import DEFAULT_PRECISION, PadicError
from .polylog import (
    dilog_scan,
    p1_s2_weakly_global,
    p1_weakly_global,
    randomness_product,
)


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("WEAKGLOBAL_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="weakglobal",
        description="Weakly-global p-adic point sets: dilogarithm scans and "
                    "double-integral verifications on punctured elliptic curves.")
    ap.add_argument("--prec", type=int, default=DEFAULT_PRECISION,
                    help="working p-adic precision (default %(default)s)")
    ap.add_argument("--match-digits", type=int, default=5,
                    help="digits required for set-membership matching")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("p1", help="level sets of the projective line minus three points")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--level", type=int, choices=(1, 2), required=True)

    sp = sub.add_parser("p1-s2", help="zero set allowing denominator 2")
    sp.add_argument("--p", type=int, required=True)

    sp = sub.add_parser("dilog-scan", help="mod-p nonvanishing scan")
    sp.add_argument("--bound", type=int, required=True)
    sp.add_argument("--resume", default=None, help="checkpoint file")
    sp.add_argument("--jobs", type=int, default=_default_jobs())

    sp = sub.add_parser("randomness-product", help="heuristic product over primes")
    sp.add_argument("--bound", type=int, required=True)

    sp = sub.add_parser("ec", help="level sets for one curve record")
    sp.add_argument("--curves", required=True)
    sp.add_argument("--label", required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--level", type=int, choices=(1, 2), default=2)

    sp = sub.add_parser("batch", help="verify every record of a file")
    sp.add_argument("--curves", required=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--level", type=int, choices=(1, 2), default=2)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("frob", help="dump the Frobenius matrix of a record")
    sp.add_argument("--curves", required=True)
    sp.add_argument("--label", required=True)
    sp.add_argument("--p", type=int, required=True)
    return ap


def _load_record(path, label):
    records, errors = ingest(path)
    for err in errors:
        print("ingest: line %d: %s" % (err.line, err.message), file=sys.stderr)
    for rec in records:
        if rec.label == label:
            return rec
    print("no record labelled %r in %s" % (label, path), file=sys.stderr)
    raise SystemExit(2)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except PadicError as exc:
        print("computational error: %s" % exc, file=sys.stderr)
        return 3
    except OSError as exc:
        print(str(exc), file=sys.stderr)
        return 2


def _dispatch(args) -> int:
    if args.cmd == "p1":
        rep = p1_weakly_global(args.p, args.level, args.prec)
        if rep.points:
            for z in rep.points:
                print(str(z))
        else:
            print("empty set")
        for note in rep.notes:
            print("NOTE:", note)
        return 0

    if args.cmd == "p1-s2":
        rep = p1_s2_weakly_global(args.p, args.prec)
        for z in rep.points:
            print(str(z), " residue", z.residue())
        print("NOTE: the set contains every S-integral point; it may be a "
              "strict superset for larger primes.")
        return 0

    if args.cmd == "dilog-scan":
        res = dilog_scan(args.bound, jobs=args.jobs, resume_path=args.resume)
        print("checked %d primes below %d" % (res.checked, res.bound))
        print("%d vanishing primes" % len(res.vanishing))
        for q in res.vanishing:
            print("VANISHING:", q)
        return 0 if not res.vanishing else 1

    if args.cmd == "randomness-product":
        print("%.6f" % randomness_product(args.bound))
        return 0

    if args.cmd == "ec":
        rec = _load_record(args.curves, args.label)
        rep = run_record(rec, args.p, args.level, args.prec, args.match_digits)
        print(rep.to_json())
        if rep.verdict == "FAIL":
            return 1
        if rep.verdict == "ERROR":
            return 3
        return 0

    if args.cmd == "batch":
        records, errors = ingest(args.curves)
        for err in errors:
            print("ingest: line %d: %s" % (err.line, err.message), file=sys.stderr)
        if not records:
            print("no usable records", file=sys.stderr)
            return 2
        summary = run_batch(records, args.p, args.level, args.out,
                            args.prec, args.match_digits)
        print("verdicts:", " ".join("%s=%d" % kv for kv in sorted(summary.counts.items())))
        if summary.counts.get("ERROR"):
            return 3
        return 0 if summary.all_pass else 1

    if args.cmd == "frob":
        from .frobenius import frobenius_matrix, short_model
        rec = _load_record(args.curves, args.label)
        curve = rec.curve()
        fd = frobenius_matrix(short_model(curve, args.p), args.prec)
        print("short model: y^2 = x^3 + (%d) x + (%d)" % (fd.A, fd.B))
        for i in (0, 1):
            print("column %d: [%s, %s]" % (i, fd.M[0][i], fd.M[1][i]))
        print("achieved precision:", fd.prec)
        return 0

    raise SystemExit(2)


if __name__ == "__main__":
    sys.exit(main())
