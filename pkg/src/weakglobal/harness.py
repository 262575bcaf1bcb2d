"""Curve-record ingestion, batch verification, and persistent reports."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .coleman import ColemanEngine
from .curve import CurveModel, bad_primes, point
from .padic import DEFAULT_PRECISION, PadicError, PadicNumber
from .selmer import (
    MATCH_DIGITS,
    level1_set,
    level2_set_rank0,
    level2_set_rank1,
    point_matches,
    w_norms,
    w_sets,
)


@dataclass
class CurveRecord:
    label: str
    a_invariants: tuple
    rank: int
    sha_finite: bool
    integral_points: list
    generator: tuple | None = None
    w_override: dict | None = None

    def curve(self) -> CurveModel:
        return CurveModel(self.a_invariants, self.label)


@dataclass
class RecordError:
    line: int
    message: str


def ingest(path: str):
    """Read line-delimited curve records; per-record problems are collected
    rather than aborting the batch."""
    records: list[CurveRecord] = []
    errors: list[RecordError] = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
                rec = _record_from_obj(obj)
            except (ValueError, KeyError, TypeError) as exc:
                errors.append(RecordError(lineno, str(exc)))
                continue
            records.append(rec)
    return records, errors


def _record_from_obj(obj: dict) -> CurveRecord:
    a = obj["a"]
    if len(a) != 5:
        raise ValueError("need exactly five a-invariants")
    curve = CurveModel(a, obj.get("label", ""))
    pts = [tuple(q) for q in obj.get("integral_points", [])]
    for x, y in pts:
        if not curve.is_on_curve_int(int(x), int(y)):
            raise ValueError("point (%s, %s) is not on the curve" % (x, y))
    gen = tuple(obj["generator"]) if obj.get("generator") else None
    if gen and not curve.is_on_curve_int(int(gen[0]), int(gen[1])):
        raise ValueError("generator is not on the curve")
    w_override = None
    if obj.get("w_override"):
        w_override = {int(l): [Fraction(q) for q in qs]
                      for l, qs in obj["w_override"].items()}
    return CurveRecord(obj["label"], tuple(int(x) for x in a),
                       int(obj.get("rank", 0)), bool(obj.get("sha_finite", False)),
                       pts, gen, w_override)


@dataclass
class RunReport:
    label: str
    p: int
    level: int
    verdict: str
    prec: int = DEFAULT_PRECISION
    match_digits: int = MATCH_DIGITS
    n_norms: int = 0
    level1_count: int = 0
    nonempty_psis: list = field(default_factory=list)
    weakly_global: list = field(default_factory=list)
    known_points: list = field(default_factory=list)
    assumptions: dict = field(default_factory=dict)
    policies: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    error: str = ""

    def to_json(self) -> str:
        return json.dumps({
            "label": self.label, "p": self.p, "level": self.level,
            "verdict": self.verdict, "prec": self.prec,
            "match_digits": self.match_digits, "n_norms": self.n_norms,
            "level1_count": self.level1_count,
            "nonempty_psis": self.nonempty_psis,
            "weakly_global": self.weakly_global,
            "known_points": self.known_points,
            "assumptions": self.assumptions, "policies": self.policies,
            "timings": self.timings, "error": self.error,
        }, sort_keys=True)


def _point_strs(points) -> list:
    return [[str(P.x), str(P.y)] for P in points]


def run_record(rec: CurveRecord, p: int, level: int = 2,
               prec: int = DEFAULT_PRECISION,
               match_digits: int = MATCH_DIGITS) -> RunReport:
    """Level-1 or level-2 verification of one record at one good prime."""
    curve = rec.curve()
    rep = RunReport(rec.label, p, level, "ERROR", prec, match_digits,
                    known_points=[list(q) for q in rec.integral_points],
                    assumptions={"rank": rec.rank, "sha_finite": rec.sha_finite})
    if curve.disc % p == 0:
        rep.verdict = "SKIP"
        rep.error = "bad reduction at %d" % p
        return rep
    t0 = time.time()
    try:
        engine = ColemanEngine(curve, p, prec)
        rep.timings["engine"] = round(time.time() - t0, 3)
        bad = bad_primes(curve)
        wsets = w_sets(curve, bad, p, prec, rec.w_override)
        rep.policies = {str(ws.prime): ws.policy for ws in wsets}
        t1 = time.time()
        if rec.rank == 0:
            if level == 1:
                pts = level1_set(curve, p, engine)
                rep.level1_count = len(pts)
                rep.weakly_global = _point_strs(pts)
                rep.n_norms = len(w_norms(wsets, p, prec))
            else:
                res = level2_set_rank0(curve, bad, p, engine, rec.w_override,
                                       match_digits)
                rep.n_norms = len(res.norms)
                rep.level1_count = len(res.level1)
                rep.nonempty_psis = [
                    {"norm": {str(l): str(q) for l, q in ps.norm.coeffs},
                     "points": _point_strs(ps.points)}
                    for ps in res.psis if ps.points]
                rep.weakly_global = _point_strs(res.points)
                rep.verdict = _verdict(res.points, rec.integral_points, match_digits)
        elif rec.rank == 1 and rec.generator:
            G = point(curve, rec.generator[0], rec.generator[1], p, prec + 10)
            res = level2_set_rank1(curve, bad, p, engine, G,
                                   overrides=rec.w_override)
            rep.n_norms = len(res.norms)
            rep.weakly_global = _point_strs(res.points)
            known_ok = all(any(point_matches(P, x, y, match_digits)
                               for P in res.points)
                           for x, y in rec.integral_points)
            rep.verdict = "PASS" if known_ok else "FAIL"
        else:
            rep.verdict = "SKIP"
            rep.error = "no handler for rank %d without generator" % rec.rank
        rep.timings["levels"] = round(time.time() - t1, 3)
        if level == 1 and rep.verdict == "ERROR":
            rep.verdict = "DONE"
    except PadicError as exc:
        rep.error = "%s: %s" % (type(exc).__name__, exc)
    return rep


def _verdict(points, known, digits) -> str:
    if len(points) != len(known):
        return "FAIL"
    used = set()
    for x, y in known:
        hit = None
        for i, P in enumerate(points):
            if i not in used and point_matches(P, x, y, digits):
                hit = i
                break
        if hit is None:
            return "FAIL"
        used.add(hit)
    return "PASS"


@dataclass
class BatchSummary:
    counts: dict
    reports: list

    @property
    def all_pass(self):
        return self.counts.get("FAIL", 0) == 0 and self.counts.get("ERROR", 0) == 0


def run_batch(records, p: int, level: int = 2, out_path: str | None = None,
              prec: int = DEFAULT_PRECISION,
              match_digits: int = MATCH_DIGITS) -> BatchSummary:
    """One report per record, written in label order as JSON lines."""
    reports = []
    for rec in sorted(records, key=lambda r: r.label):
        reports.append(run_record(rec, p, level, prec, match_digits))
    counts: dict = {}
    for rep in reports:
        counts[rep.verdict] = counts.get(rep.verdict, 0) + 1
    if out_path:
        with open(out_path, "w") as fh:
            for rep in reports:
                fh.write(rep.to_json() + "\n")
    return BatchSummary(counts, reports)
