"""Weakly-global point sets of a punctured elliptic curve: local-height
value sets at the bad primes, their norms, the vanishing-log locus, and the
level-two filtering by the double integral."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .coleman import ColemanEngine
from .curve import CurveModel, Point, classify_reduction, fp_affine_points
from .padic import (
    DEFAULT_PRECISION,
    DomainError,
    PadicNumber,
    PrecisionError,
    from_fraction,
    padic,
    padic_log,
    zero,
)
from .series import series_zeros_in_disk

MATCH_DIGITS = 5
REJECT_DIGITS = 2


@dataclass
class WSet:
    """Possible local-height contributions at one bad prime."""
    prime: int
    n_l: int
    rationals: list          # distinct Fractions q, increasing
    values: list             # q * log_p(l) as PadicNumber
    policy: str = "semistable"

    def __post_init__(self):
        assert self.rationals == sorted(set(self.rationals))


@dataclass
class WNorm:
    """One choice of contribution per bad prime, keyed by the exact rational
    vector; the p-adic evaluation is only used for matching."""
    coeffs: tuple            # ((l, Fraction), ...) sorted by l
    value: PadicNumber

    def key(self):
        return self.coeffs


@dataclass
class PsiSet:
    norm: WNorm
    points: list = field(default_factory=list)


def _semistable_rationals(n_l: int) -> list:
    return sorted({Fraction(n * (n_l - n), 2 * n_l) for n in range(n_l)})


def w_sets(curve: CurveModel, bad: list, p: int, prec: int = DEFAULT_PRECISION,
           overrides: dict | None = None) -> list:
    """Per-prime contribution sets.

    Semistable primes use the closed formula in ord_l(disc); additive primes
    default to {0} unless an override supplies the value set (the component
    contributions at additive fibers are outside the closed formula).
    """
    overrides = overrides or {}
    out = []
    for l in sorted(bad):
        if l == p:
            raise DomainError("the working prime cannot sit in the bad set")
        red = classify_reduction(curve, l)
        if l in overrides:
            qs = sorted(set(Fraction(q) for q in overrides[l]))
            policy = "override"
        elif red.kind == "multiplicative":
            qs = _semistable_rationals(red.ord_disc)
            policy = "semistable"
        elif red.kind == "good":
            qs = [Fraction(0)]
            policy = "good"
        else:
            qs = [Fraction(0)]
            policy = "additive-default"
        logl = padic_log(padic(l, p, prec + 4))
        vals = [from_fraction(q, p, prec + 4) * logl for q in qs]
        out.append(WSet(l, red.ord_disc, qs, vals, policy))
    return out


def w_norms(wsets: list, p: int, prec: int = DEFAULT_PRECISION) -> list:
    """All formal sums, one contribution per prime, deduplicated as exact
    rational vectors; evaluations attached."""
    norms = [WNorm((), zero(p, prec + 4))]
    for ws in wsets:
        nxt = {}
        for base in norms:
            for q, val in zip(ws.rationals, ws.values):
                coeffs = base.coeffs + ((ws.prime, q),) if q != 0 else base.coeffs
                key = coeffs
                if key not in nxt:
                    nxt[key] = WNorm(coeffs, base.value + val)
        norms = [nxt[k] for k in sorted(nxt, key=_norm_sort_key)]
    return norms


def _norm_sort_key(coeffs):
    return tuple((l, q.numerator, q.denominator) for l, q in coeffs)


def level1_set(curve: CurveModel, p: int, engine: ColemanEngine) -> list:
    """All integral points with vanishing logarithm: per residue disk, the
    zeros of the restricted logarithm series (the nonzero local torsion)."""
    out = []
    for residue in fp_affine_points(curve, p):
        const, series = engine.log_disk_series(residue)
        f = series + const
        try:
            ts = series_zeros_in_disk(f, min_valuation=1)
        except PrecisionError:
            raise
        ch = engine.chart(residue)
        for t in sorted(ts, key=lambda t: t.lift() if t.is_integral() else 0):
            out.append(ch.point_at(t))
    return out


@dataclass
class LevelTwoReport:
    norms: list
    psis: list
    points: list
    level1: list
    unmatched: list


def level2_set_rank0(curve: CurveModel, bad: list, p: int,
                     engine: ColemanEngine,
                     overrides: dict | None = None,
                     match_digits: int = MATCH_DIGITS) -> LevelTwoReport:
    """Evaluate the double integral at every vanishing-log point and collect
    the points into the norm classes they match."""
    prec = engine.prec
    wsets = w_sets(curve, bad, p, prec, overrides)
    norms = w_norms(wsets, p, prec)
    lvl1 = level1_set(curve, p, engine)
    psis = [PsiSet(n) for n in norms]
    by_key = {n.key(): ps for n, ps in zip(norms, psis)}
    unmatched = []
    for P in lvl1:
        d2 = engine.d2_at(P)
        hits = []
        undecided = []
        for n in norms:
            diff = d2 - n.value
            if diff.is_zero():
                # equality to the full claimed precision
                if diff.N >= match_digits:
                    hits.append(n)
                elif diff.N >= REJECT_DIGITS:
                    undecided.append((n, diff.N))
            elif diff.v >= match_digits:
                hits.append(n)
            # a difference known nonzero below the threshold is a
            # definitive non-match, however close
        if len(hits) > 1:
            raise PrecisionError(
                "double integral matches %d norms at %d digits; rerun at "
                "higher precision" % (len(hits), match_digits))
        if hits:
            by_key[hits[0].key()].points.append(P)
        elif undecided:
            raise PrecisionError(
                "norm comparison undecided at %d claimed digits; rerun at "
                "higher precision" % undecided[0][1])
        else:
            unmatched.append((P, d2))
    union = [P for ps in psis for P in ps.points]
    return LevelTwoReport(norms, psis, union, lvl1, unmatched)


def level2_set_rank1(curve: CurveModel, bad: list, p: int,
                     engine: ColemanEngine, generator: Point,
                     c_override: PadicNumber | None = None,
                     overrides: dict | None = None) -> LevelTwoReport:
    """Zero set, over all residue disks and all norms, of the height-like
    combination minus the norm, with the quadratic coefficient calibrated at
    the given infinite-order point."""
    prec = engine.prec
    log_y = engine.single_integrals_at(generator)[0]
    if log_y.is_zero():
        raise DomainError("generator has vanishing logarithm (torsion?)")
    if c_override is not None:
        c = c_override
    else:
        c = engine.d2_at(generator) / (log_y * log_y)
    wsets = w_sets(curve, bad, p, prec, overrides)
    norms = w_norms(wsets, p, prec)
    psis = [PsiSet(n) for n in norms]
    for residue in fp_affine_points(curve, p):
        d2_c, d2_ser = engine.d2_disk_series(residue)
        la, la_ser = engine.log_disk_series(residue)
        log_sq = la_ser * la_ser + la_ser.scale(2 * la)
        base = d2_ser - log_sq.scale(c)
        const = d2_c - c * la * la
        ch = engine.chart(residue)
        for n, ps in zip(norms, psis):
            f = base + (const - n.value)
            ts = series_zeros_in_disk(f, min_valuation=1)
            for t in ts:
                ps.points.append(ch.point_at(t))
    union = [P for ps in psis for P in ps.points]
    return LevelTwoReport(norms, psis, union, [], [])


def point_matches(P: Point, x: int, y: int, digits: int = MATCH_DIGITS) -> bool:
    """Whether a computed point agrees with integer coordinates."""
    dx = P.x - x
    dy = P.y - y
    okx = dx.is_zero() or dx.v >= digits
    oky = dy.is_zero() or dy.v >= digits
    return okx and oky
