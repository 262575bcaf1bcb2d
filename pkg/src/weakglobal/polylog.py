"""p-adic dilogarithm machinery and the weakly-global sets of the projective
line minus three points, including the high-throughput mod-p scan."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .padic import (
    DEFAULT_PRECISION,
    DomainError,
    PadicNumber,
    _ilog,
    agrees_to,
    from_fraction,
    padic,
    padic_log,
    teichmuller,
    vp_int,
    zero,
)
from .series import DiskSeries, PrimeFieldPoly, series_zeros_in_disk


@dataclass
class GSeries:
    """One level of the recursive series family, in one of two representations:
    a truncated p-adic power series or its mod-p polynomial reduction."""
    p: int
    level: int
    mode: str  # "padic" | "modp"
    series: DiskSeries | None = None
    poly: PrimeFieldPoly | None = None

    def evaluate(self, v):
        if self.mode == "modp":
            return self.poly(v)
        return self.series.evaluate(v, tail_margin=self._tail_margin())

    def _tail_margin(self):
        # coefficient decay of these series at |v| = 1 is ~ k/(p-1); the
        # default unit-disk cap in DiskSeries.evaluate does not apply here.
        return 0


def _g0_padic(p: int, T: int, prec: int) -> DiskSeries:
    """v - 1 - (v-1)^p / (v^p - (v-1)^p) as a power series to order T.

    The denominator is 1 + p*E(v) with E integral of degree < p, so the
    inverse has coefficients with valuation growing like k/(p-1) and the
    series converges on the closed unit disk.
    """
    work = prec + _ilog(p, T + 1) + 4
    mod = p ** work
    # (v-1)^p coefficients
    vm1p = [0] * (p + 1)
    c = 1
    for k in range(p + 1):
        vm1p[k] = c * pow(-1, (p - k) % 2, mod) % mod
        c = c * (p - k) // (k + 1)
    den = [(-x) % mod for x in vm1p]
    den[p] = (den[p] + 1) % mod  # v^p - (v-1)^p ; degree <= p-1, constant 1
    assert den[0] % mod == 1 % mod and den[p] % mod == 0
    deg_e = p - 1
    inv = [0] * T
    inv[0] = 1
    for m in range(1, T):
        acc = 0
        for j in range(1, min(m, deg_e) + 1):
            if den[j]:
                acc += den[j] * inv[m - j]
        inv[m] = (-acc) % mod
    num = [0] * T
    for k in range(min(p + 1, T)):
        num[k] = vm1p[k]
    frac = [0] * T
    for i in range(T):
        if num[i]:
            for j in range(T - i):
                frac[i + j] = (frac[i + j] + num[i] * inv[j]) % mod
    out = [(-frac[0]) % mod - 1 % mod, (1 - frac[1]) % mod] + \
          [(-frac[k]) % mod for k in range(2, T)]
    out[0] = (-1 - frac[0]) % mod
    coeffs = [padic(x % mod, p, work) for x in out]
    return DiskSeries(p, 0, coeffs, T)


def _next_g_padic(g: DiskSeries) -> DiskSeries:
    """g_{n+1} from g_n via g'_{n+1}(v) = -g_n(v) / (v (1-v)), g_{n+1}(0) = 0.

    Multiplication by 1/(1-v) is the running-sum operator; the division by v
    requires (and checks) a vanishing constant term.
    """
    p = g.p
    if not g.coeff(0).is_zero():
        raise DomainError("series has nonzero constant term; cannot divide by v")
    shifted = [g.coeff(k) for k in range(1, g.T)]
    acc = zero(p, 10 ** 9)
    sums = []
    for c in shifted:
        acc = acc + c
        sums.append(acc)
    deriv = DiskSeries(p, 0, [-c for c in sums], g.T - 1)
    return deriv.integrate().truncate(g.T)


def g_series(p: int, n: int, mode: str = "modp",
             truncation: int | None = None, prec: int = DEFAULT_PRECISION) -> GSeries:
    """The n-th series of the recursion, mod p or as a p-adic power series."""
    if p < 3:
        raise DomainError("odd prime required")
    if not 0 <= n <= 2:
        raise DomainError("levels 0..2 are supported")
    if mode == "modp":
        polys = _g_family_modp(p)
        return GSeries(p, n, "modp", poly=polys[n])
    if mode != "padic":
        raise DomainError("mode must be 'modp' or 'padic'")
    T = truncation if truncation is not None else default_g_truncation(p, prec)
    g = _g0_padic(p, T, prec)
    for _ in range(n):
        g = _next_g_padic(g).truncate(T)
    return GSeries(p, n, "padic", series=g)


def default_g_truncation(p: int, prec: int) -> int:
    # coefficient valuations grow like (k - p)/(p - 1) minus integration losses
    return (prec + 2 * _ilog(p, 4 * prec * (p - 1) + p) + 6) * (p - 1) + p + 8


def _g_family_modp(p: int):
    """(g0, g1, g2) mod p.  g0 reduces to v - v^p; each later level divides
    by v(1-v) exactly and integrates, staying polynomial of degree p-1, p-2."""
    g0 = [0] * (p + 1)
    g0[1] = 1
    g0[p] = p - 1
    out = [PrimeFieldPoly(p, g0)]
    inv = [0, 1] + [0] * (p - 2)
    for k in range(2, p):
        inv[k] = (p - (p // k)) * inv[p % k] % p
    cur = g0
    for _ in range(2):
        assert cur[0] % p == 0
        shifted = [c % p for c in cur[1:]]
        run = 0
        sums = []
        for c in shifted:
            run = (run + c) % p
            sums.append(run)
        assert run == 0, "series value at 1 must vanish mod p"
        sums.pop()  # exact division by (1 - v)
        nxt = [0] * (len(sums) + 1)
        for k, c in enumerate(sums):
            nxt[k + 1] = (p - c) * inv[k + 1] % p if c else 0
        out.append(PrimeFieldPoly(p, nxt))
        cur = nxt
    return out


def li2_at_root_of_unity(p: int, zeta: PadicNumber,
                         prec: int = DEFAULT_PRECISION,
                         _gcache: dict | None = None) -> PadicNumber:
    """Dilogarithm at a Teichmuller point zeta != 1, via the two-level series
    evaluated at 1/(1-zeta) and the p^2/(p^2-1) Euler-factor correction."""
    if zeta.p != p:
        raise DomainError("prime mismatch")
    if (zeta - 1).is_zero():
        raise DomainError("dilogarithm series route undefined at 1")
    if not (zeta ** (p - 1) - 1).is_zero():
        raise DomainError("argument must be a (p-1)-st root of unity")
    v = 1 / (1 - zeta)
    if _gcache is not None and ("g2", p, prec) in _gcache:
        g2 = _gcache[("g2", p, prec)]
    else:
        g2 = g_series(p, 2, "padic", prec=prec)
        if _gcache is not None:
            _gcache[("g2", p, prec)] = g2
    val = _eval_g_at_unit(g2.series, v, prec)
    from fractions import Fraction
    factor = from_fraction(Fraction(p * p, p * p - 1), p, prec + 2)
    return val * factor


def _eval_g_at_unit(s: DiskSeries, v: PadicNumber, prec: int) -> PadicNumber:
    """Horner evaluation at a unit; the tail bound comes from the known
    coefficient decay, not from v-adic smallness."""
    p = s.p
    acc = zero(p, 10 ** 9)
    for i in range(len(s.coeffs) - 1, -1, -1):
        acc = acc * v + s.coeffs[i]
    if s.shift:
        acc = acc * v ** s.shift
    tail = (s.T - p) // (p - 1) - 2 * _ilog(p, s.T + 1) - 2
    cap = max(min(prec, tail), 0)
    if acc.is_zero():
        return zero(p, min(acc.N, cap))
    if cap <= acc.v:
        return zero(p, cap)
    return acc.cap(min(acc.N, cap))


# -- the mod-p scan ------------------------------------------------------------


def _order6_residues(p: int) -> tuple[int, int]:
    """The two order-6 elements of F_p* (p = 1 mod 3): roots of z^2 - z + 1."""
    from .padic import sqrt_mod_prime
    s = sqrt_mod_prime(-3, p)
    inv2 = pow(2, -1, p)
    r1 = (1 + s) * inv2 % p
    r2 = (1 - s) * inv2 % p
    return (min(r1, r2), max(r1, r2))


def _scan_single(p: int) -> str:
    """Verdict line payload for one prime: 'nonzero' or 'ZERO'."""
    g2 = _g_family_modp(p)[2]
    assert g2.degree() == p - 2
    r1, r2 = _order6_residues(p)
    ok = g2(r1) != 0 and g2(r2) != 0
    return "nonzero" if ok else "ZERO"


def _primes_1mod3(bound: int):
    if bound <= 7:
        return
    sieve = bytearray([1]) * 0
    sieve = bytearray(bound)
    for i in range(2, bound):
        if sieve[i] == 0:
            if i % 3 == 1 and i > 3:
                yield i
            for j in range(i * i, bound, i):
                sieve[j] = 1


@dataclass
class ScanResult:
    bound: int
    checked: int
    vanishing: list[int] = field(default_factory=list)
    verdicts: dict = field(default_factory=dict)


def dilog_scan(bound: int, jobs: int = 1, resume_path: str | None = None,
               progress=None) -> ScanResult:
    """For each prime p = 1 mod 3 below the bound, test whether the level-two
    series is nonzero mod p at the order-6 residues.  Restartable through a
    plain-text checkpoint of "p verdict" lines; results merge in prime order
    regardless of worker count."""
    if bound < 7:
        raise DomainError("bound must be at least 7")
    done: dict[int, str] = {}
    if resume_path:
        try:
            with open(resume_path) as fh:
                for line in fh:
                    parts = line.split()
                    if len(parts) == 2 and parts[0].isdigit():
                        done[int(parts[0])] = parts[1]
        except FileNotFoundError:
            pass
    todo = [p for p in _primes_1mod3(bound) if p not in done]
    if jobs > 1 and len(todo) > 1:
        import multiprocessing
        with multiprocessing.Pool(jobs) as pool:
            fresh = dict(zip(todo, pool.map(_scan_single, todo, chunksize=64)))
    else:
        fresh = {}
        for p in todo:
            fresh[p] = _scan_single(p)
            if progress is not None:
                progress(p)
    if resume_path and fresh:
        with open(resume_path, "a") as fh:
            for p in sorted(fresh):
                fh.write("%d %s\n" % (p, fresh[p]))
    done.update(fresh)
    verdicts = {p: done[p] for p in sorted(done) if p < bound}
    vanishing = [p for p, v in verdicts.items() if v != "nonzero"]
    return ScanResult(bound, len(verdicts), vanishing, verdicts)


def randomness_product(bound: int) -> float:
    """prod_{p = 1 mod 3, p < bound} (1 - 1/p) in ordinary float arithmetic."""
    if bound < 7:
        raise DomainError("bound must be at least 7")
    log_acc = 0.0
    for p in _primes_1mod3(bound):
        log_acc += math.log1p(-1.0 / p)
    return math.exp(log_acc)


# -- weakly-global sets of the thrice-punctured line ---------------------------


@dataclass
class P1WeaklyGlobalReport:
    p: int
    level: int
    points: list[PadicNumber]
    s_variant: bool = False
    evidence: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def p1_weakly_global(p: int, level: int,
                     prec: int = DEFAULT_PRECISION) -> P1WeaklyGlobalReport:
    """Level 1: units z with z and 1-z both of vanishing logarithm, i.e. both
    roots of unity, which forces z^2 - z + 1 = 0; empty unless p = 1 mod 3.
    Level 2: the subset where the dilogarithm also vanishes."""
    if p < 3:
        raise DomainError("odd prime required")
    if level not in (1, 2):
        raise DomainError("level must be 1 or 2")
    report = P1WeaklyGlobalReport(p, level, [])
    if p == 3 or p % 3 == 2:
        report.notes.append("z^2 - z + 1 has no root mod %d" % p)
        return report
    r1, r2 = _order6_residues(p)
    cache: dict = {}
    for r in (r1, r2):
        z = teichmuller(padic(r, p, prec))
        assert ((z * z - z + 1)).is_zero()
        logz = padic_log(z)
        log1mz = padic_log(1 - z)
        ev = {"z": z, "log_z": logz, "log_1mz": log1mz}
        assert logz.is_zero() and log1mz.is_zero()
        if level == 1:
            report.points.append(z)
            report.evidence.append(ev)
        else:
            li2 = li2_at_root_of_unity(p, z, prec, _gcache=cache)
            ev["li2"] = li2
            report.evidence.append(ev)
            if li2.is_zero():
                report.points.append(z)
                report.notes.append("dilogarithm vanishes at a sixth root; "
                                    "point survives to level 2")
    return report


def _f_center_and_series(p: int, x0: int, prec: int, T: int,
                         gcache: dict) -> tuple[PadicNumber, DiskSeries, PadicNumber]:
    """Center value and disk series of F(z) = 2 Li2(z) + log(z) log(1-z) on
    the residue disk of the unit x0 (x0 != 0, 1 mod p).

    Returns (center value, series in the disk parameter t = z - w, center w).
    The derivative -log(1-z)/z - log(z)/(1-z) is integrated termwise from
    the Teichmuller center, where log w = 0 kills one product term.
    """
    w = teichmuller(padic(x0, p, prec + _ilog(p, T) + 3))
    li2_w = li2_at_root_of_unity(p, w, prec, _gcache=gcache)
    log_1mw = padic_log(1 - w)
    f_w = 2 * li2_w  # log(w) = 0
    wp = prec + _ilog(p, T) + 3
    # log(z) = sum (-1)^(k+1) (t/w)^k / k ; log(1-z) = log(1-w) - sum (t/(1-w))^k / k
    winv = 1 / w
    one_mw_inv = 1 / (1 - w)
    log_z = DiskSeries(p, 1,
                       [(-1 if k % 2 == 0 else 1) * winv ** k /
                        padic(k, p, wp + vp_int(k, p) + 1)
                        for k in range(1, T)], T)
    log_1mz = DiskSeries(p, 0, [log_1mw] +
                         [-(one_mw_inv ** k) / padic(k, p, wp + vp_int(k, p) + 1)
                          for k in range(1, T)], T)
    inv_z = DiskSeries(p, 0, [winv * (-winv) ** k for k in range(T)], T)
    inv_1mz = DiskSeries(p, 0, [one_mw_inv ** (k + 1) for k in range(T)], T)
    f_prime = -(log_1mz * inv_z) - (log_z * inv_1mz)
    f_series = f_prime.integrate().truncate(T) + f_w
    return f_w, f_series, w


def p1_s2_weakly_global(p: int, prec: int = DEFAULT_PRECISION) -> P1WeaklyGlobalReport:
    """Zero set of 2 Li2(z) + log(z) log(1-z) over the unit disks away from
    0 and 1 (the level-2 set allowing denominator 2)."""
    if p < 3:
        raise DomainError("odd prime required")
    T = prec + 2 * _ilog(p, prec + 2) + 10
    gcache: dict = {}
    report = P1WeaklyGlobalReport(p, 2, [], s_variant=True)
    for x0 in range(2, p):
        f_w, f_series, w = _f_center_and_series(p, x0, prec, T, gcache)
        zs = series_zeros_in_disk(f_series, min_valuation=1)
        for t in zs:
            z = w + t
            report.points.append(z)
            report.evidence.append({"z": z, "residue": x0,
                                    "F": f_series.evaluate(t)})
    report.points.sort(key=lambda z: (z.residue(), z.lift()))
    return report


def f_s2_value(p: int, z_num: int, z_den: int, prec: int = DEFAULT_PRECISION,
               gcache: dict | None = None) -> PadicNumber:
    """F(z) = 2 Li2(z) + log(z) log(1-z) at a rational unit z = z_num/z_den
    with z, 1-z both units, through the disk series at its residue."""
    from fractions import Fraction
    gcache = gcache if gcache is not None else {}
    z = from_fraction(Fraction(z_num, z_den), p, prec + 4)
    x0 = z.residue()
    if x0 in (0, 1):
        raise DomainError("z must avoid the disks of 0 and 1")
    T = prec + 2 * _ilog(p, prec + 2) + 10
    f_w, f_series, w = _f_center_and_series(p, x0, prec, T, gcache)
    return f_series.evaluate(z - w)
