"""Integral Weierstrass models: point arithmetic over Q_p and F_p, reduction
data, formal expansions at the origin, and the elliptic logarithm."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    DomainError,
    PadicNumber,
    PrecisionError,
    _ilog,
    from_fraction,
    padic,
    padic_sqrt,
    sqrt_mod_prime,
    vp_int,
    zero,
)
from .series import DiskSeries


class CurveModel:
    """y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer a-invariants.

    Models are trusted to be minimal; the derived b-, c-invariants and the
    discriminant are computed once and the standard integer identities
    4*b8 = b2*b6 - b4^2 and 1728*disc = c4^3 - c6^2 are enforced.
    """

    def __init__(self, a_invariants, label: str = ""):
        a1, a2, a3, a4, a6 = (int(a) for a in a_invariants)
        self.a1, self.a2, self.a3, self.a4, self.a6 = a1, a2, a3, a4, a6
        self.label = label
        self.b2 = a1 * a1 + 4 * a2
        self.b4 = 2 * a4 + a1 * a3
        self.b6 = a3 * a3 + 4 * a6
        self.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
        self.c4 = self.b2 * self.b2 - 24 * self.b4
        self.c6 = -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6
        self.disc = (-self.b2 * self.b2 * self.b8 - 8 * self.b4 ** 3
                     - 27 * self.b6 * self.b6 + 9 * self.b2 * self.b4 * self.b6)
        if self.disc == 0:
            raise DomainError("singular model: discriminant is 0")
        assert 4 * self.b8 == self.b2 * self.b6 - self.b4 * self.b4
        assert 1728 * self.disc == self.c4 ** 3 - self.c6 ** 2

    @property
    def a_invariants(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    def rhs_int(self, x: int) -> int:
        return x ** 3 + self.a2 * x * x + self.a4 * x + self.a6

    def is_on_curve_int(self, x: int, y: int) -> bool:
        return y * y + self.a1 * x * y + self.a3 * y == self.rhs_int(x)

    def bpoly_int(self, x: int) -> int:
        """4x^3 + b2 x^2 + 2 b4 x + b6 = (2y + a1 x + a3)^2 on the curve."""
        return 4 * x ** 3 + self.b2 * x * x + 2 * self.b4 * x + self.b6

    def __repr__(self):
        return "CurveModel(%r, label=%r)" % (list(self.a_invariants), self.label)


@dataclass(frozen=True)
class ReductionData:
    prime: int
    ord_disc: int
    kind: str  # good | multiplicative | additive


def classify_reduction(curve: CurveModel, l: int) -> ReductionData:
    n = vp_int(curve.disc, l) if curve.disc % l == 0 else 0
    if n == 0:
        return ReductionData(l, 0, "good")
    if curve.c4 % l != 0:
        return ReductionData(l, n, "multiplicative")
    return ReductionData(l, n, "additive")


def bad_primes(curve: CurveModel) -> list[int]:
    """Primes dividing the discriminant, in increasing order."""
    n = abs(curve.disc)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- points over Q_p -----------------------------------------------------------


class Point:
    """Affine point with PadicNumber coordinates, or the origin at infinity."""

    __slots__ = ("x", "y")

    def __init__(self, x=None, y=None):
        self.x = x
        self.y = y

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.is_infinity:
            return "Point(O)"
        return "Point(%s, %s)" % (self.x, self.y)


INFINITY = Point()


def point(curve: CurveModel, x, y, p: int, prec: int) -> Point:
    """Build a point from int/Fraction coordinates, checking the equation."""
    P = Point(padic(x, p, prec) if not isinstance(x, PadicNumber) else x,
              padic(y, p, prec) if not isinstance(y, PadicNumber) else y)
    lhs = P.y * P.y + curve.a1 * P.x * P.y + curve.a3 * P.y
    rhs = P.x ** 3 + curve.a2 * P.x * P.x + curve.a4 * P.x + curve.a6
    if not (lhs - rhs).is_zero():
        raise DomainError("point is not on the curve at the claimed precision")
    return P


def negate(curve: CurveModel, P: Point) -> Point:
    if P.is_infinity:
        return P
    return Point(P.x, -P.y - curve.a1 * P.x - curve.a3)


def add(curve: CurveModel, P: Point, Q: Point) -> Point:
    """Chord-tangent addition; comparisons are at the claimed precision."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    a1, a2, a3, a4, a6 = curve.a_invariants
    if (P.x - Q.x).is_zero():
        if (P.y + Q.y + a1 * Q.x + a3).is_zero():
            return INFINITY
        # tangent line at P
        den = 2 * P.y + a1 * P.x + a3
        lam = (3 * P.x * P.x + 2 * a2 * P.x + a4 - a1 * P.y) / den
        nu = (-(P.x ** 3) + a4 * P.x + 2 * a6 - a3 * P.y) / den
    else:
        den = Q.x - P.x
        lam = (Q.y - P.y) / den
        nu = (P.y * Q.x - Q.y * P.x) / den
    x3 = lam * lam + a1 * lam - a2 - P.x - Q.x
    y3 = -(lam + a1) * x3 - nu - a3
    return Point(x3, y3)


def scalar_mul(curve: CurveModel, m: int, P: Point) -> Point:
    if m < 0:
        return scalar_mul(curve, -m, negate(curve, P))
    R = INFINITY
    Q = P
    while m:
        if m & 1:
            R = add(curve, R, Q)
        m >>= 1
        if m:
            Q = add(curve, Q, Q)
    return R


# -- points over F_p ------------------------------------------------------------


def fp_negate(curve: CurveModel, p: int, P):
    if P is None:
        return None
    x, y = P
    return (x, (-y - curve.a1 * x - curve.a3) % p)


def fp_add(curve: CurveModel, p: int, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    a1, a2, a3, a4, a6 = curve.a_invariants
    x1, y1 = P
    x2, y2 = Q
    if (x1 - x2) % p == 0:
        if (y1 + y2 + a1 * x2 + a3) % p == 0:
            return None
        den = (2 * y1 + a1 * x1 + a3) % p
        lam = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) * pow(den, -1, p) % p
        nu = (-(x1 ** 3) + a4 * x1 + 2 * a6 - a3 * y1) * pow(den, -1, p) % p
    else:
        den = (x2 - x1) % p
        lam = (y2 - y1) * pow(den, -1, p) % p
        nu = (y1 * x2 - y2 * x1) * pow(den, -1, p) % p
    x3 = (lam * lam + a1 * lam - a2 - x1 - x2) % p
    y3 = (-(lam + a1) * x3 - nu - a3) % p
    return (x3, y3)


def fp_scalar_mul(curve: CurveModel, p: int, m: int, P):
    if m < 0:
        return fp_scalar_mul(curve, p, -m, fp_negate(curve, p, P))
    R, Q = None, P
    while m:
        if m & 1:
            R = fp_add(curve, p, R, Q)
        m >>= 1
        if m:
            Q = fp_add(curve, p, Q, Q)
    return R


def fp_affine_points(curve: CurveModel, p: int) -> list:
    """All affine points of the reduced curve, ordered by (x, y)."""
    if curve.disc % p == 0:
        raise DomainError("bad reduction at %d" % p)
    inv2 = pow(2, -1, p)
    out = []
    for x in range(p):
        b = curve.bpoly_int(x) % p
        if b == 0:
            y = (-(curve.a1 * x + curve.a3)) * inv2 % p
            out.append((x, y))
        elif pow(b, (p - 1) // 2, p) == 1:
            s = sqrt_mod_prime(b, p)
            for sg in sorted({s, p - s}):
                y = (sg - curve.a1 * x - curve.a3) * inv2 % p
                out.append((x, y))
    return sorted(out)


def count_points_fp(curve: CurveModel, p: int) -> tuple[int, int]:
    """(#E(F_p), a_p) by a quadratic-character sweep; needs good reduction."""
    if p == 2 or curve.disc % p == 0:
        raise DomainError("point counting needs odd good reduction")
    qr = bytearray(p)
    for i in range(1, (p + 1) // 2):
        qr[i * i % p] = 1
    count = 1  # the origin
    for x in range(p):
        b = curve.bpoly_int(x) % p
        if b == 0:
            count += 1
        elif qr[b]:
            count += 2
    return count, p + 1 - count


# -- exact formal expansions at the origin ---------------------------------------


def _fs_mul(a, b, T):
    out = [Fraction(0)] * T
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if i + j >= T:
                    break
                out[i + j] += x * y
    return out


def _fs_inv_unit(a, T):
    # inverse of a power series with a[0] = 1
    out = [Fraction(0)] * T
    out[0] = Fraction(1)
    for k in range(1, T):
        acc = Fraction(0)
        for j in range(1, min(k, len(a) - 1) + 1):
            acc += a[j] * out[k - j]
        out[k] = -acc
    return out


class FormalExpansions:
    """Laurent expansions at the origin in the tangential parameter z = -x/y.

    x, y and the invariant differential have integer coefficients; the formal
    logarithm has coefficient denominators dividing the exponent.  All series
    are exact (Fraction arithmetic) up to order T.
    """

    def __init__(self, curve: CurveModel, T: int):
        if T < 2:
            raise DomainError("need T >= 2")
        self.curve = curve
        self.T = T
        a1, a2, a3, a4, a6 = curve.a_invariants
        n = T + 5
        # w(z) = z^3 + a1 z w + a2 z^2 w + a3 w^2 + a4 z w^2 + a6 w^3
        w = [Fraction(0)] * n
        if n > 3:
            w[3] = Fraction(1)
        for k in range(4, n):
            acc = a1 * w[k - 1] + a2 * w[k - 2]
            # (w^2)_k and (w^2)_{k-1}, (w^3)_k use only known w_j (j <= k-3)
            s2k = sum(w[i] * w[k - i] for i in range(3, k - 2))
            s2k1 = sum(w[i] * w[k - 1 - i] for i in range(3, k - 4 + 1 + 1))
            s3k = Fraction(0)
            for i in range(3, k - 5):
                for j in range(3, k - i - 2):
                    s3k += w[i] * w[j] * w[k - i - j]
            acc += a3 * s2k + a4 * s2k1 + a6 * s3k
            w[k] = acc
        self._w = w
        what = [w[k + 3] for k in range(n - 3)]  # w = z^3 * (1 + ...)
        whatinv = _fs_inv_unit(what, n - 3)
        # x = z / w = z^{-2} * whatinv ; y = -1/w = -z^{-3} * whatinv
        self.x_shift = -2
        self.x_coeffs = whatinv[: T + 2]              # x = sum x_k z^{k-2}
        self.y_shift = -3
        self.y_coeffs = [-c for c in whatinv[: T + 3]]
        # denominator 2y + a1 x + a3 as Laurent with shift -3
        den = [2 * c for c in self.y_coeffs]
        for k, c in enumerate(self.x_coeffs):
            if k + 1 < len(den):
                den[k + 1] += a1 * c
        if 3 < len(den):
            den[3] += Fraction(a3)
        # x'(z): shift -3, coefficients (k-2)*x_k
        xprime = [(k - 2) * self.x_coeffs[k] for k in range(len(self.x_coeffs))]
        # omega = x'(z) / den : shift 0 power series
        deninv = _fs_inv_unit([c / den[0] for c in den], T + 2)
        om = _fs_mul([c / den[0] for c in xprime], deninv, T + 1)
        self.omega_coeffs = om[: T]                   # omega = sum om_k z^k dz
        assert self.omega_coeffs[0] == 1
        # formal log: integrate omega
        self.log_coeffs = [Fraction(0)] + [self.omega_coeffs[k] / (k + 1)
                                           for k in range(T - 1)]
        # beta kernel x * omega: Laurent shift -2
        self.beta_shift = -2
        self.beta_coeffs = _fs_mul(self.x_coeffs, self.omega_coeffs, T + 2)

    def formal_exp(self, T: int | None = None):
        """Compositional inverse of the formal logarithm (power series)."""
        T = self.T if T is None else min(T, self.T)
        lam = self.log_coeffs[:T]
        e = [Fraction(0), Fraction(1)]
        for k in range(2, T):
            # coefficient of t^k in lam(e) with unknown e_k appearing linearly
            e.append(Fraction(0))
            comp = _compose_frac(lam, e, k + 1)
            e[k] = -comp[k]
        return e

    def x_at(self, z: PadicNumber, prec: int) -> PadicNumber:
        return self._eval(self.x_coeffs, self.x_shift, z, prec)

    def y_at(self, z: PadicNumber, prec: int) -> PadicNumber:
        return self._eval(self.y_coeffs, self.y_shift, z, prec)

    def log_at(self, z: PadicNumber, prec: int) -> PadicNumber:
        return self._eval(self.log_coeffs, 0, z, prec)

    def _eval(self, coeffs, shift, z, prec):
        p = z.p
        s = DiskSeries(p, shift,
                       [from_fraction(c, p, prec + _ilog(p, len(coeffs) + 1) + 2)
                        for c in coeffs],
                       shift + len(coeffs))
        return s.evaluate(z)


def _compose_frac(f, g, T):
    """f(g(t)) mod t^T for Fraction power series, g(0) = 0."""
    out = [Fraction(0)] * T
    # Horner from the top
    for c in reversed(f):
        new = [Fraction(0)] * T
        new[0] = c
        for i, x in enumerate(out):
            if x:
                for j, y in enumerate(g):
                    if i + j >= T:
                        break
                    new[i + j] += x * y
        out = new
    return out


# -- residue disks ----------------------------------------------------------------


class DiskChart:
    """Series chart on one affine residue disk of a good-reduction curve.

    Ordinary disks use the parameter t = x - x0 with x0 the integer lift of
    the residue x-coordinate; disks whose reduced point has a vertical
    tangent (the two-torsion disks) use t = y - y0 instead.  In both cases
    the coordinate series, the invariant differential and its x-multiple
    have Z_p coefficients.
    """

    def __init__(self, curve: CurveModel, p: int, residue, prec: int, T: int):
        self.curve = curve
        self.p = p
        self.residue = residue
        self.prec = prec
        self.T = T
        a1, a2, a3, a4, a6 = curve.a_invariants
        xr, yr = residue
        wprec = prec + _ilog(p, T + 1) + 3
        self.is_weierstrass = (2 * yr + a1 * xr + a3) % p == 0
        tvar = DiskSeries.from_coeffs(p, [padic(0, p, wprec), padic(1, p, wprec)], T)
        if not self.is_weierstrass:
            x0 = xr % p
            y0 = _hensel_y(curve, p, x0, yr, wprec)
            self.center = Point(padic(x0, p, wprec), y0)
            xs = DiskSeries.from_coeffs(p, [padic(x0, p, wprec), padic(1, p, wprec)], T)
            ys = _newton_series_y(curve, xs, y0, T)
            self.x_series, self.y_series = xs, ys
            den = 2 * ys + a1 * xs + a3
            self.alpha = den.inverse().truncate(T)
        else:
            x0 = _hensel_two_torsion_x(curve, p, xr, wprec)
            y0 = (-(curve.a1 * x0 + padic(curve.a3, p, wprec))) / padic(2, p, wprec)
            self.center = Point(x0, y0)
            ys = DiskSeries.from_coeffs(p, [y0, padic(1, p, wprec)], T)
            xs = _newton_series_x(curve, ys, x0, T)
            self.x_series, self.y_series = xs, ys
            wx = (a1 * ys - 3 * xs * xs - 2 * a2 * xs
                  - DiskSeries.from_coeffs(p, [padic(a4, p, wprec)], T))
            self.alpha = (-(wx.inverse())).truncate(T)
        self.beta = (self.x_series * self.alpha).truncate(T)

    def parameter_of(self, P: Point) -> PadicNumber:
        t = (P.x - self.center.x) if not self.is_weierstrass else (P.y - self.center.y)
        if not t.is_zero() and t.v < 1:
            raise DomainError("point is not in this residue disk")
        return t

    def point_at(self, t: PadicNumber) -> Point:
        if self.is_weierstrass:
            return Point(self.x_series.evaluate(t), self.center.y + t)
        return Point(self.center.x + t, self.y_series.evaluate(t))

    def contains(self, P: Point) -> bool:
        if P.is_infinity:
            return False
        if not P.x.is_integral():
            return False
        return (P.x.residue(), P.y.residue()) == self.residue


def _hensel_y(curve: CurveModel, p: int, x0: int, yr: int, prec: int) -> PadicNumber:
    """The y with W(x0, y) = 0 and y = yr mod p (ordinary disk)."""
    a1, a2, a3, a4, a6 = curve.a_invariants
    mod = p ** prec
    y = yr % p
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p ** k
        f = (y * y + a1 * x0 * y + a3 * y - curve.rhs_int(x0)) % m
        df = (2 * y + a1 * x0 + a3) % m
        y = (y - f * pow(df, -1, m)) % m
    return padic(y % mod, p, prec)


def _hensel_two_torsion_x(curve: CurveModel, p: int, xr: int, prec: int) -> PadicNumber:
    """Root of 4x^3 + b2 x^2 + 2 b4 x + b6 congruent to xr (two-torsion x)."""
    mod = p ** prec
    x = xr % p
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        m = p ** k
        f = curve.bpoly_int(x) % m
        df = (12 * x * x + 2 * curve.b2 * x + 2 * curve.b4) % m
        if df % p == 0:
            raise DomainError("two-torsion x-coordinate is not simple mod p")
        x = (x - f * pow(df, -1, m)) % m
    return padic(x % mod, p, prec)


def _newton_series_y(curve: CurveModel, xs: DiskSeries, y0: PadicNumber,
                     T: int) -> DiskSeries:
    """Solve W(x(t), y(t)) = 0 for y(t) with y(0) = y0 (W_y unit at center)."""
    p = xs.p
    a1, a2, a3, a4, a6 = curve.a_invariants
    ys = DiskSeries.from_coeffs(p, [y0], T)
    known = 1
    while known < T:
        rhs = ((xs * xs) * xs + a2 * (xs * xs) + a4 * xs
               + DiskSeries.from_coeffs(p, [padic(a6, p, y0.N)], T))
        f = ys * ys + a1 * (xs * ys) + a3 * ys - rhs
        df = 2 * ys + a1 * xs + DiskSeries.from_coeffs(p, [padic(a3, p, y0.N)], T)
        ys = (ys - f * df.inverse()).truncate(T)
        known *= 2
    return ys


def _newton_series_x(curve: CurveModel, ys: DiskSeries, x0: PadicNumber,
                     T: int) -> DiskSeries:
    """Solve W(x(t), y(t)) = 0 for x(t) with x(0) = x0 (W_x unit at center)."""
    p = ys.p
    a1, a2, a3, a4, a6 = curve.a_invariants
    xs = DiskSeries.from_coeffs(p, [x0], T)
    known = 1
    while known < T:
        f = (ys * ys + a1 * (xs * ys) + a3 * ys
             - ((xs * xs) * xs + a2 * (xs * xs) + a4 * xs
                + DiskSeries.from_coeffs(p, [padic(a6, p, x0.N)], T)))
        df = (a1 * ys - 3 * (xs * xs) - 2 * a2 * xs
              - DiskSeries.from_coeffs(p, [padic(a4, p, x0.N)], T))
        xs = (xs - f * df.inverse()).truncate(T)
        known *= 2
    return xs


# -- elliptic logarithm -------------------------------------------------------------


def reduction_of(P: Point, p: int):
    """Residue pair of a point with integral coordinates, or None for the
    origin disk (negative x-valuation)."""
    if P.is_infinity:
        return None
    if not P.x.is_integral():
        return None
    return (P.x.residue(), P.y.residue())


def elliptic_log(curve: CurveModel, p: int, P: Point,
                 prec: int | None = None) -> PadicNumber:
    """Integral of the invariant differential from the tangential base to P.

    Computed as lambda(z(m P)) / m with m the reduced point count, which
    forces m P into the formal disk; torsion points give an exact zero.
    """
    if P.is_infinity:
        raise DomainError("the origin is outside the affine curve")
    if curve.disc % p == 0:
        raise DomainError("bad reduction at %d" % p)
    prec = prec if prec is not None else min(c.N for c in (P.x, P.y))
    if reduction_of(P, p) is None:
        Q, m = P, 1
    else:
        m, _ = count_points_fp(curve, p)
        Q = scalar_mul(curve, m, P)
        if Q.is_infinity:
            return zero(p, prec)
    z = -Q.x / Q.y
    if z.is_zero() or z.v < 1:
        raise PrecisionError("multiple of the point did not reach the formal disk")
    T = prec + _ilog(p, prec + 2) + 4
    fe = FormalExpansions(curve, T)
    val = fe.log_at(z, prec + _ilog(p, m) + 2)
    return val / padic(m, p, val.N - min(val.valuation_floor(), 0) + vp_int(m, p) + 1) \
        if m > 1 else val
