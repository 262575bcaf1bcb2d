"""Truncated series over Q_p, mod-p polynomials, and disk root finding."""

from __future__ import annotations

from .padic import (
    DomainError,
    PadicNumber,
    PrecisionError,
    TruncationError,
    _ilog,
    padic,
    vp_int,
    zero,
)

_STRUCT_ZERO_PREC = 10 ** 9  # structurally-zero coefficients (absent slots)


class DiskSeries:
    """A truncated Laurent series sum_{k >= shift} c_k z^k known mod z^T.

    Coefficients are PadicNumber; a finite principal part is allowed via a
    negative shift.  Ring operations truncate consistently; integration
    divides coefficient k-1 by k and therefore records the honest precision
    loss v_p(k) through the coefficient arithmetic itself.
    """

    __slots__ = ("p", "shift", "coeffs", "T")

    def __init__(self, p: int, shift: int, coeffs, T: int):
        if shift + len(coeffs) > T:
            coeffs = coeffs[: T - shift]
        self.p = p
        self.shift = shift
        self.coeffs = list(coeffs)
        self.T = T

    @classmethod
    def from_coeffs(cls, p, coeffs, T, shift=0):
        return cls(p, shift,
                   [c if isinstance(c, PadicNumber) else padic(c, p) for c in coeffs],
                   T)

    def coeff(self, k: int) -> PadicNumber:
        if k >= self.T:
            raise TruncationError("coefficient %d not known (T = %d)" % (k, self.T))
        i = k - self.shift
        if i < 0 or i >= len(self.coeffs):
            return zero(self.p, _STRUCT_ZERO_PREC)
        return self.coeffs[i]

    def truncate(self, T: int) -> "DiskSeries":
        if T > self.T:
            raise TruncationError("cannot extend truncation order")
        return DiskSeries(self.p, self.shift, self.coeffs[: T - self.shift], T)

    def _aligned(self, other):
        shift = min(self.shift, other.shift)
        T = min(self.T, other.T)
        n = max(T - shift, 0)
        a = [zero(self.p, _STRUCT_ZERO_PREC)] * n
        for i, c in enumerate(self.coeffs):
            k = self.shift + i
            if k < T:
                a[k - shift] = c
        b = [zero(self.p, _STRUCT_ZERO_PREC)] * n
        for i, c in enumerate(other.coeffs):
            k = other.shift + i
            if k < T:
                b[k - shift] = c
        return shift, T, a, b

    def __add__(self, other):
        if not isinstance(other, DiskSeries):
            other = DiskSeries(self.p, 0, [padic(other, self.p)], self.T)
        shift, T, a, b = self._aligned(other)
        return DiskSeries(self.p, shift, [x + y for x, y in zip(a, b)], T)

    __radd__ = __add__

    def __neg__(self):
        return DiskSeries(self.p, self.shift, [-c for c in self.coeffs], self.T)

    def __sub__(self, other):
        if not isinstance(other, DiskSeries):
            other = DiskSeries(self.p, 0, [padic(other, self.p)], self.T)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "DiskSeries":
        if not isinstance(c, PadicNumber):
            c = padic(c, self.p)
        return DiskSeries(self.p, self.shift, [c * a for a in self.coeffs], self.T)

    def __mul__(self, other):
        if isinstance(other, (int, PadicNumber)):
            return self.scale(other)
        T = min(self.T + other.shift, other.T + self.shift)
        shift = self.shift + other.shift
        n = T - shift
        if n <= 0:
            return DiskSeries(self.p, shift, [], T)
        out = [zero(self.p, _STRUCT_ZERO_PREC)] * n
        for i, a in enumerate(self.coeffs):
            if a.is_zero() and a.N >= _STRUCT_ZERO_PREC:
                continue
            for j, b in enumerate(other.coeffs):
                k = i + j
                if k >= n:
                    break
                out[k] = out[k] + a * b
        return DiskSeries(self.p, shift, out, T)

    __rmul__ = __mul__

    def mul_zpow(self, k: int) -> "DiskSeries":
        return DiskSeries(self.p, self.shift + k, self.coeffs, self.T + k)

    def differentiate(self) -> "DiskSeries":
        out = [c * (self.shift + i) for i, c in enumerate(self.coeffs)]
        return DiskSeries(self.p, self.shift - 1, out, self.T - 1)

    def integrate(self) -> "DiskSeries":
        """Termwise antiderivative with zero constant term.

        Raises on a nonzero z^(-1) coefficient (a genuine residue).
        """
        out = []
        for i, c in enumerate(self.coeffs):
            k = self.shift + i
            if k == -1:
                if not c.is_zero():
                    raise DomainError("residue obstructs termwise integration")
                out.append(zero(self.p, c.N))
                continue
            d = padic(k + 1, self.p, max(c.relative_precision(), 1)
                      + vp_int(k + 1, self.p) + 1)
            out.append(c / d)
        return DiskSeries(self.p, self.shift + 1, out, self.T + 1)

    def residue_coeff(self) -> PadicNumber:
        if self.shift <= -1 < self.T:
            return self.coeff(-1)
        return zero(self.p, _STRUCT_ZERO_PREC)

    def inverse(self) -> "DiskSeries":
        """Multiplicative inverse; the lowest coefficient must be nonzero."""
        if not self.coeffs or self.coeffs[0].is_zero():
            raise DomainError("cannot invert: vanishing lowest coefficient")
        c0 = self.coeffs[0]
        n = self.T - self.shift
        inv0 = 1 / c0
        out = [inv0]
        for k in range(1, n):
            acc = zero(self.p, _STRUCT_ZERO_PREC)
            for j in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[j] * out[k - j]
            out.append(-inv0 * acc)
        return DiskSeries(self.p, -self.shift, out, self.T - 2 * self.shift)

    def evaluate(self, z0: PadicNumber, tail_margin: int | None = None) -> PadicNumber:
        """Value at z0 (v(z0) >= 1 unless the series is a polynomial).

        The claimed precision is capped at T*v(z0) minus a margin for the
        denominator growth of the unknown tail.
        """
        p = self.p
        vz = z0.N if z0.is_zero() else z0.v
        polynomial = self.shift + len(self.coeffs) >= self.T
        if vz < 1 and not polynomial:
            raise DomainError("evaluation outside the open unit disk")
        if z0.is_zero():
            if self.shift < 0:
                for i in range(min(-self.shift, len(self.coeffs))):
                    if not self.coeffs[i].is_zero():
                        raise DomainError("principal part at z0 = 0")
            acc = self.coeff(0)
        else:
            acc = zero(p, _STRUCT_ZERO_PREC)
            for i in range(len(self.coeffs) - 1, -1, -1):
                acc = acc * z0 + self.coeffs[i]
            if self.shift:
                acc = acc * z0 ** self.shift
        if polynomial:
            return acc
        margin = tail_margin if tail_margin is not None else _ilog(p, self.T + 1) + 2
        cap = self.T * max(vz, 1) - margin
        if acc.is_zero():
            return zero(p, min(acc.N, max(cap, 0)))
        if cap <= acc.v:
            return zero(p, max(cap, 0))
        return acc.cap(min(acc.N, cap))

    def __str__(self):
        bits = ["(%s)*z^%d" % (c, self.shift + i) for i, c in enumerate(self.coeffs[:4])]
        return " + ".join(bits) + " + ... + O(z^%d)" % self.T


class PrimeFieldPoly:
    """Dense polynomial over Z/p with exact arithmetic."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        self.p = p
        c = [x % p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = c

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        return self.p == other.p and self.coeffs == other.coeffs

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + [0] * (n - len(self.coeffs))
        b = other.coeffs + [0] * (n - len(other.coeffs))
        return PrimeFieldPoly(self.p, [x + y for x, y in zip(a, b)])

    def __neg__(self):
        return PrimeFieldPoly(self.p, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return PrimeFieldPoly(self.p, [x * other for x in self.coeffs])
        if self.is_zero() or other.is_zero():
            return PrimeFieldPoly(self.p, [])
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] = (out[i + j] + a * b) % self.p
        return PrimeFieldPoly(self.p, out)

    __rmul__ = __mul__

    def divmod(self, other):
        if other.is_zero():
            raise ZeroDivisionError
        p = self.p
        rem = self.coeffs[:]
        d = other.degree()
        q = [0] * max(0, len(rem) - d)
        dinv = pow(other.coeffs[-1], -1, p)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] % p
            if c:
                c = c * dinv % p
                q[i - d] = c
                for j, b in enumerate(other.coeffs):
                    rem[i - d + j] = (rem[i - d + j] - c * b) % p
        return PrimeFieldPoly(p, q), PrimeFieldPoly(p, rem[:d])

    def exact_div(self, other):
        q, r = self.divmod(other)
        if not r.is_zero():
            raise DomainError("division is not exact mod %d" % self.p)
        return q

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc

    def derivative(self):
        return PrimeFieldPoly(self.p, [k * c for k, c in enumerate(self.coeffs)][1:])

    def integrate(self):
        """Antiderivative with zero constant; fails on a z^(kp-1) term."""
        p = self.p
        out = [0]
        for k, c in enumerate(self.coeffs):
            if (k + 1) % p == 0:
                if c % p:
                    raise DomainError("integration obstructed at degree %d" % (k + 1))
                out.append(0)
            else:
                out.append(c * pow(k + 1, -1, p))
        return PrimeFieldPoly(p, out)

    def roots(self):
        return [x for x in range(self.p) if self(x) == 0]


# -- zeros of a series on a disk ----------------------------------------------


def series_zeros_in_disk(f: DiskSeries, min_valuation: int = 1,
                         max_depth: int | None = None) -> list[PadicNumber]:
    """All zeros t with v(t) >= min_valuation of a power series f.

    Zeros are located by reducing the content-stripped series mod p,
    enumerating the residue roots, Newton-lifting the simple ones, and
    subdividing the disk where the reduced derivative vanishes.  The number
    of zeros is bounded by the index of the dominant coefficient, which must
    lie strictly inside the truncation window.
    """
    p = f.p
    if f.shift < 0:
        for i in range(min(-f.shift, len(f.coeffs))):
            if not f.coeffs[i].is_zero():
                raise DomainError("zero finding needs a power series")
    coeffs = [f.coeff(k) for k in range(max(f.shift, 0), f.T)]
    if not coeffs:
        raise PrecisionError("empty series")
    base = max(f.shift, 0)
    vmin = min(c.valuation_floor() for c in coeffs)
    if vmin < 0:
        coeffs = [c.shift(-vmin) for c in coeffs]

    r = min_valuation
    # substitute t = p^r s and strip content
    vf = [c.valuation_floor() + r * (base + k) for k, c in enumerate(coeffs)]
    known = [c.N + r * (base + k) for k, c in enumerate(coeffs)]
    content = min(vf)
    prec_floor = min(n - content for n in known)
    if prec_floor <= 0:
        raise PrecisionError("series is indistinguishable from 0 at this precision")

    dominated = [k for k, c in enumerate(coeffs) if not c.is_zero() and vf[k] == content]
    if not dominated:
        raise PrecisionError("content is carried only by coefficients that are "
                             "zero at their claimed precision")
    dominant = base + max(dominated)
    if dominant >= f.T - 1:
        raise TruncationError("dominant coefficient at index %d needs T > %d"
                              % (dominant, dominant + 1))

    mod = p ** prec_floor
    g_int = [0] * base
    for k, c in enumerate(coeffs):
        if c.is_zero():
            g_int.append(0)
        else:
            g_int.append((c.u * p ** (c.v + r * (base + k) - content)) % mod)
    sols = _zeros_unit_disk(g_int, p, prec_floor,
                            max_depth if max_depth is not None else prec_floor)
    if len(sols) > dominant:
        raise TruncationError("found more zeros than the dominant-index bound")
    out = []
    for s_val, s_prec in sols:
        out.append(PadicNumber(p, r, s_val, r + s_prec))
    return out


def _zeros_unit_disk(g: list[int], p: int, prec: int,
                     depth: int) -> list[tuple[int, int]]:
    """Zeros s in Z_p of sum g_k s^k (ints mod p^prec), as (lift, precision)."""
    gbar = PrimeFieldPoly(p, [c % p for c in g])
    if gbar.is_zero():
        raise PrecisionError("reduction vanishes; raise precision")
    gbar_d = gbar.derivative()
    out = []
    for s0 in gbar.roots():
        if gbar_d(s0) != 0:
            out.append(_newton_lift(g, p, prec, s0))
        else:
            if depth <= 1:
                raise PrecisionError("cannot separate zeros at this precision")
            h = _shift_poly(g, s0, p ** prec)
            hs = [c * p ** min(k, prec) % p ** prec for k, c in enumerate(h)]
            c0 = min((vp_int(x, p) if x else prec) for x in hs)
            if c0 >= prec:
                raise PrecisionError("subdisk series vanishes at working precision")
            sub = [(x // p ** c0) % p ** (prec - c0) for x in hs]
            for u_val, u_prec in _zeros_unit_disk(sub, p, prec - c0, depth - 1):
                pr = min(prec, u_prec + 1)
                out.append(((s0 + p * u_val) % p ** pr, pr))
    return out


def _shift_poly(g: list[int], s0: int, mod: int) -> list[int]:
    """Coefficients of g(s0 + x) mod `mod` (synthetic Taylor shift)."""
    c = [x % mod for x in g]
    n = len(c)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            c[j] = (c[j] + s0 * c[j + 1]) % mod
    return c


def _newton_lift(g: list[int], p: int, prec: int, s0: int) -> tuple[int, int]:
    """Quadratically lift the simple residue root s0 to a root mod p^prec."""
    dg = [(i * c) for i, c in enumerate(g)][1:]
    s = s0
    k = 1
    while k < prec:
        k = min(2 * k, prec)
        mod = p ** k
        fs = _poly_eval_int(g, s, mod)
        dfs = _poly_eval_int(dg, s, mod)
        s = (s - fs * pow(dfs, -1, mod)) % mod
    return s % p ** prec, prec


def _poly_eval_int(g: list[int], x: int, mod: int) -> int:
    acc = 0
    for c in reversed(g):
        acc = (acc * x + c) % mod
    return acc
