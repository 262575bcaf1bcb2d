"""Capped-precision arithmetic in Q_p.

Every value knows the absolute precision it is good to, and arithmetic
propagates that honestly: a sum is claimed only modulo the smaller of the
two input moduli, a product only to the smaller relative precision.  All
mantissa work is arbitrary-precision integer arithmetic; nothing here
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction

DEFAULT_PRECISION = 20

# mixed arithmetic with exact Python literals claims at most this many digits
_COERCE_CAP = 2048


class PadicError(ArithmeticError):
    """Base class for errors raised by the p-adic layer."""


class DomainError(PadicError):
    """Input outside the mathematical domain of the operation."""


class PrecisionError(PadicError):
    """Not enough claimed digits to carry out the operation."""


class TruncationError(PadicError):
    """A series was truncated too early for the requested answer."""


def vp_int(n: int, p: int) -> int:
    """Valuation of a nonzero integer."""
    if n == 0:
        raise DomainError("valuation of integer 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _ilog(p: int, n: int) -> int:
    """floor(log_p(n)) for n >= 1."""
    k, q = 0, p
    while q <= n:
        q *= p
        k += 1
    return k


class PadicNumber:
    """An element of Q_p known modulo p^N.

    Nonzero values are stored as u * p^v with the unit mantissa u reduced
    modulo p^(N-v) and coprime to p.  The exact-zero state (u == 0) means
    "zero modulo p^N": a value whose valuation is at least N.
    """

    __slots__ = ("p", "v", "u", "N")

    def __init__(self, p: int, v: int, u: int, N: int):
        # Normalizing constructor; use the module helpers for literals.
        if u == 0:
            self.p, self.v, self.u, self.N = p, N, 0, N
            return
        if v >= N:
            self.p, self.v, self.u, self.N = p, N, 0, N
            return
        u %= p ** (N - v)
        if u == 0:
            self.p, self.v, self.u, self.N = p, N, 0, N
            return
        if u % p == 0:
            e = vp_int(u, p)
            v += e
            if v >= N:
                self.p, self.v, self.u, self.N = p, N, 0, N
                return
            u = (u // p ** e) % p ** (N - v)
        self.p, self.v, self.u, self.N = p, v, u, N

    # -- state ------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.u == 0

    def valuation(self) -> int:
        if self.u == 0:
            raise PrecisionError(
                "valuation undetermined: zero to precision O(%d^%d)" % (self.p, self.N))
        return self.v

    def valuation_floor(self) -> int:
        """Valuation for nonzero values, N for a zero known mod p^N."""
        return self.N if self.u == 0 else self.v

    @property
    def precision(self) -> int:
        return self.N

    def relative_precision(self) -> int:
        return 0 if self.u == 0 else self.N - self.v

    def is_unit(self) -> bool:
        return self.u != 0 and self.v == 0

    def is_integral(self) -> bool:
        return self.u == 0 or self.v >= 0

    # -- conversions --------------------------------------------------------

    def lift(self) -> int:
        """Integer representative u*p^v; requires v >= 0."""
        if self.u == 0:
            return 0
        if self.v < 0:
            raise DomainError("cannot lift: negative valuation")
        return self.u * self.p ** self.v

    def centered_lift(self) -> int:
        """Representative in (-p^N/2, p^N/2]; requires v >= 0."""
        n = self.lift()
        mod = self.p ** self.N
        if 2 * n > mod:
            n -= mod
        return n

    def residue(self) -> int:
        """Image in Z/p; requires integrality and at least one digit."""
        if self.u == 0:
            if self.N < 1:
                raise PrecisionError("no digits claimed")
            return 0
        if self.v < 0:
            raise DomainError("not integral")
        if self.N < 1:
            raise PrecisionError("no digits claimed")
        return (self.u * self.p ** self.v) % self.p

    def unit_mantissa(self) -> int:
        if self.u == 0:
            raise PrecisionError("zero to claimed precision has no unit part")
        return self.u

    def cap(self, N: int) -> "PadicNumber":
        """The same value claimed only modulo p^N (N at most current)."""
        if N > self.N:
            raise PrecisionError("cannot raise claimed precision from %d to %d" % (self.N, N))
        return PadicNumber(self.p, self.v, self.u, N)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise DomainError("mixed primes %d and %d" % (self.p, other.p))
            return other
        # Exact literals are materialized at (capped) precision; the cap only
        # bites against structural-zero sentinels, where nothing real is lost.
        if isinstance(other, int):
            need = max(self.N - min(0, self.v), self.N, 1)
            return from_int(other, self.p, min(need, _COERCE_CAP))
        if isinstance(other, Fraction):
            need = max(self.N - min(0, self.v), self.N, 1)
            return from_fraction(other, self.p, min(need, _COERCE_CAP))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.u == 0:
            return PadicNumber(o.p, o.v, o.u, min(self.N, o.N))
        if o.u == 0:
            return PadicNumber(self.p, self.v, self.u, min(self.N, o.N))
        v = min(self.v, o.v)
        N = min(self.N, o.N)
        u = self.u * self.p ** (self.v - v) + o.u * self.p ** (o.v - v)
        return PadicNumber(self.p, v, u, N)

    __radd__ = __add__

    def __neg__(self):
        if self.u == 0:
            return self
        return PadicNumber(self.p, self.v, self.p ** (self.N - self.v) - self.u, self.N)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.u == 0 or o.u == 0:
            # v(xy) >= N_zero + v_other; relative precision of a zero is 0.
            n1 = self.N if self.u == 0 else self.v
            n2 = o.N if o.u == 0 else o.v
            return PadicNumber(self.p, n1 + n2, 0, n1 + n2)
        r = min(self.N - self.v, o.N - o.v)
        v = self.v + o.v
        u = (self.u * o.u) % self.p ** r
        return PadicNumber(self.p, v, u, v + r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.u == 0:
            raise DomainError("division by zero (to claimed precision O(%d^%d))" % (o.p, o.N))
        if self.u == 0:
            return PadicNumber(self.p, self.N - o.v, 0, self.N - o.v)
        r = min(self.N - self.v, o.N - o.v)
        v = self.v - o.v
        u = (self.u * pow(o.u, -1, self.p ** r)) % self.p ** r
        return PadicNumber(self.p, v, u, v + r)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k == 0:
            return one(self.p, min(self.relative_precision() or self.N, _COERCE_CAP))
        if k < 0:
            return one(self.p, min(self.relative_precision() or self.N,
                                   _COERCE_CAP)) / self ** (-k)
        if self.u == 0:
            return PadicNumber(self.p, self.N * k, 0, self.N * k)
        r = self.N - self.v
        return PadicNumber(self.p, self.v * k, pow(self.u, k, self.p ** r), self.v * k + r)

    def shift(self, k: int) -> "PadicNumber":
        """Multiply by p^k exactly (precision shifts along)."""
        return PadicNumber(self.p, self.v + k, self.u, self.N + k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    __hash__ = None  # equality is precision-dependent; not a dict key

    # -- text form ------------------------------------------------------------

    def __str__(self):
        if self.u == 0:
            return "O(%d^%d)" % (self.p, self.N)
        return "%d*%d^%d + O(%d^%d)" % (self.u, self.p, self.v, self.p, self.N)

    def __repr__(self):
        return self.__str__()


def from_int(a: int, p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    if a == 0:
        return PadicNumber(p, prec, 0, prec)
    v = vp_int(a, p)
    return PadicNumber(p, v, a // p ** v, v + prec)


def from_fraction(q: Fraction, p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    q = Fraction(q)
    if q == 0:
        return PadicNumber(p, prec, 0, prec)
    num, den = q.numerator, q.denominator
    v = vp_int(num, p) - vp_int(den, p)
    num //= p ** max(0, vp_int(num, p))
    den //= p ** max(0, vp_int(den, p))
    u = (num * pow(den, -1, p ** prec)) % p ** prec
    return PadicNumber(p, v, u, v + prec)


def padic(value, p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    """Make a PadicNumber from an int, Fraction, or PadicNumber."""
    if isinstance(value, PadicNumber):
        if value.p != p:
            raise DomainError("prime mismatch")
        return value
    if isinstance(value, int):
        return from_int(value, p, prec)
    if isinstance(value, Fraction):
        return from_fraction(value, p, prec)
    raise TypeError("cannot make a p-adic number from %r" % type(value))


def zero(p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    return PadicNumber(p, prec, 0, prec)


def one(p: int, prec: int = DEFAULT_PRECISION) -> PadicNumber:
    return PadicNumber(p, 0, 1, prec)


def parse_padic(text: str, p: int | None = None) -> PadicNumber:
    """Parse the canonical text form "u*p^v + O(p^N)" (or "O(p^N)")."""
    s = text.replace(" ", "")
    try:
        if s.startswith("O("):
            body = s[2:].rstrip(")")
            pp, nn = body.split("^")
            pz, N = int(pp), int(nn)
            if p is not None and pz != p:
                raise ValueError
            return zero(pz, N)
        mant, big_o = s.split("+O(")
        big_o = big_o.rstrip(")")
        pp, nn = big_o.split("^")
        pz, N = int(pp), int(nn)
        if p is not None and pz != p:
            raise ValueError
        um, pv = mant.split("*")
        base, vv = pv.split("^")
        if int(base) != pz:
            raise ValueError
        return PadicNumber(pz, int(vv), int(um), N)
    except (ValueError, IndexError):
        raise ValueError("not a canonical p-adic literal: %r" % text) from None


def agrees_to(x: PadicNumber, y: PadicNumber, digits: int) -> bool:
    """True when v_p(x - y) >= digits (at the claimed precisions)."""
    d = x - y
    return d.is_zero() or d.v >= digits


# -- transcendental maps ------------------------------------------------------


def padic_log(x: PadicNumber) -> PadicNumber:
    """Logarithm with the branch log(p) = 0.

    The p-power part and the Teichmuller part of x are discarded (both have
    log 0); the surviving one-unit is handled by the alternating series
    applied to x^(p-1), so log(x) = log(x^(p-1)) / (p-1).
    """
    if x.is_zero():
        raise DomainError("log of zero (to claimed precision)")
    p = x.p
    r = x.N - x.v  # achievable absolute precision of the result
    if r < 1:
        raise PrecisionError("log needs at least one significant digit")
    g = _ilog(p, 2 * r + p) + 2
    big = p ** (r + g)
    w = pow(x.u % big, p - 1, big)  # one-unit
    t = (w - 1) % big
    acc = _log_one_unit(t, p, r, g)
    acc = (acc * pow(p - 1, -1, big)) % big
    return PadicNumber(p, 0, acc, r)


def _log_one_unit(t: int, p: int, r: int, g: int) -> int:
    """Sum of the alternating series for log(1+t) mod p^r, t a multiple of p."""
    if t == 0:
        return 0
    big = p ** (r + g)
    m = vp_int(t, p)
    acc = 0
    tk = 1
    k = 1
    while (k - 1) * m - _ilog(p, max(k - 1, 1)) <= r:
        tk = (tk * t) % big
        e = vp_int(k, p) if k % p == 0 else 0
        term = (tk // p ** e) * pow(k // p ** e, -1, big) % big
        acc = (acc - term if k % 2 == 0 else acc + term) % big
        k += 1
    return acc % p ** r


def padic_exp(x: PadicNumber) -> PadicNumber:
    """Exponential of x; requires v(x) >= 1 (p odd)."""
    p = x.p
    if x.is_zero():
        if x.N < 1:
            raise PrecisionError("exp needs at least one digit")
        return one(p, x.N)
    if x.v < 1:
        raise DomainError("exp diverges: v(x) = %d < 1" % x.v)
    N = x.N
    g = _ilog(p, 2 * N + p) + 3
    big = p ** (N + g)
    xi = (x.u * p ** x.v) % big
    acc = 1
    term_num = 1          # x^k as integer mod big
    fact_val = 0          # v_p(k!)
    fact_unit = 1         # unit part of k! mod big
    k = 1
    while True:
        gain = k * x.v - fact_val  # valuation bound before dividing by k
        if gain - _ilog(p, max(k, 1)) > N:
            break
        term_num = (term_num * xi) % big
        e = vp_int(k, p) if k % p == 0 else 0
        fact_val += e
        fact_unit = (fact_unit * (k // p ** e)) % big
        term = (term_num // p ** fact_val) * pow(fact_unit, -1, big) % big
        acc = (acc + term) % big
        k += 1
    return PadicNumber(p, 0, acc % p ** N, N)


def teichmuller(a: PadicNumber) -> PadicNumber:
    """The (p-1)-st root of unity congruent to the unit a mod p."""
    if a.is_zero() or a.v != 0:
        raise DomainError("Teichmuller lift needs a unit")
    p, N = a.p, a.N
    big = p ** N
    w = a.u % big
    for _ in range(N):
        w2 = pow(w, p, big)
        if w2 == w:
            break
        w = w2
    return PadicNumber(p, 0, w, N)


def sqrt_mod_prime(a: int, p: int) -> int:
    """A square root of a modulo an odd prime p (Tonelli-Shanks)."""
    a %= p
    if a == 0:
        return 0
    if pow(a, (p - 1) // 2, p) != 1:
        raise DomainError("%d is not a square mod %d" % (a, p))
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = (t2 * t2) % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, (b * b) % p
        t = (t * c) % p
        r = (r * b) % p
    return r


def padic_sqrt(x: PadicNumber, residue_hint: int | None = None) -> PadicNumber:
    """A square root of x in Q_p (p odd); v(x) must be even.

    residue_hint selects the branch whose reduction mod p matches it.
    """
    if x.is_zero():
        raise DomainError("sqrt of zero at finite precision is ambiguous")
    p = x.p
    if x.v % 2 != 0:
        raise DomainError("odd valuation: no square root in Q_p")
    r = x.N - x.v
    big = p ** r
    r0 = sqrt_mod_prime(x.u % p, p)
    if residue_hint is not None and r0 != residue_hint % p:
        r0 = p - r0
        if r0 != residue_hint % p:
            raise DomainError("residue hint %d is not a branch" % residue_hint)
    # Newton iteration y <- (y + u/y)/2
    y = r0
    inv2 = pow(2, -1, big)
    k = 1
    while k < r:
        k = min(2 * k, r)
        mod = p ** k
        y = (y + x.u * pow(y, -1, mod)) % mod * inv2 % mod
    return PadicNumber(p, x.v // 2, y, x.v // 2 + r)
