"""Frobenius matrix on the rank-2 cohomology of a good-reduction elliptic
curve, through the standard p-power lift on a short Weierstrass model.

The lift fixes X -> X^p and expands the Y-image by the binomial series; the
pulled-back basis differentials are reduced back to the span of
{dX/2Y, X dX/2Y} by the classical pole-order and degree ladders, with the
exact-differential corrections retained as evaluable (polynomial, Y-power)
pieces.  The ladder runs in integer arithmetic modulo p^n with one global
denominator exponent; the output precision is capped by the series
truncation bound and certified against the determinant and trace
constraints rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .curve import CurveModel, Point, count_points_fp
from .padic import (
    DomainError,
    PadicNumber,
    TruncationError,
    _ilog,
    from_fraction,
    padic,
    padic_sqrt,
    vp_int,
    zero,
)


class ShortModel:
    """Y^2 = X^3 + A X + B with X = 36 x + 3 b2, Y = 108 (2y + a1 x + a3).

    The substitution is invertible over Z_p for p >= 5; the basis form
    dX/2Y pulls back to one sixth of the invariant differential of the
    source model, and X dX/2Y to its x-multiple up to the same shear.
    """

    def __init__(self, curve: CurveModel, p: int):
        if p < 5:
            raise DomainError("short model needs p >= 5")
        if curve.disc % p == 0:
            raise DomainError("bad reduction at %d" % p)
        self.curve = curve
        self.p = p
        self.A = -27 * curve.c4
        self.B = -54 * curve.c6
        disc_short = -16 * (4 * self.A ** 3 + 27 * self.B ** 2)
        assert disc_short == 6 ** 12 * curve.disc
        self.is_identity = (curve.a1 == curve.a2 == curve.a3 == 0 and curve.b2 == 0)

    def q_at(self, X):
        return X ** 3 + self.A * X + self.B

    def to_short(self, P: Point):
        c = self.curve
        X = 36 * P.x + 3 * c.b2
        Y = 108 * (2 * P.y + c.a1 * P.x + c.a3)
        return X, Y

    def from_short(self, X: PadicNumber, Y: PadicNumber) -> Point:
        c = self.curve
        p = self.p
        x = (X - 3 * c.b2) / padic(36, p, X.N + 4)
        y = (Y / padic(108, p, Y.N + 6) - c.a1 * x - c.a3) / padic(2, p, Y.N + 4)
        return Point(x, y)


def short_model(curve: CurveModel, p: int) -> ShortModel:
    return ShortModel(curve, p)


@dataclass
class FrobeniusData:
    """Matrix column convention: phi^* omega_i = dh_i + sum_j M[j][i] omega_j
    on the basis omega_0 = dX/2Y, omega_1 = X dX/2Y."""
    p: int
    A: int
    B: int
    M: list
    h_pieces: list  # per basis index: list of (y_exponent, [PadicNumber coeffs])
    prec: int
    K: int
    n_int: int
    trunc_cap: int = 0
    h_pieces_raw: list | None = None  # full-internal-precision pieces

    def h_value(self, i: int, X: PadicNumber, Y: PadicNumber) -> PadicNumber:
        acc = zero(self.p, 10 ** 9)
        for e, coeffs in self.h_pieces[i]:
            v = zero(self.p, 10 ** 9)
            for c in reversed(coeffs):
                v = v * X + c
            acc = acc + v * Y ** e
        return acc

    def h_derivative_value(self, i: int, X: PadicNumber, Y: PadicNumber) -> PadicNumber:
        """dh_i/dX along the curve, using dY/dX = Q'(X)/2Y."""
        p = self.p
        qp = 3 * X * X + self.A
        acc = zero(p, 10 ** 9)
        for e, coeffs in self.h_pieces[i]:
            v = zero(p, 10 ** 9)
            dv = zero(p, 10 ** 9)
            for k in range(len(coeffs) - 1, 0, -1):
                dv = dv * X + coeffs[k] * k
            for c in reversed(coeffs):
                v = v * X + c
            acc = acc + dv * Y ** e
            acc = acc + v * Y ** (e - 2) * qp * e / padic(2, p, v.N + 4)
        return acc


# -- integer polynomial helpers (coefficients reduced mod p^n) -----------------


def _polmul_int(a: list[int], b: list[int], mod: int) -> list[int]:
    """Product of coefficient lists mod `mod`, via Kronecker substitution."""
    if not a or not b:
        return []
    nbits = 2 * (mod - 1).bit_length() + min(len(a), len(b)).bit_length() + 1
    nbytes = (nbits + 7) // 8
    width = 8 * nbytes
    pa = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in a), "little")
    pb = int.from_bytes(b"".join(c.to_bytes(nbytes, "little") for c in b), "little")
    prod = pa * pb
    out = []
    mask = (1 << width) - 1
    for _ in range(len(a) + len(b) - 1):
        out.append((prod & mask) % mod)
        prod >>= width
    return out


def _trim_int(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _binom_half_units(K: int, p: int, mod: int) -> list[int]:
    """(-1/2 choose k) = (-1)^k C(2k,k)/4^k for k <= K, mod `mod` (p-integral)."""
    out = []
    for k in range(K + 1):
        c = comb(2 * k, k) * pow(pow(4, k, mod), -1, mod) % mod
        out.append((-c) % mod if k % 2 else c)
    return out


class _IntQArith:
    """Splitting A = U*Q + V*Q' (deg V <= 2) in Z/p^n for one short model."""

    def __init__(self, p: int, A: int, B: int, mod: int):
        self.p = p
        self.mod = mod
        self.q = [B % mod, A % mod, 0, 1]
        self.qp = [A % mod, 0, 3]
        self.inv_qp = self._inverse_qp_mod_q()

    def _mod_q(self, a):
        rem = list(a)
        q0, q1 = self.q[0], self.q[1]
        mod = self.mod
        for i in range(len(rem) - 1, 2, -1):
            c = rem[i]
            if c:
                rem[i - 3] = (rem[i - 3] - c * q0) % mod
                rem[i - 2] = (rem[i - 2] - c * q1) % mod
            rem[i] = 0
        return _trim_int(rem[:3])

    def _inverse_qp_mod_q(self):
        # solve sum_j u_j x^j * Q' = 1 mod Q over Z/p^n (unit discriminant)
        mod, p = self.mod, self.p
        cols = []
        for j in range(3):
            prod = self._mod_q([0] * j + self.qp)
            prod += [0] * (3 - len(prod))
            cols.append(prod)
        mat = [[cols[j][i] for j in range(3)] for i in range(3)]
        rhs = [1, 0, 0]
        sol = _int_solve3(mat, rhs, mod, p)
        return _trim_int(sol)

    def split(self, a):
        """(U, V) with a = U*Q + V*Q' and deg V <= 2, all mod p^n."""
        mod = self.mod
        amod = self._mod_q(a)
        v = self._mod_q(_polmul_int(amod, self.inv_qp, mod)) if amod else []
        vqp = _polmul_int(v, self.qp, mod)
        n = max(len(a), len(vqp))
        num = [((a[i] if i < len(a) else 0) - (vqp[i] if i < len(vqp) else 0)) % mod
               for i in range(n)]
        # exact division by the monic cubic
        q0, q1 = self.q[0], self.q[1]
        rem = num
        n = len(rem)
        if n < 4:
            for x in rem:
                assert x == 0, "splitting remainder must vanish"
            return [], v
        quot = [0] * (n - 3)
        for i in range(n - 1, 2, -1):
            c = rem[i]
            quot[i - 3] = c
            if c:
                rem[i - 3] = (rem[i - 3] - c * q0) % mod
                rem[i - 2] = (rem[i - 2] - c * q1) % mod
        for x in rem[:3]:
            assert x == 0, "splitting remainder must vanish"
        return _trim_int(quot), v


def _int_solve3(mat, rhs, mod: int, p: int):
    """Solve a 3x3 system over Z/p^n with unit-pivot Gaussian elimination."""
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    n = 3
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] % p != 0:
                piv = r
                break
        if piv is None:
            raise DomainError("system is singular mod p")
        m[col], m[piv] = m[piv], m[col]
        inv = pow(m[col][col], -1, mod)
        m[col] = [x * inv % mod for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % mod for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


# -- the main construction -------------------------------------------------------


def frobenius_matrix(sm: ShortModel, prec: int,
                     fixed_k: int | None = None,
                     even_headroom: bool = False) -> FrobeniusData:
    """Frobenius data for the short model at the requested precision.

    The series truncation keeps K+1 binomial terms (term k carries p^(k+1));
    the claimed output precision is capped by the truncation bound and must
    reach `prec`, else a truncation error reports the failed bound.

    With even_headroom, the correction pieces are additionally stored at the
    deeper internal precision that the downstream reduction of even forms
    consumes through its factorial-sized intermediate denominators.
    """
    p = sm.p
    A, B = sm.A, sm.B
    K = fixed_k if fixed_k is not None else prec + _ilog(p, 2 * prec + 3) + 4
    # one global denominator exponent absorbs every division by p^e at the
    # p-divisible rungs; budget its exact worst case.
    m_max = (p * (2 * K + 1) - 1) // 2
    ladder_spend = sum(vp_int(2 * m - 1, p) for m in range(1, m_max + 1)
                       if (2 * m - 1) % p == 0)
    deg_spend = sum(vp_int(2 * s - 1, p) for s in range(2, 3 * p + 6)
                    if (2 * s - 1) % p == 0)
    extra = 0
    if even_headroom:
        extra = sum(vp_int(k, p) for k in range(1, 2 * m_max + 1) if k % p == 0) + 4
    n_int = prec + ladder_spend + deg_spend + extra \
        + 2 * _ilog(p, p * (2 * K + 3)) + 8
    mod = p ** n_int

    # D = Q(X^p) - Q(X)^p, all coefficients divisible by p
    qx = [B % mod, A % mod, 0, 1]
    qxp = [0] * (3 * p + 1)
    qxp[3 * p] = 1
    qxp[p] = A % mod
    qxp[0] = B % mod
    qpow = [1]
    for _ in range(p):
        qpow = _polmul_int(qpow, qx, mod)
    D = [(x - y) % mod for x, y in zip(qxp + [0] * max(0, len(qpow) - len(qxp)),
                                       qpow + [0] * max(0, len(qxp) - len(qpow)))]
    D = _trim_int(D)
    assert all(c % p == 0 for c in D), "Frobenius discrepancy must vanish mod p"

    cks = _binom_half_units(K, p, mod)
    inv2 = pow(2, -1, mod)
    dpow = [[1]]
    for k in range(1, K + 1):
        dpow.append(_polmul_int(dpow[-1], D, mod))

    qa = _IntQArith(p, A, B, mod)
    M = [[None, None], [None, None]]
    h_pieces = [[], []]
    for i in (0, 1):
        shift = p * (i + 1) - 1
        buckets: dict[int, list[int]] = {}
        for k in range(K + 1):
            m_k = (p * (2 * k + 1) - 1) // 2
            c = p * cks[k] * inv2 % mod
            buckets[m_k] = [0] * shift + [x * c % mod for x in dpow[k]]
        cur: list[int] = []
        sigma = 0
        pieces = []  # (y_exponent, int coeffs, scale)
        for m in range(m_max, 0, -1):
            if m in buckets:
                scale = pow(p, sigma, mod)
                add = [x * scale % mod for x in buckets[m]]
                if len(cur) < len(add):
                    cur.extend([0] * (len(add) - len(cur)))
                for idx, x in enumerate(add):
                    cur[idx] = (cur[idx] + x) % mod
            cur = _trim_int(cur)
            if not cur:
                continue
            u, v = qa.split(cur)
            den = 2 * m - 1
            e = vp_int(den, p) if den % p == 0 else 0
            den_unit_inv = pow(den // p ** e, -1, mod)
            if e:
                sigma += e
                pe = p ** e
                u = [x * pe % mod for x in u]
            vprime = [(j * v[j]) % mod for j in range(1, len(v))]
            two_dui = 2 * den_unit_inv % mod
            cur = [(x if x is not None else 0) for x in u]
            for j, x in enumerate(vprime):
                if j < len(cur):
                    cur[j] = (cur[j] + x * two_dui) % mod
                else:
                    cur.append(x * two_dui % mod)
            piece = _trim_int([(-x * two_dui) % mod for x in v])
            if piece:
                pieces.append((1 - 2 * m, piece, sigma))
        # degree ladder on cur * dX/Y
        cur = _trim_int(cur)
        while len(cur) > 2:
            s = len(cur) - 1
            top = cur.pop()
            den = 2 * s - 1
            e = vp_int(den, p) if den % p == 0 else 0
            den_unit_inv = pow(den // p ** e, -1, mod)
            if e:
                # the remaining coefficients move to the deeper scale; the
                # popped top already divides by den, so it stays unscaled
                sigma += e
                pe = p ** e
                cur = [x * pe % mod for x in cur]
            cur[s - 2] = (cur[s - 2] - top * (2 * s - 3) % mod * A % mod * den_unit_inv) % mod
            if s - 3 >= 0:
                cur[s - 3] = (cur[s - 3] - top * (2 * s - 4) % mod * B % mod * den_unit_inv) % mod
            pieces.append((1, [0] * (s - 2) + [top * 2 * den_unit_inv % mod], sigma))
            cur = _trim_int(cur)
        cur = cur + [0] * (2 - len(cur))
        M[0][i] = _unscale(cur[0] * 2 % mod, p, sigma, n_int)
        M[1][i] = _unscale(cur[1] * 2 % mod, p, sigma, n_int)
        h_pieces[i] = _merge_pieces(pieces, p, mod, n_int)

    # Dropping series terms beyond K leaves a mathematical error of order
    # p^(K+1) eroded by at most the classical reduction loss; cap every
    # claimed precision there, since modular tracking cannot see it.
    trunc_cap = K + 1 - (_ilog(p, p * (2 * K + 3)) + 1)
    raw = h_pieces
    M = [[e.cap(min(e.N, trunc_cap)) for e in row] for row in M]
    h_pieces = [[(e, [c.cap(min(c.N, max(trunc_cap, c.valuation_floor() + 1)))
                      for c in poly])
                 for e, poly in hp] for hp in raw]
    achieved = min(M[r][c].precision for r in (0, 1) for c in (0, 1))
    if achieved < prec:
        raise TruncationError(
            "achieved %d digits < requested %d; raise K above %d" % (achieved, prec, K))
    fd = FrobeniusData(p, A, B, M, h_pieces, achieved, K, n_int)
    fd.trunc_cap = trunc_cap
    fd.h_pieces_raw = raw if even_headroom else None
    _certify(fd, sm)
    return fd


def _unscale(x: int, p: int, sigma: int, n_int: int) -> PadicNumber:
    """PadicNumber for the true value x / p^sigma known mod p^(n_int - sigma)."""
    N = n_int - sigma
    if x == 0:
        return zero(p, N)
    v = vp_int(x, p)
    return PadicNumber(p, v - sigma, x // p ** v, N)


def _merge_pieces(pieces, p, mod, n_int):
    by_e: dict[int, dict[int, PadicNumber]] = {}
    out = []
    grouped: dict[int, list] = {}
    for e, poly, scale in pieces:
        grouped.setdefault(e, []).append((poly, scale))
    for e in sorted(grouped):
        polys = grouped[e]
        n = max(len(poly) for poly, _ in polys)
        acc = [zero(p, 10 ** 9)] * n
        for poly, scale in polys:
            for idx, x in enumerate(poly):
                if x:
                    acc[idx] = acc[idx] + _unscale(x, p, scale, n_int)
        while acc and acc[-1].is_zero() and acc[-1].N >= 10 ** 8:
            acc.pop()
        if acc:
            out.append((e, acc))
    return out


def _certify(fd: FrobeniusData, sm: ShortModel):
    """det = p and trace = a_p (from point counting) to the claimed digits."""
    det = fd.M[0][0] * fd.M[1][1] - fd.M[0][1] * fd.M[1][0]
    if not (det - fd.p).is_zero():
        raise TruncationError("determinant fails to equal p: %s" % det)
    tr = fd.M[0][0] + fd.M[1][1]
    _, ap = count_points_fp(sm.curve, fd.p)
    if not (tr - ap).is_zero():
        raise TruncationError("trace %s does not match the point count %d" % (tr, ap))


def frobenius_point_image(fd: FrobeniusData, X: PadicNumber, Y: PadicNumber):
    """Image of an affine point under the lift x -> x^p (away from the
    disks where Q vanishes)."""
    p = fd.p
    q_x = X ** 3 + fd.A * X + fd.B
    q_xp = X ** (3 * p) + fd.A * X ** p + fd.B
    s = q_xp / q_x ** p - 1
    if s.is_zero():
        root = padic(1, p, s.N)
    else:
        if s.v < 1:
            raise DomainError("point is outside the Frobenius lift domain")
        acc = padic(1, p, s.N + 2)
        term = padic(1, p, s.N + 2)
        half = from_fraction(Fraction(1, 2), p, s.N + 4)
        k = 0
        while True:
            k += 1
            term = term * s * (half - (k - 1)) / padic(k, p, s.N + vp_int(k, p) + 2)
            if term.is_zero() or term.v > s.N:
                break
            acc = acc + term
        root = acc
    return X ** p, Y ** p * root


# small PadicNumber-poly helpers shared with the integration layer


def _ppoly_trim(a):
    while a and a[-1].is_zero() and a[-1].N >= 10 ** 8:
        a.pop()
    return a


def _ppoly_add(a, b):
    n = max(len(a), len(b))
    out = []
    for i in range(n):
        if i < len(a) and i < len(b):
            out.append(a[i] + b[i])
        elif i < len(a):
            out.append(a[i])
        else:
            out.append(b[i])
    return out


def _ppoly_scale(a, c):
    return [x * c for x in a]


def _ppoly_mul_small(a, b):
    if not a or not b:
        return []
    p = a[0].p
    out = [zero(p, 10 ** 9) for _ in range(len(a) + len(b) - 1)]
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _ppoly_eval(a, x):
    acc = zero(x.p, 10 ** 9)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _solve_linear(mat, rhs):
    """Gaussian elimination over Q_p for small systems (pivot by valuation)."""
    n = len(rhs)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv, best = None, None
        for r in range(col, n):
            c = m[r][col]
            if not c.is_zero():
                if best is None or c.v < best:
                    piv, best = r, c.v
        if piv is None:
            raise DomainError("singular linear system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]
