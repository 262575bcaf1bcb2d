import random

import pytest

from weakglobal.padic import DomainError, PrecisionError, TruncationError, padic, zero
from weakglobal.series import DiskSeries, PrimeFieldPoly, series_zeros_in_disk


def series(p, coeffs, T=None, shift=0):
    return DiskSeries.from_coeffs(p, coeffs, T if T is not None else len(coeffs) + shift, shift)


def test_ring_ops_truncate_consistently():
    p = 7
    a = series(p, [1, 2, 3], T=3)
    b = series(p, [4, 5], T=2)
    assert (a * b).T == 2
    assert (a + b).T == 2
    c = a.truncate(2)
    assert c.T == 2
    with pytest.raises(TruncationError):
        c.truncate(3)


def test_integration_and_residue():
    p = 5
    s = series(p, [1, 2, 3], T=3)
    back = s.integrate().differentiate()
    for k in range(3):
        assert (back.coeff(k) - s.coeff(k)).is_zero()
    # integration divides by the exponent and honestly loses v_p(k)
    f = DiskSeries.from_coeffs(p, [0, 0, 0, 0, 1], 5)   # z^4 -> z^5/5
    g = f.integrate()
    assert g.coeff(5).valuation() == -1
    laurent = series(p, [3, 0, 1], T=2, shift=-1)
    with pytest.raises(DomainError):
        laurent.integrate()


def test_inverse_and_laurent_eval():
    p = 7
    s = series(p, [1, 2, 3, 4, 5], T=5)
    prod = s * s.inverse()
    assert (prod.coeff(0) - 1).is_zero()
    for k in range(1, 3):
        assert prod.coeff(k).is_zero()
    L = series(p, [1, 0, 2], T=2, shift=-1)   # 1/z + 2z
    v = L.evaluate(padic(7, p, 20))
    assert (v - (padic(1, p, 20) / 7 + 14)).is_zero()


def test_zeros_residue_enumeration_and_lift():
    # zeros of t^2 + t - 1 over Z_11: residues 3 and 7, then Newton
    p = 11
    f = series(p, [-1, 1, 1], T=12)
    zs = series_zeros_in_disk(f, min_valuation=0)
    assert sorted(z.residue() for z in zs) == [3, 7]
    for z in zs:
        assert (z * z + z - 1).is_zero()
    # oracle: direct quadratic lift
    for r in (3, 7):
        x = r
        for k in (2, 4, 8, 16, 20):
            m = p ** min(k, 20)
            x = (x - (x * x + x - 1) * pow(2 * x + 1, -1, m)) % m
        assert any((z - padic(x, p, 20)).is_zero() or
                   (z - padic(x, p, 20)).valuation() >= 18 for z in zs)


def test_zeros_trivial_and_unit_outside():
    assert len(series_zeros_in_disk(series(5, [0, 1], T=8), 1)) == 1
    assert series_zeros_in_disk(series(5, [1, 1], T=8), 1) == []


def test_zeros_subdisk_splitting():
    # (t-5)(t-10): both zeros share the residue 0 disk
    p = 5
    f = series(p, [50, -15, 1], T=9)
    zs = series_zeros_in_disk(f, 1)
    lifts = sorted(z.lift() % 125 for z in zs)
    assert lifts == [5, 10]


def test_zeros_scalar_invariance():
    p = 7
    rng = random.Random(4)
    f = series(p, [49, 0, 3, 1, 5], T=10)
    base = sorted(str(z) for z in series_zeros_in_disk(f, 1))
    for _ in range(5):
        u = padic(rng.randrange(1, 7 ** 5) * 7 ** 0 + (1 if rng.random() < 0 else 0), p, 24)
        if u.is_zero() or u.valuation() != 0:
            continue
        g = f.scale(u)
        assert sorted(str(z) for z in series_zeros_in_disk(g, 1)) == base


def test_zeros_precision_and_truncation_errors():
    p = 5
    dead = DiskSeries(p, 0, [zero(p, 3), zero(p, 3)], 2)
    with pytest.raises(PrecisionError):
        series_zeros_in_disk(dead, 1)
    # dominant index at the truncation edge
    f = DiskSeries.from_coeffs(p, [5, 1], 2)
    with pytest.raises(TruncationError):
        series_zeros_in_disk(f, 1)


def test_prime_field_poly():
    p = 7
    f = PrimeFieldPoly(p, [1, 0, 1])
    g = PrimeFieldPoly(p, [3, 1])
    q, r = (f * g).divmod(f)
    assert q == g and r.is_zero()
    assert PrimeFieldPoly(p, [6, 0, 1]).roots() == [1, 6]
    assert f.derivative().coeffs == [0, 2]
    h = PrimeFieldPoly(p, [1, 2, 3]).integrate()
    assert h.derivative() == PrimeFieldPoly(p, [1, 2, 3])
    with pytest.raises(DomainError):
        PrimeFieldPoly(p, [0] * (p - 1) + [1]).integrate()
