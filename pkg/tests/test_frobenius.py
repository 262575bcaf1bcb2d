import time

import pytest

from conftest import CURVES
from weakglobal.curve import count_points_fp
from weakglobal.frobenius import (
    DomainError,
    frobenius_matrix,
    frobenius_point_image,
    short_model,
)
from weakglobal.padic import padic, padic_sqrt, teichmuller

FIXTURES = ("378b3", "1122m2", "x3m891x4374", "37a1")


def test_short_model_identity_case():
    sm = short_model(CURVES["x3m891x4374"], 5)
    assert sm.A == -27 * CURVES["x3m891x4374"].c4
    assert sm.B == -54 * CURVES["x3m891x4374"].c6
    assert sm.is_identity
    assert not short_model(CURVES["378b3"], 5).is_identity
    with pytest.raises(DomainError):
        short_model(CURVES["378b3"], 3)


def test_short_model_unit_discriminant():
    sm = short_model(CURVES["1122m2"], 5)
    disc_short = -16 * (4 * sm.A ** 3 + 27 * sm.B ** 2)
    assert disc_short % 5 != 0


def test_short_model_point_transport():
    c = CURVES["378b3"]
    sm = short_model(c, 5)
    from conftest import lift_point
    P = lift_point(c, 5, 2)
    X, Y = sm.to_short(P)
    assert (Y * Y - (X ** 3 + sm.A * X + sm.B)).is_zero()
    back = sm.from_short(X, Y)
    assert (back.x - P.x).is_zero() and (back.y - P.y).is_zero()


def test_trace_and_det_oracle_all_fixtures():
    # the module's acceptance oracle: det = p and trace = a_p everywhere
    for label in FIXTURES:
        c = CURVES[label]
        for p in (5, 7, 11, 13):
            if c.disc % p == 0:
                continue
            fd = frobenius_matrix(short_model(c, p), 12)
            det = fd.M[0][0] * fd.M[1][1] - fd.M[0][1] * fd.M[1][0]
            tr = fd.M[0][0] + fd.M[1][1]
            _, ap = count_points_fp(c, p)
            assert (det - p).is_zero()
            assert (tr - ap).is_zero()
            assert fd.prec >= 12


def test_runtime_budget():
    worst = 0.0
    for label in FIXTURES:
        c = CURVES[label]
        for p in (5, 7, 11, 13):
            if c.disc % p == 0:
                continue
            t0 = time.time()
            frobenius_matrix(short_model(c, p), 20)
            worst = max(worst, time.time() - t0)
    assert worst < 5.0, "worst construction took %.2fs" % worst


def test_precision_doubling_stability():
    c = CURVES["378b3"]
    sm = short_model(c, 5)
    lo = frobenius_matrix(sm, 10)
    hi = frobenius_matrix(sm, 22)
    for i in (0, 1):
        for j in (0, 1):
            assert (hi.M[i][j].cap(lo.M[i][j].precision) - lo.M[i][j]).is_zero()


def test_equivariance_spot_check():
    # phi^* omega_i evaluated at a fixed point matches dh_i + sum_j M[j][i] omega_j
    for label, p in (("x3m891x4374", 7), ("378b3", 5), ("37a1", 11)):
        c = CURVES[label]
        fd = frobenius_matrix(short_model(c, p), 18)
        checked = 0
        for x0 in range(2, p):
            X = teichmuller(padic(x0, p, 22))
            q = X ** 3 + fd.A * X + fd.B
            if q.is_zero() or q.valuation() != 0:
                continue
            try:
                Y = padic_sqrt(q)
            except DomainError:
                continue
            Xp, Yp = frobenius_point_image(fd, X, Y)
            assert (Xp - X).is_zero()
            assert (Yp - Y).is_zero() or (Yp + Y).is_zero()
            for i in (0, 1):
                lhs = X ** (p * (i + 1) - 1) * p / (2 * Yp)
                rhs = fd.h_derivative_value(i, X, Y) \
                    + (fd.M[0][i] + fd.M[1][i] * X) / (2 * Y)
                d = lhs - rhs
                assert d.is_zero() or d.valuation() >= 15
            checked += 1
            if checked >= 2:
                break
        assert checked
