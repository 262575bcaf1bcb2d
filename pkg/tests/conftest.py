import random

import pytest

from weakglobal.coleman import ColemanEngine
from weakglobal.curve import CurveModel, Point
from weakglobal.padic import padic, padic_sqrt

CURVES = {
    "378b3": CurveModel([1, -1, 0, -1062, 13590], "378b3"),
    "1122m2": CurveModel([1, 0, 0, -41608, -90515392], "1122m2"),
    "x3m891x4374": CurveModel([0, 0, 0, -891, 4374], "x3m891x4374"),
    "37a1": CurveModel([0, 0, 1, -1, 0], "37a1"),
    "x3-x": CurveModel([0, 0, 0, -1, 0], "x3-x"),
}

_ENGINE_CACHE = {}


@pytest.fixture(scope="session")
def engines():
    def get(label, p, prec=20):
        key = (label, p, prec)
        if key not in _ENGINE_CACHE:
            _ENGINE_CACHE[key] = ColemanEngine(CURVES[label], p, prec)
        return _ENGINE_CACHE[key]
    return get


def lift_point(curve, p, x0, prec=32, branch=0):
    """Point with integer x-coordinate, if the disk is rational; else None."""
    b = curve.bpoly_int(x0) % p
    if b == 0 or pow(b, (p - 1) // 2, p) != 1:
        return None
    s = padic_sqrt(padic(curve.bpoly_int(x0), p, prec + 2))
    if branch:
        s = -s
    y = (s - curve.a1 * x0 - curve.a3) / padic(2, p, prec)
    return Point(padic(x0, p, prec + 2), y)


def random_points(curve, p, n, rng=None, prec=32, x_range=(1, 500)):
    rng = rng or random.Random(20160908)
    out = []
    seen = set()
    while len(out) < n:
        x0 = rng.randrange(*x_range)
        branch = rng.randrange(2)
        if (x0, branch) in seen:
            continue
        seen.add((x0, branch))
        P = lift_point(curve, p, x0, prec, branch)
        if P is not None:
            out.append(P)
    return out
