"""Weakly-global p-adic point sets for P^1 minus three points and punctured
elliptic curves, computed from p-adic dilogarithms and Coleman integrals."""

__version__ = "0.1.0"

from .padic import (  # noqa: F401
    DEFAULT_PRECISION,
    DomainError,
    PadicError,
    PadicNumber,
    PrecisionError,
    TruncationError,
    agrees_to,
    from_fraction,
    from_int,
    padic,
    padic_exp,
    padic_log,
    padic_sqrt,
    parse_padic,
    teichmuller,
    zero,
)
from .series import DiskSeries, PrimeFieldPoly, series_zeros_in_disk  # noqa: F401
