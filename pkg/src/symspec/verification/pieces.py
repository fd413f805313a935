"""Leading-order bulk/edge forms of the building blocks of the exact laws.

Test-only surface: each asymptotic form is paired with the exact quantity it
approximates so the two can be compared in log-space.  Coordinates:

* BULK: ``coord`` is ``p = x/N`` in [0, 1) (``x = N r**2/2``);
* EDGE: ``coord`` is ``s``, with ``p = 1 + s/sqrt(N)``.

P0 takes the overlap scale as ``coord`` (``tau`` in the bulk, ``sigma`` at
the edge).  EXP_FACTOR needs both: the position as ``coord`` and the overlap
scale as ``scale``.
"""

from __future__ import annotations

import enum
import math

from ..laws_exact import _ln_p0, ln_upper_gamma_int
from ..specfun import DomainError, ln_gamma, ln_reg_gamma_lower

__all__ = ["Piece", "Regime", "asymptotic_piece", "exact_piece"]

_LN_SQRT_PI_2 = 0.5 * math.log(0.5 * math.pi)


class Piece(enum.Enum):
    K = "k"
    GAMMA_LOWER = "gamma_lower"
    GAMMA_UPPER = "gamma_upper"
    P0 = "p0"
    EXP_FACTOR = "exp_factor"


class Regime(enum.Enum):
    BULK = "bulk"
    EDGE = "edge"


def _position(regime: Regime, n: int, coord: float) -> float:
    if regime is Regime.BULK:
        if not 0 <= coord < 1:
            raise DomainError(f"bulk coordinate p must lie in [0, 1), got {coord}")
        return coord
    p = 1.0 + coord / math.sqrt(n)
    if p <= 0:
        raise DomainError("edge coordinate places x below zero")
    return p


def _lerfc(x: float) -> float:
    from ..specfun import log_erfc

    return float(log_erfc(x))


def _check(n: int, kind: Piece, scale) -> None:
    if n < 2:
        raise DomainError("n must be >= 2")
    if kind is Piece.EXP_FACTOR and (scale is None or not scale > 0):
        raise DomainError("EXP_FACTOR needs a positive overlap scale")


def asymptotic_piece(kind, regime, n: int, coord: float, scale: float | None = None) -> float:
    """Log of the leading-order form of the tagged piece.

    K            k(Np) / N**(N/2)
    GAMMA_LOWER  gamma((N+3)/2, Np/2) / (N/2)**((N+1)/2)
    GAMMA_UPPER  Gamma(N, Np) / Gamma(N)
    P0           P_0(N tau) or P_0(sqrt(N) sigma)
    EXP_FACTOR   exp(x y / 2) with x = Np and y = 1/(1+t)
    """
    kind, regime = Piece(kind), Regime(regime)
    _check(n, kind, scale)
    rn = math.sqrt(n)
    if kind is Piece.P0:
        if not coord > 0:
            raise DomainError("overlap scale must be > 0")
        if regime is Regime.BULK:
            tau = coord
            return -math.log(4.0 * n) - 3.0 * math.log(tau) - 0.5 / tau
        sig = coord
        return math.log(rn / 4.0) - 3.0 * math.log(sig) - 0.5 * rn / sig + 0.25 / sig**2
    p = _position(regime, n, coord)
    if regime is Regime.BULK:
        if kind is Piece.K:
            return 0.5 * n * math.log(p) - 0.5 * n * p if p > 0 else -math.inf
        if kind is Piece.GAMMA_LOWER:
            if p == 0:
                return -math.inf
            return 0.5 * (n + 3) * math.log(p) - 0.5 * n * p - math.log1p(-p)
        if kind is Piece.GAMMA_UPPER:
            return 0.0
        return 0.5 * p / scale
    s = coord
    if kind is Piece.K:
        return -0.5 * n - 0.25 * s * s
    if kind is Piece.GAMMA_LOWER:
        # leading form carries sqrt(N/2) relative to the bare erfc expression
        return 0.5 * math.log(0.5 * n) - 0.5 * n + _LN_SQRT_PI_2 + _lerfc(-0.5 * s)
    if kind is Piece.GAMMA_UPPER:
        return math.log(0.5) + _lerfc(s / math.sqrt(2.0))
    sig = scale
    return 0.5 * rn / sig + 0.5 * s / sig - 0.5 / sig**2


def exact_piece(kind, regime, n: int, coord: float, scale: float | None = None) -> float:
    """Log of the exact finite-N quantity that ``asymptotic_piece`` approximates."""
    kind, regime = Piece(kind), Regime(regime)
    _check(n, kind, scale)
    rn = math.sqrt(n)
    if kind is Piece.P0:
        if not coord > 0:
            raise DomainError("overlap scale must be > 0")
        t = n * coord if regime is Regime.BULK else rn * coord
        return float(_ln_p0(n, t))
    p = _position(regime, n, coord)
    x = n * p
    if kind is Piece.K:
        return 0.5 * n * math.log(p) - 0.5 * x if p > 0 else -math.inf
    if kind is Piece.GAMMA_LOWER:
        a = 0.5 * (n + 3)
        if x == 0:
            return -math.inf
        return float(ln_gamma(a)) + ln_reg_gamma_lower(a, 0.5 * x) - 0.5 * (n + 1) * math.log(0.5 * n)
    if kind is Piece.GAMMA_UPPER:
        return ln_upper_gamma_int(n, x) - math.lgamma(n)
    t = n * scale if regime is Regime.BULK else rn * scale
    return 0.5 * x / (1.0 + t)
