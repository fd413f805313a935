"""Large-N limit laws near the spectral edge and inside the bulk.

Coordinates: ``s = sqrt(N) (r**2/2 - 1)`` locates a point relative to the
edge at ``r = sqrt(2)``; inside the bulk the nonorthogonality scales as
``t = N tau`` and at the edge as ``t = sqrt(N) sigma``.

Three symmetry classes are covered: complex symmetric matrices (AI dagger)
and, for comparison, complex Ginibre (GIN2) and the real eigenvalues of real
Ginibre (GIN1).  Every Gaussian factor ``exp(+-s**2/c)`` that multiplies an
``erfc`` is absorbed into ``erfcx`` so nothing overflows for |s| in the
hundreds; the laws themselves are assembled as logarithms.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from .specfun import DomainError, erfc, erfcx, log_erfc

__all__ = [
    "EnsembleTag",
    "edge_profile",
    "ln_edge_profile",
    "density_large_n",
    "mean_tau",
    "bulk_overlap_law",
    "edge_overlap_law",
    "refined_edge_factor",
    "edge_coordinate",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_PI_2 = math.sqrt(0.5 * math.pi)
_LN_2SQRT2 = math.log(2.0 * _SQRT2)


class EnsembleTag(enum.Enum):
    AI_DAGGER = "ai"
    GINIBRE_REAL = "gin1"
    GINIBRE_COMPLEX = "gin2"


def edge_coordinate(n: int, r):
    """s = sqrt(N) (r**2/2 - 1)."""
    return math.sqrt(n) * (0.5 * np.asarray(r, dtype=float) ** 2 - 1.0)


def _lerfc(x: float) -> float:
    return float(log_erfc(x))


def _erfcx(x: float) -> float:
    return float(erfcx(x))


def _ln_gauss_erfc_neg(s: float, c: float) -> float:
    """ln[erfc(-s/2) exp(-s**2/c)] without overflow or underflow to zero."""
    if s < 0:
        u = -0.5 * s
        return math.log(_erfcx(u)) - u * u - s * s / c
    return _lerfc(-0.5 * s) - s * s / c


# ---------------------------------------------------------------------------
# edge profiles
# ---------------------------------------------------------------------------


def _ln_theta_ai(s: float) -> float:
    # 1/4 erfc(s/sqrt2) + 1/(2 sqrt2) erfc(-s/2) e^{-s^2/4} [1 - sqrt(pi/2) s/2 erfcx(s/sqrt2)]
    first = math.log(0.25) + _lerfc(s / _SQRT2)
    if s >= 0:
        bracket = 1.0 - _SQRT_PI_2 * 0.5 * s * _erfcx(s / _SQRT2)
        second = -_LN_2SQRT2 + _ln_gauss_erfc_neg(s, 4.0) + math.log(bracket)
    else:
        # both pieces positive once erfc(|s|/2) is written as erfcx
        u = -0.5 * s
        ex = _erfcx(u)
        a = math.log(ex) - 0.5 * s * s
        b = math.log(_SQRT_PI_2 * u * ex) + _lerfc(s / _SQRT2) if u > 0 else -math.inf
        second = -_LN_2SQRT2 + float(np.logaddexp(a, b))
    return float(np.logaddexp(first, second))


def _ln_theta_gin2(s: float) -> float:
    return math.log(0.5) + _lerfc(s / _SQRT2)


def _ln_theta_gin1(s: float) -> float:
    # 1/2 [erfc(s/sqrt2) + (1 + erf(s/2)) e^{-s^2/4} / sqrt2]
    first = _lerfc(s / _SQRT2)
    second = _ln_gauss_erfc_neg(s, 4.0) - 0.5 * math.log(2.0)
    return math.log(0.5) + float(np.logaddexp(first, second))


_THETA = {
    EnsembleTag.AI_DAGGER: _ln_theta_ai,
    EnsembleTag.GINIBRE_REAL: _ln_theta_gin1,
    EnsembleTag.GINIBRE_COMPLEX: _ln_theta_gin2,
}


def _tag(tag) -> EnsembleTag:
    return tag if isinstance(tag, EnsembleTag) else EnsembleTag(tag)


def ln_edge_profile(tag, s):
    fn = _THETA[_tag(tag)]
    if np.ndim(s) == 0:
        return fn(float(s))
    return np.vectorize(fn, otypes=[float])(s)


def edge_profile(tag, s):
    """Edge profile Theta(s), decreasing from 1 (s -> -inf) to 0 (s -> +inf).

    AI_DAGGER: Theta(0) = 1/4 + 1/(2 sqrt 2).  GINIBRE_COMPLEX: erfc(s/sqrt2)/2.
    GINIBRE_REAL refers to the density of real eigenvalues and uses the
    ``1 + erf(s/2)`` weight, which makes it monotone with Theta(0) =
    1/2 + 1/(2 sqrt 2).
    """
    return np.exp(ln_edge_profile(tag, s))


def density_large_n(n: int, r):
    """Large-N radial density r * Theta_AI(sqrt(N)(r**2/2 - 1)).

    Its total mass exceeds one by about 0.1/sqrt(N); renormalize before using
    it as a distribution.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise DomainError("radius must be >= 0")
    out = r_arr * edge_profile(EnsembleTag.AI_DAGGER, edge_coordinate(n, r_arr))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# bulk law
# ---------------------------------------------------------------------------


def mean_tau(r: float) -> float:
    """<tau> = (1 - r**2/2) / 2, positive strictly inside the support."""
    if not 0 <= r < _SQRT2:
        raise DomainError(f"bulk law needs 0 <= r < sqrt(2), got r={r}")
    return 0.5 * (1.0 - 0.5 * r * r)


def bulk_overlap_law(r: float, tau):
    """Limit density of tau = t/N: <tau>**2 / tau**3 * exp(-<tau>/tau).

    An inverse-gamma law with shape 2 and scale <tau>, so its mean is <tau>
    and its mode <tau>/3.
    """
    m = mean_tau(r)
    tau_arr = np.asarray(tau, dtype=float)
    if np.any(~(tau_arr > 0)):
        raise DomainError("tau must be > 0")
    out = np.exp(2.0 * math.log(m) - 3.0 * np.log(tau_arr) - m / tau_arr)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# edge overlap laws
# ---------------------------------------------------------------------------


def refined_edge_factor(n: int, s: float, sigma: float, log: bool = False):
    """exp(x y / 2) at x = N + s sqrt(N), y = 1/(1 + sqrt(N) sigma), exactly.

    Written as exp[(sqrt(N) + (s - 1/sigma)/(1 + 1/(sqrt(N) sigma))) / (2 sigma)],
    whose leading terms are sqrt(N)/(2 sigma) + s/(2 sigma) - 1/(2 sigma**2).
    With ``log=True`` the exponent is returned instead.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if not sigma > 0:
        raise DomainError("sigma must be > 0")
    rn = math.sqrt(n)
    expo = (rn + (s - 1.0 / sigma) / (1.0 + 1.0 / (rn * sigma))) / (2.0 * sigma)
    return expo if log else math.exp(expo)


def _ln_bracket_ai(s: float, sigma: float) -> float:
    # sqrt(2/pi)(1/sigma - s) e^{-s^2/2} + (1 - s/sigma + s^2) erfc(s/sqrt2)
    c = 1.0 - s / sigma + s * s
    if s > 0:
        b = math.sqrt(2.0 / math.pi) * (1.0 / sigma - s) + c * _erfcx(s / _SQRT2)
        return math.log(b) - 0.5 * s * s if b > 0 else -math.inf
    a = math.log(math.sqrt(2.0 / math.pi) * (1.0 / sigma - s)) - 0.5 * s * s
    return float(np.logaddexp(a, math.log(c) + _lerfc(s / _SQRT2)))


def _ln_law_ai(s: float, sigma: float, refine_n: int | None) -> float:
    if refine_n is None:
        expo = -0.25 / sigma**2 + 0.5 * s / sigma
    else:
        rn = math.sqrt(refine_n)
        expo = refined_edge_factor(refine_n, s, sigma, log=True) - 0.5 * rn / sigma + 0.25 / sigma**2
    return expo - math.log(8.0) - _ln_theta_ai(s) - 3.0 * math.log(sigma) + _ln_bracket_ai(s, sigma)


def _ln_law_gin1(s: float, sigma: float) -> float:
    # e^{-1/(4 sig^2) + s/(2 sig)} / (2 Theta_1 sig^2) [e^{-s^2/2}/sqrt(2pi) + (1 - s sig)/(2 sig) erfc(s/sqrt2)]
    lead = -0.25 / sigma**2 + 0.5 * s / sigma - math.log(2.0) - _ln_theta_gin1(s) - 2.0 * math.log(sigma)
    w = (1.0 - s * sigma) / (2.0 * sigma)
    g = 1.0 / math.sqrt(2.0 * math.pi)
    if s > 0:
        b = g + w * _erfcx(s / _SQRT2)
        return lead + (math.log(b) - 0.5 * s * s if b > 0 else -math.inf)
    # s <= 0 makes w > 0
    return lead + float(np.logaddexp(math.log(g) - 0.5 * s * s, math.log(w) + _lerfc(s / _SQRT2)))


def _ln_law_gin2(s: float, sigma: float) -> float:
    lead = -0.5 / sigma**2 + s / sigma - math.log(2.0) - _ln_theta_gin2(s) - 3.0 * math.log(sigma)
    c1 = 2.0 + s / sigma - 1.0 / sigma**2
    c2 = 3.0 * s - (1.0 - s * s) / sigma - s / sigma**2
    c3 = 0.5 * ((s - 1.0 / sigma) ** 2 - 1.0)
    if s > 0:
        # factor e^{-s^2} out of every term
        ex = _erfcx(s / _SQRT2)
        b = c1 / math.pi - c2 * ex / math.sqrt(2.0 * math.pi) + c3 * ex * ex
        return lead + (math.log(b) - s * s if b > 0 else -math.inf)
    e = float(erfc(s / _SQRT2))
    b = c1 * math.exp(-s * s) / math.pi - c2 * math.exp(-0.5 * s * s) * e / math.sqrt(2.0 * math.pi) + c3 * e * e
    return lead + (math.log(b) if b > 0 else -math.inf)


def _ln_edge_law(tag: EnsembleTag, s: float, sigma: float, refine_n: int | None) -> float:
    if tag is EnsembleTag.AI_DAGGER:
        return _ln_law_ai(s, sigma, refine_n)
    if refine_n is not None:
        raise ValueError("refined edge factor applies to AI_DAGGER only")
    if tag is EnsembleTag.GINIBRE_REAL:
        return _ln_law_gin1(s, sigma)
    return _ln_law_gin2(s, sigma)


def edge_overlap_law(tag, s: float, sigma, refine_n: int | None = None, log: bool = False):
    """Limit density of sigma = t/sqrt(N) at edge position s.

    For AI_DAGGER, ``refine_n`` swaps the leading-order exp(x y/2) for its
    exact finite-N value (see ``refined_edge_factor``).  The refined curve
    is a finite-N correction and is not renormalized.
    """
    tag = _tag(tag)
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)):
        raise DomainError("sigma must be > 0")
    s = float(s)
    if sig.ndim == 0:
        val = _ln_edge_law(tag, s, float(sig), refine_n)
    else:
        val = np.array([_ln_edge_law(tag, s, float(v), refine_n) for v in sig.ravel()]).reshape(sig.shape)
    return val if log else np.exp(val)
