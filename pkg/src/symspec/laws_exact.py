"""Exact finite-N laws for complex symmetric Gaussian matrices.

Normalization follows ``J = X + iY`` with ``X, Y`` independent GOE matrices,
``<X_nm X_kl> = (d_nk d_ml + d_nl d_mk) / N``, so that the spectrum fills the
disk of radius sqrt(2) as N grows.

Notation used below:

* ``r = |z|`` is the radial coordinate of an eigenvalue and
  ``x = N r**2 / 2``;
* ``t = 1/|v^T v|**2 - 1 >= 0`` is the nonorthogonality parameter of the
  unit right eigenvector ``v`` and ``y = 1 / (1 + t)``;
* ``g(x, y)`` is the factor multiplying ``y`` in the joint density of ``z``
  and ``v``.

For integer N the bracket in ``g`` collapses to a Poisson-weighted sum with
nonnegative coefficients,

    g(x, y) = (N-2)!/N * exp(x*y/2 - x) * sum_{m<N} (N-m)(N-1-m + y*m) x**m/m!,

which is how ``g`` is evaluated here: both pieces of the sum are positive, so
nothing cancels even far outside the spectrum where the textbook form loses
digits.  The radial density is assembled term by term in signed log-space.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, xlogy

from .specfun import DomainError, TabulatedCDF, integrate, ln_gamma, ln_reg_gamma_lower, ln_reg_gamma_upper

__all__ = [
    "LawContext",
    "law_context",
    "ln_upper_gamma_int",
    "g_factor",
    "radial_density",
    "ln_radial_density",
    "radial_cdf",
    "overlap_density_origin",
    "overlap_density",
    "overlap_cdf",
    "overlap_mean",
    "joint_density",
    "overlap_normalization",
    "radial_cdf_table",
    "overlap_cdf_table",
    "radial_support_max",
    "R_MIN",
]

# below this radius the conditional overlap law is replaced by its r -> 0 limit
R_MIN = 1e-8
# integer sizes up to this use the finite Poisson sum for Gamma(N, x)
FINITE_SUM_MAX_N = 50


@dataclass(frozen=True)
class LawContext:
    """Matrix size and its precomputed normalization constants.

    ``ln_norm_density`` is ln(2 sqrt(N) / Gamma(N+2)) and ``ln_norm_overlap``
    is ln(N**2 / Gamma(N+2)).  The ``ln_wa`` / ``ln_wb`` arrays hold the log
    weights of the two positive Poisson sums behind ``g``.
    """

    n: int
    ln_norm_density: float
    ln_norm_overlap: float
    ln_factorial: np.ndarray = field(repr=False, compare=False)
    ln_wa: np.ndarray = field(repr=False, compare=False)
    ln_wb: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, n: int) -> "LawContext":
        if int(n) != n or n < 2:
            raise DomainError(f"matrix size must be an integer >= 2, got {n!r}")
        n = int(n)
        m = np.arange(n, dtype=float)
        lnfact = ln_gamma(m + 1.0)
        with np.errstate(divide="ignore"):
            ln_wa = np.log((n - m) * (n - 1 - m))
            ln_wb = np.log(m * (n - m))
        for arr in (lnfact, ln_wa, ln_wb):
            arr.setflags(write=False)
        lng = ln_gamma(n + 2.0)
        return cls(
            n=n,
            ln_norm_density=math.log(2.0 * math.sqrt(n)) - lng,
            ln_norm_overlap=2.0 * math.log(n) - lng,
            ln_factorial=lnfact,
            ln_wa=ln_wa,
            ln_wb=ln_wb,
        )


@functools.lru_cache(maxsize=64)
def law_context(n: int) -> LawContext:
    return LawContext.build(n)


def _ctx(ctx) -> LawContext:
    return ctx if isinstance(ctx, LawContext) else law_context(ctx)


def _signed_logsumexp(logs, signs) -> tuple[float, float]:
    pairs = [(l, s) for l, s in zip(logs, signs) if s != 0 and l > -math.inf]
    if not pairs:
        return -math.inf, 0.0
    top = max(l for l, _ in pairs)
    acc = math.fsum(s * math.exp(l - top) for l, s in pairs)
    if acc == 0.0:
        return -math.inf, 0.0
    return top + math.log(abs(acc)), math.copysign(1.0, acc)


def ln_upper_gamma_int(n: int, x: float) -> float:
    """ln Gamma(n, x) for integer n >= 1.

    Exact finite sum ``(n-1)! e**-x sum_{k<n} x**k/k!`` up to
    FINITE_SUM_MAX_N, the regularized continued-fraction/series route above.
    """
    if x < 0:
        raise DomainError("x must be >= 0")
    if n <= FINITE_SUM_MAX_N:
        if x == 0.0:
            return math.lgamma(n)
        k = np.arange(n, dtype=float)
        terms = k * math.log(x) - ln_gamma(k + 1.0)
        return math.lgamma(n) - x + float(logsumexp(terms))
    return math.lgamma(n) + ln_reg_gamma_upper(float(n), x)


def _ln_poisson_sums(ctx: LawContext, x: float) -> tuple[float, float]:
    """ln of A(x) = sum (N-m)(N-1-m) x^m/m! and B(x) = sum m(N-m) x^m/m!."""
    m = np.arange(ctx.n, dtype=float)
    base = xlogy(m, x) - ctx.ln_factorial
    return float(logsumexp(base + ctx.ln_wa)), float(logsumexp(base + ctx.ln_wb))


def _ln_g(ctx: LawContext, x: float, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    la, lb = _ln_poisson_sums(ctx, x)
    with np.errstate(divide="ignore"):
        inner = np.logaddexp(la, lb + np.log(y))
    n = ctx.n
    return 0.5 * x * y - x + math.lgamma(n - 1) - math.log(n) + inner


def g_factor(ctx, x: float, y):
    """Signed log of g(x, y): returns ``(ln|g|, sign)``.

    ``x = N |z|**2 / 2 >= 0`` and ``0 <= y = |v^T v|**2 <= 1``; ``y`` may be
    an array. The sign is always +1 for a correct evaluation.
    """
    ctx = _ctx(ctx)
    y_arr = np.asarray(y, dtype=float)
    if not x >= 0 or np.any(~((y_arr >= 0) & (y_arr <= 1))):
        raise DomainError(f"g_factor needs x >= 0 and 0 <= y <= 1 (x={x}, y={y})")
    lg = _ln_g(ctx, float(x), y_arr)
    sign = np.ones_like(lg)
    assert np.all(np.isfinite(lg)), "g_factor must be a finite positive density factor"
    if lg.ndim == 0:
        return float(lg), 1.0
    return lg, sign


# ---------------------------------------------------------------------------
# radial density
# ---------------------------------------------------------------------------


def _ln_rho_scalar(ctx: LawContext, r: float) -> float:
    if r < 0 or math.isnan(r):
        raise DomainError(f"radius must be >= 0, got {r}")
    if r == 0.0:
        return -math.inf
    n = ctx.n
    x = 0.5 * n * r * r
    if math.isinf(x):
        return -math.inf
    if x == 0.0:
        # r so small that x underflows: linear regime rho ~ N r / (N + 1)
        return math.log(r) + math.log(n / (n + 1.0))
    ln_k = 0.5 * n * math.log(x) - 0.5 * x
    ln_G = ln_upper_gamma_int(n, x)
    a = 0.5 * (n + 3)
    ln_low = math.lgamma(a) + ln_reg_gamma_lower(a, 0.5 * x)
    ln_sq = 0.5 * math.log(0.5 * x)
    ln_pow2 = 0.5 * n * math.log(2.0)
    c2 = n - 0.5 * x
    c4 = n - 1.0 - x
    logs = [
        ln_sq + 2.0 * ln_k,
        ln_sq + (math.log(abs(c2)) if c2 else 0.0) + ln_G,
        ln_pow2 + ln_low + ln_k,
        ln_pow2 + ln_low + (math.log(abs(c4)) if c4 else 0.0) + ln_G - math.log(2.0) - ln_k,
    ]
    signs = [1.0, math.copysign(1.0, c2) if c2 else 0.0, 1.0, math.copysign(1.0, c4) if c4 else 0.0]
    total, sign = _signed_logsumexp(logs, signs)
    if sign <= 0:
        # only reachable through rounding far outside the support
        return -math.inf
    return ctx.ln_norm_density + total


def ln_radial_density(ctx, r):
    ctx = _ctx(ctx)
    if np.ndim(r) == 0:
        return _ln_rho_scalar(ctx, float(r))
    return np.array([_ln_rho_scalar(ctx, float(v)) for v in np.ravel(r)]).reshape(np.shape(r))


def radial_density(ctx, r):
    """Mean radial density rho(r) of eigenvalues, normalized on [0, inf).

    rho(r) = 2 sqrt(N)/Gamma(N+2) { sqrt(x/2) [k(x)**2 + (N - x/2) Gamma(N, x)]
             + 2**(N/2) gamma((N+3)/2, x/2) [k(x) + (N-1-x) Gamma(N, x) / (2 k(x))] }

    with k(x) = x**(N/2) e**(-x/2) and x = N r**2 / 2.  Near the origin
    rho(r) ~ N r / (N+1).
    """
    return np.exp(ln_radial_density(ctx, r))


def _radial_breakpoints(n: int) -> list[float]:
    w = 1.0 / math.sqrt(n)
    edge = math.sqrt(2.0)
    pts = [edge + k * w for k in (-6, -3, -1, 0, 1, 3, 6, 12)]
    return [p for p in pts if p > 0]


def radial_cdf(ctx, r: float, rel_tol: float = 1e-11, abs_tol: float = 1e-13) -> float:
    """F(r) = integral of rho over [0, r]; ``r`` may be ``inf``."""
    ctx = _ctx(ctx)
    if r < 0:
        raise DomainError("radius must be >= 0")
    if r == 0:
        return 0.0
    res = integrate(
        lambda u: radial_density(ctx, u),
        0.0,
        r,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        breakpoints=_radial_breakpoints(ctx.n),
    )
    return min(max(res.value, 0.0), 1.0)


# ---------------------------------------------------------------------------
# nonorthogonality
# ---------------------------------------------------------------------------


def _ln_p0(n: int, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        # ln(t/(1+t)); 1/t would overflow for subnormal t
        tt = np.where(t > 0, t, 1.0)
        small = tt < 1.0
        ln_ratio = np.where(small, np.log(tt) - np.log1p(tt), -np.log1p(1.0 / np.where(small, 1.0, tt)))
        ln_ratio = np.where(t > 0, ln_ratio, -np.inf)
        power = 0.5 * (n - 3) * ln_ratio if n != 3 else np.zeros_like(t)
    return math.log((n * n - 1) / 4.0) - 3.0 * np.log1p(t) + power


def overlap_density_origin(ctx, t):
    """P_0(t) = (N**2-1)/(4 (1+t)**3) * (t/(1+t))**((N-3)/2).

    Mean (N-1)/2; every higher moment diverges because of the t**-3 tail.
    At N = 2 the density has an integrable t**-1/2 singularity at zero.
    """
    ctx = _ctx(ctx)
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr >= 0)):
        raise DomainError("t must be >= 0")
    out = np.exp(_ln_p0(ctx.n, t_arr))
    return float(out) if out.ndim == 0 else out


def _ln_overlap_density(ctx: LawContext, r: float, t, ln_rho: float | None = None) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if r < R_MIN:
        return _ln_p0(ctx.n, t)
    x = 0.5 * ctx.n * r * r
    if ln_rho is None:
        ln_rho = _ln_rho_scalar(ctx, r)
    y = 1.0 / (1.0 + t)
    return ctx.ln_norm_overlap + math.log(r) + _ln_g(ctx, x, y) + _ln_p0(ctx.n, t) - ln_rho


def overlap_density(ctx, r: float, t):
    """Conditional density P_r(t) of the nonorthogonality parameter at |z| = r.

    P_r(t) = N**2 r g(N r**2/2, 1/(1+t)) P_0(t) / (Gamma(N+2) rho(r)).
    For r below R_MIN the exact r -> 0 limit P_0(t) is returned.
    """
    ctx = _ctx(ctx)
    if not r >= 0:
        raise DomainError("radius must be >= 0")
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr >= 0)):
        raise DomainError("t must be >= 0")
    out = np.exp(_ln_overlap_density(ctx, float(r), t_arr))
    return float(out) if out.ndim == 0 else out


def joint_density(ctx, r, t):
    """rho(r) * P_r(t), the joint density of (|z|, t)."""
    ctx = _ctx(ctx)
    if not r >= 0:
        raise DomainError("radius must be >= 0")
    t = np.asarray(t, dtype=float)
    if r == 0:
        out = np.zeros_like(t)
    else:
        x = 0.5 * ctx.n * r * r
        out = np.exp(ctx.ln_norm_overlap + math.log(r) + _ln_g(ctx, x, 1.0 / (1.0 + t)) + _ln_p0(ctx.n, t))
    return float(out) if out.ndim == 0 else out


def _v_breakpoints(n: int) -> list[float]:
    # v = asinh(sqrt(t)); the mass sits near t ~ N (bulk) or sqrt(N) (edge)
    top = int(math.ceil(math.log10(n))) + 4
    return [math.asinh(math.sqrt(10.0**j)) for j in range(-2, top + 1)]


def _ln_cosh(v):
    return v + np.log1p(np.exp(-2.0 * v)) - math.log(2.0)


def _ln_tanh(v):
    e = np.exp(-2.0 * v)
    with np.errstate(divide="ignore"):
        return np.where(v < 0.5, np.log(np.tanh(v)), np.log1p(-e) - np.log1p(e))


def _v_integrand(ctx: LawContext, r: float, moment: int):
    # with t = sinh(v)**2: P_0(t) dt = (N**2-1)/2 tanh(v)**(N-2) cosh(v)**-4 dv
    n = ctx.n
    ln_c = math.log(0.5 * (n * n - 1))
    if r < R_MIN:
        ln_pref, x = None, 0.0
    else:
        x = 0.5 * n * r * r
        ln_pref = ctx.ln_norm_overlap + math.log(r) - _ln_rho_scalar(ctx, r)

    def f(v):
        v = np.asarray(v, dtype=float)
        lc = _ln_cosh(v)
        lt = _ln_tanh(v)
        ln_f = ln_c + (n - 2) * lt - 4.0 * lc
        if ln_pref is not None:
            ln_f = ln_f + ln_pref + _ln_g(ctx, x, np.exp(-2.0 * lc))
        if moment:
            ln_f = ln_f + 2.0 * moment * (lt + lc)
        return np.where(v > 0, np.exp(ln_f), 0.0)

    return f


def overlap_cdf(ctx, r: float, t: float, rel_tol: float = 1e-11, abs_tol: float = 1e-13) -> float:
    """F_r(t) = integral of P_r over [0, t].

    Integrated in v = asinh(sqrt(t)), i.e. tanh(v)**2 = 1 - y.  In that
    variable the integrand is smooth at the origin for every N >= 2 and
    decays like exp(-4 v), so neither the N = 2 singularity nor the t**-3
    tail slows the quadrature.
    """
    ctx = _ctx(ctx)
    if not (r >= 0 and t >= 0):
        raise DomainError("r and t must be >= 0")
    if t == 0:
        return 0.0
    hi = math.inf if math.isinf(t) else math.asinh(math.sqrt(t))
    res = integrate(
        _v_integrand(ctx, float(r), 0), 0.0, hi, rel_tol=rel_tol, abs_tol=abs_tol,
        breakpoints=_v_breakpoints(ctx.n),
    )
    return min(max(res.value, 0.0), 1.0)


def overlap_normalization(ctx, r: float) -> float:
    """Integral of P_r(t) over all t; 1 up to quadrature error.

    Returned unrounded so that any residual of the closed form is visible.
    """
    ctx = _ctx(ctx)
    return integrate(
        _v_integrand(ctx, float(r), 0), 0.0, math.inf, rel_tol=1e-12, abs_tol=1e-14,
        breakpoints=_v_breakpoints(ctx.n),
    ).value


def overlap_mean(ctx, r: float, rel_tol: float = 1e-11) -> float:
    """Mean of t under P_r.  Only this first moment is finite."""
    ctx = _ctx(ctx)
    if not r >= 0:
        raise DomainError("radius must be >= 0")
    return integrate(
        _v_integrand(ctx, float(r), 1), 0.0, math.inf, rel_tol=rel_tol, abs_tol=1e-13,
        breakpoints=_v_breakpoints(ctx.n),
    ).value


def radial_support_max(n: int) -> float:
    """Radius beyond which the radial mass is below ~1e-25."""
    return math.sqrt(2.0 * (n + 12.0 * math.sqrt(n) + 60.0) / n)


def radial_cdf_table(ctx, knots: int = 400) -> TabulatedCDF:
    """Tabulated radial CDF for evaluation at many sample points."""
    ctx = _ctx(ctx)
    w = 1.0 / math.sqrt(ctx.n)
    edge = math.sqrt(2.0)
    grid = np.concatenate([
        np.linspace(0.0, radial_support_max(ctx.n), knots),
        np.linspace(max(edge - 8.0 * w, 0.0), edge + 8.0 * w, knots // 2),
    ])
    return TabulatedCDF(lambda u: radial_density(ctx, u), grid)


def overlap_cdf_table(ctx, r: float, knots: int = 800) -> TabulatedCDF:
    """Tabulated F_r(t), built in the variable v = asinh(sqrt(t))."""
    ctx = _ctx(ctx)
    v_max = math.asinh(math.sqrt(1e13 * ctx.n))
    grid = np.concatenate([np.linspace(0.0, v_max, knots), _v_breakpoints(ctx.n)])
    f = _v_integrand(ctx, float(r), 0)
    return TabulatedCDF(f, grid, transform=lambda t: np.arcsinh(np.sqrt(np.maximum(t, 0.0))))
