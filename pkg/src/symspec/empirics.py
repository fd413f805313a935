"""Empirical distributions, histograms, KS distances and record selections.

Intervals are half-open, ``[lo, hi)``, for histogram bins and annuli alike.
Records flagged as defective never enter a statistic; every selection
reports how many were set aside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .spectra import SpectralRecord
from .specfun import DomainError, integrate

__all__ = [
    "EmpiricalDistribution",
    "Histogram",
    "histogram",
    "ks_distance",
    "Records",
    "annulus_filter",
    "edge_rescale",
    "edge_unscale",
    "bulk_rescale",
    "haar_lemma_check",
    "HaarCheck",
]


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample with a right-continuous ECDF."""

    sorted_samples: np.ndarray

    def __post_init__(self):
        x = np.sort(np.asarray(self.sorted_samples, dtype=float).ravel())
        if x.size == 0:
            raise DomainError("empirical distribution needs at least one sample")
        if not np.all(np.isfinite(x)):
            raise DomainError("samples must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "sorted_samples", x)

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        return cls(np.asarray(samples, dtype=float))

    @property
    def count(self) -> int:
        return int(self.sorted_samples.size)

    def ecdf(self, x):
        out = np.searchsorted(self.sorted_samples, x, side="right") / self.count
        return float(out) if np.ndim(out) == 0 else out

    def merge(self, other: "EmpiricalDistribution") -> "EmpiricalDistribution":
        return EmpiricalDistribution(np.concatenate([self.sorted_samples, other.sorted_samples]))


def _eval_cdf(cdf: Callable, x: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(cdf(x), dtype=float)
        if out.shape == x.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(cdf(v)) for v in x])


def ks_distance(emp: EmpiricalDistribution, cdf: Callable) -> float:
    """sup_x |F_emp(x) - F(x)|, exact over the sample.

    The sup is attained at a sample value or just to its left, so F is
    evaluated at each distinct value u and at nextafter(u, -inf), and
    compared with the ECDF after and before the jump at u.  Repeated values
    are one jump, which makes a point mass against a step CDF at the same
    point give 0.
    """
    u, counts = np.unique(emp.sorted_samples, return_counts=True)
    after = np.cumsum(counts) / emp.count
    before = after - counts / emp.count
    f_at = _eval_cdf(cdf, u)
    f_left = _eval_cdf(cdf, np.nextafter(u, -np.inf))
    d = max(np.max(np.abs(after - f_at)), np.max(np.abs(before - f_left)))
    return float(min(d, 1.0))


# ---------------------------------------------------------------------------
# histograms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    out_of_range: int

    @property
    def total_weight(self) -> int:
        return int(self.counts.sum())

    @property
    def densities(self) -> np.ndarray:
        return self.counts / (self.total_weight * np.diff(self.edges))

    def merge(self, other: "Histogram") -> "Histogram":
        if not np.array_equal(self.edges, other.edges):
            raise DomainError("histograms with different edges cannot be merged")
        return Histogram(self.edges, self.counts + other.counts, self.out_of_range + other.out_of_range)


def histogram(samples, edges) -> Histogram:
    """Density histogram on bins [e_k, e_{k+1}); samples outside are counted only."""
    x = np.asarray(samples, dtype=float).ravel()
    e = np.asarray(edges, dtype=float)
    if e.ndim != 1 or e.size < 2 or np.any(np.diff(e) <= 0):
        raise DomainError("edges must be strictly increasing with at least two entries")
    idx = np.searchsorted(e, x, side="right") - 1
    inside = (idx >= 0) & (idx < e.size - 1)
    counts = np.bincount(idx[inside], minlength=e.size - 1).astype(np.int64)
    if counts.sum() == 0:
        raise DomainError("no samples fall inside the histogram range")
    return Histogram(e, counts, int(x.size - counts.sum()))


# ---------------------------------------------------------------------------
# spectral records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Records:
    """Columnar store of spectral records."""

    matrix_index: np.ndarray
    z: np.ndarray
    t: np.ndarray
    residual: np.ndarray
    defective: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_records(cls, records: Iterable[SpectralRecord], meta: dict | None = None) -> "Records":
        recs = list(records)
        return cls(
            np.array([r.matrix_index for r in recs], dtype=np.int64),
            np.array([r.z for r in recs], dtype=complex),
            np.array([r.t for r in recs], dtype=float),
            np.array([r.residual for r in recs], dtype=float),
            np.array([r.defective for r in recs], dtype=bool),
            dict(meta or {}),
        )

    @classmethod
    def concat(cls, parts: Sequence["Records"], meta: dict | None = None) -> "Records":
        if not parts:
            return cls.from_records([], meta)
        return cls(*(np.concatenate([getattr(p, name) for p in parts]) for name in
                     ("matrix_index", "z", "t", "residual", "defective")), dict(meta or {}))

    def __len__(self) -> int:
        return int(self.z.size)

    def __iter__(self):
        for k in range(len(self)):
            yield SpectralRecord(complex(self.z[k]), float(self.t[k]), float(self.residual[k]),
                                 int(self.matrix_index[k]), bool(self.defective[k]))

    def subset(self, mask) -> "Records":
        return Records(self.matrix_index[mask], self.z[mask], self.t[mask], self.residual[mask],
                       self.defective[mask], self.meta)

    @property
    def r(self) -> np.ndarray:
        return np.abs(self.z)

    @property
    def n_defective(self) -> int:
        return int(self.defective.sum())

    def clean(self) -> "Records":
        return self.subset(~self.defective)


def _as_records(records) -> Records:
    return records if isinstance(records, Records) else Records.from_records(records)


class Selection(NamedTuple):
    records: Records
    excluded_defective: int


def annulus_filter(records, r_lo: float, r_hi: float) -> Selection:
    """Non-defective records with r_lo <= |z| < r_hi, plus the count of
    defective ones in the same annulus that were left out."""
    if not 0 <= r_lo < r_hi:
        raise DomainError("annulus needs 0 <= r_lo < r_hi")
    rec = _as_records(records)
    r = rec.r
    inside = (r >= r_lo) & (r < r_hi)
    return Selection(rec.subset(inside & ~rec.defective), int(np.sum(inside & rec.defective)))


class EdgeSample(NamedTuple):
    s: np.ndarray
    sigma: np.ndarray
    skipped: int


class BulkSample(NamedTuple):
    tau: np.ndarray
    skipped: int


def edge_rescale(n: int, records) -> EdgeSample:
    """s = sqrt(N)(|z|**2/2 - 1) and sigma = t/sqrt(N) for unflagged records."""
    if n < 2:
        raise DomainError("n must be >= 2")
    rec = _as_records(records)
    keep = ~rec.defective
    rn = math.sqrt(n)
    r = rec.r[keep]
    return EdgeSample(rn * (0.5 * r * r - 1.0), rec.t[keep] / rn, int(np.sum(~keep)))


def edge_unscale(n: int, s, sigma):
    """Inverse of ``edge_rescale``: returns (|z|, t)."""
    rn = math.sqrt(n)
    s = np.asarray(s, dtype=float)
    return np.sqrt(2.0 * (1.0 + s / rn)), np.asarray(sigma, dtype=float) * rn


def bulk_rescale(n: int, records) -> BulkSample:
    """tau = t/N for unflagged records."""
    if n < 2:
        raise DomainError("n must be >= 2")
    rec = _as_records(records)
    keep = ~rec.defective
    return BulkSample(rec.t[keep] / n, int(np.sum(~keep)))


# ---------------------------------------------------------------------------
# Haar-vector identity
# ---------------------------------------------------------------------------


class HaarCheck(NamedTuple):
    mc: float
    quad: float
    z_score: float


def haar_lemma_check(n: int, f: Callable, samples: int, rng: np.random.Generator) -> HaarCheck:
    """Compare E f(|v^T v|**2) over Haar unit vectors in C^n with
    (n-1) * int_0^1 p**(n-2) f(1 - p**2) dp.

    ``f`` must accept arrays.  The z-score uses the sample standard error;
    a constant ``f`` gives z = 0.
    """
    if n < 2:
        raise DomainError("n must be >= 2")
    if samples < 1000:
        raise DomainError("use at least 1000 samples")
    z = rng.standard_normal((samples, n)) + 1j * rng.standard_normal((samples, n))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    y = np.abs(np.sum(z * z, axis=1)) ** 2
    vals = np.asarray(f(y), dtype=float) * np.ones_like(y)
    mc = float(np.mean(vals))
    se = float(np.std(vals, ddof=1)) / math.sqrt(samples)
    quad = (n - 1) * integrate(lambda p: p ** (n - 2) * np.asarray(f(1.0 - p * p), dtype=float), 0.0, 1.0,
                               rel_tol=1e-12, abs_tol=1e-14).value
    zs = 0.0 if se == 0 else (mc - quad) / se
    return HaarCheck(mc, quad, zs)
