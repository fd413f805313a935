"""Reproducible samplers for complex symmetric and Ginibre matrices.

Every matrix is drawn from its own counter-based Philox stream keyed by
``(master_seed, matrix_index)`` so that any subset of matrices can be
regenerated independently of how work was split across processes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .specfun import DomainError

__all__ = [
    "EnsembleKind",
    "EnsembleSpec",
    "derive_stream",
    "sample_goe",
    "sample",
    "sample_haar_unit_vector",
    "generate",
]


class EnsembleKind(enum.Enum):
    AI_GAUSSIAN = "ai-gaussian"
    AI_BERNOULLI = "ai-bernoulli"
    GINIBRE_REAL = "ginibre-real"
    GINIBRE_COMPLEX = "ginibre-complex"

    @property
    def symmetric(self) -> bool:
        return self in (EnsembleKind.AI_GAUSSIAN, EnsembleKind.AI_BERNOULLI)


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    n: int
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind(self.kind))
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must be an unsigned 64-bit integer")


def derive_stream(master_seed: int, worker_id: int) -> np.random.Generator:
    """Independent Philox substream for ``(master_seed, worker_id)``.

    The key comes from SeedSequence spawning, so nearby seeds and ids give
    unrelated streams, and Philox with numpy's ziggurat normals yields the
    same draws on every platform.
    """
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(worker_id),))
    return np.random.Generator(np.random.Philox(ss))


def sample_goe(n: int, rng: np.random.Generator) -> np.ndarray:
    """Real symmetric X with <X_ij X_kl> = (d_ik d_jl + d_il d_jk)/N."""
    if n < 2:
        raise DomainError("n must be >= 2")
    a = rng.standard_normal((n, n))
    # off-diagonal (a_ij + a_ji)/sqrt(2N) has variance 1/N, diagonal 2/N
    return (a + a.T) / math.sqrt(2.0 * n)


def _bernoulli_symmetric(n: int, rng: np.random.Generator) -> np.ndarray:
    iu = np.triu_indices(n)
    signs = rng.integers(0, 2, size=(2, iu[0].size), dtype=np.int8) * 2 - 1
    vals = (signs[0] + 1j * signs[1]) / math.sqrt(n)
    out = np.empty((n, n), dtype=complex)
    out[iu] = vals
    out[iu[1], iu[0]] = vals
    return out


def sample(spec: EnsembleSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one n-by-n complex matrix of the given kind.

    All kinds share the spectral edge at |z| = sqrt(2).  The Bernoulli
    diagonal uses the same +-1/sqrt(N) law as the off-diagonal entries; its
    variance differs from the Gaussian diagonal only at O(1/N).
    """
    n = spec.n
    kind = spec.kind
    if kind is EnsembleKind.AI_GAUSSIAN:
        x = sample_goe(n, rng)
        y = sample_goe(n, rng)
        return x + 1j * y
    if kind is EnsembleKind.AI_BERNOULLI:
        return _bernoulli_symmetric(n, rng)
    if kind is EnsembleKind.GINIBRE_COMPLEX:
        z = rng.standard_normal((2, n, n))
        return (z[0] + 1j * z[1]) / math.sqrt(n)
    return (rng.standard_normal((n, n)) * math.sqrt(2.0 / n)).astype(complex)


def generate(spec: EnsembleSpec, matrix_index: int) -> np.ndarray:
    """Matrix number ``matrix_index`` of the run described by ``spec``."""
    return sample(spec, derive_stream(spec.master_seed, matrix_index))


def sample_haar_unit_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform vector on the complex unit sphere in C^n."""
    if n < 2:
        raise DomainError("n must be >= 2")
    z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return z / np.linalg.norm(z)
