"""Parallel sampling of spectral records.

Matrix ``k`` is always drawn from ``derive_stream(seed, k)`` and results are
reassembled in index order, so the output does not depend on the number of
worker processes or on how indices were chunked.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .empirics import Records
from .ensembles import EnsembleSpec, generate
from .spectra import NEAR_DEFECTIVE_T, RESIDUAL_TOL, SolverError, _overlap_t, eig_right, residuals

__all__ = ["SampleRun", "run_samples", "default_workers"]


@dataclass
class SampleRun:
    records: Records
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def n_defective(self) -> int:
        return self.records.n_defective


def default_workers() -> int:
    env = os.environ.get("SYMSPEC_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def _chunk(spec: EnsembleSpec, lo: int, hi: int):
    n = spec.n
    count = hi - lo
    idx = np.empty(count * n, dtype=np.int64)
    z = np.empty(count * n, dtype=complex)
    t = np.empty(count * n, dtype=float)
    res = np.empty(count * n, dtype=float)
    ok = np.zeros(count * n, dtype=bool)
    failures = []
    for k in range(lo, hi):
        sl = slice((k - lo) * n, (k - lo + 1) * n)
        j = generate(spec, k)
        idx[sl] = k
        try:
            sys = eig_right(j, k)
        except SolverError as exc:
            failures.append((k, str(exc)))
            continue
        z[sl] = sys.eigenvalues
        t[sl] = _overlap_t(sys.right_vectors)
        res[sl] = residuals(j, sys)
        ok[sl] = True
    keep = ok
    defective = (t >= NEAR_DEFECTIVE_T) | (res > RESIDUAL_TOL) | ~np.isfinite(t)
    return (idx[keep], z[keep], t[keep], res[keep], defective[keep]), failures


def run_samples(spec: EnsembleSpec, matrices: int, workers: int | None = None, chunk: int | None = None) -> SampleRun:
    """Eigen-decompose ``matrices`` draws of ``spec`` and collect their records."""
    if matrices < 1:
        raise ValueError("matrices must be >= 1")
    workers = default_workers() if workers is None else max(1, int(workers))
    if chunk is None:
        chunk = max(1, min(2000, math.ceil(matrices / (4 * workers))))
    bounds = [(lo, min(lo + chunk, matrices)) for lo in range(0, matrices, chunk)]
    if workers == 1:
        results = [_chunk(spec, lo, hi) for lo, hi in bounds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chunk, [spec] * len(bounds), *zip(*bounds)))
    cols = [np.concatenate([r[0][k] for r in results]) for k in range(5)]
    failures = [f for r in results for f in r[1]]
    meta = {
        "ensemble": spec.kind.value,
        "n": spec.n,
        "seed": spec.master_seed,
        "matrices": matrices,
        "failures": len(failures),
    }
    return SampleRun(Records(*cols, meta=meta), failures)
