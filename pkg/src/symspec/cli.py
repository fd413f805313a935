"""Command-line interface: ``symspec {density,overlap,edge,sample,compare,verify}``.

Curve and record tables go to ``--out`` (stdout by default) as CSV or JSON.
``compare`` and ``verify`` print a report and exit non-zero when any check
fails.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from . import laws_asymptotic as LA
from . import laws_exact as LE
from .empirics import EmpiricalDistribution, annulus_filter, bulk_rescale, ks_distance
from .ensembles import EnsembleKind, EnsembleSpec, generate
from .io import ParseError, columns_to_records, read_table, records_to_columns, write_table
from .montecarlo import default_workers, run_samples
from .verification.suite import Check, VerificationReport, bulk_law_cdf, large_n_radial_cdf, run_suite

__all__ = ["main", "build_parser"]

SQRT2 = math.sqrt(2.0)


class UsageError(ValueError):
    pass


def _annulus(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"annulus must look like lo:hi, got {text!r}") from exc
    if not 0 <= lo < hi:
        raise argparse.ArgumentTypeError("annulus needs 0 <= lo < hi")
    return lo, hi


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symspec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"symspec {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("density", parents=[common], help="radial density curves")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--points", type=_positive_int, default=251)
    d.add_argument("--r-min", type=float, default=0.0)
    d.add_argument("--r-max", type=float, default=2.5)

    o = sub.add_parser("overlap", parents=[common], help="nonorthogonality density at fixed radius")
    o.add_argument("--n", type=int, required=True)
    o.add_argument("--r", type=float, default=0.0, help="radius |z|")
    o.add_argument("--points", type=_positive_int, default=2001)
    o.add_argument("--t-max", type=float, default=None, help="default: 20 N")

    e = sub.add_parser("edge", parents=[common], help="edge profiles and edge overlap laws")
    e.add_argument("--points", type=_positive_int, default=2001)
    e.add_argument("--s-min", type=float, default=-6.0)
    e.add_argument("--s-max", type=float, default=6.0)
    e.add_argument("--s", type=float, default=0.0, help="edge position of the sigma laws")
    e.add_argument("--sigma-min", type=float, default=0.02)
    e.add_argument("--sigma-max", type=float, default=1000.0)

    s = sub.add_parser("sample", parents=[common], help="Monte-Carlo spectral records")
    s.add_argument("--ensemble", choices=[k.value for k in EnsembleKind], default="ai-gaussian")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--matrices", type=_positive_int, default=1000)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--workers", type=_positive_int, default=None, help="default: $SYMSPEC_WORKERS or 1")
    s.add_argument("--dump-matrix", metavar="PATH", default=None,
                   help="debug: also write every sampled matrix entry to PATH")

    c = sub.add_parser("compare", parents=[common], help="KS comparison of a record file with the laws")
    c.add_argument("records", help="record file written by 'sample'")
    c.add_argument("--n", type=int, default=None, help="matrix size (default: from file metadata)")
    c.add_argument("--annulus", type=_annulus, default=(0.0, 0.2))
    c.add_argument("--law", choices=("exact", "large-n"), default="exact")
    c.add_argument("--radial-threshold", type=float, default=0.02)
    c.add_argument("--overlap-threshold", type=float, default=0.05)

    v = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    v.add_argument("--suite", choices=("all", "analytic", "montecarlo"), default="all")
    v.add_argument("--workers", type=_positive_int, default=None)
    return p


# ---------------------------------------------------------------------------
# curve commands
# ---------------------------------------------------------------------------


def _check_n(n: int) -> None:
    if n < 2:
        raise UsageError("--n must be >= 2")


def _grid(lo: float, hi: float, points: int, name: str) -> np.ndarray:
    if not lo < hi:
        raise UsageError(f"{name}: need min < max")
    return np.linspace(lo, hi, points)


def density_table(n: int, r: np.ndarray) -> dict[str, np.ndarray]:
    if np.any(r < 0):
        raise UsageError("radii must be >= 0")
    return {
        "r": r,
        "rho_exact": LE.radial_density(n, r),
        "rho_large_n": LA.density_large_n(n, r),
        "rho_triangular": np.where(r <= SQRT2, r, 0.0),
    }


def overlap_table(n: int, r: float, t: np.ndarray) -> dict[str, np.ndarray]:
    if r < 0 or np.any(t < 0):
        raise UsageError("radius and t must be >= 0")
    rn = math.sqrt(n)
    exact = LE.overlap_density(n, r, t)
    pos = t > 0
    tp = np.where(pos, t, 1.0)
    if r < SQRT2:
        bulk = np.where(pos, LA.bulk_overlap_law(r, tp / n) / n, 0.0)
    else:
        bulk = np.full_like(t, math.nan)
    s = float(LA.edge_coordinate(n, r))
    edge = np.where(pos, LA.edge_overlap_law(LA.EnsembleTag.AI_DAGGER, s, tp / rn) / rn, 0.0)
    return {"t": t, "pdf_exact": exact, "pdf_bulk": bulk, "pdf_edge": edge}


def edge_table(s: np.ndarray, sigma: np.ndarray, s_law: float) -> dict[str, np.ndarray]:
    T = LA.EnsembleTag
    return {
        "s": s,
        "theta_ai": LA.edge_profile(T.AI_DAGGER, s),
        "theta_gin1": LA.edge_profile(T.GINIBRE_REAL, s),
        "theta_gin2": LA.edge_profile(T.GINIBRE_COMPLEX, s),
        "sigma": sigma,
        "p_ai": LA.edge_overlap_law(T.AI_DAGGER, s_law, sigma),
        "p_gin1": LA.edge_overlap_law(T.GINIBRE_REAL, s_law, sigma),
        "p_gin2": LA.edge_overlap_law(T.GINIBRE_COMPLEX, s_law, sigma),
    }


def cmd_density(args) -> int:
    _check_n(args.n)
    r = _grid(args.r_min, args.r_max, args.points, "--r-min/--r-max")
    write_table(args.out, density_table(args.n, r), {"n": args.n, "version": __version__}, args.format)
    return 0


def cmd_overlap(args) -> int:
    _check_n(args.n)
    t_max = 20.0 * args.n if args.t_max is None else args.t_max
    t = _grid(0.0, t_max, args.points, "--t-max")
    meta = {"n": args.n, "r": args.r, "version": __version__}
    write_table(args.out, overlap_table(args.n, args.r, t), meta, args.format)
    return 0


def cmd_edge(args) -> int:
    s = _grid(args.s_min, args.s_max, args.points, "--s-min/--s-max")
    if not 0 < args.sigma_min < args.sigma_max:
        raise UsageError("need 0 < --sigma-min < --sigma-max")
    sigma = np.geomspace(args.sigma_min, args.sigma_max, args.points)
    meta = {"s_law": args.s, "version": __version__}
    write_table(args.out, edge_table(s, sigma, args.s), meta, args.format)
    return 0


# ---------------------------------------------------------------------------
# sampling and comparison
# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    _check_n(args.n)
    spec = EnsembleSpec(EnsembleKind(args.ensemble), args.n, args.seed)
    workers = default_workers() if args.workers is None else args.workers
    run = run_samples(spec, args.matrices, workers)
    for k, msg in run.failures:
        print(f"warning: {msg}", file=sys.stderr)
    meta = {
        "ensemble": spec.kind.value,
        "n": spec.n,
        "matrices": args.matrices,
        "seed": args.seed,
        "version": __version__,
        "records": len(run.records),
        "defective": run.n_defective,
        "failures": len(run.failures),
    }
    if run.failures:
        meta["failed_matrices"] = ";".join(str(k) for k, _ in run.failures)
    write_table(args.out, records_to_columns(run.records), meta, args.format)
    if args.dump_matrix:
        _dump_matrices(spec, args.matrices, args.dump_matrix)
    return 0


def _dump_matrices(spec: EnsembleSpec, matrices: int, path: str) -> None:
    n = spec.n
    rows, cols = np.divmod(np.arange(n * n), n)
    parts = {"matrix_index": [], "row": [], "col": [], "re": [], "im": []}
    for k in range(matrices):
        j = generate(spec, k).ravel()
        parts["matrix_index"].append(np.full(n * n, k, dtype=np.int64))
        parts["row"].append(rows)
        parts["col"].append(cols)
        parts["re"].append(j.real)
        parts["im"].append(j.imag)
    write_table(path, {k: np.concatenate(v) for k, v in parts.items()}, {"seed": spec.master_seed})


def compare_records(records, n: int, annulus=(0.0, 0.2), law: str = "exact",
                    radial_threshold: float = 0.02, overlap_threshold: float = 0.05) -> VerificationReport:
    """KS distances of a record set against the radial and conditional overlap laws."""
    report = VerificationReport()
    clean = records.clean()
    n_def = records.n_defective
    if len(clean) == 0:
        report.checks.append(Check("radial KS", math.nan, radial_threshold, False, note="no usable records"))
        return report
    emp_r = EmpiricalDistribution(clean.r)
    cdf_r = LE.radial_cdf_table(n) if law == "exact" else large_n_radial_cdf(n)
    ks_r = ks_distance(emp_r, cdf_r)
    report.checks.append(Check(f"radial KS vs {law} law", ks_r, radial_threshold, ks_r <= radial_threshold,
                               note=f"{len(clean)} records, {n_def} defective excluded"))
    lo, hi = annulus
    r_bar = 0.5 * (lo + hi)
    sel = annulus_filter(records, lo, hi)
    note = f"{len(sel.records)} records at r_bar={r_bar:g}, {sel.excluded_defective} defective excluded"
    if len(sel.records) == 0:
        report.checks.append(Check("overlap KS", math.nan, overlap_threshold, False, note="empty annulus; " + note))
        return report
    if law == "exact":
        ks_t = ks_distance(EmpiricalDistribution(sel.records.t), LE.overlap_cdf_table(n, r_bar))
    else:
        if r_bar >= SQRT2:
            raise UsageError("large-n overlap law needs an annulus midpoint below sqrt(2)")
        ks_t = ks_distance(EmpiricalDistribution(bulk_rescale(n, sel.records).tau), bulk_law_cdf(r_bar))
    report.checks.append(Check(f"overlap KS in [{lo:g},{hi:g}) vs {law} law", ks_t, overlap_threshold,
                               ks_t <= overlap_threshold, note=note))
    return report


def _emit_report(report: VerificationReport, out: str, fmt: str) -> None:
    if fmt == "json":
        text = json.dumps(report.to_dict(), indent=2) + "\n"
    else:
        text = "\n".join(report.lines()) + "\n"
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def cmd_compare(args) -> int:
    cols, meta = read_table(args.records)
    recs = columns_to_records(cols, meta)
    n = args.n if args.n is not None else int(meta.get("n", 0))
    if n < 2:
        raise UsageError("matrix size unknown: pass --n or use a file with an 'n' footer")
    report = compare_records(recs, n, args.annulus, args.law, args.radial_threshold, args.overlap_threshold)
    _emit_report(report, args.out, args.format)
    return 0 if report.overall else 1


def cmd_verify(args) -> int:
    progress = None
    if args.format == "csv" and args.out == "-":
        progress = lambda c: print(c.line(), flush=True)  # noqa: E731
    report = run_suite(args.suite, args.workers, progress)
    if progress is not None:
        print(f"OVERALL {'PASS' if report.overall else 'FAIL'}")
    else:
        _emit_report(report, args.out, args.format)
    return 0 if report.overall else 1


COMMANDS = {
    "density": cmd_density,
    "overlap": cmd_overlap,
    "edge": cmd_edge,
    "sample": cmd_sample,
    "compare": cmd_compare,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ParseError, OSError, ValueError) as exc:
        print(f"symspec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
