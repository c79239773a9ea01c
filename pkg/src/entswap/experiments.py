"""Monte Carlo harness: conservation, concurrence bounds, rank law and
dual-path checks, with CSV/JSON emission.

Every experiment derives one random substream per sample index, so
results are reproducible bit-for-bit for a given seed regardless of how
samples are partitioned across workers. Records are sorted by sample
index (then outcome) before emission and floats are serialized with 17
significant digits, making repeated runs byte-identical.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensembles import (
    RngStream,
    haar_unitary,
    random_bell_diagonal,
    random_bures,
    random_induced,
    random_pure,
    rank2_bell_mixture,
)
from .optics import swap_via_beamsplitter
from .qstate import (
    DEFAULT_RANK_TOL,
    BellLabel,
    DensityMatrix,
    bell_density,
    concurrence,
    concurrence_x,
    numerical_rank,
    pure_concurrence,
    trace_distance,
)
from .swap import swap_all_outcomes, swap_general, swap_x_params, ImpossibleOutcome

# Hard assertion tolerances.
CONSERVATION_TOL = 1e-9
UPPER_BOUND_TOL = 1e-9
LOWER_BOUND_TOL = 1e-9
SELF_SWAP_TOL = 1e-12
ORACLE_TOL = 1e-10
# Slack allowed against the empirically fitted lower bound.
EMPIRICAL_SLACK = 0.01

HAAR_PHASE_STD = float(np.pi / np.sqrt(3.0))
HAAR_STATS_TOL = 0.02

CSV_COLUMNS = ("sample", "outcome", "c_a", "c_b", "c_f", "prob",
               "rank_a", "rank_b", "rank_f")

EXPERIMENT_NAMES = ("conserve", "belldiag", "pure", "rank",
                    "rank2-selfswap", "oracle-equiv", "haar-stats")

# Fixed stream ids keep the experiments' draws disjoint under one seed.
_STREAM_IDS = {name: i + 1 for i, name in enumerate(EXPERIMENT_NAMES)}

_OUTCOME_ORDER = {label: i for i, label in enumerate(BellLabel)}


@dataclass(frozen=True)
class ExperimentRecord:
    """One Monte Carlo row: input/output concurrences, ranks, outcome."""

    sample_index: int
    outcome: BellLabel
    c_a: float
    c_b: float
    c_f: float
    probability: float
    rank_a: int
    rank_b: int
    rank_f: int
    ratio: "float | None" = None


@dataclass
class BoundReport:
    """Violation counts and worst-case margins for one experiment run."""

    experiment: str
    samples: int
    seed: int
    violations_upper: int = 0
    violations_lower: int = 0
    max_upper_excess: float = 0.0
    max_lower_deficit: float = 0.0
    hard_violations: int = 0
    soft_violations: int = 0
    skipped: int = 0
    fit_params: "dict | None" = None
    extras: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_json_dict(self) -> dict:
        out = {
            "experiment": self.experiment,
            "samples": self.samples,
            "violations_upper": self.violations_upper,
            "violations_lower": self.violations_lower,
            "max_upper_excess": self.max_upper_excess,
            "max_lower_deficit": self.max_lower_deficit,
            "hard_violations": self.hard_violations,
            "soft_violations": self.soft_violations,
            "skipped": self.skipped,
            "runtime_ms": self.runtime_ms,
            "seed": self.seed,
        }
        if self.fit_params is not None:
            out["fit_params"] = self.fit_params
        if self.extras:
            out["extras"] = self.extras
        return out


def _sort_records(records: "list[ExperimentRecord]") -> "list[ExperimentRecord]":
    return sorted(records, key=lambda r: (r.sample_index, _OUTCOME_ORDER[r.outcome]))


def _chunk_ranges(n: int, n_chunks: int) -> "list[tuple[int, int]]":
    n_chunks = max(1, min(n_chunks, n))
    step = -(-n // n_chunks)
    return [(lo, min(lo + step, n)) for lo in range(0, n, step)]


def _run_chunks(chunk_fn, n: int, workers: int, args: tuple) -> list:
    """Run chunk_fn(start, stop, *args) over a partition of range(n)."""
    if n < 1:
        raise ValueError(f"sample count must be at least 1, got {n}")
    ranges = _chunk_ranges(n, workers * 4 if workers > 1 else 1)
    if workers <= 1:
        return [chunk_fn(lo, hi, *args) for lo, hi in ranges]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(chunk_fn, lo, hi, *args) for lo, hi in ranges]
        return [f.result() for f in futures]


def _draw_input(ensemble: str, rng: np.random.Generator) -> DensityMatrix:
    if ensemble == "bures":
        return random_bures(rng)
    if ensemble == "pure":
        return DensityMatrix.from_pure(random_pure(rng))
    if ensemble.startswith("induced-"):
        k = int(ensemble.split("-", 1)[1])
        return random_induced(rng, 4, k)
    raise ValueError(
        f"unknown ensemble {ensemble!r}; expected bures, pure or induced-1..4"
    )


# --------------------------------------------------------------------------
# conservation: swapping anything with a Bell state preserves concurrence


def _conserve_chunk(start, stop, seed, ensemble, rank_tol):
    stream = RngStream(seed, _STREAM_IDS["conserve"])
    bell = bell_density(BellLabel.PHI_PLUS)
    records, skipped = [], 0
    for i in range(start, stop):
        rng = stream.substream(i)
        rho = _draw_input(ensemble, rng)
        c_a = concurrence(rho)
        r_a = numerical_rank(rho, rank_tol)
        for res in swap_all_outcomes(rho, bell):
            if res.state is None:
                skipped += 1
                continue
            records.append(ExperimentRecord(
                sample_index=i, outcome=res.outcome,
                c_a=c_a, c_b=1.0, c_f=concurrence(res.state),
                probability=res.probability,
                rank_a=r_a, rank_b=1,
                rank_f=numerical_rank(res.state, rank_tol),
            ))
    return records, skipped


def run_conservation(samples: int, seed: int, ensemble: str = "bures",
                     rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Swap random states with phi+ and measure |C_F - C_A| per outcome."""
    t0 = time.perf_counter()
    chunks = _run_chunks(_conserve_chunk, samples, workers,
                         (seed, ensemble, rank_tol))
    records = _sort_records([r for recs, _ in chunks for r in recs])
    report = BoundReport("conserve", samples, seed,
                         skipped=sum(s for _, s in chunks))
    for r in records:
        deviation = abs(r.c_f - r.c_a)
        report.max_upper_excess = max(report.max_upper_excess, deviation)
        if deviation > CONSERVATION_TOL:
            report.violations_upper += 1
    report.hard_violations = report.violations_upper
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return records, report


# --------------------------------------------------------------------------
# Bell-diagonal pairs: C_F <= C_A C_B, empirical floor max[0, 5x/4 - 1/4]


def _belldiag_lower(x: float) -> float:
    return max(0.0, 1.25 * x - 0.25)


def _belldiag_chunk(start, stop, seed, rank_tol):
    stream = RngStream(seed, _STREAM_IDS["belldiag"])
    records, skipped = [], 0
    for i in range(start, stop):
        rng = stream.substream(i)
        xa = random_bell_diagonal(rng).to_x_state()
        xb = random_bell_diagonal(rng).to_x_state()
        c_a, c_b = concurrence_x(xa), concurrence_x(xb)
        r_a = numerical_rank(xa, rank_tol)
        r_b = numerical_rank(xb, rank_tol)
        for outcome in BellLabel:
            try:
                out, prob = swap_x_params(xa, xb, outcome)
            except ImpossibleOutcome:
                skipped += 1
                continue
            records.append(ExperimentRecord(
                sample_index=i, outcome=outcome,
                c_a=c_a, c_b=c_b, c_f=concurrence_x(out),
                probability=prob,
                rank_a=r_a, rank_b=r_b,
                rank_f=numerical_rank(out, rank_tol),
            ))
    return records, skipped


def _envelope_minima(xs, ys, n_bins):
    # per-bin minima over quantile bins, so sparse regions still
    # contribute one point each
    edges = np.quantile(xs, np.linspace(0.0, 1.0, n_bins + 1))
    pts = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mask = (xs >= lo) & (xs <= hi)
        if np.count_nonzero(mask) >= 3:
            idx = np.argmin(ys[mask])
            pts.append((xs[mask][idx], ys[mask][idx]))
    return np.array(pts)


def _fit_lower_line(records) -> "dict | None":
    # least-squares line through the lower envelope of C_F over the
    # region where the floor is active
    xs = np.array([r.c_a * r.c_b for r in records])
    ys = np.array([r.c_f for r in records])
    active = xs >= 0.25
    if np.count_nonzero(active) < 24:
        return None
    n_bins = int(np.clip(np.count_nonzero(active) // 8, 3, 20))
    pts = _envelope_minima(xs[active], ys[active], n_bins)
    if len(pts) < 3:
        return None
    slope, intercept = np.polyfit(pts[:, 0], pts[:, 1], 1)
    return {"slope": float(slope), "intercept": float(intercept)}


def run_belldiag_bounds(samples: int, seed: int,
                        rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Random Bell-diagonal pairs; product upper bound is asserted hard,
    the fitted linear floor is checked with slack and re-fitted."""
    t0 = time.perf_counter()
    chunks = _run_chunks(_belldiag_chunk, samples, workers, (seed, rank_tol))
    records = _sort_records([r for recs, _ in chunks for r in recs])
    report = BoundReport("belldiag", samples, seed,
                         skipped=sum(s for _, s in chunks))
    for r in records:
        x = r.c_a * r.c_b
        excess = r.c_f - x
        deficit = _belldiag_lower(x) - r.c_f
        report.max_upper_excess = max(report.max_upper_excess, excess)
        report.max_lower_deficit = max(report.max_lower_deficit, deficit)
        if excess > UPPER_BOUND_TOL:
            report.violations_upper += 1
        if deficit > EMPIRICAL_SLACK:
            report.violations_lower += 1
    report.hard_violations = report.violations_upper
    report.soft_violations = report.violations_lower
    report.fit_params = _fit_lower_line(records)
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return records, report


# --------------------------------------------------------------------------
# pure pairs: C_F >= (C_A C_B)^2, exponential floor re-fitted


def _pure_chunk(start, stop, seed, rank_tol):
    stream = RngStream(seed, _STREAM_IDS["pure"])
    records, skipped = [], 0
    for i in range(start, stop):
        rng = stream.substream(i)
        va, vb = random_pure(rng), random_pure(rng)
        rho_a = DensityMatrix.from_pure(va)
        rho_b = DensityMatrix.from_pure(vb)
        c_a, c_b = pure_concurrence(va), pure_concurrence(vb)
        lo_c, hi_c = min(c_a, c_b), max(c_a, c_b)
        ratio = hi_c / lo_c if lo_c > 0.0 else float("inf")
        for res in swap_all_outcomes(rho_a, rho_b):
            if res.state is None:
                skipped += 1
                continue
            records.append(ExperimentRecord(
                sample_index=i, outcome=res.outcome,
                c_a=c_a, c_b=c_b, c_f=concurrence(res.state),
                probability=res.probability,
                rank_a=1, rank_b=1,
                rank_f=numerical_rank(res.state, rank_tol),
                ratio=ratio,
            ))
    return records, skipped


def _fit_lower_exponential(records) -> "dict | None":
    # offset + scale * exp(rate * x) through the lower envelope
    from scipy.optimize import curve_fit

    xs = np.array([r.c_a * r.c_b for r in records])
    ys = np.array([r.c_f for r in records])
    if xs.size < 60:
        return None
    n_bins = int(np.clip(xs.size // 20, 6, 30))
    pts = _envelope_minima(xs, ys, n_bins)
    if len(pts) < 6:
        return None
    try:
        popt, _ = curve_fit(
            lambda x, a, b, c: a + b * np.exp(c * x),
            pts[:, 0], pts[:, 1], p0=(0.0, 0.05, 1.0), maxfev=20000,
        )
    except (RuntimeError, ValueError):
        return None
    return {"offset": float(popt[0]), "scale": float(popt[1]),
            "rate": float(popt[2])}


def run_pure_bounds(samples: int, seed: int,
                    rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Haar-random pure pairs; the squared-product lower bound is hard."""
    t0 = time.perf_counter()
    chunks = _run_chunks(_pure_chunk, samples, workers, (seed, rank_tol))
    records = _sort_records([r for recs, _ in chunks for r in recs])
    report = BoundReport("pure", samples, seed,
                         skipped=sum(s for _, s in chunks))
    for r in records:
        deficit = (r.c_a * r.c_b) ** 2 - r.c_f
        report.max_lower_deficit = max(report.max_lower_deficit, deficit)
        if deficit > LOWER_BOUND_TOL:
            report.violations_lower += 1
    report.hard_violations = report.violations_lower
    report.fit_params = _fit_lower_exponential(records)
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return records, report


# --------------------------------------------------------------------------
# rank law: R_F >= max(R_A, R_B), equality when either input is pure


def _rank_chunk(start, stop, seed, per_combo, rank_tol):
    stream = RngStream(seed, _STREAM_IDS["rank"])
    records, skipped = [], 0
    for i in range(start, stop):
        combo = i // per_combo
        k1, k2 = combo // 4 + 1, combo % 4 + 1
        rng = stream.substream(i)
        rho_a = random_induced(rng, 4, k1)
        rho_b = random_induced(rng, 4, k2)
        c_a, c_b = concurrence(rho_a), concurrence(rho_b)
        r_a = numerical_rank(rho_a, rank_tol)
        r_b = numerical_rank(rho_b, rank_tol)
        for res in swap_all_outcomes(rho_a, rho_b):
            if res.state is None:
                skipped += 1
                continue
            records.append(ExperimentRecord(
                sample_index=i, outcome=res.outcome,
                c_a=c_a, c_b=c_b, c_f=concurrence(res.state),
                probability=res.probability,
                rank_a=r_a, rank_b=r_b,
                rank_f=numerical_rank(res.state, rank_tol),
            ))
    return records, skipped


def run_rank_relation(samples_per_combo: int, seed: int,
                      rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Induced-measure pairs of every rank combination (k1, k2) in 1..4."""
    t0 = time.perf_counter()
    total = 16 * samples_per_combo
    chunks = _run_chunks(_rank_chunk, total, workers,
                         (seed, samples_per_combo, rank_tol))
    records = _sort_records([r for recs, _ in chunks for r in recs])
    report = BoundReport("rank", total, seed,
                         skipped=sum(s for _, s in chunks))
    mismatches = 0
    for r in records:
        combo = r.sample_index // samples_per_combo
        k1, k2 = combo // 4 + 1, combo % 4 + 1
        if (r.rank_a, r.rank_b) != (k1, k2):
            mismatches += 1
        floor = max(r.rank_a, r.rank_b)
        if r.rank_f < floor:
            report.violations_upper += 1
            report.max_upper_excess = max(report.max_upper_excess,
                                          float(floor - r.rank_f))
        if min(r.rank_a, r.rank_b) == 1 and r.rank_f != floor:
            report.violations_lower += 1
    report.hard_violations = (report.violations_upper
                              + report.violations_lower + mismatches)
    report.extras["input_rank_mismatches"] = mismatches
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return records, report


# --------------------------------------------------------------------------
# rank-2 self-swap: C_F equals the squared input concurrence exactly


def run_rank2_selfswap(points: int = 99, seed: int = 0,
                       rank_tol: float = DEFAULT_RANK_TOL):
    """Swap alpha psi+ + (1-alpha) psi- with itself on an alpha grid."""
    if points < 1:
        raise ValueError(f"grid size must be at least 1, got {points}")
    t0 = time.perf_counter()
    records = []
    report = BoundReport("rank2-selfswap", points, seed)
    for i in range(1, points + 1):
        alpha = i / (points + 1)
        sigma = rank2_bell_mixture(alpha)
        c_a = abs(2.0 * alpha - 1.0)
        r_a = numerical_rank(sigma, rank_tol)
        for res in swap_all_outcomes(sigma, sigma):
            if res.state is None:
                report.skipped += 1
                continue
            c_f = concurrence(res.state)
            records.append(ExperimentRecord(
                sample_index=i - 1, outcome=res.outcome,
                c_a=c_a, c_b=c_a, c_f=c_f, probability=res.probability,
                rank_a=r_a, rank_b=r_a,
                rank_f=numerical_rank(res.state, rank_tol),
            ))
            deviation = abs(c_f - c_a * c_a)
            report.max_upper_excess = max(report.max_upper_excess, deviation)
            if deviation > SELF_SWAP_TOL:
                report.violations_upper += 1
    report.hard_violations = report.violations_upper
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return _sort_records(records), report


# --------------------------------------------------------------------------
# dual-path equivalence: analytic psi- output vs beamsplitter model


def _oracle_chunk(start, stop, seed, eta, rank_tol):
    stream = RngStream(seed, _STREAM_IDS["oracle-equiv"])
    records, distances, prob_diffs = [], [], []
    for i in range(start, stop):
        rng = stream.substream(i)
        rho_a, rho_b = random_bures(rng), random_bures(rng)
        analytic = swap_general(rho_a, rho_b, BellLabel.PSI_MINUS)
        physical = swap_via_beamsplitter(rho_a, rho_b, eta)
        distances.append(trace_distance(analytic.state, physical.state))
        prob_diffs.append(abs(analytic.probability - physical.probability))
        records.append(ExperimentRecord(
            sample_index=i, outcome=BellLabel.PSI_MINUS,
            c_a=concurrence(rho_a), c_b=concurrence(rho_b),
            c_f=concurrence(analytic.state),
            probability=analytic.probability,
            rank_a=numerical_rank(rho_a, rank_tol),
            rank_b=numerical_rank(rho_b, rank_tol),
            rank_f=numerical_rank(analytic.state, rank_tol),
        ))
    return records, distances, prob_diffs


def run_oracle_equiv(samples: int, seed: int, eta: float = 0.5,
                     rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Compare the closed-form psi- swap with the beamsplitter route."""
    t0 = time.perf_counter()
    chunks = _run_chunks(_oracle_chunk, samples, workers,
                         (seed, eta, rank_tol))
    records = _sort_records([r for recs, _, _ in chunks for r in recs])
    distances = [d for _, ds, _ in chunks for d in ds]
    prob_diffs = [p for _, _, ps in chunks for p in ps]
    report = BoundReport("oracle-equiv", samples, seed)
    report.max_upper_excess = max(distances, default=0.0)
    report.max_lower_deficit = max(prob_diffs, default=0.0)
    report.violations_upper = sum(d > ORACLE_TOL for d in distances)
    report.violations_lower = sum(p > ORACLE_TOL for p in prob_diffs)
    report.hard_violations = report.violations_upper + report.violations_lower
    report.extras["max_trace_distance"] = report.max_upper_excess
    report.extras["max_probability_diff"] = report.max_lower_deficit
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return records, report


# --------------------------------------------------------------------------
# Haar sanity: eigenvalue phases of random unitaries are uniform


def _haar_chunk(start, stop, seed):
    stream = RngStream(seed, _STREAM_IDS["haar-stats"])
    count, total, total_sq = 0, 0.0, 0.0
    for i in range(start, stop):
        phases = np.angle(np.linalg.eigvals(haar_unitary(stream.substream(i), 4)))
        count += phases.size
        total += phases.sum()
        total_sq += (phases ** 2).sum()
    return count, total, total_sq


def run_haar_stats(samples: int, seed: int, workers: int = 1):
    """Phase statistics of Haar 4x4 unitaries: mean 0, std pi/sqrt(3)."""
    t0 = time.perf_counter()
    chunks = _run_chunks(_haar_chunk, samples, workers, (seed,))
    count = sum(c for c, _, _ in chunks)
    total = sum(t for _, t, _ in chunks)
    total_sq = sum(s for _, _, s in chunks)
    mean = total / count
    std = float(np.sqrt(total_sq / count - mean * mean))
    report = BoundReport("haar-stats", samples, seed)
    report.max_upper_excess = abs(mean)
    report.max_lower_deficit = abs(std - HAAR_PHASE_STD)
    report.violations_upper = int(abs(mean) > HAAR_STATS_TOL)
    report.violations_lower = int(abs(std - HAAR_PHASE_STD) > HAAR_STATS_TOL)
    report.hard_violations = report.violations_upper + report.violations_lower
    report.extras = {"phase_mean": mean, "phase_std": std,
                     "target_std": HAAR_PHASE_STD}
    report.runtime_ms = 1e3 * (time.perf_counter() - t0)
    return [], report


# --------------------------------------------------------------------------
# emission


def _format_float(x: float) -> str:
    return f"{x:.17g}"


def records_to_csv(records: "list[ExperimentRecord]") -> str:
    """Render records as CSV text; a ratio column is appended when any
    record carries one."""
    with_ratio = any(r.ratio is not None for r in records)
    header = ",".join(CSV_COLUMNS + (("ratio",) if with_ratio else ()))
    lines = [header]
    for r in records:
        cells = [
            str(r.sample_index), r.outcome.value,
            _format_float(r.c_a), _format_float(r.c_b), _format_float(r.c_f),
            _format_float(r.probability),
            str(r.rank_a), str(r.rank_b), str(r.rank_f),
        ]
        if with_ratio:
            cells.append(_format_float(r.ratio if r.ratio is not None else 0.0))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def records_to_json(records: "list[ExperimentRecord]") -> str:
    rows = []
    for r in records:
        row = {
            "sample": r.sample_index, "outcome": r.outcome.value,
            "c_a": r.c_a, "c_b": r.c_b, "c_f": r.c_f,
            "prob": r.probability,
            "rank_a": r.rank_a, "rank_b": r.rank_b, "rank_f": r.rank_f,
        }
        if r.ratio is not None:
            row["ratio"] = r.ratio
        rows.append(row)
    return json.dumps(rows, indent=None, separators=(",", ":")) + "\n"


def write_records(records, path, fmt: str = "csv") -> None:
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def write_summary(report: BoundReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(name: str, samples: int, seed: int, *,
                   ensemble: str = "bures", eta: float = 0.5,
                   rank_tol: float = DEFAULT_RANK_TOL, workers: int = 1):
    """Dispatch an experiment by CLI name; returns (records, report)."""
    if name == "conserve":
        return run_conservation(samples, seed, ensemble=ensemble,
                                rank_tol=rank_tol, workers=workers)
    if name == "belldiag":
        return run_belldiag_bounds(samples, seed, rank_tol=rank_tol,
                                   workers=workers)
    if name == "pure":
        return run_pure_bounds(samples, seed, rank_tol=rank_tol,
                               workers=workers)
    if name == "rank":
        return run_rank_relation(samples, seed, rank_tol=rank_tol,
                                 workers=workers)
    if name == "rank2-selfswap":
        return run_rank2_selfswap(points=samples, seed=seed,
                                  rank_tol=rank_tol)
    if name == "oracle-equiv":
        return run_oracle_equiv(samples, seed, eta=eta, rank_tol=rank_tol,
                                workers=workers)
    if name == "haar-stats":
        return run_haar_stats(samples, seed, workers=workers)
    raise ValueError(
        f"unknown experiment {name!r}; expected one of {EXPERIMENT_NAMES}"
    )
