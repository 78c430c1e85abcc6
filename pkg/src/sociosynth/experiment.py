"""Multi-size, multi-run experiments and their aggregation.

Each (size, repetition) pair is an independent run with seed
``run_seed(base_seed, size, repetition)``. Runs may execute in worker
processes; results are always reduced in (size, repetition) order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .config import DemographyConfig
from .graph import EdgeLevel, level_view
from .metrics import (
    DEFAULT_ECCENTRICITY_CUTOFF,
    DegreeHistogram,
    FitUnavailable,
    MetricsRecord,
    average_histograms,
    fit_power_tail,
    measure,
)
from .pipeline import generate
from .rng import run_seed

DEFAULT_SCHEDULE = {1_000: 30, 10_000: 20, 100_000: 10, 1_000_000: 5}

CSV_COLUMNS = (
    "n", "runs", "mean_deg", "std_deg", "exponent", "exponent_std",
    "radius", "radius_std", "diameter", "diameter_std",
    "cc_local", "cc_local_std", "cc_global", "cc_global_std", "components_repaired",
)


class ExperimentError(RuntimeError):
    def __init__(self, size: int, seed: int, cause: BaseException):
        self.size = size
        self.seed = seed
        super().__init__(f"run failed at n={size} seed={seed}: {cause!r}")


def default_sizes(points: int = 7) -> list[int]:
    """Sizes spread uniformly in log scale from 10^3 to 10^6."""
    return sorted({int(round(x)) for x in np.logspace(3, 6, points)})


def default_repetitions(size: int) -> int:
    """Linear-in-log interpolation of the default schedule, clamped at its ends."""
    xs = sorted(DEFAULT_SCHEDULE)
    ys = [DEFAULT_SCHEDULE[x] for x in xs]
    reps = np.interp(math.log10(size), [math.log10(x) for x in xs], ys)
    return max(1, int(round(float(reps))))


@dataclass(frozen=True)
class ExperimentPlan:
    sizes: tuple[int, ...] = field(default_factory=lambda: tuple(default_sizes()))
    repetitions: Mapping[int, int] | int | None = None
    eccentricity_cutoff: int = DEFAULT_ECCENTRICITY_CUTOFF
    base_seed: int = 0
    levels: tuple[int, ...] = (1, 2)

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ValueError("plan needs at least one size")
        if any(s < 2 for s in sizes):
            raise ValueError("graph sizes must be at least 2")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be strictly ascending")
        object.__setattr__(self, "sizes", sizes)
        for s in sizes:
            if self.reps(s) < 1:
                raise ValueError(f"repetitions for n={s} must be at least 1")

    def reps(self, size: int) -> int:
        if self.repetitions is None:
            return default_repetitions(size)
        if isinstance(self.repetitions, int):
            return self.repetitions
        return int(self.repetitions.get(size, default_repetitions(size)))

    def runs(self) -> list[tuple[int, int, int]]:
        """(size, repetition, seed) in reduction order."""
        return [(s, r, run_seed(self.base_seed, s, r)) for s in self.sizes for r in range(self.reps(s))]


def run_once(config: DemographyConfig, n: int, seed: int,
             eccentricity_cutoff: int = DEFAULT_ECCENTRICITY_CUTOFF,
             levels: Sequence[int] = (1, 2)) -> MetricsRecord:
    try:
        gen = generate(config, n, seed)
        view = level_view(gen.graph, {EdgeLevel(lv) for lv in levels})
        return measure(view, seed, gen.components.repair_edges, eccentricity_cutoff)
    except Exception as exc:
        raise ExperimentError(n, seed, exc) from exc


def _run_job(args) -> MetricsRecord:
    return run_once(*args)


def worker_count() -> int:
    cap = os.environ.get("SOCIOSYNTH_THREADS")
    cpus = os.cpu_count() or 1
    if cap:
        try:
            return max(1, min(cpus, int(cap)))
        except ValueError:
            raise ValueError(f"SOCIOSYNTH_THREADS must be an integer, got {cap!r}") from None
    return cpus


@dataclass
class SizeSummary:
    n: int
    records: list[MetricsRecord]
    histogram: DegreeHistogram
    histogram_std: dict[int, float]

    def row(self) -> dict[str, float | int | None]:
        recs = self.records

        def stats(values):
            vals = [v for v in values if v is not None]
            if not vals:
                return None, None
            arr = np.asarray(vals, float)
            return float(arr.mean()), float(arr.std())

        try:
            exponent = fit_power_tail(self.histogram).exponent
        except FitUnavailable:
            exponent = None
        _, exponent_std = stats(r.exponent for r in recs)
        mean_deg, std_deg = stats(r.mean_degree for r in recs)
        radius, radius_std = stats(r.radius for r in recs)
        diameter, diameter_std = stats(r.diameter for r in recs)
        cc_local, cc_local_std = stats(r.cc_local for r in recs)
        cc_global, cc_global_std = stats(r.cc_global for r in recs)
        repaired, _ = stats(r.components_repaired for r in recs)
        return {
            "n": self.n, "runs": len(recs), "mean_deg": mean_deg, "std_deg": std_deg,
            "exponent": exponent, "exponent_std": exponent_std,
            "radius": radius, "radius_std": radius_std,
            "diameter": diameter, "diameter_std": diameter_std,
            "cc_local": cc_local, "cc_local_std": cc_local_std,
            "cc_global": cc_global, "cc_global_std": cc_global_std,
            "components_repaired": repaired,
        }


def summarize(n: int, records: list[MetricsRecord]) -> SizeSummary:
    hist = average_histograms([r.histogram for r in records])
    std = {k: float(np.std([r.histogram.counts.get(k, 0) for r in records])) for k in hist.counts}
    return SizeSummary(n, records, hist, std)


def run_experiment(plan: ExperimentPlan, config: DemographyConfig,
                   workers: int | None = None) -> list[SizeSummary]:
    jobs = [(config, s, seed, plan.eccentricity_cutoff, plan.levels) for s, _, seed in plan.runs()]
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or len(jobs) == 1:
        records = [_run_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_job, jobs))
    by_size: dict[int, list[MetricsRecord]] = {}
    for (s, _, _), rec in zip(plan.runs(), records):
        by_size.setdefault(s, []).append(rec)
    return [summarize(s, by_size[s]) for s in plan.sizes]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_csv(header: Sequence[str], rows: Sequence[Mapping | Sequence]) -> str:
    out = [",".join(header)]
    for row in rows:
        values = [row[c] for c in header] if isinstance(row, Mapping) else row
        out.append(",".join(_fmt(v) for v in values))
    return "\n".join(out) + "\n"


def parse_csv(text: str) -> list[dict[str, float | None]]:
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    return [{h: (float(x) if x else None) for h, x in zip(header, ln.split(","))} for ln in lines[1:]]


def write_results(out_dir: str | Path, summaries: list[SizeSummary]) -> list[Path]:
    """Aggregated metrics CSV plus one x,y,y_err file per figure."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [s.row() for s in summaries]
    written = []

    def put(name: str, text: str) -> None:
        path = out / name
        path.write_text(text, encoding="utf-8", newline="\n")
        written.append(path)

    put("metrics.csv", format_csv(CSV_COLUMNS, rows))
    xy = ("x", "y", "y_err")
    for s in summaries:
        pts = [(k, s.histogram.counts[k], s.histogram_std[k]) for k in sorted(s.histogram.counts)]
        put(f"degree_histogram_n{s.n}.csv", format_csv(xy, pts))
    for name, col in (("radius", "radius"), ("diameter", "diameter"),
                      ("clustering_local", "cc_local"), ("clustering_global", "cc_global"),
                      ("exponent", "exponent")):
        pts = [(r["n"], r[col], r[f"{col}_std"]) for r in rows if r[col] is not None]
        put(f"{name}.csv", format_csv(xy, pts))
    return written
