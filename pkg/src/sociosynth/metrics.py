"""Structural measurements on a simple-graph view.

Degree histograms with a straight-line power-law fit of their descending
tail, average local and global clustering, and exact radius/diameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import _kernels
from .graph import GraphView, connected_components

DEFAULT_ECCENTRICITY_CUTOFF = 200_000


class FitUnavailable(ValueError):
    """The histogram has too few non-empty bins beyond its mode."""


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class DegreeHistogram:
    counts: Mapping[int, float]
    n: float

    def degrees(self) -> np.ndarray:
        return np.array(sorted(self.counts), dtype=np.int64)

    def mode(self) -> int:
        # smallest degree among the most frequent
        return max(sorted(self.counts), key=lambda k: self.counts[k])

    def mean_degree(self) -> float:
        total = sum(self.counts.values())
        return sum(k * c for k, c in self.counts.items()) / total if total else 0.0


@dataclass(frozen=True)
class PowerFit:
    exponent: float
    fit_range: tuple[int, int]
    r_squared: float
    intercept: float = 0.0


def degree_histogram(view: GraphView) -> DegreeHistogram:
    counts = np.bincount(view.degrees())
    return DegreeHistogram({int(k): int(c) for k, c in enumerate(counts) if c}, view.n)


def average_histograms(hists: list[DegreeHistogram]) -> DegreeHistogram:
    """Bin-wise mean over runs (a bin missing from a run counts as zero)."""
    if not hists:
        raise ValueError("no histograms to average")
    keys = sorted(set().union(*(h.counts for h in hists)))
    m = len(hists)
    counts = {k: sum(h.counts.get(k, 0) for h in hists) / m for k in keys}
    return DegreeHistogram(counts, sum(h.n for h in hists) / m)


def fit_power_tail(hist: DegreeHistogram, min_bins: int = 3) -> PowerFit:
    """Least-squares line through (log k, log count) for k above the mode.

    Zero-count bins are left out. The exponent is the negated slope.
    """
    mode = hist.mode()
    ks = np.array([k for k in sorted(hist.counts) if k > mode and hist.counts[k] > 0], float)
    if len(ks) < min_bins:
        raise FitUnavailable(f"only {len(ks)} non-empty bins above the mode {mode}")
    ys = np.array([hist.counts[int(k)] for k in ks], float)
    x, y = np.log(ks), np.log(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float((resid ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return PowerFit(float(-slope), (int(ks[0]), int(ks[-1])), max(0.0, r2), float(intercept))


def clustering_coefficients(view: GraphView) -> tuple[float, float]:
    """(average local clustering, global transitivity).

    Nodes of degree below two contribute a local coefficient of zero.
    """
    if view.n == 0:
        return 0.0, 0.0
    tri = _kernels.triangles_per_node(view.indptr, view.indices)
    deg = view.degrees().astype(np.int64)
    wedges = deg * (deg - 1) // 2
    local = np.zeros(view.n)
    np.divide(tri, wedges, out=local, where=wedges > 0)
    total_wedges = int(wedges.sum())
    transitivity = float(tri.sum()) / total_wedges if total_wedges else 0.0
    return float(local.mean()), transitivity


def radius_diameter(view: GraphView) -> tuple[int, int]:
    """Exact radius and diameter in hops; the view must be connected."""
    if view.n == 0:
        raise ValueError("empty graph has no eccentricities")
    if view.n > 1 and connected_components(view).count != 1:
        raise DisconnectedGraphError("radius/diameter need a connected graph")
    r, d, _ = _kernels.bounding_eccentricities(view.indptr, view.indices)
    return int(r), int(d)


@dataclass
class MetricsRecord:
    n: int
    seed: int | None
    histogram: DegreeHistogram
    mean_degree: float
    max_degree: int
    exponent: float | None
    r_squared: float | None
    radius: int | None
    diameter: int | None
    cc_local: float
    cc_global: float
    components_repaired: int = 0
    fit_range: tuple[int, int] | None = None


def measure(view: GraphView, seed: int | None = None, components_repaired: int = 0,
            eccentricity_cutoff: int = DEFAULT_ECCENTRICITY_CUTOFF) -> MetricsRecord:
    hist = degree_histogram(view)
    try:
        fit = fit_power_tail(hist)
        exponent, r2, fit_range = fit.exponent, fit.r_squared, fit.fit_range
    except FitUnavailable:
        exponent = r2 = fit_range = None
    radius = diameter = None
    if view.n <= eccentricity_cutoff:
        radius, diameter = radius_diameter(view)
    cc_local, cc_global = clustering_coefficients(view)
    deg = view.degrees()
    return MetricsRecord(
        n=view.n,
        seed=seed,
        histogram=hist,
        mean_degree=float(deg.mean()) if view.n else math.nan,
        max_degree=int(deg.max()) if view.n else 0,
        exponent=exponent,
        r_squared=r2,
        radius=radius,
        diameter=diameter,
        cc_local=cc_local,
        cc_global=cc_global,
        components_repaired=components_repaired,
        fit_range=fit_range,
    )
