"""Layered social graph: assembly, finalization and simple-graph views.

Levels I and II are stored as edge arrays (one row ``(u, v)`` per edge,
``u < v``, no duplicates within a level). Level III is kept as group
membership and expanded to cliques only when a view asks for it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc

from .affiliation import AffiliationGroup, Subclique
from .config import DemographyConfig
from .population import Population

CAREGIVER_WIDENING = 5


class EdgeLevel(enum.IntEnum):
    """Connection levels, ordered from most to least intimate."""

    I = 1  # noqa: E741
    II = 2
    III = 3
    IV = 4


EMPTY_EDGES = np.empty((0, 2), np.int64)


def unique_edges(edges: np.ndarray, n: int) -> np.ndarray:
    """Normalize to ``u < v``, drop self-loops and duplicates, sort."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) == 0:
        return EMPTY_EDGES
    u = np.minimum(edges[:, 0], edges[:, 1])
    v = np.maximum(edges[:, 0], edges[:, 1])
    keep = u != v
    keys = np.unique(u[keep] * n + v[keep])
    return np.stack([keys // n, keys % n], axis=1)


def clique_edges(cliques: Iterable[np.ndarray]) -> np.ndarray:
    """All member pairs of every clique."""
    by_size: dict[int, list[np.ndarray]] = {}
    for members in cliques:
        if len(members) >= 2:
            by_size.setdefault(len(members), []).append(np.asarray(members, np.int64))
    parts = []
    for s, rows in by_size.items():
        block = np.stack(rows)
        iu, ju = np.triu_indices(s, k=1)
        parts.append(np.stack([block[:, iu].ravel(), block[:, ju].ravel()], axis=1))
    return np.concatenate(parts) if parts else EMPTY_EDGES


class GraphView:
    """Simple undirected graph in compressed adjacency form."""

    def __init__(self, n: int, edges: np.ndarray):
        edges = unique_edges(edges, n) if n else EMPTY_EDGES
        self.n = int(n)
        self.num_edges = len(edges)
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        order = np.argsort(src * max(n, 1) + dst, kind="stable")
        self.indices = dst[order].astype(np.int64)
        self.indptr = np.zeros(n + 1, np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=self.indptr[1:])
        self._edges = edges

    @classmethod
    def from_edge_list(cls, n: int, pairs: Sequence[tuple[int, int]]) -> GraphView:
        return cls(n, np.asarray(pairs, np.int64).reshape(-1, 2))

    def edges(self) -> np.ndarray:
        return self._edges

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def to_csr(self) -> csr_matrix:
        data = np.ones(len(self.indices), np.int8)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))


@dataclass(frozen=True)
class Components:
    count: int
    labels: np.ndarray

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.count)


def connected_components(view: GraphView) -> Components:
    if view.n == 0:
        return Components(0, np.empty(0, np.int64))
    count, labels = _cc(view.to_csr(), directed=False)
    return Components(int(count), labels.astype(np.int64))


@dataclass(frozen=True)
class SocialGraph:
    n: int
    levels: dict[EdgeLevel, np.ndarray]
    groups: tuple[AffiliationGroup, ...] = ()
    seed: int | None = None

    def edges(self, level: EdgeLevel) -> np.ndarray:
        return self.levels.get(EdgeLevel(level), EMPTY_EDGES)


@dataclass
class ComponentReport:
    components_initial: int = 0
    components_before_repair: int = 0
    non_giant_sizes: list[int] = field(default_factory=list)
    repair_edges: int = 0
    caregiver_edges: int = 0
    caregiver_widened: int = 0
    caregiver_fallbacks: int = 0
    max_caregiver_fan_in: int = 0
    components_final: int = 0


def assemble_graph(pop: Population, subcliques: Iterable[Subclique],
                   groups: Iterable[AffiliationGroup], seed: int | None = None) -> SocialGraph:
    """Households become level-I cliques, sub-cliques level-II cliques."""
    n = pop.n
    level1 = unique_edges(clique_edges(pop.households()), n)
    level2 = unique_edges(clique_edges(s.members for s in subcliques), n)
    return SocialGraph(n=n, levels={EdgeLevel.I: level1, EdgeLevel.II: level2},
                       groups=tuple(groups), seed=seed)


def _normalize_levels(levels) -> set[EdgeLevel]:
    out = {EdgeLevel(int(lv)) for lv in levels}
    if not out:
        raise ValueError("level set must not be empty")
    return out


def level_view(graph: SocialGraph, levels) -> GraphView:
    """Union of the requested levels as one simple graph."""
    wanted = _normalize_levels(levels)
    parts = [graph.edges(lv) for lv in sorted(wanted) if lv != EdgeLevel.III]
    if EdgeLevel.III in wanted:
        parts.append(clique_edges(g.members for g in graph.groups))
    return GraphView(graph.n, np.concatenate(parts) if parts else EMPTY_EDGES)


def _attach(sources: np.ndarray, candidates: np.ndarray, ages: np.ndarray,
            gap: tuple[int, int], adult_age: int, rng: np.random.Generator,
            unit: np.ndarray | None = None) -> tuple[np.ndarray, int, int]:
    """Partner each source with a candidate younger by ``gap`` years.

    Candidates sharing the source's unit (household) are skipped. Without a
    match the window is widened by five years each way, then any adult
    candidate is taken. Returns targets and the widened/fallback counts.
    """
    if unit is None:
        unit = np.arange(len(ages))
    order = candidates[np.argsort(ages[candidates], kind="stable")]
    sorted_ages = ages[order]
    src_age = ages[sources]
    lo = np.searchsorted(sorted_ages, src_age - gap[1], side="left")
    hi = np.searchsorted(sorted_ages, src_age - gap[0], side="right")
    u = rng.random(len(sources))
    target = np.full(len(sources), -1, np.int64)
    ok = hi > lo
    target[ok] = order[lo[ok] + (u[ok] * (hi[ok] - lo[ok])).astype(np.int64)]
    bad = np.flatnonzero((target < 0) | (unit[np.maximum(target, 0)] == unit[sources]))

    widened = fallbacks = 0
    adults = order[sorted_ages >= adult_age]
    for i in bad.tolist():
        own = unit[sources[i]]
        target[i] = -1
        for widen in (0, CAREGIVER_WIDENING):
            a = np.searchsorted(sorted_ages, src_age[i] - gap[1] - widen, side="left")
            b = np.searchsorted(sorted_ages, src_age[i] - gap[0] + widen, side="right")
            window = order[a:b]
            window = window[unit[window] != own]
            if len(window):
                target[i] = window[int(u[i] * len(window))]
                widened += bool(widen)
                break
        if target[i] >= 0:
            continue
        pool = adults[unit[adults] != own]
        if len(pool) == 0:
            pool = order[unit[order] != own]
        if len(pool):
            target[i] = pool[rng.integers(len(pool))]
            fallbacks += 1
    return target, widened, fallbacks


def _units(pop: Population) -> np.ndarray:
    """Household id per person; people outside households are their own unit."""
    hh = pop.household
    solo = hh < 0
    unit = hh.copy()
    base = int(hh.max()) + 1 if len(hh) else 0
    unit[solo] = base + np.flatnonzero(solo)
    return unit


def _oldest_per_label(labels: np.ndarray, ages: np.ndarray) -> np.ndarray:
    """Oldest member of each label (lowest id among equals), by label order."""
    order = np.lexsort((np.arange(len(labels)), -ages, labels))
    first = np.unique(labels[order], return_index=True)[1]
    return order[first]


def finalize_caregivers(graph: SocialGraph, pop: Population, config: DemographyConfig,
                        rng: np.random.Generator) -> tuple[SocialGraph, ComponentReport]:
    """Give people without outside contacts a younger caregiver, then
    (optionally) attach every leftover small component to the giant one.

    With the "node" caregiver scope only people with no level I+II edge at
    all get a caregiver. With the "household" scope a whole household with
    no edge leaving it gets one, through its oldest member. Caregiver and
    repair links are both level II.
    """
    n = graph.n
    rules = config.rules
    report = ComponentReport()
    view = level_view(graph, {EdgeLevel.I, EdgeLevel.II})
    report.components_initial = connected_components(view).count

    unit = _units(pop)
    if rules.caregiver_scope == "node":
        closed = view.degrees() == 0
        sources = np.flatnonzero(closed)
    else:
        e = view.edges()
        crossing = unit[e[:, 0]] != unit[e[:, 1]]
        open_units = np.unique(unit[e[crossing].ravel()])
        closed = ~np.isin(unit, open_units)
        members = np.flatnonzero(closed)
        sources = members[_oldest_per_label(unit[members], pop.age[members])]

    added = [EMPTY_EDGES]
    if len(sources):
        target, widened, fallbacks = _attach(sources, np.arange(n), pop.age, rules.caregiver_gap,
                                             rules.legal_marriage_age, rng, unit)
        ok = target >= 0
        added.append(np.stack([sources[ok], target[ok]], axis=1))
        report.caregiver_edges = int(ok.sum())
        report.caregiver_widened = widened
        report.caregiver_fallbacks = fallbacks
        if ok.any():
            report.max_caregiver_fan_in = int(np.bincount(target[ok]).max())

    level2 = unique_edges(np.concatenate([graph.edges(EdgeLevel.II), *added]), n)
    graph = replace(graph, levels={**graph.levels, EdgeLevel.II: level2})
    comps = connected_components(level_view(graph, {EdgeLevel.I, EdgeLevel.II}))
    report.components_before_repair = comps.count
    sizes = comps.sizes
    giant = int(np.argmax(sizes)) if comps.count else 0
    report.non_giant_sizes = sorted((int(s) for i, s in enumerate(sizes) if i != giant),
                                    reverse=True)

    if rules.repair_disconnected and comps.count > 1:
        labels = comps.labels
        oldest = _oldest_per_label(labels, pop.age)
        oldest = oldest[labels[oldest] != giant]
        target, _, _ = _attach(oldest, np.flatnonzero(labels == giant), pop.age,
                               rules.caregiver_gap, rules.legal_marriage_age, rng)
        repairs = np.stack([oldest, target], axis=1)
        report.repair_edges = len(repairs)
        level2 = unique_edges(np.concatenate([level2, repairs]), n)
        graph = replace(graph, levels={**graph.levels, EdgeLevel.II: level2})
        report.components_final = 1
    else:
        report.components_final = comps.count

    pop.report.caregiver_edges = report.caregiver_edges
    pop.report.caregiver_fallbacks = report.caregiver_fallbacks
    pop.report.repair_edges = report.repair_edges
    pop.report.components_before_repair = report.components_before_repair
    return graph, report
