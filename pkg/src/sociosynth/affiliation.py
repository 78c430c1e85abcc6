"""Schools, companies and the small cliques carved out of them.

Schools and companies are level-III groups. Every group is then split into
small sub-cliques (level II) whose sizes follow a Poisson law truncated to
at least two members.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DemographyConfig
from .population import Population
from .rng import categorical


@dataclass(frozen=True, eq=False)
class AffiliationGroup:
    id: int
    kind: str  # "school" or "company"
    label: str  # school band "[lo,hi]" or company group name
    members: np.ndarray


@dataclass(frozen=True, eq=False)
class Subclique:
    parent_group: int
    members: np.ndarray


def school_count(cohort_size: int, mean_size: float) -> int:
    if cohort_size == 0:
        return 0
    return max(1, int(np.floor(cohort_size / mean_size + 0.5)))


def assign_schools(pop: Population, config: DemographyConfig, rng: np.random.Generator,
                   first_id: int = 0) -> list[AffiliationGroup]:
    """Split each age band's cohort into evenly sized random schools."""
    groups = []
    gid = first_id
    for lo, hi, mean_size in config.schools.bands:
        cohort = np.flatnonzero((pop.age >= lo) & (pop.age <= hi))
        k = school_count(len(cohort), mean_size)
        if k == 0:
            continue
        for members in np.array_split(rng.permutation(cohort), k):
            groups.append(AffiliationGroup(gid, "school", f"[{lo},{hi}]", np.sort(members)))
            gid += 1
    return groups


def workforce(pop: Population, config: DemographyConfig) -> np.ndarray:
    """Ids of everyone of working age (before the sex-specific retirement age)."""
    c = config.companies
    retire = np.where(pop.female, c.retirement_age_women, c.retirement_age_men)
    return np.flatnonzero((pop.age >= c.working_age_min) & (pop.age < retire))


def _cut_sizes(total: int, draw) -> np.ndarray:
    """Consecutive sizes from ``draw(k)`` batches whose sum is exactly
    ``total``; the last size is truncated to the remainder."""
    sizes = np.empty(0, np.int64)
    acc = 0
    while acc < total:
        batch = draw(max(8, total - acc))
        sizes = np.concatenate([sizes, batch])
        acc = int(sizes.sum())
    cum = np.cumsum(sizes)
    k = int(np.searchsorted(cum, total, side="left"))
    sizes = sizes[:k + 1].copy()
    sizes[-1] -= int(cum[k]) - total
    return sizes


def assign_workplaces(pop: Population, config: DemographyConfig, rng: np.random.Generator,
                      first_id: int = 0) -> list[AffiliationGroup]:
    """Put every worker in a company group, then pack each group's workers
    into companies whose sizes are uniform on the group's size interval."""
    c = config.companies
    workers = workforce(pop, config)
    employed = rng.random(len(workers)) < c.employment_rate
    workers = workers[employed]
    which = categorical(rng, [g.prob for g in c.groups], len(workers))

    groups = []
    gid = first_id
    for gi, g in enumerate(c.groups):
        members = rng.permutation(workers[which == gi])
        if len(members) == 0:
            continue
        lo, hi = g.size
        sizes = _cut_sizes(len(members), lambda k: rng.integers(lo, hi + 1, size=k // lo + 1))
        for chunk in np.split(members, np.cumsum(sizes)[:-1]):
            groups.append(AffiliationGroup(gid, "company", g.name, np.sort(chunk)))
            gid += 1
    return groups


def truncated_poisson(rng: np.random.Generator, mean: float, size: int,
                      minimum: int = 2) -> np.ndarray:
    """``size`` Poisson(mean) draws conditioned on being >= ``minimum``."""
    out = np.empty(0, np.int64)
    while len(out) < size:
        batch = rng.poisson(mean, size=2 * (size - len(out)) + 16)
        out = np.concatenate([out, batch[batch >= minimum]])
    return out[:size]


def carve_subcliques(groups: list[AffiliationGroup], config: DemographyConfig,
                     rng: np.random.Generator) -> list[Subclique]:
    """Partition every group into sub-cliques of truncated-Poisson size.

    A leftover single member joins the previous sub-clique of its group.
    """
    mean = config.rules.subclique_mean
    total = sum(len(g.members) for g in groups)
    stream = truncated_poisson(rng, mean, total // 2 + 1)
    ptr = 0
    out = []
    for g in groups:
        members = rng.permutation(g.members)
        size = len(members)
        need = size // 2 + 1
        if ptr + need > len(stream):
            stream = np.concatenate([stream[ptr:], truncated_poisson(rng, mean, need + 1024)])
            ptr = 0
        cum = np.cumsum(stream[ptr:ptr + need])
        k = int(np.searchsorted(cum, size, side="left"))
        ptr += k + 1
        cuts = cum[:k].tolist()
        if k and size - cuts[-1] == 1:
            cuts.pop()
        for chunk in np.split(members, cuts):
            out.append(Subclique(g.id, np.sort(chunk)))
    return out
