"""Individuals, marital statuses, partnerships and households.

Covers the first four generation stages: drawing ages and sexes from the
age pyramid, sampling men's marital statuses, pairing partnered men with
women, and attaching children to family units. Every stage mutates the
:class:`Population` in place and returns it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .config import DemographyConfig, MaritalTable, interval_index
from .rng import categorical

PARTNER_SEARCH_WIDENING = 5


class MaritalStatus(enum.IntEnum):
    BACHELOR = 0
    MARRIED = 1
    COHABITANT = 2
    DIVORCED = 3
    WIDOWED = 4

    def label(self, female: bool) -> str:
        if female:
            return {0: "single", 4: "widow"}.get(self.value, self.name.lower())
        return {4: "widower"}.get(self.value, self.name.lower())


PARTNERED = (MaritalStatus.MARRIED, MaritalStatus.COHABITANT)


@dataclass(frozen=True)
class Individual:
    id: int
    age: int
    sex: str
    marital: MaritalStatus
    household: int | None


@dataclass
class GenerationReport:
    partnership_downgrades: int = 0
    widened_matches: int = 0
    kid_shortfall: int = 0
    families_short: int = 0
    caregiver_edges: int = 0
    caregiver_fallbacks: int = 0
    repair_edges: int = 0
    components_before_repair: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


@dataclass
class Population:
    age: np.ndarray
    female: np.ndarray
    marital: np.ndarray
    partner: np.ndarray
    household: np.ndarray
    partnerships: np.ndarray = field(default_factory=lambda: np.empty((0, 2), np.int64))
    parent_child: np.ndarray = field(default_factory=lambda: np.empty((0, 2), np.int64))
    report: GenerationReport = field(default_factory=GenerationReport)

    @property
    def n(self) -> int:
        return len(self.age)

    @property
    def unassigned_child_pool(self) -> np.ndarray:
        return np.flatnonzero(self.household < 0)

    def individual(self, i: int) -> Individual:
        hh = int(self.household[i])
        return Individual(
            id=int(i),
            age=int(self.age[i]),
            sex="female" if self.female[i] else "male",
            marital=MaritalStatus(int(self.marital[i])),
            household=hh if hh >= 0 else None,
        )

    def households(self) -> list[np.ndarray]:
        """Member ids of each household, indexed by household id."""
        ids = np.flatnonzero(self.household >= 0)
        if len(ids) == 0:
            return []
        order = ids[np.argsort(self.household[ids], kind="stable")]
        hh = self.household[order]
        cuts = np.flatnonzero(np.diff(hh)) + 1
        return np.split(order, cuts)


def synthesize_ages(config: DemographyConfig, n: int, rng: np.random.Generator) -> Population:
    """Draw ``n`` individuals: interval from the pyramid shares, age uniform
    within the interval, sex from the interval's female fraction."""
    if n < 2:
        raise ValueError(f"population size must be at least 2, got {n}")
    pyr = config.pyramid
    bounds = np.array(pyr.intervals())
    which = categorical(rng, pyr.share, n)
    ages = rng.integers(bounds[which, 0], bounds[which, 1] + 1)
    female = rng.random(n) < np.asarray(pyr.female_fraction)[which]
    return Population(
        age=ages.astype(np.int64),
        female=female,
        marital=np.zeros(n, np.int8),
        partner=np.full(n, -1, np.int64),
        household=np.full(n, -1, np.int64),
    )


def _sample_statuses(pop: Population, ids: np.ndarray, table: MaritalTable,
                     rng: np.random.Generator, allowed=None) -> None:
    which = interval_index(table.borders, pop.age[ids])
    probs = np.asarray(table.probs, dtype=float)
    if allowed is not None:
        probs = probs * allowed
    for i in range(len(table.borders)):
        sel = ids[which == i]
        row = probs[i]
        if len(sel) == 0:
            continue
        if row.sum() <= 0:
            pop.marital[sel] = MaritalStatus.BACHELOR
            continue
        pop.marital[sel] = categorical(rng, row / row.sum(), len(sel))


def assign_marital_men(pop: Population, config: DemographyConfig,
                       rng: np.random.Generator) -> Population:
    men = np.flatnonzero(~pop.female)
    _sample_statuses(pop, men, config.marital_men, rng)
    underage = men[pop.age[men] < config.rules.legal_marriage_age]
    pop.marital[underage] = MaritalStatus.BACHELOR
    return pop


def form_partnerships(pop: Population, config: DemographyConfig,
                      rng: np.random.Generator) -> Population:
    """Pair every married or cohabiting man with an unpaired woman.

    The woman's target age is the man's age minus a gap drawn from the age
    gap table. Without an exact match the search widens by one year at a
    time up to five years either side; past that the man is downgraded to
    bachelor. Unpaired women then get statuses from their own table,
    restricted to the unpartnered statuses.
    """
    legal = config.rules.legal_marriage_age
    max_age = int(pop.age.max())
    men = np.flatnonzero(~pop.female & np.isin(pop.marital, PARTNERED))
    men = rng.permutation(men)
    gaps = np.asarray(config.age_gap.gap_values)[
        categorical(rng, config.age_gap.gap_probs, len(men))]
    coins = rng.random(len(men)) < 0.5

    women = np.flatnonzero(pop.female & (pop.age >= legal))
    women = rng.permutation(women)
    buckets: list[list[int]] = [[] for _ in range(max_age + 1)]
    for w, a in zip(women.tolist(), pop.age[women].tolist()):
        buckets[a].append(w)

    pairs = []
    report = pop.report
    ages = pop.age
    for m, gap, coin in zip(men.tolist(), gaps.tolist(), coins.tolist()):
        target = int(ages[m]) - gap
        chosen = -1
        for d in range(PARTNER_SEARCH_WIDENING + 1):
            options = (target - d, target + d) if coin else (target + d, target - d)
            for a in options:
                if legal <= a <= max_age and buckets[a]:
                    chosen = buckets[a].pop()
                    break
            if chosen >= 0:
                if d:
                    report.widened_matches += 1
                break
        if chosen < 0:
            pop.marital[m] = MaritalStatus.BACHELOR
            report.partnership_downgrades += 1
            continue
        pop.marital[chosen] = pop.marital[m]
        pop.partner[m] = chosen
        pop.partner[chosen] = m
        pairs.append((m, chosen))

    pop.partnerships = np.array(pairs, dtype=np.int64).reshape(-1, 2)

    remaining = np.flatnonzero(pop.female & (pop.partner < 0))
    allowed = np.ones(5)
    allowed[list(PARTNERED)] = 0.0
    _sample_statuses(pop, remaining, config.marital_women, rng, allowed=allowed)
    pop.marital[remaining[pop.age[remaining] < legal]] = MaritalStatus.BACHELOR
    return pop


class _AgePool:
    """Unplaced individuals bucketed by age, with O(1) removal."""

    def __init__(self, ids: np.ndarray, ages: np.ndarray, max_age: int):
        self.buckets: list[list[int]] = [[] for _ in range(max_age + 1)]
        self.pos = {}
        for i, a in zip(ids.tolist(), ages[ids].tolist()):
            self.pos[i] = len(self.buckets[a])
            self.buckets[a].append(i)
        self.ages = ages

    def __contains__(self, i: int) -> bool:
        return i in self.pos

    def remove(self, i: int) -> None:
        bucket = self.buckets[int(self.ages[i])]
        p = self.pos.pop(i)
        last = bucket.pop()
        if last != i:
            bucket[p] = last
            self.pos[last] = p

    def take(self, lo: int, hi: int, u_age: float, u_member: float) -> int:
        """Remove and return a member aged within [lo, hi], or -1.

        The age is drawn uniformly from the window first; if nobody has that
        age the member is drawn uniformly from everyone in the window.
        """
        lo = max(lo, 0)
        hi = min(hi, len(self.buckets) - 1)
        if lo > hi:
            return -1
        bucket = self.buckets[lo + int(u_age * (hi - lo + 1))]
        if bucket:
            i = bucket[int(u_member * len(bucket))]
            self.remove(i)
            return i
        sizes = [len(self.buckets[a]) for a in range(lo, hi + 1)]
        total = sum(sizes)
        if total == 0:
            return -1
        r = int(u_member * total)
        for a, s in zip(range(lo, hi + 1), sizes):
            if r < s:
                i = self.buckets[a][r]
                self.remove(i)
                return i
            r -= s
        raise AssertionError("unreachable")


def attach_children(pop: Population, config: DemographyConfig,
                    rng: np.random.Generator) -> Population:
    """Give each family unit a kid count and fill it from unplaced individuals.

    Family units are partnered couples and unpartnered adults. Children must
    be younger than every parent of the unit by an amount within the
    configured parent-kid gap. Units are processed in random order; an
    unpartnered adult already taken as someone's child is not a unit.
    """
    kids = config.kids
    gap_lo, gap_hi = kids.parent_kid_gap
    legal = config.rules.legal_marriage_age
    ages = pop.age

    pairs = pop.partnerships
    singles = np.flatnonzero((pop.partner < 0) & (ages >= legal))
    # unit rows: (head, second parent or -1, reference age, kind)
    n_pairs = len(pairs)
    heads = np.concatenate([pairs[:, 1], singles]).astype(np.int64)
    others = np.concatenate([pairs[:, 0], np.full(len(singles), -1)]).astype(np.int64)
    kind = np.concatenate([np.zeros(n_pairs, np.int64),
                           np.where(pop.female[singles], 2, 1)])

    counts = np.zeros(len(heads), np.int64)
    which = interval_index(kids.borders, ages[heads])
    for k, name in enumerate(("pair", "single_man", "single_woman")):
        rows = np.asarray(kids.probs[name], dtype=float)
        for i in range(len(kids.borders)):
            sel = np.flatnonzero((kind == k) & (which == i))
            if len(sel):
                counts[sel] = categorical(rng, rows[i], len(sel))

    order = rng.permutation(len(heads))
    uniforms = rng.random((int(counts.sum()), 2)).tolist()

    in_pair = pop.partner >= 0
    pool = _AgePool(np.flatnonzero(~in_pair), ages, int(ages.max()))
    household = pop.household
    next_hh = 0
    for m, w in pairs.tolist():
        household[m] = household[w] = next_hh
        next_hh += 1

    links = []
    report = pop.report
    cursor = 0
    heads_l, others_l, counts_l = heads.tolist(), others.tolist(), counts.tolist()
    ages_l = ages.tolist()
    for u in order.tolist():
        head, other, want = heads_l[u], others_l[u], counts_l[u]
        draws = uniforms[cursor:cursor + want]
        cursor += want
        if other < 0 and head not in pool:
            continue
        if want == 0:
            continue
        if other >= 0:
            older = max(ages_l[head], ages_l[other])
            younger = min(ages_l[head], ages_l[other])
        else:
            older = younger = ages_l[head]
        lo, hi = older - gap_hi, younger - gap_lo
        got = []
        for u_age, u_member in draws:
            c = pool.take(lo, hi, u_age, u_member)
            if c < 0:
                break
            got.append(c)
        if len(got) < want:
            report.kid_shortfall += want - len(got)
            report.families_short += 1
        if not got:
            continue
        if other < 0:
            pool.remove(head)
            hh = next_hh
            next_hh += 1
            household[head] = hh
        else:
            hh = household[head]
        for c in got:
            household[c] = hh
            links.append((head, c))
            if other >= 0:
                links.append((other, c))

    pop.parent_child = np.array(links, dtype=np.int64).reshape(-1, 2)
    return pop


def synthesize_population(config: DemographyConfig, n: int, source) -> Population:
    """Run the four population stages with per-stage streams of ``source``."""
    pop = synthesize_ages(config, n, source.stream("ages"))
    assign_marital_men(pop, config, source.stream("marital_men"))
    form_partnerships(pop, config, source.stream("partnerships"))
    attach_children(pop, config, source.stream("children"))
    return pop
