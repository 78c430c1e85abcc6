"""End-to-end generation of one social graph."""

from __future__ import annotations

from dataclasses import dataclass

from .affiliation import (
    AffiliationGroup,
    Subclique,
    assign_schools,
    assign_workplaces,
    carve_subcliques,
)
from .config import DemographyConfig
from .graph import ComponentReport, SocialGraph, assemble_graph, finalize_caregivers
from .population import Population, synthesize_population
from .rng import RandomSource


@dataclass
class Generated:
    graph: SocialGraph
    population: Population
    groups: list[AffiliationGroup]
    subcliques: list[Subclique]
    components: ComponentReport

    def report(self) -> dict:
        out = self.population.report.as_dict()
        out["non_giant_sizes"] = self.components.non_giant_sizes
        out["components_initial"] = self.components.components_initial
        out["components_final"] = self.components.components_final
        out["caregiver_widened"] = self.components.caregiver_widened
        out["max_caregiver_fan_in"] = self.components.max_caregiver_fan_in
        return out


def generate(config: DemographyConfig, n: int, seed: int) -> Generated:
    source = RandomSource(seed)
    pop = synthesize_population(config, n, source)
    schools = assign_schools(pop, config, source.stream("schools"))
    companies = assign_workplaces(pop, config, source.stream("workplaces"),
                                  first_id=len(schools))
    groups = schools + companies
    subcliques = carve_subcliques(groups, config, source.stream("subcliques"))
    graph = assemble_graph(pop, subcliques, groups, seed=source.seed)
    graph, comp = finalize_caregivers(graph, pop, config, source.stream("caregivers"))
    return Generated(graph, pop, groups, subcliques, comp)
