import copy
import sys
from pathlib import Path

import numpy as np
import pytest
import yaml

sys.path.insert(0, str(Path(__file__).parent))

from sociosynth.config import config_from_dict, example_config, example_config_text  # noqa: E402
from sociosynth.population import GenerationReport, MaritalStatus, Population  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


def example_doc() -> dict:
    return yaml.safe_load(example_config_text())


def minimal_doc() -> dict:
    """Single age interval, everybody a bachelor, no kids."""
    bachelor = [1.0, 0.0, 0.0, 0.0, 0.0]
    none = [[1.0]]
    return {
        "schema_version": 1,
        "pyramid": {"borders": [95], "share": [1.0], "female_fraction": [0.5]},
        "marital_men": {"borders": [95], "probs": [bachelor]},
        "marital_women": {"borders": [95], "probs": [bachelor]},
        "age_gap": {"values": [0], "probs": [1.0]},
        "kids": {"borders": [95], "pair": none, "single_man": none, "single_woman": none},
        "schools": {"bands": [[0, 17, 100]]},
        "companies": {
            "groups": {
                "micro": {"size": [1, 9], "prob": 0.25},
                "small": {"size": [10, 49], "prob": 0.25},
                "average": {"size": [50, 249], "prob": 0.25},
                "big": {"size": [250, 1000], "prob": 0.25},
            },
            "retirement_age_men": 65,
            "retirement_age_women": 60,
            "working_age_min": 18,
        },
        "rules": {},
    }


def edit(doc: dict, **changes) -> dict:
    """Copy of ``doc`` with dotted-path keys replaced, e.g. ``pyramid__share=[...]``."""
    out = copy.deepcopy(doc)
    for key, value in changes.items():
        *parents, leaf = key.split("__")
        node = out
        for p in parents:
            node = node[p]
        node[leaf] = value
    return out


def config(doc: dict):
    return config_from_dict(doc)


def make_population(ages, female, marital=None, partner=None, household=None) -> Population:
    n = len(ages)
    return Population(
        age=np.asarray(ages, np.int64),
        female=np.asarray(female, bool),
        marital=np.asarray(marital if marital is not None else [0] * n, np.int8),
        partner=np.asarray(partner if partner is not None else [-1] * n, np.int64),
        household=np.asarray(household if household is not None else [-1] * n, np.int64),
        report=GenerationReport(),
    )


MARRIED = int(MaritalStatus.MARRIED)


@pytest.fixture(scope="session")
def example():
    return example_config()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
