import math

import pytest
import yaml
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import config, edit, example_doc, minimal_doc
from sociosynth.config import (
    AgePyramid,
    ConfigError,
    ConfigValidationError,
    interval_bounds,
    interval_index,
    load_config,
    resolve_config,
    serialize,
    validate,
)


def dump(doc):
    return yaml.safe_dump(doc)


def test_example_pyramid_is_merged_to_eleven_intervals():
    cfg = load_config(dump(example_doc()))
    assert len(cfg.pyramid.borders) == 11
    assert cfg.pyramid.intervals()[-1] == (65, 95)  # i.e. (64, 95]
    assert cfg.pyramid.borders[-2] == 64


def test_shares_not_summing_to_one_name_the_field():
    doc = example_doc()
    share = list(doc["pyramid"]["share"])
    share[0] -= 0.03
    with pytest.raises(ConfigValidationError) as err:
        load_config(dump(edit(doc, pyramid__share=share)))
    assert [v.path for v in err.value.violations] == ["pyramid.share"]


def test_minimal_document_is_valid():
    cfg = load_config(dump(minimal_doc()))
    assert cfg.pyramid.intervals() == [(0, 95)]
    assert validate(cfg) == []


def test_inverted_parent_kid_gap_is_one_violation():
    cfg = config(edit(example_doc(), kids__parent_kid_gap=[40, 18]))
    assert [str(v) for v in validate(cfg)] == ["kids.parent_kid_gap empty"]


def test_company_probs_summing_to_one_are_valid():
    doc = example_doc()
    for name, p in zip(("micro", "small", "average", "big"), (0.5, 0.2, 0.2, 0.1)):
        doc["companies"]["groups"][name]["prob"] = p
    assert validate(config(doc)) == []


def test_underage_marriage_is_one_violation():
    doc = minimal_doc()
    doc["marital_men"] = {"borders": [15, 95],
                          "probs": [[0.7, 0.3, 0, 0, 0], [0.5, 0.3, 0.1, 0.05, 0.05]]}
    violations = validate(config(doc))
    assert len(violations) == 1
    assert violations[0].path.startswith("marital_men")


@pytest.mark.parametrize("changes, path", [
    ({"kids__parent_kid_gap": [15, 40]}, "kids.parent_kid_gap"),
    ({"rules__caregiver_gap": [10, 40]}, "rules.caregiver_gap"),
    ({"rules__subclique_mean": 0}, "rules.subclique_mean"),
    ({"rules__caregiver_scope": "street"}, "rules.caregiver_scope"),
    ({"age_gap__values": [0, 0]}, "age_gap.values"),
    ({"schools__bands": [[0, 5, 50], [7, 17, 100]]}, "schools.bands[1]"),
    ({"schools__bands": [[0, 17, 1]]}, "schools.bands[0]"),
    ({"pyramid__female_fraction": [1.5]}, "pyramid.female_fraction"),
    ({"marital_men__borders": [60]}, "marital_men.borders"),
])
def test_violations_carry_field_paths(changes, path):
    doc = edit(minimal_doc(), **changes)
    if "age_gap__values" in changes:
        doc["age_gap"]["probs"] = [0.5, 0.5]
    assert path in [v.path for v in validate(config(doc))]


def test_overlapping_company_groups():
    doc = example_doc()
    doc["companies"]["groups"]["small"]["size"] = [5, 49]
    assert "companies.groups.small.size" in [v.path for v in validate(config(doc))]


@pytest.mark.parametrize("text, path", [
    ("pyramid: [1, 2", ""),
    ("- just a list", ""),
])
def test_malformed_documents(text, path):
    with pytest.raises(ConfigError) as err:
        load_config(text)
    assert err.value.path == path


def test_missing_table_reports_its_path():
    doc = example_doc()
    del doc["kids"]
    with pytest.raises(ConfigError) as err:
        load_config(dump(doc))
    assert err.value.path == "kids"

    doc = example_doc()
    del doc["companies"]["groups"]["big"]
    with pytest.raises(ConfigError) as err:
        load_config(dump(doc))
    assert err.value.path == "companies.groups.big"


def test_schema_version_is_mandatory():
    doc = example_doc()
    del doc["schema_version"]
    with pytest.raises(ConfigError, match="schema_version"):
        load_config(dump(doc))
    with pytest.raises(ConfigError, match="schema_version"):
        load_config(dump(edit(example_doc(), schema_version=2)))


def test_wrong_types_report_field_path():
    with pytest.raises(ConfigError) as err:
        load_config(dump(edit(example_doc(), pyramid__share="lots")))
    assert err.value.path == "pyramid.share"
    with pytest.raises(ConfigError) as err:
        load_config(dump(edit(example_doc(), rules__repair_disconnected="yes please")))
    assert err.value.path == "rules.repair_disconnected"


def test_unknown_top_level_key_rejected():
    with pytest.raises(ConfigError):
        load_config(dump(edit(example_doc(), colour="blue")))


def test_resolve_config_by_name_and_path(tmp_path):
    assert resolve_config("example-city").name == "example-city"
    p = tmp_path / "c.yaml"
    p.write_text(dump(minimal_doc()))
    assert resolve_config(str(p)).pyramid.borders == (95,)
    with pytest.raises(ConfigError):
        resolve_config("no-such-config")


def test_serialize_round_trip_example(example):
    assert load_config(serialize(example)) == example
    assert serialize(load_config(serialize(example))) == serialize(example)


def test_merge_preserves_mass_and_weights_female_fraction():
    p = AgePyramid((10, 60, 95), (0.2, 0.5, 0.3), (0.5, 0.4, 0.8))
    m = p.merge_last_two()
    assert m.borders == (10, 95)
    assert math.isclose(sum(m.share), 1.0, abs_tol=1e-12)
    assert math.isclose(m.female_fraction[1], (0.5 * 0.4 + 0.3 * 0.8) / 0.8)


def test_interval_helpers():
    assert interval_bounds([2, 6, 12]) == [(0, 2), (3, 6), (7, 12)]
    assert interval_index([2, 6, 12], [0, 2, 3, 6, 7, 12]).tolist() == [0, 0, 1, 1, 2, 2]


@st.composite
def pyramids(draw):
    k = draw(st.integers(2, 8))
    borders = sorted(draw(st.sets(st.integers(1, 94), min_size=k - 1, max_size=k - 1)))
    borders = borders + [95]
    raw = draw(st.lists(st.floats(0.01, 1.0), min_size=len(borders), max_size=len(borders)))
    share = [r / sum(raw) for r in raw]
    share[-1] = 1.0 - sum(share[:-1])
    fem = draw(st.lists(st.floats(0.0, 1.0), min_size=len(borders), max_size=len(borders)))
    return borders, share, fem


@settings(max_examples=60, deadline=None)
@given(pyramids(), st.floats(1.0, 6.0), st.integers(18, 30))
def test_round_trip_and_mass_property(pyr, mean, gap_lo):
    borders, share, fem = pyr
    doc = edit(minimal_doc(), pyramid__borders=borders, pyramid__share=share,
               pyramid__female_fraction=fem, rules__subclique_mean=mean,
               rules__caregiver_gap=[gap_lo, gap_lo + 10])
    cfg = load_config(dump(doc))
    assert validate(cfg) == []
    assert math.isclose(sum(cfg.pyramid.share), 1.0, abs_tol=1e-9)
    assert len(cfg.pyramid.borders) == len(borders) - 1
    assert load_config(serialize(cfg)) == cfg
