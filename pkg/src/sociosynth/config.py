"""Demographic input tables: schema, loading, validation and serialization.

Every table that drives generation lives in one :class:`DemographyConfig`.
Documents are YAML with a mandatory ``schema_version: 1`` key; see
``docs/config-schema.md`` for the field reference.

Age intervals are written as ascending upper borders. Interval ``i`` covers
the integer ages ``(borders[i-1], borders[i]]``; the first interval starts
at age 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

SCHEMA_VERSION = 1
SUM_TOL = 1e-9
SCHOOL_AGE_LIMIT = 18  # everyone younger attends a school
STATUSES = ("bachelor", "married", "cohabitant", "divorced", "widowed")
FAMILY_KINDS = ("pair", "single_man", "single_woman")
COMPANY_GROUPS = ("micro", "small", "average", "big")
CAREGIVER_SCOPES = ("household", "node")
SECTIONS = ("pyramid", "marital_men", "marital_women", "age_gap", "kids",
            "schools", "companies", "rules")


class ConfigError(ValueError):
    """Malformed or incomplete configuration document."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConfigValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "\n".join(f"  {v}" for v in violations)
        super().__init__(f"{len(violations)} config violation(s):\n{lines}")


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path} {self.message}"


def interval_bounds(borders: Sequence[int]) -> list[tuple[int, int]]:
    """Inclusive ``(lo, hi)`` integer ages of each interval."""
    out = []
    prev = -1
    for b in borders:
        out.append((prev + 1, int(b)))
        prev = int(b)
    return out


def interval_index(borders: Sequence[int], ages) -> np.ndarray:
    """Index of the interval containing each age (ages above the last
    border map to ``len(borders)``)."""
    return np.searchsorted(np.asarray(borders), np.asarray(ages), side="left")


@dataclass(frozen=True)
class AgePyramid:
    borders: tuple[int, ...]
    share: tuple[float, ...]
    female_fraction: tuple[float, ...]

    @property
    def max_age(self) -> int:
        return int(self.borders[-1])

    def intervals(self) -> list[tuple[int, int]]:
        return interval_bounds(self.borders)

    def merge_last_two(self) -> AgePyramid:
        """Fold the last interval into its predecessor.

        Shares add; the female fraction is weighted by interval mass.
        """
        if len(self.borders) < 2:
            return self
        s1, s2 = self.share[-2], self.share[-1]
        f1, f2 = self.female_fraction[-2], self.female_fraction[-1]
        mass = s1 + s2
        fem = (s1 * f1 + s2 * f2) / mass if mass > 0 else (f1 + f2) / 2
        return AgePyramid(
            borders=self.borders[:-2] + (self.borders[-1],),
            share=self.share[:-2] + (mass,),
            female_fraction=self.female_fraction[:-2] + (fem,),
        )


@dataclass(frozen=True)
class MaritalTable:
    borders: tuple[int, ...]
    # one row per interval, columns ordered as STATUSES
    probs: tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class AgeGapTable:
    """Distribution of ``man_age - woman_age`` within a partnership."""

    gap_values: tuple[int, ...]
    gap_probs: tuple[float, ...]


@dataclass(frozen=True)
class KidsTable:
    borders: tuple[int, ...]
    # kind -> one row per parent-age interval, column k = P(k kids)
    probs: dict[str, tuple[tuple[float, ...], ...]]
    parent_kid_gap: tuple[int, int] = (18, 40)

    @property
    def max_kids(self) -> int:
        return len(self.probs["pair"][0]) - 1

    def __hash__(self) -> int:
        return hash((self.borders, tuple(sorted(self.probs.items())),
                     self.parent_kid_gap))


@dataclass(frozen=True)
class SchoolBands:
    # (age_lo, age_hi, mean_school_size), inclusive ages
    bands: tuple[tuple[int, int, float], ...]


@dataclass(frozen=True)
class CompanyGroup:
    name: str
    size: tuple[int, int]
    prob: float


@dataclass(frozen=True)
class CompanyGroups:
    groups: tuple[CompanyGroup, ...]
    retirement_age_men: int
    retirement_age_women: int
    working_age_min: int
    employment_rate: float = 1.0


@dataclass(frozen=True)
class GenRules:
    subclique_mean: float = 3.0
    caregiver_gap: tuple[int, int] = (20, 40)
    # "household": every household without ties outside it gets a caregiver;
    # "node": only people with no ties at all
    caregiver_scope: str = "household"
    repair_disconnected: bool = True
    legal_marriage_age: int = 18


@dataclass(frozen=True)
class DemographyConfig:
    pyramid: AgePyramid
    marital_men: MaritalTable
    marital_women: MaritalTable
    age_gap: AgeGapTable
    kids: KidsTable
    schools: SchoolBands
    companies: CompanyGroups
    rules: GenRules = field(default_factory=GenRules)
    name: str = ""
    description: str = ""


# --------------------------------------------------------------------------
# validation

def _check_prob_vector(out: list[Violation], path: str, vec: Sequence[float]) -> None:
    if any((not math.isfinite(p)) or p < 0 for p in vec):
        out.append(Violation(path, "has negative or non-finite entries"))
    elif abs(sum(vec) - 1.0) > SUM_TOL:
        out.append(Violation(path, f"sums to {sum(vec):.12g}, expected 1"))


def _check_borders(out: list[Violation], path: str, borders: Sequence[int]) -> bool:
    if len(borders) == 0:
        out.append(Violation(path, "is empty"))
        return False
    if borders[0] < 0 or any(b <= a for a, b in zip(borders, borders[1:])):
        out.append(Violation(path, "must be non-negative and strictly increasing"))
        return False
    return True


def _validate_pyramid(p: AgePyramid, out: list[Violation]) -> None:
    _check_borders(out, "pyramid.borders", p.borders)
    if len(p.share) != len(p.borders):
        out.append(Violation("pyramid.share", "length differs from pyramid.borders"))
    else:
        _check_prob_vector(out, "pyramid.share", p.share)
    if len(p.female_fraction) != len(p.borders):
        out.append(Violation("pyramid.female_fraction", "length differs from pyramid.borders"))
    elif any(not 0.0 <= f <= 1.0 for f in p.female_fraction):
        out.append(Violation("pyramid.female_fraction", "entries must lie in [0, 1]"))


def _validate_marital(t: MaritalTable, path: str, legal_age: int, max_age: int,
                      out: list[Violation]) -> None:
    if not _check_borders(out, f"{path}.borders", t.borders):
        return
    if len(t.probs) != len(t.borders):
        out.append(Violation(f"{path}.probs", "needs one row per interval"))
        return
    if t.borders[-1] < max_age:
        out.append(Violation(f"{path}.borders",
                             f"last border {t.borders[-1]} below pyramid max age {max_age}"))
    for i, ((lo, hi), row) in enumerate(zip(interval_bounds(t.borders), t.probs)):
        rpath = f"{path}.probs[{i}]"
        if len(row) != len(STATUSES):
            out.append(Violation(rpath, f"needs {len(STATUSES)} entries"))
            continue
        _check_prob_vector(out, rpath, row)
        if hi < legal_age and row[0] != 1.0:
            out.append(Violation(rpath, f"interval [{lo},{hi}] is below the legal "
                                        f"marriage age {legal_age} and must be all bachelor"))


def _validate_age_gap(t: AgeGapTable, out: list[Violation]) -> None:
    if len(t.gap_values) == 0:
        out.append(Violation("age_gap.values", "is empty"))
        return
    if len(set(t.gap_values)) != len(t.gap_values):
        out.append(Violation("age_gap.values", "entries must be distinct"))
    if len(t.gap_probs) != len(t.gap_values):
        out.append(Violation("age_gap.probs", "length differs from age_gap.values"))
    else:
        _check_prob_vector(out, "age_gap.probs", t.gap_probs)


def _validate_kids(t: KidsTable, legal_age: int, max_age: int, out: list[Violation]) -> None:
    lo, hi = t.parent_kid_gap
    if lo > hi:
        out.append(Violation("kids.parent_kid_gap", "empty"))
    elif lo < 16:
        out.append(Violation("kids.parent_kid_gap", f"minimum {lo} below 16"))
    if not _check_borders(out, "kids.borders", t.borders):
        return
    if t.borders[-1] < max_age:
        out.append(Violation("kids.borders",
                             f"last border {t.borders[-1]} below pyramid max age {max_age}"))
    width = None
    for kind in FAMILY_KINDS:
        rows = t.probs.get(kind)
        if rows is None:
            out.append(Violation(f"kids.{kind}", "missing"))
            continue
        if len(rows) != len(t.borders):
            out.append(Violation(f"kids.{kind}", "needs one row per interval"))
            continue
        for i, ((alo, ahi), row) in enumerate(zip(interval_bounds(t.borders), rows)):
            rpath = f"kids.{kind}[{i}]"
            width = len(row) if width is None else width
            if len(row) != width or len(row) < 1:
                out.append(Violation(rpath, "all kid-count vectors must share one length"))
                continue
            _check_prob_vector(out, rpath, row)
            if ahi < legal_age and row[0] != 1.0:
                out.append(Violation(rpath, f"parents aged [{alo},{ahi}] are below the "
                                            f"legal marriage age {legal_age}; must have no kids"))


def _validate_schools(s: SchoolBands, out: list[Violation]) -> None:
    expected = 0
    for i, (lo, hi, mean) in enumerate(s.bands):
        if lo != expected or hi < lo:
            out.append(Violation(f"schools.bands[{i}]",
                                 f"must start at age {expected} with hi >= lo"))
            return
        if mean < 2:
            out.append(Violation(f"schools.bands[{i}]", "mean school size must be >= 2"))
        expected = hi + 1
    if expected != SCHOOL_AGE_LIMIT:
        out.append(Violation("schools.bands", f"must cover ages 0..{SCHOOL_AGE_LIMIT - 1}"))


def _validate_companies(c: CompanyGroups, out: list[Violation]) -> None:
    names = tuple(g.name for g in c.groups)
    if names != COMPANY_GROUPS:
        out.append(Violation("companies.groups", f"must list exactly {COMPANY_GROUPS} in order"))
    _check_prob_vector(out, "companies.groups.prob", [g.prob for g in c.groups])
    prev_hi = 0
    for g in c.groups:
        lo, hi = g.size
        if lo < 1 or hi < lo or not math.isfinite(hi):
            out.append(Violation(f"companies.groups.{g.name}.size",
                                 "needs 1 <= lo <= hi < infinity"))
        elif lo <= prev_hi:
            out.append(Violation(f"companies.groups.{g.name}.size",
                                 "overlaps the previous group"))
        prev_hi = max(prev_hi, hi)
    if not 0.0 <= c.employment_rate <= 1.0:
        out.append(Violation("companies.employment_rate", "must lie in [0, 1]"))
    for key in ("retirement_age_men", "retirement_age_women"):
        if getattr(c, key) <= c.working_age_min:
            out.append(Violation(f"companies.{key}", "must exceed working_age_min"))


def _validate_rules(r: GenRules, out: list[Violation]) -> None:
    if not r.subclique_mean > 0:
        out.append(Violation("rules.subclique_mean", "must be positive"))
    lo, hi = r.caregiver_gap
    if lo > hi:
        out.append(Violation("rules.caregiver_gap", "empty"))
    elif lo < 18:
        out.append(Violation("rules.caregiver_gap", f"minimum {lo} below 18"))
    if r.caregiver_scope not in CAREGIVER_SCOPES:
        out.append(Violation("rules.caregiver_scope", f"must be one of {CAREGIVER_SCOPES}"))


def validate(config: DemographyConfig) -> list[Violation]:
    """All invariant violations of ``config``; empty means valid."""
    out: list[Violation] = []
    legal = config.rules.legal_marriage_age
    max_age = config.pyramid.max_age if config.pyramid.borders else 0
    _validate_pyramid(config.pyramid, out)
    _validate_marital(config.marital_men, "marital_men", legal, max_age, out)
    _validate_marital(config.marital_women, "marital_women", legal, max_age, out)
    _validate_age_gap(config.age_gap, out)
    _validate_kids(config.kids, legal, max_age, out)
    _validate_schools(config.schools, out)
    _validate_companies(config.companies, out)
    _validate_rules(config.rules, out)
    return out


# --------------------------------------------------------------------------
# document <-> config

def _get(doc: Any, path: str, key: str, default: Any = ...) -> Any:
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected a mapping")
    if key not in doc:
        if default is ...:
            raise ConfigError(f"{path}.{key}" if path else key, "missing")
        return default
    return doc[key]


def _ints(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list of integers")
    try:
        out = tuple(int(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a list of integers") from None
    if any(float(v) != o for v, o in zip(value, out)):
        raise ConfigError(path, "expected whole numbers")
    return out


def _floats(value: Any, path: str) -> tuple[float, ...]:
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list of numbers")
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a list of numbers") from None


def _matrix(value: Any, path: str) -> tuple[tuple[float, ...], ...]:
    if not isinstance(value, list):
        raise ConfigError(path, "expected a list of rows")
    return tuple(_floats(row, f"{path}[{i}]") for i, row in enumerate(value))


def _pair(value: Any, path: str) -> tuple[int, int]:
    out = _ints(value, path)
    if len(out) != 2:
        raise ConfigError(path, "expected an interval [lo, hi]")
    return out[0], out[1]


def _scalar(value: Any, path: str, kind: type) -> Any:
    if kind is bool:
        if not isinstance(value, bool):
            raise ConfigError(path, "expected true/false")
        return value
    try:
        out = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected {kind.__name__}") from None
    if kind is int and float(value) != out:
        raise ConfigError(path, "expected a whole number")
    return out


def _marital_from(doc: Any, path: str) -> MaritalTable:
    return MaritalTable(
        borders=_ints(_get(doc, path, "borders"), f"{path}.borders"),
        probs=_matrix(_get(doc, path, "probs"), f"{path}.probs"),
    )


def config_from_dict(doc: Any) -> DemographyConfig:
    """Build a config from a parsed document, applying the pyramid merge."""
    if not isinstance(doc, dict):
        raise ConfigError("", "document must be a mapping")
    version = _get(doc, "", "schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported value {version!r}")
    unknown = set(doc) - set(SECTIONS) - {"schema_version", "name", "description"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown top-level key")
    for section in SECTIONS:
        _get(doc, "", section)

    p = doc["pyramid"]
    pyramid = AgePyramid(
        borders=_ints(_get(p, "pyramid", "borders"), "pyramid.borders"),
        share=_floats(_get(p, "pyramid", "share"), "pyramid.share"),
        female_fraction=_floats(_get(p, "pyramid", "female_fraction"),
                                "pyramid.female_fraction"),
    )
    if _scalar(_get(p, "pyramid", "merge_last_two", True), "pyramid.merge_last_two", bool):
        pyramid = pyramid.merge_last_two()

    g = doc["age_gap"]
    age_gap = AgeGapTable(
        gap_values=_ints(_get(g, "age_gap", "values"), "age_gap.values"),
        gap_probs=_floats(_get(g, "age_gap", "probs"), "age_gap.probs"),
    )

    k = doc["kids"]
    kids = KidsTable(
        borders=_ints(_get(k, "kids", "borders"), "kids.borders"),
        probs={kind: _matrix(_get(k, "kids", kind), f"kids.{kind}") for kind in FAMILY_KINDS},
        parent_kid_gap=_pair(_get(k, "kids", "parent_kid_gap", [18, 40]), "kids.parent_kid_gap"),
    )

    s = doc["schools"]
    bands = []
    for i, row in enumerate(_get(s, "schools", "bands")):
        if not isinstance(row, list) or len(row) != 3:
            raise ConfigError(f"schools.bands[{i}]", "expected [age_lo, age_hi, mean_size]")
        bands.append((_scalar(row[0], f"schools.bands[{i}][0]", int),
                      _scalar(row[1], f"schools.bands[{i}][1]", int),
                      _scalar(row[2], f"schools.bands[{i}][2]", float)))
    schools = SchoolBands(bands=tuple(bands))

    c = doc["companies"]
    gdoc = _get(c, "companies", "groups")
    if not isinstance(gdoc, dict):
        raise ConfigError("companies.groups", "expected a mapping")
    groups = []
    for name in COMPANY_GROUPS:
        entry = _get(gdoc, "companies.groups", name)
        path = f"companies.groups.{name}"
        groups.append(CompanyGroup(
            name=name,
            size=_pair(_get(entry, path, "size"), f"{path}.size"),
            prob=_scalar(_get(entry, path, "prob"), f"{path}.prob", float),
        ))
    companies = CompanyGroups(
        groups=tuple(groups),
        retirement_age_men=_scalar(_get(c, "companies", "retirement_age_men"),
                                   "companies.retirement_age_men", int),
        retirement_age_women=_scalar(_get(c, "companies", "retirement_age_women"),
                                     "companies.retirement_age_women", int),
        working_age_min=_scalar(_get(c, "companies", "working_age_min"),
                                "companies.working_age_min", int),
        employment_rate=_scalar(_get(c, "companies", "employment_rate", 1.0),
                                "companies.employment_rate", float),
    )

    r = doc["rules"] if doc["rules"] is not None else {}
    defaults = GenRules()
    rules = GenRules(
        subclique_mean=_scalar(_get(r, "rules", "subclique_mean", defaults.subclique_mean),
                               "rules.subclique_mean", float),
        caregiver_gap=_pair(_get(r, "rules", "caregiver_gap", list(defaults.caregiver_gap)),
                            "rules.caregiver_gap"),
        caregiver_scope=_scalar(_get(r, "rules", "caregiver_scope", defaults.caregiver_scope),
                                "rules.caregiver_scope", str),
        repair_disconnected=_scalar(_get(r, "rules", "repair_disconnected",
                                         defaults.repair_disconnected),
                                    "rules.repair_disconnected", bool),
        legal_marriage_age=_scalar(_get(r, "rules", "legal_marriage_age",
                                        defaults.legal_marriage_age),
                                   "rules.legal_marriage_age", int),
    )

    return DemographyConfig(
        pyramid=pyramid,
        marital_men=_marital_from(doc["marital_men"], "marital_men"),
        marital_women=_marital_from(doc["marital_women"], "marital_women"),
        age_gap=age_gap,
        kids=kids,
        schools=schools,
        companies=companies,
        rules=rules,
        name=str(doc.get("name", "")),
        description=str(doc.get("description", "")),
    )


def load_config(text: str) -> DemographyConfig:
    """Parse and validate a YAML configuration document.

    Raises ConfigError for malformed or incomplete documents and
    ConfigValidationError when the tables break an invariant.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"parse error: {exc}") from None
    config = config_from_dict(doc)
    violations = validate(config)
    if violations:
        raise ConfigValidationError(violations)
    return config


def config_to_dict(config: DemographyConfig) -> dict[str, Any]:
    c = config.companies
    return {
        "schema_version": SCHEMA_VERSION,
        "name": config.name,
        "description": config.description,
        "pyramid": {
            "borders": list(config.pyramid.borders),
            "share": list(config.pyramid.share),
            "female_fraction": list(config.pyramid.female_fraction),
            # already merged
            "merge_last_two": False,
        },
        "marital_men": {"borders": list(config.marital_men.borders),
                        "probs": [list(r) for r in config.marital_men.probs]},
        "marital_women": {"borders": list(config.marital_women.borders),
                          "probs": [list(r) for r in config.marital_women.probs]},
        "age_gap": {"values": list(config.age_gap.gap_values),
                    "probs": list(config.age_gap.gap_probs)},
        "kids": {
            "borders": list(config.kids.borders),
            "parent_kid_gap": list(config.kids.parent_kid_gap),
            **{kind: [list(r) for r in config.kids.probs[kind]] for kind in FAMILY_KINDS},
        },
        "schools": {"bands": [list(b) for b in config.schools.bands]},
        "companies": {
            "groups": {g.name: {"size": list(g.size), "prob": g.prob} for g in c.groups},
            "retirement_age_men": c.retirement_age_men,
            "retirement_age_women": c.retirement_age_women,
            "working_age_min": c.working_age_min,
            "employment_rate": c.employment_rate,
        },
        "rules": {
            "subclique_mean": config.rules.subclique_mean,
            "caregiver_gap": list(config.rules.caregiver_gap),
            "caregiver_scope": config.rules.caregiver_scope,
            "repair_disconnected": config.rules.repair_disconnected,
            "legal_marriage_age": config.rules.legal_marriage_age,
        },
    }


def serialize(config: DemographyConfig) -> str:
    """YAML text that :func:`load_config` maps back to an equal config."""
    return yaml.safe_dump(config_to_dict(config), sort_keys=False, default_flow_style=None)


def example_config_text(name: str = "example-city") -> str:
    return resources.files("sociosynth.data").joinpath(f"{name}.yaml").read_text("utf-8")


def resolve_config(ref: str) -> DemographyConfig:
    """Load a config from a file path, or from a bundled config by name."""
    path = Path(ref)
    if path.is_file():
        return load_config(path.read_text(encoding="utf-8"))
    try:
        text = example_config_text(ref)
    except FileNotFoundError:
        raise ConfigError("", f"no config file or bundled config named {ref!r}") from None
    return load_config(text)


def example_config() -> DemographyConfig:
    return load_config(example_config_text())


def with_rules(config: DemographyConfig, **changes: Any) -> DemographyConfig:
    return replace(config, rules=replace(config.rules, **changes))
