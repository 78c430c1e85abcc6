"""Synthetic social graphs from demographic tables."""

from .config import DemographyConfig, example_config, load_config, serialize, validate
from .graph import EdgeLevel, SocialGraph, level_view
from .pipeline import generate

__all__ = [
    "DemographyConfig",
    "EdgeLevel",
    "SocialGraph",
    "example_config",
    "generate",
    "level_view",
    "load_config",
    "serialize",
    "validate",
]
