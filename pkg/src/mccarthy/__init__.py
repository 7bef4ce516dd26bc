"""Pairs of linearly growing free group automorphisms: commuting or free powers."""

import json
from importlib import resources

from .dichotomy import Verdict, constants, decide, revalidate
from .errors import (
    GrowthError,
    HypothesisError,
    InputError,
    NotAnAutomorphism,
    PipelineError,
    UnsupportedInput,
    WrongCaseError,
)
from .folding import build_common_refinement, efficient_rep
from .formats import load, parse_automorphism, parse_gog, parse_utrep
from .gog import DehnTwist, GraphOfGroups, translation_length
from .graphs import FilteredGraph, UTRep, growth_class, rose_utrep
from .interaction import analyze, edge_twist_digraph, incompatibility_search
from .words import CyclicWord, FreeAutomorphism, Word, is_inner, unipotent_power

__version__ = "0.1.0"


def schema(name):
    """A shipped JSON schema, e.g. ``schema("verdict")``."""
    text = resources.files(__package__).joinpath("schemas", f"{name}.schema.json").read_text()
    return json.loads(text)


def sample(name):
    """Text of a shipped sample input file."""
    return resources.files(__package__).joinpath("data", name).read_text()
