"""Pseudo-models, n-consistency, phi-images, actualisation and the satisfiability procedure."""
from .budget import Budget, ResourceExhausted, Tracker
from .colours import colours, count_colours, eliminate
from .consistency import (Context, EmptyRestriction, consistent, find_witness, hue_truth,
                          restrict_states, syntactic_restriction)
from .image import act_atom_name, actualise, copy_world, deg, phi_image, primes
from .search import ENGINES, SatVerdict, bounded_model_search, model_search_bound, satisfiable
from .structures import (CLAUSES, ClauseResult, HueAtlas, MaximalSet, PseudoModel, agreement_blocks,
                         decision_table, from_json, is_pseudo_model, pseudo_model, to_json,
                         validate, with_canonical_hue)


def maximal_sets(table, box_rules: bool = False):
    """Colour parts of the maximal sets over a closure table, lazily."""
    for c in colours(table, box_rules):
        yield MaximalSet(c, frozenset())


__all__ = [
    "Budget", "ResourceExhausted", "Tracker", "colours", "count_colours", "eliminate", "Context",
    "EmptyRestriction", "consistent", "find_witness", "hue_truth", "restrict_states",
    "syntactic_restriction", "act_atom_name", "actualise", "copy_world", "deg", "phi_image", "primes",
    "ENGINES", "SatVerdict", "bounded_model_search", "model_search_bound", "satisfiable", "CLAUSES",
    "ClauseResult", "HueAtlas", "MaximalSet", "PseudoModel", "agreement_blocks", "decision_table",
    "from_json", "is_pseudo_model", "pseudo_model", "to_json", "validate", "with_canonical_hue",
    "maximal_sets",
]
