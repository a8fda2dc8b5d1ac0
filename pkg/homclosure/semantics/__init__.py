from homclosure.semantics.evaluator import ModelChecker, evaluate
from homclosure.semantics.homs import Hom, HomConstraint, find_hom, iter_homs
from homclosure.semantics.model_finder import bounded_models, bounded_sat

__all__ = [
    "Hom",
    "HomConstraint",
    "ModelChecker",
    "bounded_models",
    "bounded_sat",
    "evaluate",
    "find_hom",
    "iter_homs",
]
