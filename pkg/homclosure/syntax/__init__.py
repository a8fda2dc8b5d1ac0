from homclosure.syntax.fragments import FragmentReport, classify
from homclosure.syntax.normal_forms import nnf, prenex, quantifier_rank

__all__ = ["FragmentReport", "classify", "nnf", "prenex", "quantifier_rank"]
