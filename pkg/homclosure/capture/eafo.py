"""Positive existential homclosure of exists-forall sentences."""

import logging

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import Const, Formula, Term, disj, substitute
from homclosure.core.signature import RESERVED_PREFIX, Signature
from homclosure.core.structure import Structure, canonical_query
from homclosure.exceptions import FragmentError
from homclosure.semantics.homs import find_hom
from homclosure.semantics.model_finder import bounded_models
from homclosure.syntax.fragments import classify
from homclosure.syntax.normal_forms import apply_prefix, prenex

logger = logging.getLogger(__name__)


def skolemize(phi: Formula, sig: Signature) -> tuple[Formula, Signature]:
    """
    Replace the leading existential variables by fresh constants.

    Raises:
        FragmentError: If phi is not an exists-forall sentence
    """
    if not classify(phi, sig).bernays_schonfinkel:
        raise FragmentError("Sentence is not in the exists-forall prefix class")
    prefix, matrix = prenex(phi)
    mapping: dict[str, Term] = {}
    universal = []
    for kind, var in prefix:
        if kind == "E":
            mapping[var] = Const(f"{RESERVED_PREFIX}sk_{var}")
        else:
            universal.append((kind, var))
    skolem_sig = sig.with_constants(c.name for c in mapping.values())
    return apply_prefix(universal, substitute(matrix, mapping)), skolem_sig


def minimal_models(
    phi: Formula, sig: Signature, settings: ToolkitSettings | None = None
) -> list[Structure]:
    """
    Models of phi whose elements are all named, reduced to sig and kept up
    to homomorphic equivalence.

    Every model of a universal sentence contains such a model as the
    substructure on its named elements, and that substructure maps into it.
    """
    settings = settings or DEFAULT_SETTINGS
    universal, skolem_sig = skolemize(phi, sig)
    bound = max(1, len(skolem_sig.constants))
    kept: list[Structure] = []
    for model in bounded_models(universal, skolem_sig, bound, settings):
        if skolem_sig.constants and set(model.domain) != model.constant_elements:
            continue
        reduct = model.reduct(sig)
        if any(find_hom(k, reduct) is not None for k in kept):
            continue
        kept = [k for k in kept if find_hom(reduct, k) is None]
        kept.append(reduct)
    return kept


def eafo_homclosure(
    phi: Formula, sig: Signature, settings: ToolkitSettings | None = None
) -> Formula:
    """
    Existential-positive sentence defining homcl(phi) for an exists-forall phi.

    The result is the disjunction of the canonical queries of phi's
    hom-minimal named-element models; it is Bottom when phi has no model.

    Raises:
        FragmentError: If phi is not an exists-forall sentence
        BudgetExceededError: If the model search exceeds its budget
    """
    models = minimal_models(phi, sig, settings)
    logger.info("Exists-forall closure with %d disjuncts", len(models))
    return disj(canonical_query(m) for m in models)
