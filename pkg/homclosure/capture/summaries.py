"""Type summaries of finite structures and adornments by type predicates."""

import logging
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass
from itertools import permutations
from typing import Any

from homclosure.capture.normal_form import NormalForm
from homclosure.capture.types import EligibleTypes, TypeDescriptor, type_of
from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import Formula
from homclosure.core.structure import Element, Structure
from homclosure.semantics.homs import Hom
from homclosure.semantics.model_finder import bounded_models

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TypeSummary:
    """Eligible types realized by a structure, and those realized exactly once."""

    plus: frozenset[TypeDescriptor]
    bang: frozenset[TypeDescriptor]

    @property
    def key(self) -> tuple[tuple[str, ...], tuple[str, ...]]:
        return (
            tuple(sorted(t.predicate_name for t in self.plus)),
            tuple(sorted(t.predicate_name for t in self.bang)),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "realized": sorted(str(t) for t in self.plus),
            "unique": sorted(str(t) for t in self.bang),
        }


def realizations(
    structure: Structure, eligible: EligibleTypes
) -> dict[TypeDescriptor, list[tuple[Element, ...]]]:
    """Tuples realizing each eligible type, over injective tuples of unnamed elements."""
    named = structure.constant_elements
    free = [a for a in structure.domain if a not in named]
    found: dict[TypeDescriptor, list[tuple[Element, ...]]] = {}
    for variables in eligible.variable_sequences():
        for tup in permutations(free, len(variables)):
            t = type_of(structure, tup, variables)
            if t is not None and t in eligible:
                found.setdefault(t, []).append(tup)
    return found


def type_summary(structure: Structure, eligible: EligibleTypes) -> TypeSummary:
    counts = Counter({t: len(tuples) for t, tuples in realizations(structure, eligible).items()})
    return TypeSummary(
        plus=frozenset(counts),
        bang=frozenset(t for t, n in counts.items() if n == 1),
    )


def model_summary(
    phi: Formula,
    eligible: EligibleTypes,
    size_bound: int,
    settings: ToolkitSettings | None = None,
    normal_form: NormalForm | None = None,
) -> frozenset[TypeSummary]:
    """
    Summaries of all models up to size_bound.

    With a normal form, each model is first replaced by its canonical
    expansion, so the eligible types range over the normal form's signature.

    Args:
        phi: Input sentence
        eligible: Eligible types
        size_bound: Largest model size enumerated
        settings: Search budgets
        normal_form: Normal form of phi providing the canonical expansion

    Returns:
        The distinct summaries found

    Raises:
        BudgetExceededError: If the model search exceeds its budget
    """
    settings = settings or DEFAULT_SETTINGS
    sig = normal_form.base if normal_form is not None else eligible.sig
    summaries: set[TypeSummary] = set()
    models = 0
    for model in bounded_models(phi, sig, size_bound, settings):
        models += 1
        if normal_form is not None:
            model = normal_form.expand(model, settings)
        summaries.add(type_summary(model, eligible))
    logger.info(
        "%d summaries from %d models up to size %d", len(summaries), models, size_bound
    )
    return frozenset(summaries)


def summary_stabilized(
    phi: Formula,
    eligible: EligibleTypes,
    size_bound: int,
    settings: ToolkitSettings | None = None,
    normal_form: NormalForm | None = None,
) -> bool:
    """Whether raising the size bound by one adds no new summary."""
    current = model_summary(phi, eligible, size_bound, settings, normal_form)
    return model_summary(phi, eligible, size_bound + 1, settings, normal_form) == current


def adorn(
    structure: Structure, eligible: EligibleTypes, types: Iterable[TypeDescriptor] | None = None
) -> Structure:
    """
    Expand a structure by one ``Tp`` predicate per type, holding on its realizations.

    Args:
        structure: Structure over the eligible types' signature
        eligible: Eligible types
        types: Types to declare; defaults to the realized ones
    """
    found = realizations(structure, eligible)
    declared = list(found) if types is None else list(types)
    return structure.expand_with(
        {t.predicate_name: found.get(t, []) for t in declared},
        {t.predicate_name: t.order for t in declared},
    )


def transfer_adornment(adorned: Structure, hom: Hom) -> Structure:
    """Push the predicates missing from the hom target forward along the hom."""
    target = hom.target
    extra = [p for p in adorned.sig.predicates if not target.sig.has_predicate(p[0])]
    relations = {
        name: {tuple(hom(a) for a in tup) for tup in adorned.relations[name]}
        for name, _ in extra
    }
    return target.expand_with(relations, dict(extra))
