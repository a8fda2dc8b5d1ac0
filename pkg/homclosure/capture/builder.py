"""Capture sentences for the homomorphism closure of guarded and two-variable sentences."""

import logging
from collections.abc import Mapping
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Any

from homclosure.capture.normal_form import Fragment, NormalForm, normalize
from homclosure.capture.program import (
    Relations,
    SummaryProgram,
    hom_condition,
    permutation_requirements,
    summary_program,
)
from homclosure.capture.summaries import TypeSummary, model_summary, summary_stabilized
from homclosure.capture.types import (
    EligibilityMode,
    EligibleTypes,
    TypeDescriptor,
    eligible_types,
)
from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import Formula, conj, disj
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import BudgetExceededError, FragmentError, SignatureError
from homclosure.utils.formula_printer import FormulaPrinter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaptureWitness:
    """Type relations on a target satisfying one summary's disjunct."""

    summary: TypeSummary
    relations: Mapping[TypeDescriptor, frozenset[tuple[Element, ...]]]

    def to_dict(self) -> dict[str, Any]:
        return {
            "summary": self.summary.to_dict(),
            "relations": {
                str(t): sorted(list(tup) for tup in tuples)
                for t, tuples in sorted(self.relations.items(), key=lambda kv: str(kv[0]))
            },
        }


@dataclass(frozen=True)
class CaptureResult:
    """
    Capture of the homomorphism closure of a sentence, up to a model size bound.

    The capture sentence is an existential second-order sentence over the
    ``Tp`` predicates: a shared part (positive atoms and renamings of every
    type) and one disjunct per summary of the sentence's small models.
    Membership is decided directly by solving each disjunct's constraints.
    """

    phi: Formula
    fragment: Fragment
    normal_form: NormalForm
    eligible: EligibleTypes
    summaries: tuple[TypeSummary, ...]
    size_bound: int
    stabilized: bool | None = None
    """Whether bound+1 added no summary; None when not checked"""

    settings: ToolkitSettings = DEFAULT_SETTINGS

    @cached_property
    def programs(self) -> tuple[SummaryProgram, ...]:
        return tuple(
            summary_program(s, self.eligible, self.normal_form) for s in self.summaries
        )

    @property
    def base(self) -> Signature:
        return self.normal_form.base

    @cached_property
    def signature(self) -> Signature:
        """Base signature extended by one ``Tp`` predicate per eligible type."""
        return self.base.with_predicates((t.predicate_name, t.order) for t in self.eligible)

    # Sentence

    def disjunct(self, summary: TypeSummary) -> Formula:
        program = self.programs[self.summaries.index(summary)]
        return program.formula(self.eligible)

    def formula(self) -> Formula:
        """
        The capture sentence, first-order over ``signature``.

        Spelling it out enumerates every eligible type once per summary.
        """
        shared: list[Formula] = []
        for t in self.eligible:
            shared.append(hom_condition(t, self.base))
            shared.extend(r.formula() for r in permutation_requirements(t, self.eligible))
        return conj(shared, disj(self.disjunct(s) for s in self.summaries))

    # Membership

    def admits(self, structure: Structure) -> CaptureWitness | None:
        """
        Type relations on structure satisfying some disjunct, or None.

        Raises:
            SignatureError: If structure is not over the sentence's signature
            BudgetExceededError: If the assignment search exceeds ``max_fallback_candidates``
        """
        if structure.sig != self.base:
            raise SignatureError("Capture membership needs a structure over the base signature")
        for program in self.programs:
            relations = program.greatest(structure)
            accepted = program.accepts(relations)
            if not accepted and not program.union_closed and all(relations.values()):
                relations = self._search(program, structure, relations) or relations
            if program.accepts(relations):
                logger.debug("Admitted by a summary of %d types", len(program.summary.plus))
                return CaptureWitness(
                    program.summary, {t: frozenset(tuples) for t, tuples in relations.items()}
                )
        return None

    def _search(
        self, program: SummaryProgram, structure: Structure, relations: Relations
    ) -> Relations | None:
        """Shrink the 1-type relations until the pair and uniqueness constraints hold."""
        first = self.eligible.pool[:1]
        ones = sorted(
            (t for t in program.summary.plus if t.variables == first),
            key=lambda t: t.predicate_name,
        )
        members = [(t, tup) for t in ones for tup in sorted(relations[t])]
        tried = 0
        for size in range(len(members) - 1, len(ones) - 1, -1):
            for chosen in combinations(members, size):
                bounds = {t: {tup for s, tup in chosen if s == t} for t in ones}
                if not all(bounds.values()):
                    continue
                tried += 1
                if tried > self.settings.max_fallback_candidates:
                    raise BudgetExceededError(
                        "Type assignment search exceeded the fallback candidate budget"
                    )
                candidate = program.greatest(structure, bounds)
                if program.accepts(candidate):
                    logger.debug("Assignment found after %d candidates", tried)
                    return candidate
        return None

    def witness_structure(self, structure: Structure, witness: CaptureWitness) -> Structure:
        """Expansion of structure over ``signature`` interpreting the witness relations."""
        return structure.expand_with(
            {t.predicate_name: witness.relations.get(t, ()) for t in self.eligible},
            {t.predicate_name: t.order for t in self.eligible},
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "fragment": self.fragment,
            "size_bound": self.size_bound,
            "width": self.eligible.width,
            "mode": self.eligible.mode,
            "stabilized": self.stabilized,
            "normal_form": FormulaPrinter.to_text(self.normal_form.to_formula()),
            "summaries": [s.to_dict() for s in self.summaries],
        }


def build_capture(
    phi: Formula,
    sig: Signature,
    fragment: Fragment = "gfo",
    size_bound: int | None = None,
    settings: ToolkitSettings | None = None,
    check_stabilization: bool = False,
) -> CaptureResult:
    """
    Build the capture of homcl(phi) from the summaries of phi's small models.

    Args:
        phi: Sentence in the chosen fragment; ``gfo`` also takes guarded-negation sentences
        sig: Signature of phi
        fragment: ``gfo``, ``tgf`` or ``fo2``
        size_bound: Largest model size enumerated; defaults to ``default_max_size``
        settings: Search budgets
        check_stabilization: Also enumerate bound+1 and report whether summaries changed

    Returns:
        CaptureResult holding the summaries and the sentence builder

    Raises:
        FragmentError: If phi is outside the fragment or has an unsupported shape
        BudgetExceededError: If the types or the model search exceed their budget
    """
    settings = settings or DEFAULT_SETTINGS
    size_bound = size_bound or settings.default_max_size
    if fragment == "fo2" and sig.constants:
        raise FragmentError("Two-variable capture needs a constant-free signature")
    normal_form = normalize(phi, sig, fragment, settings)
    mode: EligibilityMode = "fo2" if fragment == "fo2" else "guarded-rigid"
    eligible = eligible_types(normal_form.sig, normal_form.width, mode, settings)
    found = model_summary(phi, eligible, size_bound, settings, normal_form)
    stabilized = (
        summary_stabilized(phi, eligible, size_bound, settings, normal_form)
        if check_stabilization
        else None
    )
    summaries = tuple(sorted(found, key=lambda s: s.key))
    logger.info(
        "Capture over %s with %d summaries at size bound %d", fragment, len(summaries), size_bound
    )
    return CaptureResult(
        phi=phi,
        fragment=fragment,
        normal_form=normal_form,
        eligible=eligible,
        summaries=summaries,
        size_bound=size_bound,
        stabilized=stabilized,
        settings=settings,
    )
