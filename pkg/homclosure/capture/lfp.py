"""Least-fixpoint translation of guarded captures."""

import logging

from homclosure.capture.builder import CaptureResult, build_capture
from homclosure.capture.program import SummaryProgram, base_literals
from homclosure.capture.types import TypeDescriptor
from homclosure.config import ToolkitSettings
from homclosure.core.formula import (
    Atom,
    Formula,
    Lfp,
    LfpDef,
    Not,
    Top,
    Var,
    conj,
    disj,
    exists_many,
    forall_many,
    neg,
)
from homclosure.core.signature import Signature

logger = logging.getLogger(__name__)


def complement_name(t: TypeDescriptor) -> str:
    return t.predicate_name.replace("Tp", "Cp", 1)


def complement_definitions(program: SummaryProgram) -> tuple[LfpDef, ...]:
    """
    One definition per realized type, holding exactly where its ``Tp``
    relation must be empty in every solution.

    Complements of types outside the summary are full, so references to
    them become Top.
    """
    plus = program.summary.plus

    def complement(t: TypeDescriptor, args: tuple[str, ...]) -> Formula:
        if t not in plus:
            return Top()
        return Atom(complement_name(t), tuple(Var(a) for a in args))

    defs = []
    for t in sorted(plus, key=lambda t: (t.order, t.predicate_name)):
        reasons: list[Formula] = [neg(lit) for lit in base_literals(t, program.base)]
        for req in program.requirements:
            if req.source != t:
                continue
            reasons.append(
                conj(
                    forall_many(o.existential(t), complement(o.target, o.args))
                    for o in req.options
                )
            )
        defs.append(LfpDef(complement_name(t), t.variables, disj(reasons)))
    return tuple(defs)


def summary_fixpoint(program: SummaryProgram) -> Formula:
    defs = complement_definitions(program)
    return conj(
        exists_many(
            d.params,
            Not(Lfp(defs, d.name, tuple(Var(p) for p in d.params))),
        )
        for d in defs
    )


def lfp_translate_capture(capture: CaptureResult) -> Formula:
    """Fixpoint sentence equivalent to the capture on every finite structure."""
    if capture.fragment != "gfo":
        raise ValueError("Fixpoint translation is defined for guarded captures")
    return disj(summary_fixpoint(program) for program in capture.programs)


def lfp_translate(
    phi: Formula,
    sig: Signature,
    size_bound: int | None = None,
    settings: ToolkitSettings | None = None,
) -> Formula:
    """
    Least-fixpoint sentence defining homcl(phi) for a guarded sentence.

    A disjunct per summary asserts that every realized type survives the
    greatest fixpoint of its requirements, stated as the failure of the
    least fixpoint of the complements.

    Raises:
        FragmentError: If phi is not a guarded sentence of a supported shape
        BudgetExceededError: If the types or the model search exceed their budget
    """
    capture = build_capture(phi, sig, "gfo", size_bound, settings)
    result = lfp_translate_capture(capture)
    logger.info("Fixpoint translation over %d summaries", len(capture.summaries))
    return result
