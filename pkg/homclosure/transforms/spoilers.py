"""
Spoiler sentences.

A spoiler of a sentence is a homomorphism from a model into a non-model.
Each construction here is a sentence over an extended signature whose
(finite) models encode spoilers of a given kind; ``decode`` turns such a
model back into an explicit spoiler.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum

from homclosure.config import ToolkitSettings
from homclosure.core.formula import (
    Atom,
    Bottom,
    Const,
    Eq,
    Forall,
    Formula,
    Not,
    Var,
    conj,
    disj,
    forall_many,
    has_equality,
    iff,
    neg,
    replace_atoms,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import (
    Element,
    Labeling,
    Structure,
    bit_predicate,
    bit_width,
    decode_label,
)
from homclosure.exceptions import FormulaValidationError, HomError
from homclosure.semantics.evaluator import evaluate
from homclosure.semantics.homs import Hom, HomConstraint
from homclosure.semantics.model_finder import bounded_models
from homclosure.syntax.normal_forms import quantifier_rank, require_first_order
from homclosure.transforms.coloring import homclosure_witness
from homclosure.transforms.labels import label_formula, tr_n
from homclosure.transforms.relativize import relativize

logger = logging.getLogger(__name__)

INCLUSION_PREDICATE = "__U"
SURVIVOR_PREDICATE = "__Udot"
MERGE_SOURCE = "__cs"
MERGE_TARGET = "__ct"


def primed(name: str) -> str:
    """Name of the primed copy of a predicate."""
    return f"__{name}'"


class SpoilerKind(str, Enum):
    """Kinds of spoiler constructions."""

    INJECTIVE = "injective"
    STRONG_SURJECTIVE = "strong-surjective"
    MONOMERGE = "monomerge"
    COMBINED_ARB = "combined-arb"
    """Injective or strong surjective"""

    COMBINED_FIN = "combined-fin"
    """Injective or monomerge; finitely satisfiable iff a finite spoiler exists"""


@dataclass(frozen=True, eq=False)
class Spoiler:
    """A homomorphism from a model of a sentence into a non-model."""

    model: Structure
    non_model: Structure
    hom: Hom
    kind: SpoilerKind | None = None
    """Construction the spoiler was decoded from (None for searched spoilers)"""

    def problems(self, phi: Formula, settings: ToolkitSettings | None = None) -> list[str]:
        """Independent re-check; returns the list of violated conditions."""
        errors = []
        if not evaluate(self.model, phi, settings=settings):
            errors.append("model does not satisfy the sentence")
        if evaluate(self.non_model, phi, settings=settings):
            errors.append("non-model satisfies the sentence")
        if self.hom.source != self.model:
            errors.append("hom does not start at the model")
        if self.hom.target != self.non_model:
            errors.append("hom does not end at the non-model")
        constraint = _KIND_CONSTRAINTS.get(self.kind, HomConstraint())
        if not self.hom.satisfies(constraint):
            errors.append(f"map violates {constraint}")
        return errors

    def verify(self, phi: Formula, settings: ToolkitSettings | None = None) -> None:
        """
        Raises:
            HomError: If the spoiler does not re-check
        """
        errors = self.problems(phi, settings)
        if errors:
            raise HomError("Invalid spoiler: " + "; ".join(errors))

    def to_dict(self) -> dict[str, object]:
        from homclosure.utils.serialization import StructureCodec

        return {
            "kind": self.kind.value if self.kind else None,
            "model": StructureCodec.to_dict(self.model),
            "non_model": StructureCodec.to_dict(self.non_model),
            "hom": self.hom.to_dict(),
        }


_KIND_CONSTRAINTS = {
    SpoilerKind.INJECTIVE: HomConstraint(injective=True),
    SpoilerKind.STRONG_SURJECTIVE: HomConstraint(surjective=True, strong=True),
    SpoilerKind.MONOMERGE: HomConstraint(surjective=True, strong=True),
}


@dataclass(frozen=True)
class SpoilerConstruction:
    """A spoiler sentence together with what is needed to decode its models."""

    kind: SpoilerKind
    source: Formula
    """The sentence whose spoilers are encoded"""

    base: Signature
    """Signature of the source sentence"""

    formula: Formula
    sig: Signature
    """Signature of the spoiler sentence"""

    n: int = 1
    """Label bound of the strong surjective construction"""

    parts: tuple["SpoilerConstruction", ...] = field(default=())
    """Disjuncts of a combined construction"""

    def decode(self, model: Structure, settings: ToolkitSettings | None = None) -> Spoiler:
        """
        Explicit spoiler encoded by a model of the spoiler sentence.

        Raises:
            FormulaValidationError: If the structure is not a model of the construction
        """
        if self.parts:
            for part in self.parts:
                reduct = model.reduct(part.sig)
                if evaluate(reduct, part.formula, settings=settings):
                    return part.decode(reduct, settings)
            raise FormulaValidationError("Structure satisfies no disjunct of the spoiler sentence")
        if not evaluate(model, self.formula, settings=settings):
            raise FormulaValidationError("Structure is not a model of the spoiler sentence")
        if self.kind is SpoilerKind.INJECTIVE:
            return self._decode_injective(model)
        if self.kind is SpoilerKind.STRONG_SURJECTIVE:
            return self._decode_strong_surjective(model)
        return self._decode_monomerge(model)

    def _decode_injective(self, model: Structure) -> Spoiler:
        inside = sorted(a for (a,) in model.rel(INCLUSION_PREDICATE))
        keep = set(inside)
        relations = {
            name: [
                t
                for t in model.rel(name) & model.rel(primed(name))
                if set(t) <= keep
            ]
            for name, _ in self.base.predicates
        }
        constants = {c: model.constants[c] for c in self.base.constants}
        small = Structure.build(self.base, inside, constants, relations)
        large = model.reduct(self.base)
        return Spoiler(small, large, Hom(small, large, {a: a for a in inside}), self.kind)

    def _decode_strong_surjective(self, model: Structure) -> Spoiler:
        width = bit_width(self.n)
        lam = {a: min(decode_label(model, a, width), self.n) for a in model.domain}
        base = model.reduct(self.base)
        unfolded, projection = Labeling(base, self.n, lam).unfold()
        return Spoiler(unfolded, base, Hom(unfolded, base, projection), self.kind)

    def _decode_monomerge(self, model: Structure) -> Spoiler:
        src = model.constants[MERGE_SOURCE]
        tgt = model.constants[MERGE_TARGET]
        full = model.reduct(self.base)
        survivors = [a for (a,) in model.rel(SURVIVOR_PREDICATE)]
        merged = full.induced_substructure(survivors)
        mapping: dict[Element, Element] = {a: (tgt if a == src else a) for a in full.domain}
        return Spoiler(full, merged, Hom(full, merged, mapping), self.kind)


def spoiler_construction(phi: Formula, sig: Signature, kind: SpoilerKind) -> SpoilerConstruction:
    """
    Build the spoiler sentence of a kind.

    - injective: ``!phi & (phi^-)^rel(U)`` where phi^- replaces every atom
      ``P(t)`` by ``P(t) & P'(t)``
    - strong surjective: ``!phi & tr^n(phi)`` with n the quantifier rank
      (at least 1), plus label 1 for every constant
    - monomerge: ``phi & (!phi)^rel(U') & Omega(cs ~ ct) & forall x. (x = cs
      <-> !U'(x)) & cs != ct``
    - combined kinds: the disjunctions of the above

    The strong surjective and monomerge sentences are false for
    equality-free phi, which is preserved under strong surjective maps.

    Raises:
        FormulaValidationError: If phi is not first-order
    """
    require_first_order(phi, "spoiler_formula")
    if kind is SpoilerKind.COMBINED_ARB:
        return _combined(phi, sig, kind, (SpoilerKind.INJECTIVE, SpoilerKind.STRONG_SURJECTIVE))
    if kind is SpoilerKind.COMBINED_FIN:
        return _combined(phi, sig, kind, (SpoilerKind.INJECTIVE, SpoilerKind.MONOMERGE))
    if kind is SpoilerKind.INJECTIVE:
        return _injective(phi, sig)
    if kind is SpoilerKind.STRONG_SURJECTIVE:
        return _strong_surjective(phi, sig)
    return _monomerge(phi, sig)


def spoiler_formula(phi: Formula, sig: Signature, kind: SpoilerKind) -> Formula:
    return spoiler_construction(phi, sig, kind).formula


def _combined(
    phi: Formula, sig: Signature, kind: SpoilerKind, kinds: tuple[SpoilerKind, SpoilerKind]
) -> SpoilerConstruction:
    parts = tuple(spoiler_construction(phi, sig, k) for k in kinds)
    combined_sig = parts[0].sig.union(parts[1].sig)
    return SpoilerConstruction(
        kind=kind,
        source=phi,
        base=sig,
        formula=disj(p.formula for p in parts),
        sig=combined_sig,
        n=parts[1].n,
        parts=parts,
    )


def _injective(phi: Formula, sig: Signature) -> SpoilerConstruction:
    primes = [(primed(name), arity) for name, arity in sig.predicates]
    sig.check_fresh([name for name, _ in primes] + [INCLUSION_PREDICATE])
    tau = set(sig.predicate_names)
    minus = replace_atoms(
        phi,
        lambda a: conj(a, Atom(primed(a.pred), a.terms)) if a.pred in tau else None,
    )
    extended = sig.with_predicates(primes)
    formula = conj(neg(phi), relativize(minus, INCLUSION_PREDICATE, extended))
    return SpoilerConstruction(
        kind=SpoilerKind.INJECTIVE,
        source=phi,
        base=sig,
        formula=formula,
        sig=extended.with_predicates([(INCLUSION_PREDICATE, 1)]),
    )


def _strong_surjective(phi: Formula, sig: Signature) -> SpoilerConstruction:
    n = max(quantifier_rank(phi), 1)
    bits = [(bit_predicate(j), 1) for j in range(1, bit_width(n) + 1)]
    sig.check_fresh(name for name, _ in bits)
    extended = sig.with_predicates(bits)
    if not has_equality(phi):
        return SpoilerConstruction(SpoilerKind.STRONG_SURJECTIVE, phi, sig, Bottom(), extended, n)
    if n > 2:
        logger.warning("Strong surjective spoiler for quantifier rank %d may be very large", n)
    constant_labels = conj(label_formula(Const(c), 1, n, "eq") for c in sig.constants)
    formula = conj(neg(phi), tr_n(phi, n), constant_labels)
    return SpoilerConstruction(SpoilerKind.STRONG_SURJECTIVE, phi, sig, formula, extended, n)


def _monomerge(phi: Formula, sig: Signature) -> SpoilerConstruction:
    sig.check_fresh([SURVIVOR_PREDICATE, MERGE_SOURCE, MERGE_TARGET])
    extended = sig.with_predicates([(SURVIVOR_PREDICATE, 1)]).with_constants(
        [MERGE_SOURCE, MERGE_TARGET]
    )
    if not has_equality(phi):
        return SpoilerConstruction(SpoilerKind.MONOMERGE, phi, sig, Bottom(), extended)
    source, target = Const(MERGE_SOURCE), Const(MERGE_TARGET)
    x = Var("x")
    formula = conj(
        phi,
        relativize(neg(phi), SURVIVOR_PREDICATE, sig),
        merge_indistinguishable(sig, source, target),
        Forall("x", iff(Eq(x, source), Not(Atom(SURVIVOR_PREDICATE, (x,))))),
        Not(Eq(source, target)),
    )
    return SpoilerConstruction(SpoilerKind.MONOMERGE, phi, sig, formula, extended)


def merge_indistinguishable(sig: Signature, source: Const, target: Const) -> Formula:
    """Omega(cs ~ ct): swapping cs for ct in any single position preserves every relation."""
    parts = []
    for name, arity in sig.predicates:
        for i in range(arity):
            variables = [f"x{j}" for j in range(1, arity + 1) if j != i + 1]
            before = tuple(Var(v) for v in variables[:i])
            after = tuple(Var(v) for v in variables[i:])
            parts.append(
                forall_many(
                    variables,
                    iff(Atom(name, before + (source,) + after), Atom(name, before + (target,) + after)),
                )
            )
    return conj(parts)


def spoiler_search(
    phi: Formula, sig: Signature, max_size: int, settings: ToolkitSettings | None = None
) -> Spoiler | None:
    """
    Exhaustive bounded spoiler search.

    Non-models are enumerated in canonical order up to max_size; for each,
    a model of phi with at most max_size elements mapping into it is
    searched. The first pair found is returned.

    Raises:
        BudgetExceededError: If a search exceeds its budget
    """
    for non_model in bounded_models(neg(phi), sig, max_size, settings):
        witness = homclosure_witness(phi, non_model, max_size, settings)
        if witness is not None:
            logger.debug("Bounded spoiler found into a non-model of size %d", len(non_model))
            return Spoiler(witness.model, non_model, witness.hom)
    return None
