"""
Colorings of a sentence by a finite target structure.

A coloring labels every element of a model by an element of the target A
(the i-th element of A's domain carries label i) through the Bit
predicates. The extrinsic coloring adds the constraint that every tuple is
colored by a tuple of A; the intrinsic coloring bakes that constraint into
every atom.
"""

import logging
from collections.abc import Iterator
from dataclasses import dataclass
from itertools import combinations_with_replacement, product
from typing import Literal

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import (
    Atom,
    Const,
    Formula,
    Term,
    Var,
    conj,
    disj,
    forall_many,
    implies,
    predicates_of,
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
from homclosure.exceptions import SignatureError, StructureValidationError
from homclosure.semantics.homs import Hom
from homclosure.semantics.model_finder import ModelSearch
from homclosure.transforms.labels import label_formula

logger = logging.getLogger(__name__)


def _labels(target: Structure) -> dict[Element, int]:
    return {a: i + 1 for i, a in enumerate(target.domain)}


def coloring_signature(target: Structure) -> Signature:
    """Target signature extended by the Bit predicates for |A| labels."""
    width = bit_width(len(target))
    return target.sig.with_predicates((bit_predicate(j), 1) for j in range(1, width + 1))


def chi(pred: str, terms: tuple[Term, ...], target: Structure) -> Formula:
    """``P(t) & OR over tuples m of P^A of AND_i [lambda(t_i) = m_i]``."""
    labels = _labels(target)
    n = len(target)
    colorings = disj(
        conj(label_formula(t, labels[m], n, "eq") for t, m in zip(terms, tup, strict=True))
        for tup in sorted(target.rel(pred))
    )
    return conj(Atom(pred, terms), colorings)


def omega(target: Structure) -> Formula:
    """Every tuple of every relation is colored by a tuple of the target."""
    parts = []
    for name, arity in target.sig.predicates:
        variables = [f"x{i}" for i in range(1, arity + 1)]
        terms = tuple(Var(v) for v in variables)
        parts.append(forall_many(variables, implies(Atom(name, terms), chi(name, terms, target))))
    return conj(parts)


def constant_colors(target: Structure) -> Formula:
    """Every constant carries the label of its interpretation in the target."""
    labels = _labels(target)
    n = len(target)
    return conj(
        label_formula(Const(c), labels[target.constants[c]], n, "eq") for c in target.sig.constants
    )


def coloring(phi: Formula, target: Structure, mode: Literal["ext", "int"] = "int") -> Formula:
    """
    Extrinsic or intrinsic coloring of phi by a finite target structure.

    Both variants are satisfiable exactly when phi has a model with a
    homomorphism into the target.

    Args:
        phi: Sentence over the target's signature
        target: Finite target structure A
        mode: ``ext`` for phi & Omega_A, ``int`` for atom-wise replacement by chi

    Returns:
        Sentence over ``coloring_signature(target)``

    Raises:
        SignatureError: If phi already uses a Bit predicate
    """
    bits = {bit_predicate(j) for j in range(1, bit_width(len(target)) + 1)}
    clashes = sorted(bits & predicates_of(phi))
    if clashes:
        raise SignatureError(f"Coloring predicates clash with the sentence: {clashes}")

    if mode == "ext":
        return conj(phi, omega(target), constant_colors(target))
    if mode == "int":
        tau = set(target.sig.predicate_names)
        colored = replace_atoms(
            phi, lambda a: chi(a.pred, a.terms, target) if a.pred in tau else None
        )
        return conj(colored, constant_colors(target))
    raise ValueError(f"Unknown coloring mode: {mode}")


@dataclass(frozen=True)
class ColoringWitness:
    """A model of the sentence together with its homomorphism into the target."""

    model: Structure
    hom: Hom

    def encode(self) -> Structure:
        """The colored structure: the model expanded by the Bit encoding of the hom."""
        return encode_coloring(self.model, self.hom)


def encode_coloring(model: Structure, hom: Hom) -> Structure:
    """Expand a model by the Bit predicates encoding its hom into the target."""
    labels = _labels(hom.target)
    labeling = Labeling(model, len(hom.target), {a: labels[hom(a)] for a in model.domain})
    return labeling.implicit_representation()


def decode_coloring_witness(colored: Structure, target: Structure) -> ColoringWitness:
    """
    Recover a model and its homomorphism into the target from a colored structure.

    Relations keep the tuples whose colors form a tuple of the target. An
    element whose encoded label exceeds |A| occurs in no kept tuple and is
    sent to the first element of A.

    Raises:
        StructureValidationError: If a constant is colored wrongly
    """
    width = bit_width(len(target))
    by_label = {i + 1: a for i, a in enumerate(target.domain)}
    coloring_map = {
        b: by_label.get(decode_label(colored, b, width), target.domain[0]) for b in colored.domain
    }
    relations = {
        name: [
            tup
            for tup in colored.rel(name)
            if tuple(coloring_map[b] for b in tup) in target.rel(name)
        ]
        for name, _ in target.sig.predicates
    }
    constants = {c: colored.constants[c] for c in target.sig.constants}
    model = Structure.build(target.sig, colored.domain, constants, relations)
    hom = Hom(model, target, coloring_map)
    if not hom.is_valid():
        raise StructureValidationError("Colored structure does not encode a homomorphism")
    return ColoringWitness(model, hom)


def homclosure_witness(
    phi: Formula,
    target: Structure,
    max_size: int,
    settings: ToolkitSettings | None = None,
) -> ColoringWitness | None:
    """
    Search a model of phi with at most max_size elements mapping into the target.

    Candidate homomorphisms are fixed first, as non-decreasing maps from the
    model domain into the target domain; relation cells are restricted to
    tuples whose image lies in the target relation and constants to the
    preimage of their interpretation. Every model with a homomorphism into
    the target is isomorphic to one reached this way, so the search is
    complete up to the bound.

    Raises:
        BudgetExceededError: If the search visits too many candidates
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    search = ModelSearch(phi, target.sig, settings or DEFAULT_SETTINGS)
    for size in range(1, max_size + 1):
        for images in combinations_with_replacement(target.domain, size):
            found = _labelled_model(search, target, images)
            if found is not None:
                logger.debug("Homclosure witness of size %d after %d nodes", size, search.visited)
                return found
    logger.debug("No homclosure witness up to size %d after %d nodes", max_size, search.visited)
    return None


def _labelled_model(
    search: ModelSearch, target: Structure, images: tuple[Element, ...]
) -> ColoringWitness | None:
    domain = range(len(images))
    constant_choices = {
        c: [b for b in domain if images[b] == target.constants[c]] for c in target.sig.constants
    }
    if any(not choices for choices in constant_choices.values()):
        return None
    cells = [
        (name, tup)
        for name, _ in target.sig.predicates
        for tup in _preimage(target.rel(name), images)
    ]
    model = next(search.models_of_size(len(images), constant_choices, cells), None)
    if model is None:
        return None
    return ColoringWitness(model, Hom(model, target, dict(enumerate(images))))


def _preimage(
    tuples: frozenset[tuple[Element, ...]], images: tuple[Element, ...]
) -> Iterator[tuple[Element, ...]]:
    fibers: dict[Element, list[Element]] = {}
    for b, a in enumerate(images):
        fibers.setdefault(a, []).append(b)
    for tup in sorted(tuples):
        yield from product(*(fibers.get(a, []) for a in tup))
