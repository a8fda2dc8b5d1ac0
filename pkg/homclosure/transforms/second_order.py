"""
Second-order normal forms for superstructure-closed, surjective-hom-closed
and homclosed classes, with brute-force closure operators to test them.
"""

import logging
from collections.abc import Iterator
from itertools import chain, combinations, product

from homclosure.config import ToolkitSettings
from homclosure.core.formula import (
    Atom,
    Const,
    Exists,
    ExistsFinSO,
    ExistsSO,
    Forall,
    ForallSO,
    Formula,
    Var,
    conj,
    forall_many,
    iff,
    implies,
    predicates_of,
    rename_predicates,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import SignatureError
from homclosure.semantics.evaluator import evaluate
from homclosure.semantics.homs import Hom
from homclosure.transforms.relativize import guard_quantifiers, relativize
from homclosure.transforms.spoilers import INCLUSION_PREDICATE, SURVIVOR_PREDICATE, primed

logger = logging.getLogger(__name__)


def so_sup(psi: Formula, sig: Signature | None = None, unary: str = SURVIVOR_PREDICATE) -> Formula:
    """``exists U'. psi^rel(U')``: some induced substructure is a model of psi."""
    return ExistsSO(unary, 1, relativize(psi, unary, sig))


def eso_fin_wrap(psi: Formula, unary: str, sig: Signature | None = None) -> Formula:
    """``existsFin U. psi^rel(U)``; on finite structures the same as ``so_sup``."""
    return ExistsFinSO(unary, 1, relativize(psi, unary, sig))


def eta(sig: Signature, left: str, right: str) -> Formula:
    """
    The two elements are indistinguishable by every relation of sig.

    For every predicate and position, swapping ``left`` for ``right`` in that
    position preserves the relation, whatever the other entries are.
    """
    parts = []
    for name, arity in sig.predicates:
        for i in range(arity):
            others = [f"__w{j}" for j in range(1, arity)]
            before = tuple(Var(v) for v in others[:i])
            after = tuple(Var(v) for v in others[i:])
            parts.append(
                forall_many(
                    others,
                    iff(
                        Atom(name, before + (Var(left),) + after),
                        Atom(name, before + (Var(right),) + after),
                    ),
                )
            )
    return conj(parts)


def theta(sig: Signature, unary: str) -> Formula:
    """``forall x exists y. U(y) & eta(x, y)``: U holds a representative of every element."""
    return Forall("x", Exists("y", conj(Atom(unary, (Var("y"),)), eta(sig, "x", "y"))))


def so_shom(psi: Formula, sig: Signature, unary: str = INCLUSION_PREDICATE) -> Formula:
    """
    ``forall U forall tau'. ((Theta_U^tau' & U(c)... & AND_P forall x. P(x) -> P'(x))
    -> psi[tau -> tau']^guard(U))``.

    Models are exactly the structures all of whose surjective homomorphic
    images are models of psi. Constants are required to lie in U as part of
    the premise, which keeps the relativized consequent meaningful when U
    picks representatives of merged classes.

    Raises:
        SignatureError: If the fresh names clash with sig or psi
    """
    renaming = {name: primed(name) for name in sig.predicate_names}
    fresh = [unary, *renaming.values()]
    sig.check_fresh(fresh)
    clashes = sorted(set(fresh) & predicates_of(psi))
    if clashes:
        raise SignatureError(f"Fresh predicates clash with the sentence: {clashes}")

    primed_sig = Signature(tuple((renaming[n], a) for n, a in sig.predicates), sig.constants)
    inclusions = []
    for name, arity in sig.predicates:
        variables = [f"x{i}" for i in range(1, arity + 1)]
        terms = tuple(Var(v) for v in variables)
        inclusions.append(
            forall_many(variables, implies(Atom(name, terms), Atom(renaming[name], terms)))
        )
    premise = conj(
        theta(primed_sig, unary),
        conj(Atom(unary, (Const(c),)) for c in sig.constants),
        conj(inclusions),
    )
    consequent = guard_quantifiers(rename_predicates(psi, renaming), unary)
    body: Formula = implies(premise, consequent)
    for name, arity in reversed(sig.predicates):
        body = ForallSO(renaming[name], arity, body)
    return ForallSO(unary, 1, body)


# Brute-force closure operators


def _subsets(domain: tuple[Element, ...]) -> Iterator[tuple[Element, ...]]:
    return chain.from_iterable(combinations(domain, k) for k in range(1, len(domain) + 1))


def substructures(structure: Structure) -> Iterator[Structure]:
    """Induced substructures on non-empty subsets containing every constant."""
    constants = structure.constant_elements
    for subset in _subsets(structure.domain):
        if constants <= set(subset):
            yield structure.induced_substructure(subset)


def in_superstructure_closure(
    structure: Structure, psi: Formula, settings: ToolkitSettings | None = None
) -> bool:
    """Some induced substructure is a model of psi."""
    return any(evaluate(sub, psi, settings=settings) for sub in substructures(structure))


def set_partitions(elements: tuple[Element, ...]) -> Iterator[list[list[Element]]]:
    """All partitions of a sequence into non-empty blocks."""
    if not elements:
        yield []
        return
    first, rest = elements[0], elements[1:]
    for partition in set_partitions(rest):
        yield [[first], *partition]
        for i in range(len(partition)):
            yield partition[:i] + [[first, *partition[i]]] + partition[i + 1 :]


def surjective_images(structure: Structure) -> Iterator[Hom]:
    """
    Every surjective homomorphism out of the structure, up to isomorphism of the image.

    Images are enumerated per kernel partition: the quotient carries the
    image tuples and any superset of them.
    """
    for partition in set_partitions(structure.domain):
        blocks = sorted(partition, key=min)
        mapping = {a: i for i, block in enumerate(blocks) for a in block}
        size = len(blocks)
        minimal = {
            name: {tuple(mapping[a] for a in t) for t in tuples}
            for name, tuples in structure.relations.items()
        }
        optional = [
            (name, tup)
            for name, arity in structure.sig.predicates
            for tup in product(range(size), repeat=arity)
            if tup not in minimal[name]
        ]
        constants = {c: mapping[a] for c, a in structure.constants.items()}
        for bits in product((False, True), repeat=len(optional)):
            relations = {name: set(tuples) for name, tuples in minimal.items()}
            for (name, tup), bit in zip(optional, bits, strict=True):
                if bit:
                    relations[name].add(tup)
            image = Structure.build(structure.sig, size, constants, relations)
            yield Hom(structure, image, mapping)


def in_surjective_closure(
    structure: Structure, psi: Formula, settings: ToolkitSettings | None = None
) -> bool:
    """Every surjective homomorphic image is a model of psi."""
    return all(evaluate(h.target, psi, settings=settings) for h in surjective_images(structure))
