"""
Rigid types over a fixed variable pool.

A type of order n lists, for an n-element subsequence of the pool
``v1..vk`` and the constants of the signature, which atoms hold. Only rigid
types are represented: the variables denote pairwise distinct elements
that are not named by any constant, so all equalities mentioning a
variable are negative. Equal constants are grouped into classes and atoms
mention only the first constant of each class.
"""

import hashlib
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from functools import cached_property
from itertools import chain, combinations, permutations, product
from typing import Literal

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Formula,
    Not,
    Or,
    Term,
    Top,
    Var,
    conj,
)
from homclosure.core.signature import RESERVED_PREFIX, Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import BudgetExceededError, FormulaValidationError
from homclosure.transforms.second_order import set_partitions

logger = logging.getLogger(__name__)

EligibilityMode = Literal["all-rigid", "guarded-rigid", "fo2"]
TypeAtom = tuple[str, tuple[Term, ...]]


def variable_pool(width: int) -> tuple[str, ...]:
    return tuple(f"v{i}" for i in range(1, width + 1))


def _term_key(term: Term) -> tuple[int, str]:
    return (0 if isinstance(term, Var) else 1, term.name)


def _atom_text(atom: TypeAtom) -> str:
    name, terms = atom
    return f"{name}({','.join(t.name for t in terms)})"


@dataclass(frozen=True)
class TypeDescriptor:
    """A rigid type: its variables, constant classes and positive atoms."""

    sig: Signature
    variables: tuple[str, ...]
    """Subsequence of the variable pool, in pool order"""

    atoms: frozenset[TypeAtom]
    """Positive atoms; every other atom over the type's terms is negative"""

    constant_classes: tuple[tuple[str, ...], ...] = ()
    """Partition of the constants into equal classes, each led by its representative"""

    @property
    def order(self) -> int:
        return len(self.variables)

    @cached_property
    def representative(self) -> dict[str, str]:
        return {c: cls[0] for cls in self.constant_classes for c in cls}

    @cached_property
    def terms(self) -> tuple[Term, ...]:
        return tuple(Var(v) for v in self.variables) + tuple(
            Const(cls[0]) for cls in self.constant_classes
        )

    @cached_property
    def predicate_name(self) -> str:
        """``Tp`` predicate name derived from a hash of the canonical literal set."""
        text = "|".join(
            [
                ",".join(self.variables),
                ";".join(",".join(cls) for cls in self.constant_classes),
                *sorted(_atom_text(a) for a in self.atoms),
            ]
        )
        digest = hashlib.sha1(text.encode("utf-8")).hexdigest()[:12]
        return f"{RESERVED_PREFIX}Tp{self.order}_{digest}"

    def guard_atoms(self) -> list[TypeAtom]:
        """Positive relational atoms mentioning every variable of the type."""
        needed = set(self.variables)
        return sorted(
            (a for a in self.atoms if needed <= {t.name for t in a[1] if isinstance(t, Var)}),
            key=_atom_text,
        )

    @property
    def guarded(self) -> bool:
        return bool(self.guard_atoms())

    def holds(self, pred: str, terms: Sequence[Term]) -> bool:
        """Truth of an atom over the type's variables and any constants."""
        return (pred, tuple(self._normalize(t) for t in terms)) in self.atoms

    def _normalize(self, term: Term) -> Term:
        if isinstance(term, Const):
            return Const(self.representative[term.name])
        return term

    def restrict(self, variables: Sequence[str]) -> "TypeDescriptor":
        """Subtype over a subsequence of the type's variables."""
        keep = set(variables)
        atoms = frozenset(
            a for a in self.atoms if all(isinstance(t, Const) or t.name in keep for t in a[1])
        )
        ordered = tuple(v for v in self.variables if v in keep)
        return TypeDescriptor(self.sig, ordered, atoms, self.constant_classes)

    def permuted(
        self, images: Sequence[str], pool: Sequence[str]
    ) -> tuple["TypeDescriptor", tuple[int, ...]]:
        """
        Rename variable ``variables[i]`` to ``images[i]``.

        Returns:
            Tuple of (renamed type, argument order) where the renamed type
            holds of ``tuple(x[i] for i in order)`` whenever this type holds of x
        """
        renaming = dict(zip(self.variables, images, strict=True))
        position = {v: i for i, v in enumerate(pool)}
        ordered = tuple(sorted(images, key=position.__getitem__))
        order = tuple(list(images).index(v) for v in ordered)
        atoms = frozenset(
            (name, tuple(Var(renaming[t.name]) if isinstance(t, Var) else t for t in terms))
            for name, terms in self.atoms
        )
        return TypeDescriptor(self.sig, ordered, atoms, self.constant_classes), order

    def positive_literals(self) -> list[Formula]:
        literals: list[Formula] = [
            Atom(name, terms) for name, terms in sorted(self.atoms, key=_atom_text)
        ]
        for cls in self.constant_classes:
            literals.extend(Eq(Const(cls[0]), Const(c)) for c in cls[1:])
        return literals

    def formula(self) -> Formula:
        """Conjunction of all literals of the type."""
        literals = self.positive_literals()
        for name, terms in self.possible_atoms():
            if (name, terms) not in self.atoms:
                literals.append(Not(Atom(name, terms)))
        variables = [Var(v) for v in self.variables]
        reps = [Const(cls[0]) for cls in self.constant_classes]
        for left, right in combinations(variables + reps, 2):
            literals.append(Not(Eq(left, right)))
        return conj(literals)

    def possible_atoms(self) -> list[TypeAtom]:
        return [
            (name, terms)
            for name, arity in self.sig.predicates
            for terms in product(self.terms, repeat=arity)
        ]

    def entails(self, phi: Formula, env: dict[str, str]) -> bool:
        """
        Truth of a quantifier-free formula whose variables env maps to type variables.

        Raises:
            FormulaValidationError: If phi has quantifiers or unbound variables
        """

        def term(t: Term) -> Term:
            if isinstance(t, Const):
                return self._normalize(t)
            try:
                return Var(env[t.name])
            except KeyError:
                raise FormulaValidationError(f"Unbound variable: {t.name}") from None

        if isinstance(phi, Atom):
            return (phi.pred, tuple(term(t) for t in phi.terms)) in self.atoms
        if isinstance(phi, Eq):
            return term(phi.left) == term(phi.right)
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bottom):
            return False
        if isinstance(phi, Not):
            return not self.entails(phi.body, env)
        if isinstance(phi, And):
            return all(self.entails(item, env) for item in phi.items)
        if isinstance(phi, Or):
            return any(self.entails(item, env) for item in phi.items)
        raise FormulaValidationError("Types only decide quantifier-free formulas")

    def __str__(self) -> str:
        atoms = ", ".join(sorted(_atom_text(a) for a in self.atoms))
        return f"[{','.join(self.variables)}: {atoms}]"


def _classes(sig: Signature, structure: Structure) -> tuple[tuple[str, ...], ...]:
    groups: dict[Element, list[str]] = {}
    for c in sig.constants:
        groups.setdefault(structure.constants[c], []).append(c)
    return tuple(tuple(g) for g in groups.values())


def type_of(
    structure: Structure, tup: Sequence[Element], variables: Sequence[str]
) -> TypeDescriptor | None:
    """
    The rigid type realized by a tuple under the given variables.

    Returns None when the tuple repeats an element or contains a constant,
    since no rigid type is realized then.
    """
    sig = structure.sig
    if len(set(tup)) != len(tup) or set(tup) & structure.constant_elements:
        return None
    classes = _classes(sig, structure)
    value: dict[Term, Element] = {Var(v): a for v, a in zip(variables, tup, strict=True)}
    value.update({Const(cls[0]): structure.constants[cls[0]] for cls in classes})
    terms = sorted(value, key=_term_key)
    atoms = frozenset(
        (name, args)
        for name, arity in sig.predicates
        for args in product(terms, repeat=arity)
        if tuple(value[t] for t in args) in structure.relations[name]
    )
    return TypeDescriptor(sig, tuple(variables), atoms, classes)


@dataclass(frozen=True)
class EligibleTypes:
    """
    A finite set of rigid types of order at most ``width``.

    Membership is decided without enumeration; iteration enumerates the
    whole set and is only needed to spell out capture sentences.
    """

    sig: Signature
    width: int
    mode: EligibilityMode = "guarded-rigid"

    @property
    def pool(self) -> tuple[str, ...]:
        return variable_pool(self.width)

    def variable_sequences(self) -> Iterator[tuple[str, ...]]:
        return chain.from_iterable(
            combinations(self.pool, n) for n in range(1, self.width + 1)
        )

    def __contains__(self, item: object) -> bool:
        if not isinstance(item, TypeDescriptor) or item.sig != self.sig:
            return False
        if not 1 <= item.order <= self.width or not set(item.variables) <= set(self.pool):
            return False
        if self.mode == "guarded-rigid":
            return item.guarded
        return True

    def __iter__(self) -> Iterator[TypeDescriptor]:
        for variables in self.variable_sequences():
            for partition in set_partitions(self.sig.constants):
                classes = tuple(
                    tuple(c for c in self.sig.constants if c in block)
                    for block in sorted(partition, key=lambda b: self.sig.constants.index(b[0]))
                )
                yield from self._with_classes(variables, classes)

    def _with_classes(
        self, variables: tuple[str, ...], classes: tuple[tuple[str, ...], ...]
    ) -> Iterator[TypeDescriptor]:
        skeleton = TypeDescriptor(self.sig, variables, frozenset(), classes)
        candidates = skeleton.possible_atoms()
        for bits in product((False, True), repeat=len(candidates)):
            atoms = frozenset(a for a, bit in zip(candidates, bits, strict=True) if bit)
            t = TypeDescriptor(self.sig, variables, atoms, classes)
            if t in self:
                yield t

    def permutations_of(
        self, t: TypeDescriptor
    ) -> Iterator[tuple[TypeDescriptor, tuple[int, ...]]]:
        """Every non-identity variable renaming of t inside the pool."""
        for images in permutations(self.pool, t.order):
            if images != t.variables:
                yield t.permuted(images, self.pool)


def eligible_types(
    sig: Signature,
    width: int,
    mode: EligibilityMode = "guarded-rigid",
    settings: ToolkitSettings | None = None,
) -> EligibleTypes:
    """
    Eligible types of the given width.

    ``guarded-rigid`` keeps the types with a positive atom over all their
    variables; ``all-rigid`` keeps every rigid type; ``fo2`` keeps all rigid
    1-types and 2-types.

    Raises:
        ValueError: If width is below 1, or above 2 in fo2 mode
        BudgetExceededError: If spelling out the types would exceed ``max_candidates``
    """
    settings = settings or DEFAULT_SETTINGS
    if width < 1:
        raise ValueError("Type width must be >= 1")
    if mode == "fo2" and width > 2:
        raise ValueError("Two-variable types have width at most 2")
    atom_count = sum((width + len(sig.constants)) ** arity for _, arity in sig.predicates)
    if 2**atom_count > settings.max_candidates:
        raise BudgetExceededError(
            f"Types over {atom_count} atoms exceed the candidate budget"
        )
    logger.debug("Eligible %s types of width %d over %d atoms", mode, width, atom_count)
    return EligibleTypes(sig, width, mode)
