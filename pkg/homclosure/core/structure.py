"""Finite relational structures and labelings."""

import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Literal

import networkx as nx

from homclosure.core.formula import Const, Eq, Formula, Var, atom, conj, exists_many
from homclosure.core.signature import Signature
from homclosure.core.validator import StructureValidator
from homclosure.exceptions import SignatureError, StructureValidationError

logger = logging.getLogger(__name__)

Element = int
Tuple = tuple[int, ...]


@dataclass(frozen=True, eq=False)
class Structure:
    """
    Finite relational structure over a signature.

    Elements are small integers. Equality and hashing go through
    ``canonical_key``, so two structures are equal exactly when they have the
    same signature, domain, constants and relation tuples.
    """

    sig: Signature
    """Vocabulary of the structure"""

    domain: tuple[Element, ...]
    """Non-empty, duplicate-free, sorted element ids"""

    constants: Mapping[str, Element] = field(default_factory=dict)
    """Constant interpretations"""

    relations: Mapping[str, frozenset[Tuple]] = field(default_factory=dict)
    """Predicate interpretations as tuple sets"""

    def __post_init__(self) -> None:
        StructureValidator.validate(self)

    @classmethod
    def build(
        cls,
        sig: Signature,
        domain: int | Iterable[Element],
        constants: Mapping[str, Element] | None = None,
        relations: Mapping[str, Iterable[Iterable[Element]]] | None = None,
    ) -> "Structure":
        """
        Build a structure, filling unmentioned predicates with the empty relation.

        Args:
            sig: Signature
            domain: Domain size (elements 0..size-1) or explicit element ids
            constants: Constant interpretations
            relations: Relation tuples per predicate

        Raises:
            StructureValidationError: If the result is not a valid structure
        """
        elements = tuple(range(domain)) if isinstance(domain, int) else tuple(sorted(set(domain)))
        rels = {name: frozenset() for name, _ in sig.predicates}
        for name, tuples in (relations or {}).items():
            rels[name] = frozenset(tuple(t) for t in tuples)
        return cls(sig, elements, dict(constants or {}), rels)

    # Accessors

    def __len__(self) -> int:
        return len(self.domain)

    def rel(self, name: str) -> frozenset[Tuple]:
        return self.relations[name]

    def holds(self, name: str, tup: Tuple) -> bool:
        return tup in self.relations[name]

    @property
    def constant_elements(self) -> set[Element]:
        return set(self.constants.values())

    def canonical_key(self) -> tuple[Any, ...]:
        return (
            self.sig,
            self.domain,
            tuple(sorted(self.constants.items())),
            tuple((name, tuple(sorted(self.relations[name]))) for name, _ in self.sig.predicates),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self) -> int:
        return hash(self.canonical_key())

    def __repr__(self) -> str:
        rels = {n: sorted(self.relations[n]) for n, _ in self.sig.predicates}
        return f"Structure(domain={list(self.domain)}, constants={dict(self.constants)}, relations={rels})"

    def degree(self, element: Element) -> int:
        """Number of tuple positions holding the element."""
        return sum(tup.count(element) for tuples in self.relations.values() for tup in tuples)

    def gaifman_graph(self) -> nx.Graph:
        """Graph on the domain joining elements that co-occur in a tuple."""
        graph = nx.Graph()
        graph.add_nodes_from(self.domain)
        for tuples in self.relations.values():
            for tup in tuples:
                for i, a in enumerate(tup):
                    for b in tup[i + 1 :]:
                        if a != b:
                            graph.add_edge(a, b)
        return graph

    # Constructions

    def reduct(self, sigma: Signature) -> "Structure":
        """
        Restrict to a subsignature.

        Raises:
            SignatureError: If sigma is not a subsignature
        """
        if not sigma.is_subsignature(self.sig):
            raise SignatureError(f"{sigma} is not a subsignature of {self.sig}")
        return Structure(
            sigma,
            self.domain,
            {c: self.constants[c] for c in sigma.constants},
            {n: self.relations[n] for n, _ in sigma.predicates},
        )

    def expand(
        self, predicates: Iterable[tuple[str, int]], mode: Literal["full", "empty"] = "full"
    ) -> "Structure":
        """
        Expand by fresh predicates interpreted as full or empty relations.

        Raises:
            SignatureError: On a name clash
        """
        predicates = tuple(predicates)
        sig = self.sig.with_predicates(predicates)
        rels = dict(self.relations)
        for name, arity in predicates:
            rels[name] = (
                frozenset(product(self.domain, repeat=arity)) if mode == "full" else frozenset()
            )
        return Structure(sig, self.domain, dict(self.constants), rels)

    def expand_with(
        self,
        relations: Mapping[str, Iterable[Iterable[Element]]] | None = None,
        arities: Mapping[str, int] | None = None,
        constants: Mapping[str, Element] | None = None,
    ) -> "Structure":
        """Expand by fresh symbols with explicit interpretations."""
        relations = dict(relations or {})
        arities = dict(arities or {})
        for name, tuples in relations.items():
            if name not in arities:
                tuples = [tuple(t) for t in tuples]
                relations[name] = tuples
                arities[name] = len(tuples[0]) if tuples else 1
        sig = self.sig.with_predicates(arities.items()).with_constants((constants or {}).keys())
        rels = dict(self.relations)
        for name in arities:
            rels[name] = frozenset(tuple(t) for t in relations.get(name, ()))
        return Structure(sig, self.domain, {**self.constants, **(constants or {})}, rels)

    def induced_substructure(self, subset: Iterable[Element]) -> "Structure":
        """
        Substructure induced by a subset containing all constants.

        Raises:
            StructureValidationError: If the subset is empty or misses a constant
        """
        keep = set(subset)
        if not keep:
            raise StructureValidationError("Induced substructure needs a non-empty subset")
        missing = sorted(c for c, a in self.constants.items() if a not in keep)
        if missing:
            raise StructureValidationError(f"Subset misses the interpretation of {missing}")
        rels = {
            name: frozenset(t for t in tuples if set(t) <= keep)
            for name, tuples in self.relations.items()
        }
        return Structure(
            self.sig, tuple(a for a in self.domain if a in keep), dict(self.constants), rels
        )

    def rename(self, mapping: Mapping[Element, Element]) -> "Structure":
        """Isomorphic copy under an injective renaming of the domain."""
        if len(set(mapping[a] for a in self.domain)) != len(self.domain):
            raise StructureValidationError("Renaming must be injective")
        return Structure(
            self.sig,
            tuple(sorted(mapping[a] for a in self.domain)),
            {c: mapping[a] for c, a in self.constants.items()},
            {
                name: frozenset(tuple(mapping[a] for a in t) for t in tuples)
                for name, tuples in self.relations.items()
            },
        )

    def normalized(self) -> tuple["Structure", dict[Element, Element]]:
        """Rename the domain to 0..n-1 preserving order; returns the renaming."""
        mapping = {a: i for i, a in enumerate(self.domain)}
        return self.rename(mapping), mapping


def canonical_structure(sig: Signature, kind: Literal["initial", "final"]) -> Structure:
    """
    Initial or final structure of a signature.

    The initial structure has one element per constant (a single element
    when there are none) and empty relations; it maps into every structure.
    The final structure has one element carrying every constant and full
    relations; every structure maps into it.
    """
    if kind == "initial":
        size = max(1, len(sig.constants))
        return Structure.build(sig, size, {c: i for i, c in enumerate(sig.constants)})
    if kind == "final":
        return Structure(
            sig,
            (0,),
            {c: 0 for c in sig.constants},
            {name: frozenset({(0,) * arity}) for name, arity in sig.predicates},
        )
    raise ValueError(f"Unknown canonical structure kind: {kind}")


def union_injections(
    left: Structure, right: Structure
) -> tuple[dict[Element, Element], dict[Element, Element]]:
    """Element maps of both operands into their disjoint union."""
    left_map = {a: i for i, a in enumerate(left.domain)}
    offset = len(left.domain)
    right_map = {b: offset + j for j, b in enumerate(right.domain)}
    return left_map, right_map


def disjoint_union(left: Structure, right: Structure) -> Structure:
    """
    Disjoint union of two structures over the same signature.

    Left elements become 0..|left|-1 and right elements follow. Constants
    keep the left operand's interpretation.

    Raises:
        SignatureError: If the signatures differ
    """
    if left.sig != right.sig:
        raise SignatureError("Disjoint union needs structures over the same signature")
    left_map, right_map = union_injections(left, right)
    rels = {
        name: frozenset(tuple(left_map[a] for a in t) for t in left.relations[name])
        | frozenset(tuple(right_map[b] for b in t) for t in right.relations[name])
        for name, _ in left.sig.predicates
    }
    constants = {c: left_map[a] for c, a in left.constants.items()}
    return Structure(
        left.sig, tuple(range(len(left) + len(right))), constants, rels
    )


def glued_union(
    left: Structure, right: Structure
) -> tuple[Structure, dict[Element, Element], dict[Element, Element]]:
    """
    Union of two structures over the same signature with their constants identified.

    Left elements keep 0..|left|-1; unnamed right elements follow and named
    right elements land on the left interpretation of their constants. Without
    constants this is the disjoint union.

    Returns:
        Tuple of (union, left element map, right element map)

    Raises:
        SignatureError: If the signatures differ
        StructureValidationError: If one right element names constants that
            the left operand keeps apart
    """
    if left.sig != right.sig:
        raise SignatureError("Glued union needs structures over the same signature")
    left_map = {a: i for i, a in enumerate(left.domain)}
    right_map: dict[Element, Element] = {}
    for c, b in right.constants.items():
        image = left_map[left.constants[c]]
        if right_map.setdefault(b, image) != image:
            raise StructureValidationError(
                f"Element {b} names constants with different interpretations"
            )
    offset = len(left.domain)
    for b in right.domain:
        if b not in right_map:
            right_map[b] = offset
            offset += 1
    rels = {
        name: [tuple(left_map[a] for a in t) for t in left.relations[name]]
        + [tuple(right_map[b] for b in t) for t in right.relations[name]]
        for name, _ in left.sig.predicates
    }
    constants = {c: left_map[a] for c, a in left.constants.items()}
    return Structure.build(left.sig, offset, constants, rels), left_map, right_map


def element_variable(element: Element) -> str:
    return f"x{element}"


def canonical_query(structure: Structure) -> Formula:
    """
    Canonical conjunctive query: one variable per element, one atom per tuple,
    and ``c = x_a`` for every constant interpreted by a.
    """
    atoms: list[Formula] = []
    for name, _ in structure.sig.predicates:
        for tup in sorted(structure.relations[name]):
            atoms.append(atom(name, *(element_variable(a) for a in tup)))
    for c in structure.sig.constants:
        atoms.append(Eq(Const(c), Var(element_variable(structure.constants[c]))))
    return exists_many([element_variable(a) for a in structure.domain], conj(atoms))


def bit_width(n: int) -> int:
    """Number of Bit predicates needed for labels 1..n."""
    return (n - 1).bit_length()


def bit_predicate(j: int) -> str:
    return f"__Bit{j}"


def label_bit(label: int, j: int, width: int) -> bool:
    """Bit j (1 = most significant) of the width-bit encoding of label-1."""
    return bool(((label - 1) >> (width - j)) & 1)


def decode_label(structure: Structure, element: Element, width: int) -> int:
    """Label encoded by the Bit predicates of an element."""
    value = 0
    for j in range(1, width + 1):
        value = 2 * value + int((element,) in structure.relations[bit_predicate(j)])
    return value + 1


@dataclass(frozen=True, eq=False)
class Labeling:
    """An n-labeling of a structure, mapping elements to 1..n."""

    base: Structure
    """Labelled structure"""

    n: int
    """Label bound, n >= 1"""

    lam: Mapping[Element, int]
    """Labels per element"""

    def __post_init__(self) -> None:
        errors = []
        if self.n < 1:
            errors.append(f"Label bound must be >= 1, got {self.n}")
        for a in self.base.domain:
            if a not in self.lam:
                errors.append(f"Element {a} has no label")
            elif not 1 <= self.lam[a] <= self.n:
                errors.append(f"Label {self.lam[a]} of element {a} is outside 1..{self.n}")
        if errors:
            raise StructureValidationError("\n".join(errors))

    @property
    def width(self) -> int:
        return bit_width(self.n)

    @property
    def is_constant_sole(self) -> bool:
        return all(self.lam[a] == 1 for a in self.base.constants.values())

    def bit_predicates(self) -> list[tuple[str, int]]:
        return [(bit_predicate(j), 1) for j in range(1, self.width + 1)]

    def implicit_representation(self) -> Structure:
        """Expand the base by the Bit predicates encoding label-1 in binary."""
        width = self.width
        relations = {
            bit_predicate(j): [(a,) for a in self.base.domain if label_bit(self.lam[a], j, width)]
            for j in range(1, width + 1)
        }
        return self.base.expand_with(relations, arities=dict(self.bit_predicates()))

    def unfold(self) -> tuple[Structure, dict[Element, Element]]:
        """
        Unfolding: every element a is copied lam(a) times and a tuple of copies
        holds exactly when the tuple of originals does.

        Returns:
            Tuple of (unfolded structure, projection to the base)

        Raises:
            StructureValidationError: If the labeling is not constant-sole
        """
        if not self.is_constant_sole:
            raise StructureValidationError("Unfolding needs a constant-sole labeling")
        copies: dict[Element, list[Element]] = {}
        projection: dict[Element, Element] = {}
        next_id = 0
        for a in self.base.domain:
            copies[a] = []
            for _ in range(self.lam[a]):
                copies[a].append(next_id)
                projection[next_id] = a
                next_id += 1
        relations = {
            name: {
                combo
                for tup in tuples
                for combo in product(*(copies[a] for a in tup))
            }
            for name, tuples in self.base.relations.items()
        }
        constants = {c: copies[a][0] for c, a in self.base.constants.items()}
        unfolded = Structure.build(self.base.sig, range(next_id), constants, relations)
        logger.debug("Unfolded %d elements into %d", len(self.base), next_id)
        return unfolded, projection
