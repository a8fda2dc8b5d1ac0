"""
Homomorphism search, the injective/strong-surjective decomposition, and
monomerge factorization.
"""

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from homclosure.core.structure import Element, Structure
from homclosure.exceptions import HomError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HomConstraint:
    """Side conditions for homomorphism search."""

    injective: bool = False
    surjective: bool = False
    strong: bool = False

    @property
    def is_embedding(self) -> bool:
        return self.injective and self.strong


NO_CONSTRAINT = HomConstraint()


@dataclass(frozen=True, eq=False)
class Hom:
    """
    A map between the domains of two structures over the same signature.

    Nothing about the map is trusted: validity and the injective, surjective
    and strong flags are recomputed from the structures on demand.
    """

    source: Structure
    target: Structure
    mapping: Mapping[Element, Element] = field(default_factory=dict)

    def __call__(self, element: Element) -> Element:
        return self.mapping[element]

    def is_valid(self) -> bool:
        """Total, constant-preserving and relation-preserving."""
        source, target = self.source, self.target
        if source.sig != target.sig:
            return False
        target_domain = set(target.domain)
        if any(a not in self.mapping or self.mapping[a] not in target_domain for a in source.domain):
            return False
        if any(self.mapping[a] != target.constants[c] for c, a in source.constants.items()):
            return False
        return all(
            tuple(self.mapping[a] for a in tup) in target.relations[name]
            for name, tuples in source.relations.items()
            for tup in tuples
        )

    def is_injective(self) -> bool:
        images = [self.mapping[a] for a in self.source.domain]
        return len(set(images)) == len(images)

    def is_surjective(self) -> bool:
        return {self.mapping[a] for a in self.source.domain} == set(self.target.domain)

    def fibers(self) -> dict[Element, list[Element]]:
        result: dict[Element, list[Element]] = {b: [] for b in self.target.domain}
        for a in self.source.domain:
            result[self.mapping[a]].append(a)
        return result

    def is_strong(self) -> bool:
        """Every source tuple whose image is a target tuple is a source tuple."""
        fibers = self.fibers()
        for name, tuples in self.target.relations.items():
            source_tuples = self.source.relations[name]
            for tup in tuples:
                for pre in product(*(fibers[b] for b in tup)):
                    if pre not in source_tuples:
                        return False
        return True

    def flags(self) -> dict[str, bool]:
        return {
            "valid": self.is_valid(),
            "injective": self.is_injective(),
            "surjective": self.is_surjective(),
            "strong": self.is_strong(),
        }

    def satisfies(self, constraint: HomConstraint) -> bool:
        if not self.is_valid():
            return False
        if constraint.injective and not self.is_injective():
            return False
        if constraint.surjective and not self.is_surjective():
            return False
        return not (constraint.strong and not self.is_strong())

    def verify(self, constraint: HomConstraint = NO_CONSTRAINT) -> None:
        """
        Raises:
            HomError: If the map is not a homomorphism meeting the constraint
        """
        if not self.satisfies(constraint):
            raise HomError(f"Map {dict(self.mapping)} violates {constraint}: {self.flags()}")

    def then(self, other: "Hom") -> "Hom":
        """Composite map: first self, then other."""
        return Hom(self.source, other.target, {a: other.mapping[b] for a, b in self.mapping.items()})

    def to_dict(self) -> dict[str, Any]:
        return {
            "map": {str(a): self.mapping[a] for a in self.source.domain},
            "flags": self.flags(),
        }


def identity_hom(structure: Structure) -> Hom:
    return Hom(structure, structure, {a: a for a in structure.domain})


class _Search:
    """Backtracking state for one find_hom call."""

    def __init__(self, source: Structure, target: Structure, constraint: HomConstraint) -> None:
        self.source = source
        self.target = target
        self.constraint = constraint
        self.order = sorted(source.domain, key=lambda a: (-source.degree(a), a))
        self.position = {a: i for i, a in enumerate(self.order)}
        self.candidates = self._initial_candidates()

        # tuples checked as soon as their last element (in search order) is assigned
        self.checks: list[list[tuple[str, tuple[Element, ...]]]] = [[] for _ in self.order]
        for name, tuples in source.relations.items():
            for tup in tuples:
                last = max(self.position[a] for a in tup)
                self.checks[last].append((name, tup))

        self.arities = dict(source.sig.predicates)

    def _initial_candidates(self) -> dict[Element, list[Element]] | None:
        source, target, strong = self.source, self.target, self.constraint.strong
        candidates: dict[Element, list[Element]] = {a: list(target.domain) for a in source.domain}

        for c, a in source.constants.items():
            pinned = target.constants[c]
            candidates[a] = [b for b in candidates[a] if b == pinned]

        # diagonal arc consistency: P(a,...,a) forces P(b,...,b), and reflects in strong mode
        for name, arity in source.sig.predicates:
            src_rel, tgt_rel = source.relations[name], target.relations[name]
            for a in source.domain:
                in_source = (a,) * arity in src_rel
                if in_source:
                    candidates[a] = [b for b in candidates[a] if (b,) * arity in tgt_rel]
                elif strong:
                    candidates[a] = [b for b in candidates[a] if (b,) * arity not in tgt_rel]

        if any(not cands for cands in candidates.values()):
            return None
        return candidates

    def run(self) -> Iterator[dict[Element, Element]]:
        if self.candidates is None:
            return
        if self.constraint.injective and len(self.source) > len(self.target):
            return
        if self.constraint.surjective and len(self.source) < len(self.target):
            return
        yield from self._extend(0, {}, {})

    def _extend(
        self, index: int, assignment: dict[Element, Element], used: dict[Element, int]
    ) -> Iterator[dict[Element, Element]]:
        if index == len(self.order):
            if not self.constraint.surjective or len(used) == len(self.target):
                yield dict(assignment)
            return

        a = self.order[index]
        assert self.candidates is not None
        for b in self.candidates[a]:
            if self.constraint.injective and b in used:
                continue
            assignment[a] = b
            used[b] = used.get(b, 0) + 1
            if self._consistent(index, assignment) and self._coverable(index, used):
                yield from self._extend(index + 1, assignment, used)
            used[b] -= 1
            if not used[b]:
                del used[b]
            del assignment[a]

    def _consistent(self, index: int, assignment: dict[Element, Element]) -> bool:
        target = self.target
        for name, tup in self.checks[index]:
            if tuple(assignment[a] for a in tup) not in target.relations[name]:
                return False
        if self.constraint.strong:
            a = self.order[index]
            assigned = self.order[: index + 1]
            for name, arity in self.arities.items():
                src_rel, tgt_rel = self.source.relations[name], target.relations[name]
                for tup in product(assigned, repeat=arity):
                    if a not in tup:
                        continue
                    if tuple(assignment[x] for x in tup) in tgt_rel and tup not in src_rel:
                        return False
        return True

    def _coverable(self, index: int, used: dict[Element, int]) -> bool:
        if not self.constraint.surjective:
            return True
        remaining = len(self.order) - index - 1
        return len(self.target) - len(used) <= remaining


def iter_homs(
    source: Structure, target: Structure, constraint: HomConstraint = NO_CONSTRAINT
) -> Iterator[Hom]:
    """
    Enumerate all homomorphisms meeting the constraint, in a fixed order.

    Source elements are tried by descending relational degree, candidate
    images by ascending id.

    Raises:
        HomError: If the signatures differ
    """
    if source.sig != target.sig:
        raise HomError("Homomorphism search needs structures over the same signature")
    for mapping in _Search(source, target, constraint).run():
        yield Hom(source, target, mapping)


def find_hom(
    source: Structure, target: Structure, constraint: HomConstraint = NO_CONSTRAINT
) -> Hom | None:
    """
    First homomorphism meeting the constraint, or None when none exists.

    Raises:
        HomError: If the signatures differ
    """
    hom = next(iter_homs(source, target, constraint), None)
    logger.debug(
        "find_hom |A|=%d |B|=%d %s -> %s",
        len(source),
        len(target),
        constraint,
        "found" if hom else "none",
    )
    return hom


@dataclass(frozen=True)
class Decomposition:
    """h = strong_surjective after injective, through the middle structure."""

    injective: Hom
    strong_surjective: Hom
    middle: Structure

    def composite(self) -> Hom:
        return self.injective.then(self.strong_surjective)


def decompose(hom: Hom) -> Decomposition:
    """
    Split a homomorphism into an injective one followed by a strong surjective one.

    The middle structure has the disjoint union of source and target as its
    domain; a tuple holds there exactly when its image under the second map
    holds in the target.

    Raises:
        HomError: If hom is not a valid homomorphism
    """
    hom.verify()
    source, target = hom.source, hom.target
    left = {a: i for i, a in enumerate(source.domain)}
    right = {b: len(source) + j for j, b in enumerate(target.domain)}

    second_map = {left[a]: hom.mapping[a] for a in source.domain}
    second_map.update({right[b]: b for b in target.domain})
    fibers: dict[Element, list[Element]] = {b: [] for b in target.domain}
    for c, b in second_map.items():
        fibers[b].append(c)

    relations = {
        name: {pre for tup in tuples for pre in product(*(fibers[b] for b in tup))}
        for name, tuples in target.relations.items()
    }
    constants = {c: left[a] for c, a in source.constants.items()}
    middle = Structure.build(source.sig, range(len(source) + len(target)), constants, relations)

    return Decomposition(
        injective=Hom(source, middle, left),
        strong_surjective=Hom(middle, target, second_map),
        middle=middle,
    )


@dataclass(frozen=True)
class MergeResult:
    """Quotient of a structure by merging one element into another."""

    structure: Structure
    hom: Hom

    @property
    def is_strong(self) -> bool:
        return self.hom.is_strong()


def monomerge(
    structure: Structure, src: Element, tgt: Element, take_over_constants: bool = False
) -> MergeResult:
    """
    Merge src into tgt.

    The quotient drops src; its tuples move to tgt. The returned map sends
    src to tgt and fixes everything else. It is always surjective; whether
    it is strong is reported, not assumed.

    Args:
        structure: Structure to merge in
        src: Element that disappears
        tgt: Element that receives the tuples of src
        take_over_constants: Let tgt interpret the constants of src

    Raises:
        HomError: If src equals tgt, either is not an element, or src
            interprets constants without take_over_constants
    """
    if src == tgt:
        raise HomError("Monomerge needs two distinct elements")
    for element in (src, tgt):
        if element not in structure.domain:
            raise HomError(f"Element {element} is not in the domain")
    named = sorted(c for c, a in structure.constants.items() if a == src)
    if named and not take_over_constants:
        raise HomError(
            f"Merge source {src} interprets {', '.join(named)}; tgt must take over its constants"
        )
    mapping = {a: (tgt if a == src else a) for a in structure.domain}
    merged = Structure.build(
        structure.sig,
        [a for a in structure.domain if a != src],
        {c: mapping[a] for c, a in structure.constants.items()},
        {
            name: [tuple(mapping[a] for a in t) for t in tuples]
            for name, tuples in structure.relations.items()
        },
    )
    return MergeResult(merged, Hom(structure, merged, mapping))


@dataclass(frozen=True)
class FactorizationResult:
    """A strong surjective hom as a chain of monomerges followed by an isomorphism."""

    merges: list[MergeResult]
    iso: Hom

    def composite(self, source: Structure) -> Hom:
        result = Hom(source, source, {a: a for a in source.domain})
        for merge in self.merges:
            result = result.then(merge.hom)
        return result.then(self.iso)


def factor_strong_surjective(hom: Hom) -> FactorizationResult:
    """
    Factor a strong surjective homomorphism into monomerges and an isomorphism.

    Within every fiber, elements are merged one at a time into the smallest
    element, preferring non-constant sources.

    Raises:
        HomError: If hom is not a strong surjective homomorphism
    """
    if not hom.satisfies(HomConstraint(surjective=True, strong=True)):
        raise HomError("Factorization needs a strong surjective homomorphism")

    current = hom.source
    merges: list[MergeResult] = []
    for b, fiber in sorted(hom.fibers().items()):
        members = sorted(fiber)
        while len(members) > 1:
            constants = current.constant_elements
            tgt = members[0]
            loose = [a for a in members[1:] if a not in constants]
            src = loose[-1] if loose else members[-1]
            result = monomerge(current, src, tgt, take_over_constants=not loose)
            merges.append(result)
            current = result.structure
            members.remove(src)

    survivors = {a: hom.mapping[a] for a in current.domain}
    iso = Hom(current, hom.target, survivors)
    logger.debug("Factored strong surjective hom into %d monomerges", len(merges))
    return FactorizationResult(merges, iso)
