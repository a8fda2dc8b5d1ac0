"""
Constraint programs over type predicates.

A summary turns into a set of constraints on ``Tp`` relations over a target
structure: each realized type must keep its positive atoms, its subtypes and
renamings, and a witness for every existential rule its guard triggers. The
constraints of the form "every tuple in ``Tp_t`` extends into some
``Tp_t'``" are solved as a greatest fixpoint; pair and uniqueness
constraints are checked afterwards.
"""

import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from itertools import combinations, product
from typing import Literal

from homclosure.capture.normal_form import ExistentialRule, GuardedNormalForm, NormalForm
from homclosure.capture.summaries import TypeSummary
from homclosure.capture.types import EligibleTypes, TypeDescriptor
from homclosure.core.formula import (
    Atom,
    Const,
    Eq,
    Formula,
    Not,
    Term,
    Var,
    conj,
    disj,
    exists_many,
    forall_many,
    implies,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure

logger = logging.getLogger(__name__)

RequirementKind = Literal["subtype", "permutation", "guard", "witness"]
Relations = dict[TypeDescriptor, set[tuple[Element, ...]]]


def tp_atom(t: TypeDescriptor, args: Iterable[str] | None = None) -> Atom:
    names = t.variables if args is None else tuple(args)
    return Atom(t.predicate_name, tuple(Var(a) for a in names))


def base_literals(t: TypeDescriptor, base: Signature) -> list[Formula]:
    """Positive literals of t over the base signature."""
    return [
        lit
        for lit in t.positive_literals()
        if not isinstance(lit, Atom) or base.has_predicate(lit.pred)
    ]


def hom_condition(t: TypeDescriptor, base: Signature) -> Formula:
    return forall_many(t.variables, implies(tp_atom(t), conj(base_literals(t, base))))


def _fresh(name: str) -> str:
    return f"w{name[1:]}"


@dataclass(frozen=True)
class Extension:
    """A target type together with the variable each of its positions is bound to."""

    target: TypeDescriptor
    args: tuple[str, ...]
    """One name per target variable: a source variable or a fresh existential one"""

    def existential(self, source: TypeDescriptor) -> tuple[str, ...]:
        return tuple(a for a in self.args if a not in source.variables)

    def formula(self, source: TypeDescriptor) -> Formula:
        return exists_many(self.existential(source), tp_atom(self.target, self.args))


@dataclass(frozen=True)
class Requirement:
    """``forall v. Tp_source(v) -> \\/ exists w. Tp_target(args)``."""

    kind: RequirementKind
    source: TypeDescriptor
    options: tuple[Extension, ...]

    def formula(self) -> Formula:
        return forall_many(
            self.source.variables,
            implies(tp_atom(self.source), disj(o.formula(self.source) for o in self.options)),
        )


@dataclass(frozen=True)
class PairConstraint:
    """Any two distinct elements of 1-types left and right share a listed 2-type."""

    left: TypeDescriptor
    right: TypeDescriptor
    options: tuple[TypeDescriptor, ...]

    def formula(self) -> Formula:
        x, y = self.left.variables[0], self.right.variables[0]
        premise = conj(tp_atom(self.left), tp_atom(self.right), Not(Eq(Var(x), Var(y))))
        return forall_many((x, y), implies(premise, disj(tp_atom(o) for o in self.options)))


def uniqueness(t: TypeDescriptor) -> Formula:
    x = t.variables[0]
    return forall_many(
        (x, "w0"), implies(conj(tp_atom(t), tp_atom(t, ("w0",))), Eq(Var(x), Var("w0")))
    )


@dataclass(frozen=True)
class SummaryProgram:
    """All constraints one summary places on the type relations of a target."""

    summary: TypeSummary
    base: Signature
    requirements: tuple[Requirement, ...]
    pairs: tuple[PairConstraint, ...] = ()
    unique: tuple[TypeDescriptor, ...] = ()

    @property
    def union_closed(self) -> bool:
        """Whether the fixpoint alone decides the program."""
        return not self.pairs and not self.unique

    def formula(self, eligible: EligibleTypes) -> Formula:
        """The summary's disjunct: realization, absence and every constraint."""
        plus = self.summary.plus
        ordered = sorted(plus, key=lambda t: t.predicate_name)
        return conj(
            [exists_many(t.variables, tp_atom(t)) for t in ordered],
            [forall_many(t.variables, Not(tp_atom(t))) for t in eligible if t not in plus],
            [r.formula() for r in self.requirements if r.kind != "permutation"],
            [p.formula() for p in self.pairs],
            [uniqueness(t) for t in self.unique],
        )

    # Solving

    def candidates(self, t: TypeDescriptor, structure: Structure) -> set[tuple[Element, ...]]:
        """Tuples of the target carrying the positive atoms of t."""
        position = {v: i for i, v in enumerate(t.variables)}

        def value(term: Term, tup: tuple[Element, ...]) -> Element:
            if isinstance(term, Const):
                return structure.constants[term.name]
            return tup[position[term.name]]

        for cls in t.constant_classes:
            if len({structure.constants[c] for c in cls}) > 1:
                return set()
        atoms = [(name, terms) for name, terms in t.atoms if self.base.has_predicate(name)]
        return {
            tup
            for tup in product(structure.domain, repeat=t.order)
            if all(
                tuple(value(term, tup) for term in terms) in structure.relations[name]
                for name, terms in atoms
            )
        }

    def greatest(
        self,
        structure: Structure,
        bounds: Mapping[TypeDescriptor, set[tuple[Element, ...]]] | None = None,
    ) -> Relations:
        """
        Largest type relations meeting every requirement.

        Args:
            structure: Target over the base signature
            bounds: Optional upper bounds for some relations
        """
        relations: Relations = {t: self.candidates(t, structure) for t in self.summary.plus}
        for t, allowed in (bounds or {}).items():
            relations[t] &= allowed
        changed = True
        while changed:
            changed = False
            for req in self.requirements:
                source = relations[req.source]
                dead = [
                    tup
                    for tup in source
                    if not any(_extends(req.source, tup, o, relations) for o in req.options)
                ]
                if dead:
                    source.difference_update(dead)
                    changed = True
        return relations

    def accepts(self, relations: Relations) -> bool:
        if not all(relations[t] for t in self.summary.plus):
            return False
        for t in self.unique:
            if len(relations[t]) > 1:
                return False
        for pair in self.pairs:
            for (a,), (b,) in product(relations[pair.left], relations[pair.right]):
                if a != b and not any((a, b) in relations.get(o, ()) for o in pair.options):
                    return False
        return True


def _extends(
    source: TypeDescriptor,
    tup: tuple[Element, ...],
    option: Extension,
    relations: Relations,
) -> bool:
    env = dict(zip(source.variables, tup, strict=True))
    fixed = [(k, env[a]) for k, a in enumerate(option.args) if a in env]
    return any(all(c[k] == v for k, v in fixed) for c in relations.get(option.target, ()))


# Construction


def subtype_requirements(t: TypeDescriptor, eligible: EligibleTypes) -> Iterator[Requirement]:
    for n in range(1, t.order):
        for variables in combinations(t.variables, n):
            sub = t.restrict(variables)
            if sub in eligible:
                yield Requirement("subtype", t, (Extension(sub, variables),))


def permutation_requirements(t: TypeDescriptor, eligible: EligibleTypes) -> Iterator[Requirement]:
    for renamed, order in eligible.permutations_of(t):
        args = tuple(t.variables[i] for i in order)
        yield Requirement("permutation", t, (Extension(renamed, args),))


def _fits(
    t: TypeDescriptor, other: TypeDescriptor, sharing: dict[str, str], pool: tuple[str, ...]
) -> bool:
    """Whether other agrees with t on the variables sharing identifies."""
    if other.constant_classes != t.constant_classes:
        return False
    shared = tuple(v for v in other.variables if v in sharing)
    renamed, _ = other.restrict(shared).permuted([sharing[v] for v in shared], pool)
    return renamed == t.restrict([sharing[v] for v in shared])


def _rule_extensions(
    t: TypeDescriptor,
    rule: ExistentialRule,
    nu: dict[str, Term],
    plus: Iterable[TypeDescriptor],
    pool: tuple[str, ...],
) -> Iterator[Extension]:
    for other in plus:
        for name, terms in other.atoms:
            if name != rule.witness.pred:
                continue
            sharing: dict[str, str] = {}
            ok = True
            for pattern, term in zip(rule.witness.terms, terms, strict=True):
                image = nu.get(pattern.name) if isinstance(pattern, Var) else pattern
                if image is None:
                    continue
                if isinstance(image, Const) or isinstance(term, Const):
                    ok = isinstance(image, Const) and isinstance(term, Const) and (
                        t.representative[image.name] == term.name
                    )
                elif sharing.setdefault(term.name, image.name) != image.name:
                    ok = False
                if not ok:
                    break
            if not ok or len(set(sharing.values())) != len(sharing):
                continue
            if _fits(t, other, sharing, pool):
                yield Extension(other, tuple(sharing.get(v, _fresh(v)) for v in other.variables))


def guard_requirements(
    t: TypeDescriptor,
    normal_form: GuardedNormalForm,
    plus: Iterable[TypeDescriptor],
    pool: tuple[str, ...],
) -> Iterator[Requirement]:
    """One requirement per existential rule whose guard t makes true."""
    plus = list(plus)
    for rule in normal_form.existential:
        for images in product(t.terms, repeat=len(rule.frontier)):
            nu: dict[str, Term] = dict(zip(rule.frontier, images, strict=True))
            guard_terms = [nu[s.name] if isinstance(s, Var) else s for s in rule.guard.terms]
            if not t.holds(rule.guard.pred, guard_terms):
                continue
            options = tuple(dict.fromkeys(_rule_extensions(t, rule, nu, plus, pool)))
            yield Requirement("guard", t, options)


def witness_requirements(
    t: TypeDescriptor, psi: Formula, plus: Iterable[TypeDescriptor]
) -> Requirement:
    """``Tp_t(x) -> exists y. psi(x, y)`` over the realized 2-types extending t."""
    options = []
    if t.entails(psi, {"x": t.variables[0], "y": t.variables[0]}):
        options.append(Extension(t, t.variables))
    for other in plus:
        if other.order == 2 and other.restrict(other.variables[:1]) == t:
            x, y = other.variables
            if other.entails(psi, {"x": x, "y": y}):
                options.append(Extension(other, (x, _fresh(y))))
    return Requirement("witness", t, tuple(options))


def pair_constraints(
    plus: frozenset[TypeDescriptor], pool: tuple[str, ...]
) -> Iterator[PairConstraint]:
    first, second = pool[:1], pool[1:2]
    lefts = sorted((t for t in plus if t.variables == first), key=lambda t: t.predicate_name)
    rights = sorted((t for t in plus if t.variables == second), key=lambda t: t.predicate_name)
    doubles = [t for t in plus if t.variables == pool[:2]]
    for left, right in product(lefts, rights):
        options = tuple(
            sorted(
                (
                    d
                    for d in doubles
                    if d.restrict(first) == left and d.restrict(second) == right
                ),
                key=lambda t: t.predicate_name,
            )
        )
        yield PairConstraint(left, right, options)


def summary_program(
    summary: TypeSummary, eligible: EligibleTypes, normal_form: NormalForm
) -> SummaryProgram:
    """Constraints the summary places on a target's type relations."""
    plus = summary.plus
    ordered = sorted(plus, key=lambda t: (t.order, t.predicate_name))
    pool = eligible.pool
    requirements: list[Requirement] = []
    for t in ordered:
        requirements.extend(subtype_requirements(t, eligible))
        requirements.extend(permutation_requirements(t, eligible))
    pairs: list[PairConstraint] = []
    unique: tuple[TypeDescriptor, ...] = ()
    ones = [t for t in ordered if t.variables == pool[:1]]
    if isinstance(normal_form, GuardedNormalForm):
        for t in ordered:
            requirements.extend(guard_requirements(t, normal_form, ordered, pool))
        if normal_form.triguarded and len(pool) >= 2:
            pairs.extend(pair_constraints(plus, pool))
    else:
        for psi in normal_form.existential:
            requirements.extend(witness_requirements(t, psi, ordered) for t in ones)
        pairs.extend(pair_constraints(plus, pool))
        unique = tuple(t for t in ones if t in summary.bang)
    requirements = list(dict.fromkeys(requirements))
    logger.debug(
        "Program with %d requirements, %d pair constraints, %d unique types",
        len(requirements),
        len(pairs),
        len(unique),
    )
    return SummaryProgram(summary, normal_form.base, tuple(requirements), tuple(pairs), unique)
