"""
Normal forms feeding the capture construction.

Guarded sentences are rewritten into universal clauses and existential
rules over fresh ``__G``/``__Q`` predicates. Every fresh predicate keeps the
subformula it abbreviates, so a model of the input has a canonical
expansion to a model of the normal form. Guarded-negation sentences
are first reduced to guarded ones over fresh ``__H`` hull predicates, whose
canonical interpretation is the full relation. Two-variable sentences use the
Scott shape ``forall x y. phi and /\\ forall x exists y. psi_i``.
"""

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from itertools import count, permutations, product
from typing import Literal

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    FreshNames,
    Not,
    Or,
    Term,
    Top,
    Var,
    atom,
    conj,
    disj,
    exists_many,
    forall_many,
    free_variables,
    implies,
    neg,
    substitute,
    term_vars,
    variable_names,
)
from homclosure.core.signature import RESERVED_PREFIX, Signature
from homclosure.core.structure import Structure
from homclosure.exceptions import BudgetExceededError, FragmentError
from homclosure.semantics.evaluator import ModelChecker
from homclosure.syntax.fragments import classify, eliminate_universals
from homclosure.syntax.normal_forms import is_quantifier_free, nnf, rename_apart

logger = logging.getLogger(__name__)

Fragment = Literal["fo2", "tgf", "gfo"]

DOMAIN_PREDICATE = f"{RESERVED_PREFIX}D"
UNIVERSE_PREDICATE = f"{RESERVED_PREFIX}Univ"


@dataclass(frozen=True)
class UniversalClause:
    """``forall variables. guard -> clause`` with a quantifier-free clause."""

    variables: tuple[str, ...]
    guard: Atom
    clause: Formula

    def to_formula(self) -> Formula:
        return forall_many(self.variables, implies(self.guard, self.clause))


@dataclass(frozen=True)
class ExistentialRule:
    """``forall frontier. guard -> exists existential. witness``."""

    frontier: tuple[str, ...]
    guard: Atom
    existential: tuple[str, ...]
    witness: Atom

    def to_formula(self) -> Formula:
        return forall_many(
            self.frontier, implies(self.guard, exists_many(self.existential, self.witness))
        )


@dataclass(frozen=True)
class Definition:
    """Fresh predicate together with the subformula it abbreviates."""

    pred: str
    params: tuple[str, ...]
    body: Formula


@dataclass(frozen=True)
class GuardedNormalForm:
    """Guarded (or triguarded) normal form of a sentence."""

    base: Signature
    """Signature of the input sentence"""

    sig: Signature
    """Base signature extended by the domain and abbreviation predicates"""

    universal: tuple[UniversalClause, ...]
    existential: tuple[ExistentialRule, ...]
    definitions: tuple[Definition, ...]
    triguarded: bool = False

    @property
    def domain_predicate(self) -> str:
        return UNIVERSE_PREDICATE if self.triguarded else DOMAIN_PREDICATE

    @property
    def aux_predicates(self) -> tuple[tuple[str, int], ...]:
        base = set(self.base.predicate_names)
        return tuple(p for p in self.sig.predicates if p[0] not in base)

    @property
    def width(self) -> int:
        return max(arity for _, arity in self.sig.predicates)

    def domain_axiom(self) -> Formula:
        if self.triguarded:
            return forall_many(("x", "y"), atom(UNIVERSE_PREDICATE, "x", "y"))
        return Forall("x", atom(DOMAIN_PREDICATE, "x"))

    def to_formula(self) -> Formula:
        return conj(
            self.domain_axiom(),
            [rule.to_formula() for rule in self.existential],
            [clause.to_formula() for clause in self.universal],
        )

    def expand(self, structure: Structure, settings: ToolkitSettings | None = None) -> Structure:
        """
        Canonical expansion: the domain predicate is full and every
        abbreviation holds exactly where its subformula does.
        """
        aux = dict(self.aux_predicates)
        hulls = {
            d.pred: set(product(structure.domain, repeat=len(d.params)))
            for d in self.definitions
            if isinstance(d.body, Top)
        }
        scope = structure.expand_with(hulls, {p: aux[p] for p in hulls}) if hulls else structure
        checker = ModelChecker(scope, settings)
        arity = 2 if self.triguarded else 1
        relations: dict[str, set[tuple[int, ...]]] = {
            self.domain_predicate: set(product(structure.domain, repeat=arity)),
            **hulls,
        }
        for definition in self.definitions:
            if definition.pred in hulls:
                continue
            relations[definition.pred] = {
                tup
                for tup in product(structure.domain, repeat=len(definition.params))
                if checker.holds(definition.body, dict(zip(definition.params, tup, strict=True)))
            }
        return structure.expand_with(relations, dict(self.aux_predicates))


@dataclass(frozen=True)
class ScottForm:
    """Scott normal form over the original signature."""

    sig: Signature
    universal: Formula
    """Quantifier-free formula over x and y"""

    existential: tuple[Formula, ...] = ()
    """Quantifier-free formulas psi_i(x, y) read as forall x exists y. psi_i"""

    @property
    def base(self) -> Signature:
        return self.sig

    @property
    def width(self) -> int:
        return 2

    @property
    def aux_predicates(self) -> tuple[tuple[str, int], ...]:
        return ()

    def to_formula(self) -> Formula:
        return conj(
            forall_many(("x", "y"), self.universal),
            [Forall("x", Exists("y", psi)) for psi in self.existential],
        )

    def expand(self, structure: Structure, settings: ToolkitSettings | None = None) -> Structure:
        return structure


NormalForm = GuardedNormalForm | ScottForm


def _conjuncts(phi: Formula) -> tuple[Formula, ...]:
    return phi.items if isinstance(phi, And) else (phi,)


def _block(phi: Exists | Forall) -> tuple[tuple[str, ...], Formula]:
    variables = []
    node: Formula = phi
    while isinstance(node, type(phi)):
        assert isinstance(node, (Exists, Forall))
        variables.append(node.var)
        node = node.body
    return tuple(variables), node


def _ordered(variables: frozenset[str] | set[str], *orders: tuple[str, ...]) -> tuple[str, ...]:
    seen: list[str] = []
    for order in orders:
        seen.extend(v for v in order if v in variables and v not in seen)
    seen.extend(sorted(v for v in variables if v not in seen))
    return tuple(seen)


class _GuardedBuilder:
    def __init__(self, base: Signature, triguarded: bool) -> None:
        self.base = base
        self.triguarded = triguarded
        self.universal: list[UniversalClause] = []
        self.existential: list[ExistentialRule] = []
        self.definitions: list[Definition] = []
        self.arities: dict[str, int] = {}
        self._ids = count(1)

    @property
    def domain_predicate(self) -> str:
        return UNIVERSE_PREDICATE if self.triguarded else DOMAIN_PREDICATE

    def anchor(self) -> Atom:
        if self.triguarded:
            return atom(UNIVERSE_PREDICATE, "u", "u")
        return atom(DOMAIN_PREDICATE, "u")

    def domain_guard(self, needed: tuple[str, ...]) -> Atom | None:
        if not needed:
            return self.anchor()
        if self.triguarded:
            return atom(UNIVERSE_PREDICATE, needed[0], needed[-1]) if len(needed) <= 2 else None
        return atom(DOMAIN_PREDICATE, needed[0]) if len(needed) == 1 else None

    def fresh(self, kind: str, params: tuple[str, ...], body: Formula) -> Atom:
        pred = f"{RESERVED_PREFIX}{kind}{next(self._ids)}"
        self.arities[pred] = len(params)
        self.definitions.append(Definition(pred, params, body))
        return atom(pred, *params)

    def guard_for(self, candidates: tuple[Formula, ...], needed: tuple[str, ...]) -> Atom:
        for candidate in candidates:
            if isinstance(candidate, Atom) and set(needed) <= term_vars(candidate.terms):
                return candidate
        guard = self.domain_guard(needed)
        if guard is None:
            raise FragmentError(f"No guard covers the variables {list(needed)}")
        return guard

    # Top level

    def add_conjunct(self, phi: Formula) -> None:
        if is_quantifier_free(phi):
            self.universal.append(UniversalClause(("u",), self.anchor(), phi))
        elif isinstance(phi, Forall):
            variables, body = _block(phi)
            reduced = self.reduce(body)
            needed = _ordered(free_variables(reduced), variables)
            negated = tuple(
                c.body for c in (reduced.items if isinstance(reduced, Or) else (reduced,))
                if isinstance(c, Not)
            )
            guard = self.guard_for(negated, needed)
            clause_vars = _ordered(term_vars(guard.terms) | set(needed), variables)
            self.universal.append(UniversalClause(clause_vars, guard, reduced))
        elif isinstance(phi, Exists):
            variables, body = _block(phi)
            witness = self.fresh("Q", variables, body)
            self.existential.append(ExistentialRule(("u",), self.anchor(), variables, witness))
            self.universal.append(UniversalClause(variables, witness, self.reduce(body)))
        else:
            raise FragmentError(
                "Top-level conjuncts must be quantifier blocks or quantifier-free"
            )

    # Nested subformulas

    def reduce(self, phi: Formula) -> Formula:
        """Replace every quantified subformula by an abbreviation atom."""
        if isinstance(phi, And):
            return conj(self.reduce(item) for item in phi.items)
        if isinstance(phi, Or):
            return disj(self.reduce(item) for item in phi.items)
        if isinstance(phi, Exists):
            return self.abbreviate_exists(phi)
        if isinstance(phi, Forall):
            return self.abbreviate_forall(phi)
        return phi

    def _frontier(self, phi: Formula) -> tuple[str, ...]:
        frontier = tuple(sorted(free_variables(phi)))
        if not frontier:
            raise FragmentError("Closed subformulas must sit at the top level")
        return frontier

    def abbreviate_exists(self, phi: Exists) -> Atom:
        frontier = self._frontier(phi)
        variables, body = _block(phi)
        abbreviation = self.fresh("G", frontier, phi)
        witness = self.fresh("Q", variables + frontier, body)
        self.existential.append(ExistentialRule(frontier, abbreviation, variables, witness))
        self.universal.append(UniversalClause(variables + frontier, witness, self.reduce(body)))
        return abbreviation

    def abbreviate_forall(self, phi: Forall) -> Formula:
        frontier = self._frontier(phi)
        variables, body = _block(phi)
        abbreviation = self.fresh("G", frontier, phi)
        reduced = self.reduce(body)
        needed = _ordered(free_variables(reduced) | set(frontier), variables, frontier)
        negated = tuple(
            c.body for c in (reduced.items if isinstance(reduced, Or) else (reduced,))
            if isinstance(c, Not)
        )
        guard = self.guard_for(negated, needed)
        variables_all = _ordered(term_vars(guard.terms) | set(needed), variables, frontier)
        self.universal.append(
            UniversalClause(variables_all, guard, disj(Not(abbreviation), reduced))
        )
        return abbreviation

    def build(self) -> GuardedNormalForm:
        domain_arity = 2 if self.triguarded else 1
        sig = self.base.with_predicates(
            [(self.domain_predicate, domain_arity), *self.arities.items()]
        )
        return GuardedNormalForm(
            base=self.base,
            sig=sig,
            universal=tuple(self.universal),
            existential=tuple(self.existential),
            definitions=tuple(self.definitions),
            triguarded=self.triguarded,
        )


# Guarded negation


@dataclass(frozen=True)
class _Query:
    """``exists variables. /\\ items`` with items atoms, equalities or negations."""

    variables: tuple[str, ...]
    items: tuple[Formula, ...]


def _item_vars(item: Formula) -> frozenset[str]:
    return frozenset(free_variables(item))


def _disjuncts(phi: Formula) -> list[_Query]:
    """Pull existentials and disjunctions out of a renamed-apart formula."""
    if isinstance(phi, Exists):
        return [_Query((phi.var, *q.variables), q.items) for q in _disjuncts(phi.body)]
    if isinstance(phi, Or):
        return [q for item in phi.items for q in _disjuncts(item)]
    if isinstance(phi, And):
        result = [_Query((), ())]
        for item in phi.items:
            result = [
                _Query(a.variables + b.variables, a.items + b.items)
                for a in result
                for b in _disjuncts(item)
            ]
        return result
    if isinstance(phi, Top):
        return [_Query((), ())]
    if isinstance(phi, Bottom):
        return []
    return [_Query((), (phi,))]


def _without_equalities(query: _Query) -> _Query:
    variables = list(query.variables)
    pending = list(query.items)
    kept: list[Formula] = []
    while pending:
        item = pending.pop()
        if not isinstance(item, Eq):
            kept.append(item)
            continue
        if item.left == item.right:
            continue
        if isinstance(item.left, Var) and item.left.name in variables:
            var, term = item.left.name, item.right
        elif isinstance(item.right, Var) and item.right.name in variables:
            var, term = item.right.name, item.left
        else:
            kept.append(item)
            continue
        variables.remove(var)
        pending = [substitute(p, {var: term}) for p in pending]
        kept = [substitute(k, {var: term}) for k in kept]
    used = frozenset().union(*(_item_vars(k) for k in kept))
    return _Query(tuple(v for v in variables if v in used), tuple(dict.fromkeys(kept)))


def _contractions(
    variables: tuple[str, ...], frontier: tuple[str, ...]
) -> Iterator[dict[str, Term]]:
    """Identifications of the variables among themselves and with the frontier, identity first."""

    def extend(
        i: int, mapping: dict[str, Term], kept: tuple[str, ...]
    ) -> Iterator[dict[str, Term]]:
        if i == len(variables):
            yield dict(mapping)
            return
        var = variables[i]
        yield from extend(i + 1, mapping, (*kept, var))
        for target in (*frontier, *kept):
            mapping[var] = Var(target)
            yield from extend(i + 1, mapping, kept)
            del mapping[var]

    return extend(0, {}, ())


def _components(items: list[Formula], variables: frozenset[str]) -> list[list[Formula]]:
    """Split items into groups connected through the given variables."""
    groups: list[tuple[set[str], list[Formula]]] = []
    for item in items:
        linked = set(_item_vars(item) & variables)
        merged: list[Formula] = [item]
        rest = []
        for shared, members in groups:
            if shared & linked:
                linked |= shared
                merged = members + merged
            else:
                rest.append((shared, members))
        groups = [*rest, (linked, merged)]
    return [members for _, members in groups]


def _guarded_query(items: list[Formula], variables: frozenset[str]) -> Formula | None:
    """
    Nested guarded formula equivalent to ``exists variables. /\\ items``, or None
    if the query has no guarded tree shape.
    """
    local = [i for i in items if not _item_vars(i) & variables]
    parts: list[Formula] = list(local)
    for component in _components([i for i in items if _item_vars(i) & variables], variables):
        mentioned = frozenset().union(*(_item_vars(i) for i in component))
        bound = mentioned & variables
        interface = mentioned - variables
        if not interface and len(bound) == 1:
            parts.append(exists_many(sorted(bound), conj(component)))
            continue
        nested = None
        for guard in component:
            if not isinstance(guard, Atom):
                continue
            guard_vars = frozenset(term_vars(guard.terms))
            if not interface <= guard_vars:
                continue
            remaining = [i for i in component if i is not guard]
            inner = _guarded_query(remaining, bound - guard_vars)
            if inner is not None:
                nested = exists_many(sorted(bound & guard_vars), conj(guard, inner))
                break
        if nested is None:
            return None
        parts.append(nested)
    return conj(parts)


class _GuardedNegationReducer:
    """
    Rewrites a guarded-negation sentence into a guarded one over fresh hull predicates.

    Models of the input become models of the result once every hull is full.
    Conversely each model of the result receives a homomorphism from a model of
    the input, as long as every negated conjunctive query is covered by its
    tree-shaped contractions and single extra guards.
    """

    def __init__(
        self,
        sig: Signature,
        fresh: Callable[[str, tuple[str, ...], Formula], Atom],
        names: FreshNames,
        settings: ToolkitSettings,
    ) -> None:
        self.sig = sig
        self.fresh = fresh
        self.names = names
        self.settings = settings

    def positive(self, phi: Formula) -> Formula:
        if isinstance(phi, Not):
            return neg(self.negative(phi.body))
        if isinstance(phi, And):
            return conj(self.positive(item) for item in phi.items)
        if isinstance(phi, Or):
            return disj(self.positive(item) for item in phi.items)
        if isinstance(phi, Exists):
            variables, body = _block(phi)
            reduced = self.positive(body)
            needed = free_variables(reduced)
            candidates = reduced.items if isinstance(reduced, And) else (reduced,)
            covered = any(
                isinstance(c, Atom) and needed <= term_vars(c.terms) for c in candidates
            )
            if len(needed) > 1 and not covered:
                hull = self.fresh("H", _ordered(needed, variables), Top())
                reduced = conj(hull, reduced)
            return exists_many(variables, reduced)
        return phi

    def negative(self, phi: Formula) -> Formula:
        if isinstance(phi, Not):
            return neg(self.positive(phi.body))
        if isinstance(phi, And):
            return conj(self.negative(item) for item in phi.items)
        if isinstance(phi, Or):
            return disj(self.negative(item) for item in phi.items)
        if isinstance(phi, Exists):
            frontier = tuple(sorted(free_variables(phi)))
            return disj(
                formula
                for query in _disjuncts(phi)
                for formula in self.tree_shapes(self.prepare(query), frontier)
            )
        return phi

    def prepare(self, query: _Query) -> _Query:
        items = tuple(
            neg(self.positive(i.body)) if isinstance(i, Not) else i for i in query.items
        )
        return _without_equalities(_Query(query.variables, items))

    def tree_shapes(self, query: _Query, frontier: tuple[str, ...]) -> list[Formula]:
        """
        Guarded formulas implying the query, covering all of its tree-shaped images.

        The identity comes first; when it is already tree shaped it is returned alone.
        """
        found: list[Formula] = []
        for tried, mapping in enumerate(_contractions(query.variables, frontier), 1):
            if tried > self.settings.max_fallback_candidates:
                raise BudgetExceededError(
                    "Contractions of a negated query exceeded the fallback candidate budget"
                )
            items = list(dict.fromkeys(substitute(i, mapping) for i in query.items))
            variables = frozenset(v for v in query.variables if v not in mapping)
            shaped = _guarded_query(items, variables)
            if shaped is not None:
                if not mapping:
                    return [shaped]
                found.append(shaped)
            else:
                found.extend(self.covered(items, variables))
        return found

    def covered(self, items: list[Formula], variables: frozenset[str]) -> list[Formula]:
        """The query under one extra atom over a declared predicate covering all its variables."""
        needed = sorted(frozenset().union(*(_item_vars(i) for i in items)))
        result: list[Formula] = []
        for name, arity in self.sig.predicates:
            if arity < len(needed):
                continue
            for positions in permutations(range(arity), len(needed)):
                placed = dict(zip(positions, needed, strict=True))
                padding = [self.names("w") for p in range(arity) if p not in placed]
                pads = iter(padding)
                guard = Atom(
                    name,
                    tuple(Var(placed[p] if p in placed else next(pads)) for p in range(arity)),
                )
                result.append(exists_many([*sorted(variables), *padding], conj(guard, items)))
        return result


def gfo_reduct(
    phi: Formula,
    sig: Signature,
    fresh: Callable[[str, tuple[str, ...], Formula], Atom],
    settings: ToolkitSettings | None = None,
) -> Formula:
    """
    Guarded sentence whose projected models have the homomorphism closure of phi.

    Args:
        phi: Guarded-negation sentence
        sig: Signature of phi
        fresh: Registers a fresh predicate for the given parameters and definition
        settings: Search budgets

    Raises:
        FragmentError: If phi is not in the guarded-negation fragment
        BudgetExceededError: If a negated query has too many contractions
    """
    if not classify(phi, sig).gnfo:
        raise FragmentError("Sentence is not in the guarded-negation fragment")
    renamed = rename_apart(eliminate_universals(phi))
    reducer = _GuardedNegationReducer(
        sig, fresh, FreshNames(variable_names(renamed)), settings or DEFAULT_SETTINGS
    )
    reduct = reducer.positive(renamed)
    if not classify(reduct).gfo:
        raise FragmentError("Guarded-negation sentence has no guarded reduct")
    return reduct


def guarded_normal_form(
    phi: Formula,
    sig: Signature,
    triguarded: bool = False,
    settings: ToolkitSettings | None = None,
) -> GuardedNormalForm:
    """
    Rewrite a guarded sentence into clauses and rules over fresh predicates.

    Guarded-negation sentences outside GFO are first replaced by their
    guarded reduct (see ``gfo_reduct``); its hull predicates join the
    abbreviations.

    Args:
        phi: GFO or GNFO sentence, or TGF sentence when ``triguarded`` is set
        sig: Signature of phi
        triguarded: Use the binary universe predicate as the default guard
        settings: Search budgets for the guarded-negation reduct

    Returns:
        Normal form whose canonical expansions turn models of phi into its models

    Raises:
        FragmentError: If phi is outside the fragment or has an unsupported shape
        BudgetExceededError: If the guarded-negation reduct exceeds its budget
    """
    report = classify(phi, sig)
    if triguarded and not report.tgf:
        raise FragmentError("Sentence is not in the triguarded fragment")
    if not triguarded and not (report.gfo or report.gnfo):
        raise FragmentError("Sentence is not in the guarded fragment")
    if free_variables(phi):
        raise FragmentError("Normal forms need a sentence")
    builder = _GuardedBuilder(sig, triguarded)
    if not triguarded and not report.gfo:
        phi = gfo_reduct(phi, sig, builder.fresh, settings)
        logger.debug("Guarded reduct with %d hull predicates", len(builder.definitions))
    for conjunct in _conjuncts(rename_apart(nnf(phi))):
        builder.add_conjunct(conjunct)
    result = builder.build()
    logger.debug(
        "Normal form with %d clauses, %d rules and %d fresh predicates",
        len(result.universal),
        len(result.existential),
        len(result.definitions),
    )
    return result


def _rename_xy(phi: Formula, first: str, second: str | None) -> Formula:
    mapping: dict[str, Term] = {first: Var("x")}
    if second is not None:
        mapping[second] = Var("y")
    return substitute(phi, mapping)


def scott_form(phi: Formula, sig: Signature) -> ScottForm:
    """
    Read a two-variable sentence as a Scott normal form.

    Accepted top-level conjuncts are ``forall x. a``, ``forall x forall y. a``,
    ``forall x exists y. a`` and ``exists x. a`` with quantifier-free ``a``.

    Raises:
        FragmentError: If phi is not equality-free FO2 or has another shape
    """
    if not classify(phi, sig).fo2:
        raise FragmentError("Sentence is not in equality-free FO2")
    universal: list[Formula] = []
    existential: list[Formula] = []
    for conjunct in _conjuncts(nnf(phi)):
        if isinstance(conjunct, Forall):
            inner = conjunct.body
            if is_quantifier_free(inner):
                universal.append(_rename_xy(inner, conjunct.var, None))
                continue
            if isinstance(inner, (Forall, Exists)) and is_quantifier_free(inner.body):
                renamed = _rename_xy(inner.body, conjunct.var, inner.var)
                (universal if isinstance(inner, Forall) else existential).append(renamed)
                continue
        elif isinstance(conjunct, Exists) and is_quantifier_free(conjunct.body):
            existential.append(substitute(conjunct.body, {conjunct.var: Var("y")}))
            continue
        raise FragmentError("Two-variable sentence is not in Scott shape")
    return ScottForm(sig, conj(universal), tuple(existential))


def normalize(
    phi: Formula, sig: Signature, fragment: Fragment, settings: ToolkitSettings | None = None
) -> NormalForm:
    """Normal form for the given fragment."""
    if fragment == "fo2":
        return scott_form(phi, sig)
    return guarded_normal_form(phi, sig, triguarded=fragment == "tgf", settings=settings)
