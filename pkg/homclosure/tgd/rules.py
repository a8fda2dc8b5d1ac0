"""Tuple-generating dependencies: extraction, normalization and redundancy witnesses."""

import logging
from dataclasses import dataclass
from itertools import product

import networkx as nx

from homclosure.core.formula import (
    And,
    Atom,
    Const,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Term,
    Top,
    Var,
    conj,
    exists_many,
    forall_many,
    implies,
    term_vars,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import FragmentError
from homclosure.syntax.normal_forms import rename_apart

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RawRule:
    """A (possibly disjunctive) rule as read off a sentence."""

    universal: tuple[str, ...]
    body: tuple[Atom, ...]
    heads: tuple[tuple[tuple[str, ...], tuple[Atom, ...]], ...]
    """Head disjuncts as (existential variables, atoms)"""


def _conjunctive(phi: Formula, quantified: list[str]) -> list[Atom] | None:
    """Atoms of an existentially wrapped conjunction of atoms, or None."""
    if isinstance(phi, Atom):
        return [phi]
    if isinstance(phi, Top):
        return []
    if isinstance(phi, Exists):
        quantified.append(phi.var)
        return _conjunctive(phi.body, quantified)
    if isinstance(phi, And):
        atoms: list[Atom] = []
        for item in phi.items:
            part = _conjunctive(item, quantified)
            if part is None:
                return None
            atoms.extend(part)
        return atoms
    return None


def _rules(phi: Formula, universal: tuple[str, ...]) -> list[RawRule] | None:
    if isinstance(phi, Forall):
        return _rules(phi.body, universal + (phi.var,))
    if isinstance(phi, And) and any(isinstance(i, (Forall, Or, And)) for i in phi.items):
        rules: list[RawRule] = []
        for item in phi.items:
            part = _rules(item, universal)
            if part is None:
                return None
            rules.extend(part)
        return rules

    items = phi.items if isinstance(phi, Or) else (phi,)
    body: list[Atom] = []
    body_vars: list[str] = []
    heads: list[tuple[tuple[str, ...], tuple[Atom, ...]]] = []
    for item in items:
        if isinstance(item, Not):
            atoms = _conjunctive(item.body, body_vars)
            if atoms is None:
                return None
            body.extend(atoms)
        else:
            exist_vars: list[str] = []
            atoms = _conjunctive(item, exist_vars)
            if not atoms:
                return None
            heads.append((tuple(exist_vars), tuple(atoms)))
    if not heads:
        return None
    return [RawRule(universal + tuple(body_vars), tuple(body), tuple(heads))]


def extract_rules(phi: Formula) -> list[RawRule] | None:
    """
    Read a sentence as a conjunction of (disjunctive) rules.

    Accepted shapes are universally quantified implications whose premise is
    a conjunction of atoms (existentials in the premise become universal) and
    whose conclusion is a disjunction of existentially quantified
    conjunctions of atoms, plus bare existential conjunctions. Equality is
    not allowed.

    Returns:
        The rules, or None if phi has another shape
    """
    rules = _rules(rename_apart(phi), ())
    if not rules:
        return None
    return rules


@dataclass(frozen=True)
class TgdRule:
    """
    Normalized rule ``forall frontier. body -> exists existential. head``.

    After normalization the head atoms of one rule are linked through
    shared existential variables.
    """

    frontier: tuple[str, ...]
    """Universally quantified variables"""

    body: tuple[Atom, ...]
    """Premise atoms over the frontier variables (possibly empty)"""

    existential: tuple[str, ...]
    """Existentially quantified head variables"""

    head: tuple[Atom, ...]
    """Non-empty conclusion atoms"""

    @property
    def connected(self) -> bool:
        """A rule is connected when some frontier variable occurs in its head."""
        return bool(_head_vars(self) & set(self.frontier))

    def to_formula(self) -> Formula:
        head = exists_many(self.existential, conj(self.head))
        if self.body:
            return forall_many(self.frontier, implies(conj(self.body), head))
        return forall_many(self.frontier, head)

    def body_structure(self, sig: Signature) -> tuple[Structure, dict[str, Element]]:
        """Structure whose canonical query is the existential closure of the body."""
        return atoms_structure(self.frontier, self.body, sig)

    def head_structure(self, sig: Signature) -> tuple[Structure, dict[str, Element]]:
        """Structure built from the head atoms over the existential variables."""
        variables = tuple(v for v in self.frontier if v in _head_vars(self)) + self.existential
        return atoms_structure(variables, self.head, sig)

    def __str__(self) -> str:
        return str(self.to_formula())


def _head_vars(rule: TgdRule) -> set[str]:
    return set().union(*(term_vars(a.terms) for a in rule.head))


def atoms_structure(
    variables: tuple[str, ...], atoms: tuple[Atom, ...], sig: Signature
) -> tuple[Structure, dict[str, Element]]:
    """
    One element per variable and one per constant, one tuple per atom.

    Constants get their own elements after the variables, so the structure
    names them apart; a structure without variables or constants gets a
    single unnamed element.
    """
    names = list(variables) or ([] if sig.constants else ["_"])
    index = {v: i for i, v in enumerate(names)}
    named = {c: len(names) + i for i, c in enumerate(sig.constants)}
    relations: dict[str, list[tuple[Element, ...]]] = {}
    for a in atoms:
        relations.setdefault(a.pred, []).append(
            tuple(index[t.name] if isinstance(t, Var) else named[t.name] for t in a.terms)
        )
    return Structure.build(sig, len(names) + len(named), named, relations), index


def tgd_normalize(phi: Formula) -> list[TgdRule]:
    """
    Split every rule of a TGD sentence along the linkage of its head atoms.

    Head atoms sharing an existential variable stay together; every class
    becomes its own rule with its own existential variables.

    Raises:
        FragmentError: If phi is not a TGD sentence
    """
    raw = extract_rules(phi)
    if raw is None or any(len(r.heads) != 1 for r in raw):
        raise FragmentError("Not a TGD sentence")

    rules: list[TgdRule] = []
    for r in raw:
        exist_vars, atoms = r.heads[0]
        exist_set = set(exist_vars)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(atoms)))
        for i, j in product(range(len(atoms)), repeat=2):
            if i < j and term_vars(atoms[i].terms) & term_vars(atoms[j].terms) & exist_set:
                graph.add_edge(i, j)
        components = sorted((sorted(c) for c in nx.connected_components(graph)), key=min)
        for component in components:
            head = tuple(atoms[i] for i in component)
            used = set().union(*(term_vars(a.terms) for a in head))
            rules.append(
                TgdRule(
                    frontier=r.universal,
                    body=r.body,
                    existential=tuple(v for v in exist_vars if v in used),
                    head=head,
                )
            )
    logger.debug("Normalized %d rules into %d", len(raw), len(rules))
    return rules


def _witness_terms(rule: TgdRule) -> dict[str, Term]:
    """Images allowed for existential variables: frontier variables, then body constants."""
    terms: dict[str, Term] = {
        t.name: t for a in rule.body for t in a.terms if isinstance(t, Const)
    }
    terms.update((v, Var(v)) for v in rule.frontier)
    return terms


def _image(a: Atom, sub: dict[str, str], terms: dict[str, Term]) -> Atom:
    return Atom(
        a.pred,
        tuple(terms[sub[t.name]] if isinstance(t, Var) and t.name in sub else t for t in a.terms),
    )


def redundancy_witness(rule: TgdRule) -> dict[str, str] | None:
    """
    Substitution of existential variables by frontier variables or body
    constants mapping every head atom onto a body atom, searched in
    lexicographic order; None if there is none.
    """
    body = set(rule.body)
    if not body:
        return None
    terms = _witness_terms(rule)
    candidates = list(rule.frontier) + sorted(c for c in terms if c not in rule.frontier)
    exist_vars = [v for v in rule.existential if v in _head_vars(rule)]

    # atoms checked once their last existential variable is assigned
    position = {v: i for i, v in enumerate(exist_vars)}
    checks: list[list[Atom]] = [[] for _ in range(len(exist_vars) + 1)]
    for a in rule.head:
        indices = [position[v] for v in term_vars(a.terms) if v in position]
        checks[max(indices) + 1 if indices else 0].append(a)

    if any(_image(a, {}, terms) not in body for a in checks[0]):
        return None

    def extend(i: int, sub: dict[str, str]) -> dict[str, str] | None:
        if i == len(exist_vars):
            return dict(sub)
        for x in candidates:
            sub[exist_vars[i]] = x
            if all(_image(a, sub, terms) in body for a in checks[i + 1]):
                found = extend(i + 1, sub)
                if found is not None:
                    return found
            del sub[exist_vars[i]]
        return None

    return extend(0, {})


def check_redundancy_witness(rule: TgdRule, witness: dict[str, str]) -> bool:
    """Independent check of a redundancy witness."""
    body = set(rule.body)
    terms = _witness_terms(rule)
    if not set(witness.values()) <= set(terms):
        return False
    return all(_image(a, witness, terms) in body for a in rule.head)
