"""Syntactic fragment classification."""

import re
from dataclasses import asdict, dataclass
from typing import Any

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Top,
    children,
    constants_of,
    free_variables,
    has_equality,
    is_first_order,
    term_vars,
    variable_names,
)
from homclosure.core.signature import Signature
from homclosure.syntax.normal_forms import nnf, prefix_word
from homclosure.tgd.rules import extract_rules


@dataclass(frozen=True)
class FragmentReport:
    """Fragment memberships of one formula."""

    first_order: bool
    positive_existential: bool
    """Existential-positive FO with equality (no negation, no universal quantifier)"""

    cq: bool
    ucq: bool
    gfo: bool
    """Guarded fragment with equality"""

    gnfo: bool
    """Guarded negation fragment with equality"""

    tgf: bool
    """Triguarded fragment (equality-free)"""

    fo2: bool
    """Two-variable fragment without equality"""

    fo2_eq: bool
    """Two-variable fragment with equality"""

    tgd: bool
    mdtgd: bool
    dtgd: bool
    prefix: str | None
    """Quantifier word of the prenex form, 'E' and 'A' letters, outermost first"""

    equality_free: bool
    constant_free: bool

    @property
    def bernays_schonfinkel(self) -> bool:
        return self.matches_prefix("E*A*")

    def matches_prefix(self, pattern: str) -> bool:
        """Regular-expression match over the prefix word."""
        return self.prefix is not None and re.fullmatch(pattern, self.prefix) is not None

    def to_dict(self) -> dict[str, Any]:
        result = asdict(self)
        result["bernays_schonfinkel"] = self.bernays_schonfinkel
        return result


def classify(phi: Formula, sig: Signature | None = None) -> FragmentReport:
    """
    Sound syntactic membership checks for the supported fragments.

    Guards may carry extra conjuncts, and quantification over formulas with
    at most one free variable needs no guard. Rules read through
    ``extract_rules``.
    """
    first_order = is_first_order(phi)
    equality_free = not has_equality(phi)
    constant_free = not constants_of(phi)
    if not first_order:
        return FragmentReport(
            first_order=False,
            positive_existential=False,
            cq=False,
            ucq=False,
            gfo=False,
            gnfo=False,
            tgf=False,
            fo2=False,
            fo2_eq=False,
            tgd=False,
            mdtgd=False,
            dtgd=False,
            prefix=None,
            equality_free=equality_free,
            constant_free=constant_free,
        )

    normal = nnf(phi)
    cq = is_cq(normal)
    tgd = is_tgd(phi)
    mdtgd = tgd or is_mdtgd(phi)
    rules = extract_rules(phi)
    dtgd = mdtgd or rules is not None
    few_variables = len(variable_names(phi)) <= 2
    return FragmentReport(
        first_order=True,
        positive_existential=is_positive_existential(normal),
        cq=cq,
        ucq=cq or is_ucq(normal),
        gfo=_guarded(normal, triguarded=False),
        gnfo=is_gnfo(phi),
        tgf=equality_free and _guarded(normal, triguarded=True),
        fo2=few_variables and equality_free,
        fo2_eq=few_variables,
        tgd=tgd,
        mdtgd=mdtgd,
        dtgd=dtgd,
        prefix=prefix_word(phi),
        equality_free=equality_free,
        constant_free=constant_free,
    )


def is_positive_existential(normal: Formula) -> bool:
    """On NNF input: no negated atom or equality, no universal quantifier."""
    if isinstance(normal, (Not, Forall)):
        return False
    return all(is_positive_existential(c) for c in children(normal))


def is_cq(normal: Formula) -> bool:
    if isinstance(normal, (Atom, Eq, Top)):
        return True
    if isinstance(normal, (And, Exists)):
        return all(is_cq(c) for c in children(normal))
    return False


def is_ucq(normal: Formula) -> bool:
    if isinstance(normal, Bottom):
        return True
    if isinstance(normal, Or):
        return all(is_cq(item) or is_ucq(item) for item in normal.items)
    return is_cq(normal)


def is_tgd(phi: Formula) -> bool:
    rules = extract_rules(phi)
    return rules is not None and all(len(r.heads) == 1 for r in rules)


def is_mdtgd(phi: Formula) -> bool:
    """A disjunction of a TGD sentence and a conjunctive query."""
    if is_tgd(phi):
        return True
    if not isinstance(phi, Or) or len(phi.items) != 2:
        return False
    first, second = phi.items
    return (is_tgd(first) and is_cq(nnf(second))) or (is_tgd(second) and is_cq(nnf(first)))


def _block(phi: Exists | Forall) -> tuple[list[str], Formula]:
    variables = []
    node: Formula = phi
    while isinstance(node, type(phi)):
        assert isinstance(node, (Exists, Forall))
        variables.append(node.var)
        node = node.body
    return variables, node


def _covers(guard: Formula, needed: frozenset[str]) -> bool:
    return isinstance(guard, Atom) and needed <= term_vars(guard.terms)


def _guarded(normal: Formula, triguarded: bool) -> bool:
    """Guardedness check on NNF input."""
    if isinstance(normal, (Exists, Forall)):
        variables, body = _block(normal)
        needed = free_variables(body)
        if triguarded:
            exempt = len(free_variables(normal)) < 2
        else:
            exempt = len(needed) <= 1
        if not exempt:
            if isinstance(normal, Exists):
                candidates = body.items if isinstance(body, And) else (body,)
                guarded = any(_covers(c, needed) for c in candidates)
            else:
                candidates = body.items if isinstance(body, Or) else (body,)
                guarded = any(
                    isinstance(c, Not) and _covers(c.body, needed) for c in candidates
                )
            if not guarded:
                return False
        return _guarded(body, triguarded)
    return all(_guarded(c, triguarded) for c in children(normal))


def is_gnfo(phi: Formula) -> bool:
    """
    Guarded negation: after rewriting universal quantifiers as negated
    existentials, every negated subformula has at most one free variable or
    sits in a conjunction next to an atom covering its free variables.
    """
    return _gnfo(eliminate_universals(phi), guards=())


def eliminate_universals(phi: Formula) -> Formula:
    """Rewrite every universal quantifier as a negated existential."""
    if isinstance(phi, Forall):
        return Not(Exists(phi.var, Not(eliminate_universals(phi.body))))
    if isinstance(phi, Exists):
        return Exists(phi.var, eliminate_universals(phi.body))
    if isinstance(phi, Not):
        return Not(eliminate_universals(phi.body))
    if isinstance(phi, And):
        return And(tuple(eliminate_universals(i) for i in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(eliminate_universals(i) for i in phi.items))
    return phi


def _gnfo(phi: Formula, guards: tuple[Formula, ...]) -> bool:
    if isinstance(phi, Not):
        needed = free_variables(phi.body)
        if len(needed) > 1 and not any(_covers(g, needed) for g in guards):
            return False
        return _gnfo(phi.body, ())
    if isinstance(phi, And):
        return all(_gnfo(item, phi.items) for item in phi.items)
    return all(_gnfo(c, ()) for c in children(phi))
