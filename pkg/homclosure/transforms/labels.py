"""
Label formulas over the Bit encoding and the translation evaluating a
sentence on an unfolding through its implicit representation.
"""

from collections.abc import Mapping
from typing import Literal

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Term,
    Top,
    Var,
    conj,
    disj,
    free_variables,
    implies,
)
from homclosure.core.structure import bit_predicate, bit_width
from homclosure.exceptions import FormulaValidationError
from homclosure.syntax.normal_forms import nnf, require_first_order


def _bits(m: int, width: int) -> list[int]:
    """Most significant bit first encoding of m-1."""
    return [((m - 1) >> (width - j)) & 1 for j in range(1, width + 1)]


def label_formula(term: Term, m: int, n: int, cmp: Literal["eq", "geq"] = "eq") -> Formula:
    """
    ``[lambda(t) = m]`` or ``[lambda(t) >= m]`` over the Bit predicates.

    Raises:
        FormulaValidationError: If m is outside 1..n
    """
    if not 1 <= m <= n:
        raise FormulaValidationError(f"Label {m} is outside 1..{n}")
    width = bit_width(n)
    bits = _bits(m, width)

    def bit(j: int) -> Formula:
        return Atom(bit_predicate(j), (term,))

    if cmp == "eq":
        return conj(bit(j) if b else Not(bit(j)) for j, b in enumerate(bits, start=1))
    if cmp == "geq":
        return conj(
            disj([bit(j)] + [bit(i) for i in range(1, j) if not bits[i - 1]])
            for j, b in enumerate(bits, start=1)
            if b
        )
    raise ValueError(f"Unknown label comparison: {cmp}")


def tr_n(phi: Formula, n: int) -> Formula:
    """
    Translate a sentence so that the implicit representation of a labeling
    satisfies the translation exactly when the unfolding satisfies phi.

    Quantifiers branch over the label of the bound variable; equalities
    between differently labelled terms collapse to false (and inequalities
    to true). Constants carry label 1. The output may be exponentially larger
    than phi.

    Raises:
        FormulaValidationError: If phi is not first-order or has free variables
    """
    require_first_order(phi, "tr_n")
    if n < 1:
        raise FormulaValidationError("tr_n needs n >= 1")
    free = free_variables(phi)
    if free:
        raise FormulaValidationError(f"tr_n needs a sentence, free variables: {sorted(free)}")
    return translate(nnf(phi), n, {})


def translate(phi: Formula, n: int, labels: Mapping[str, int]) -> Formula:
    """Translation of an NNF formula under a labeling of its free variables."""

    def label_of(t: Term) -> int:
        if isinstance(t, Const):
            return 1
        try:
            return labels[t.name]
        except KeyError:
            raise FormulaValidationError(f"Variable {t.name} has no label") from None

    if isinstance(phi, (Atom, Top, Bottom)):
        return phi
    if isinstance(phi, Eq):
        return phi if label_of(phi.left) == label_of(phi.right) else Bottom()
    if isinstance(phi, Not):
        body = phi.body
        if isinstance(body, Atom):
            return phi
        if isinstance(body, Eq):
            return phi if label_of(body.left) == label_of(body.right) else Top()
        raise FormulaValidationError("tr_n needs negation normal form")
    if isinstance(phi, And):
        return conj(translate(item, n, labels) for item in phi.items)
    if isinstance(phi, Or):
        return disj(translate(item, n, labels) for item in phi.items)
    if isinstance(phi, Exists):
        return disj(
            Exists(
                phi.var,
                conj(
                    label_formula(Var(phi.var), i, n, "geq"),
                    translate(phi.body, n, {**labels, phi.var: i}),
                ),
            )
            for i in range(1, n + 1)
        )
    if isinstance(phi, Forall):
        return conj(
            Forall(
                phi.var,
                _guarded_implication(
                    label_formula(Var(phi.var), i, n, "geq"),
                    translate(phi.body, n, {**labels, phi.var: i}),
                ),
            )
            for i in range(1, n + 1)
        )
    raise FormulaValidationError(f"tr_n cannot translate {type(phi).__name__}")


def _guarded_implication(premise: Formula, conclusion: Formula) -> Formula:
    if isinstance(premise, Top):
        return conclusion
    return implies(premise, conclusion)
