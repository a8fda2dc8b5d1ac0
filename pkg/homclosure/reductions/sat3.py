"""3SAT gadget: a structure and a fixed two-variable sentence whose
homomorphism-closure membership encodes satisfiability."""

import logging
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from homclosure.core.formula import (
    Formula,
    atom,
    conj,
    disj,
    exists_many,
    forall_many,
    implies,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import ReductionError

logger = logging.getLogger(__name__)

SAT3_SIGNATURE = Signature.build(
    {"First": 1, "CLst": 1, "Nil": 1, "Next": 2, "Lit": 2, "Sel": 1, "Cmp": 2}
)
EQ_PREDICATE = "Eq"

_LITERAL_RE = re.compile(r"^\s*([-~!¬]?)\s*p?([1-9][0-9]*)\s*$")

ClauseLiteral = tuple[int, bool]
"""Variable index (from 1) and polarity"""


def parse_literal(raw: int | str) -> ClauseLiteral:
    """
    Read ``3``/``-3`` or ``p3``/``~p3``/``-p3``/``!p3``/``¬p3``.

    Raises:
        ReductionError: If the literal is malformed
    """
    if isinstance(raw, bool):
        raise ReductionError(f"Malformed literal: {raw!r}")
    if isinstance(raw, int):
        if raw == 0:
            raise ReductionError("Literal 0 does not name a variable")
        return abs(raw), raw > 0
    match = _LITERAL_RE.match(str(raw))
    if not match:
        raise ReductionError(f"Malformed literal: {raw!r}")
    return int(match.group(2)), not match.group(1)


@dataclass(frozen=True)
class Sat3Instance:
    """Clauses of exactly three literals (repeats allowed) over p1..pm."""

    clauses: tuple[tuple[ClauseLiteral, ClauseLiteral, ClauseLiteral], ...]

    @classmethod
    def parse(cls, clauses: Iterable[Sequence[int | str]]) -> "Sat3Instance":
        """
        Raises:
            ReductionError: On an empty instance or a clause without exactly three literals
        """
        parsed = []
        for number, clause in enumerate(clauses, start=1):
            if isinstance(clause, (str, bytes)) or len(clause) != 3:
                raise ReductionError(f"Clause {number} must have exactly three literals")
            a, b, c = (parse_literal(lit) for lit in clause)
            parsed.append((a, b, c))
        if not parsed:
            raise ReductionError("A 3SAT instance needs at least one clause")
        return cls(tuple(parsed))

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def n_variables(self) -> int:
        return max(var for clause in self.clauses for var, _ in clause)

    def satisfied_by(self, assignment: Mapping[int, bool]) -> bool:
        return all(
            any(assignment.get(var, True) == positive for var, positive in clause)
            for clause in self.clauses
        )

    # Elements: a_1..a_{n+1}, then b_1..b_m, then b'_1..b'_m

    def clause_element(self, i: int) -> Element:
        return i - 1

    def literal_element(self, var: int, positive: bool) -> Element:
        offset = self.n_clauses + 1
        return offset + var - 1 if positive else offset + self.n_variables + var - 1


def sat3_sentence() -> Formula:
    """
    Models hold a clause list from First to Nil, a selected literal per
    clause, and pairwise compatible selections.
    """
    return conj(
        exists_many(["x"], atom("First", "x")),
        forall_many(["x"], implies(atom("First", "x"), atom("CLst", "x"))),
        forall_many(
            ["x"],
            implies(
                atom("CLst", "x"),
                exists_many(
                    ["y"], conj(atom("Next", "x", "y"), disj(atom("CLst", "y"), atom("Nil", "y")))
                ),
            ),
        ),
        forall_many(
            ["x"],
            implies(
                atom("CLst", "x"), exists_many(["y"], conj(atom("Lit", "x", "y"), atom("Sel", "y")))
            ),
        ),
        forall_many(
            ["x", "y"], implies(conj(atom("Sel", "x"), atom("Sel", "y")), atom("Cmp", "x", "y"))
        ),
    )


def _relations(instance: Sat3Instance, selected: Iterable[Element]) -> dict[str, list[tuple]]:
    n, m = instance.n_clauses, instance.n_variables
    positive = [instance.literal_element(j, True) for j in range(1, m + 1)]
    negative = [instance.literal_element(j, False) for j in range(1, m + 1)]
    cmp = [(a, b) for a in positive for b in positive]
    cmp += [(a, b) for a in negative for b in negative]
    for i in range(1, m + 1):
        for k in range(1, m + 1):
            if i != k:
                cmp.append((positive[i - 1], negative[k - 1]))
                cmp.append((negative[i - 1], positive[k - 1]))
    lit = [
        (instance.clause_element(i), instance.literal_element(var, pos))
        for i, clause in enumerate(instance.clauses, start=1)
        for var, pos in clause
    ]
    return {
        "First": [(instance.clause_element(1),)],
        "CLst": [(instance.clause_element(i),) for i in range(1, n + 1)],
        "Nil": [(instance.clause_element(n + 1),)],
        "Next": [(instance.clause_element(i), instance.clause_element(i + 1)) for i in range(1, n + 1)],
        "Lit": lit,
        "Sel": [(e,) for e in selected],
        "Cmp": cmp,
    }


def sat3_structure(instance: Sat3Instance) -> Structure:
    """The instance's structure; every literal element is selectable."""
    m = instance.n_variables
    literals = [instance.literal_element(j, pos) for pos in (True, False) for j in range(1, m + 1)]
    return Structure.build(
        SAT3_SIGNATURE,
        instance.n_clauses + 1 + 2 * m,
        relations=_relations(instance, literals),
    )


def sat3_gadget(clauses: Iterable[Sequence[int | str]]) -> tuple[Structure, Formula]:
    """
    Structure and sentence for a 3SAT instance.

    The instance is satisfiable exactly when the structure is the
    homomorphic image of a finite model of the sentence.

    Args:
        clauses: Three literals per clause, as DIMACS integers or ``p``/``~p`` strings

    Returns:
        (structure with n+1+2m elements, sentence)

    Raises:
        ReductionError: On a malformed clause or an empty instance
    """
    instance = Sat3Instance.parse(clauses)
    structure = sat3_structure(instance)
    logger.debug(
        "3SAT gadget with %d clauses over %d variables", instance.n_clauses, instance.n_variables
    )
    return structure, sat3_sentence()


def sat3_witness(instance: Sat3Instance, assignment: Mapping[int, bool]) -> Structure:
    """
    Model of the sentence that maps identically onto the instance's structure.

    Sel keeps only the literals made true by the assignment; unassigned
    variables count as true.

    Raises:
        ReductionError: If the assignment does not satisfy the instance
    """
    if not instance.satisfied_by(assignment):
        raise ReductionError("Assignment does not satisfy the instance")
    m = instance.n_variables
    chosen = [instance.literal_element(j, assignment.get(j, True)) for j in range(1, m + 1)]
    return Structure.build(
        SAT3_SIGNATURE,
        instance.n_clauses + 1 + 2 * m,
        relations=_relations(instance, chosen),
    )


def sat3_prefix_sentence() -> Formula:
    """
    Variant with one ``forall forall exists exists`` prefix over an extra Eq predicate.

    Its models restricted to the gadget signature are models of
    ``sat3_sentence``.
    """
    return forall_many(
        ["x", "y"],
        exists_many(
            ["z", "v"],
            conj(
                atom("First", "z"),
                atom(EQ_PREDICATE, "x", "x"),
                implies(atom("First", "x"), atom("CLst", "x")),
                implies(
                    conj(atom("CLst", "x"), atom(EQ_PREDICATE, "x", "y")),
                    conj(atom("Lit", "x", "v"), atom("Sel", "v")),
                ),
                implies(
                    conj(atom("CLst", "x"), atom("Lit", "x", "y")),
                    conj(atom("Next", "x", "v"), disj(atom("CLst", "v"), atom("Nil", "v"))),
                ),
                implies(conj(atom("Sel", "x"), atom("Sel", "y")), atom("Cmp", "x", "y")),
            ),
        ),
    )


def sat3_prefix_gadget(clauses: Iterable[Sequence[int | str]]) -> tuple[Structure, Formula]:
    """
    The gadget structure expanded by the diagonal Eq relation, with the prefix variant.

    Raises:
        ReductionError: On a malformed clause or an empty instance
    """
    structure, _ = sat3_gadget(clauses)
    diagonal = [(a, a) for a in structure.domain]
    return structure.expand_with({EQ_PREDICATE: diagonal}, {EQ_PREDICATE: 2}), sat3_prefix_sentence()
