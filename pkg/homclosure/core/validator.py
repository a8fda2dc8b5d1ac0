from typing import TYPE_CHECKING

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    ExistsFinSO,
    ExistsSO,
    Forall,
    ForallSO,
    Formula,
    Lfp,
    Not,
    Or,
    Term,
    Top,
    free_variables,
)
from homclosure.core.signature import Signature
from homclosure.exceptions import (
    ArityMismatchError,
    FormulaValidationError,
    LogicError,
    StructureValidationError,
    UnknownSymbolError,
)

if TYPE_CHECKING:
    from homclosure.core.structure import Structure


class FormulaValidator:
    """Validates formulas against a signature."""

    @staticmethod
    def validate(phi: Formula, sig: Signature, sentence: bool = True) -> None:
        """
        Validate a formula.

        Checks symbols, arities, fixpoint well-formedness and positivity, and
        (for sentences) the absence of free variables. All problems are
        collected; the exception class is that of the first problem found.

        Args:
            phi: Formula to validate
            sig: Ambient signature
            sentence: Require that phi has no free first-order variables

        Raises:
            UnknownSymbolError: If an undeclared symbol occurs
            ArityMismatchError: If an atom has the wrong number of terms
            FormulaValidationError: For free variables or non-positive fixpoints
        """
        problems: list[tuple[type[LogicError], str]] = []
        _check(phi, sig, {}, problems)
        if sentence:
            free = sorted(free_variables(phi))
            if free:
                problems.append((FormulaValidationError, f"Free variables in sentence: {free}"))
        if problems:
            error_class = problems[0][0]
            raise error_class("\n".join(message for _, message in problems))

    @staticmethod
    def check_positive(body: Formula, names: set[str]) -> None:
        """
        Ensure that the given predicates occur only positively in body.

        Raises:
            FormulaValidationError: On a negative occurrence
        """
        problems: list[tuple[type[LogicError], str]] = []
        _positivity(body, names, True, problems)
        if problems:
            raise FormulaValidationError("\n".join(message for _, message in problems))


def _check_terms(
    terms: tuple[Term, ...], sig: Signature, problems: list[tuple[type[LogicError], str]]
) -> None:
    for term in terms:
        if isinstance(term, Const) and not sig.has_constant(term.name):
            problems.append((UnknownSymbolError, f"Unknown constant: {term.name}"))


def _check(
    phi: Formula,
    sig: Signature,
    bound: dict[str, int],
    problems: list[tuple[type[LogicError], str]],
) -> None:
    if isinstance(phi, Atom):
        if phi.pred in bound:
            arity = bound[phi.pred]
        elif sig.has_predicate(phi.pred):
            arity = sig.arity(phi.pred)
        else:
            problems.append((UnknownSymbolError, f"Unknown predicate: {phi.pred}"))
            arity = len(phi.terms)
        if len(phi.terms) != arity:
            problems.append(
                (
                    ArityMismatchError,
                    f"Predicate {phi.pred} expects {arity} arguments, got {len(phi.terms)}",
                )
            )
        _check_terms(phi.terms, sig, problems)
    elif isinstance(phi, Eq):
        _check_terms((phi.left, phi.right), sig, problems)
    elif isinstance(phi, (Top, Bottom)):
        return
    elif isinstance(phi, Not):
        _check(phi.body, sig, bound, problems)
    elif isinstance(phi, (And, Or)):
        for item in phi.items:
            _check(item, sig, bound, problems)
    elif isinstance(phi, (Exists, Forall)):
        _check(phi.body, sig, bound, problems)
    elif isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        if phi.arity < 1:
            problems.append((FormulaValidationError, f"{phi.pred} must have arity >= 1"))
        _check(phi.body, sig, {**bound, phi.pred: phi.arity}, problems)
    elif isinstance(phi, Lfp):
        inner = dict(bound)
        names = [d.name for d in phi.defs]
        if len(set(names)) != len(names):
            problems.append((FormulaValidationError, f"Duplicate fixpoint predicates: {names}"))
        for d in phi.defs:
            if d.arity < 1:
                problems.append((FormulaValidationError, f"{d.name} must have arity >= 1"))
            if len(set(d.params)) != len(d.params):
                problems.append((FormulaValidationError, f"Repeated parameter in {d.name}"))
            inner[d.name] = d.arity
        for d in phi.defs:
            _check(d.body, sig, inner, problems)
            _positivity(d.body, set(names), True, problems)
        if phi.goal not in inner or phi.goal not in names:
            problems.append((UnknownSymbolError, f"Unknown fixpoint goal: {phi.goal}"))
        elif len(phi.args) != inner[phi.goal]:
            problems.append(
                (
                    ArityMismatchError,
                    f"Fixpoint goal {phi.goal} expects {inner[phi.goal]} arguments, "
                    f"got {len(phi.args)}",
                )
            )
        _check_terms(phi.args, sig, problems)
    else:
        problems.append((FormulaValidationError, f"Unknown formula node: {phi!r}"))


def _positivity(
    phi: Formula, names: set[str], positive: bool, problems: list[tuple[type[LogicError], str]]
) -> None:
    if isinstance(phi, Atom):
        if phi.pred in names and not positive:
            problems.append(
                (FormulaValidationError, f"Fixpoint predicate {phi.pred} occurs negatively")
            )
    elif isinstance(phi, Not):
        _positivity(phi.body, names, not positive, problems)
    elif isinstance(phi, (And, Or)):
        for item in phi.items:
            _positivity(item, names, positive, problems)
    elif isinstance(phi, (Exists, Forall)):
        _positivity(phi.body, names, positive, problems)
    elif isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        _positivity(phi.body, names - {phi.pred}, positive, problems)
    elif isinstance(phi, Lfp):
        shadow = names - {d.name for d in phi.defs}
        for d in phi.defs:
            _positivity(d.body, shadow, positive, problems)


class StructureValidator:
    """Validates finite structures."""

    @staticmethod
    def validate(structure: "Structure") -> None:
        """
        Validate domain, constants and relation tuples.

        Raises:
            StructureValidationError: If any check fails
        """
        errors = []
        sig = structure.sig
        domain = set(structure.domain)

        if not structure.domain:
            errors.append("Structure domain must be non-empty")
        if len(domain) != len(structure.domain):
            errors.append("Structure domain contains duplicates")

        for name in sig.constants:
            if name not in structure.constants:
                errors.append(f"Constant {name} is not interpreted")
            elif structure.constants[name] not in domain:
                errors.append(f"Constant {name} is interpreted outside the domain")
        for name in structure.constants:
            if not sig.has_constant(name):
                errors.append(f"Unknown constant: {name}")

        for name, _ in sig.predicates:
            if name not in structure.relations:
                errors.append(f"Predicate {name} is not interpreted")
        for name, tuples in structure.relations.items():
            if not sig.has_predicate(name):
                errors.append(f"Unknown predicate: {name}")
                continue
            arity = sig.arity(name)
            for tup in tuples:
                if len(tup) != arity:
                    errors.append(f"Tuple {tup} of {name} has length {len(tup)}, expected {arity}")
                elif not set(tup) <= domain:
                    errors.append(f"Tuple {tup} of {name} leaves the domain")

        if errors:
            raise StructureValidationError("\n".join(errors))
