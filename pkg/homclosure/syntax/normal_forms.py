"""Negation normal form, prenexing and quantifier measures."""

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    FreshNames,
    Lfp,
    Not,
    Or,
    Top,
    Var,
    children,
    free_variables,
    is_first_order,
    substitute,
    variable_names,
)
from homclosure.exceptions import FormulaValidationError


def require_first_order(phi: Formula, operation: str) -> None:
    if not is_first_order(phi):
        raise FormulaValidationError(f"{operation} needs a first-order formula")


def nnf(phi: Formula) -> Formula:
    """
    Negation normal form.

    Negations end up directly above atoms and equalities; ``Not(Top)`` and
    ``Not(Bottom)`` fold to the opposite constant.

    Raises:
        FormulaValidationError: If phi is not first-order
    """
    require_first_order(phi, "NNF")
    return _nnf(phi, False)


def _nnf(phi: Formula, negate: bool) -> Formula:
    if isinstance(phi, (Atom, Eq)):
        return Not(phi) if negate else phi
    if isinstance(phi, Top):
        return Bottom() if negate else phi
    if isinstance(phi, Bottom):
        return Top() if negate else phi
    if isinstance(phi, Not):
        return _nnf(phi.body, not negate)
    if isinstance(phi, And):
        items = tuple(_nnf(item, negate) for item in phi.items)
        return Or(items) if negate else And(items)
    if isinstance(phi, Or):
        items = tuple(_nnf(item, negate) for item in phi.items)
        return And(items) if negate else Or(items)
    if isinstance(phi, Exists):
        body = _nnf(phi.body, negate)
        return Forall(phi.var, body) if negate else Exists(phi.var, body)
    if isinstance(phi, Forall):
        body = _nnf(phi.body, negate)
        return Exists(phi.var, body) if negate else Forall(phi.var, body)
    raise FormulaValidationError(f"NNF needs a first-order formula, got {type(phi).__name__}")


def quantifier_rank(phi: Formula) -> int:
    """Maximal nesting depth of first-order quantifiers."""
    if isinstance(phi, (Exists, Forall)):
        return 1 + quantifier_rank(phi.body)
    if isinstance(phi, Lfp):
        return max((quantifier_rank(d.body) for d in phi.defs), default=0)
    return max((quantifier_rank(c) for c in children(phi)), default=0)


def is_literal(phi: Formula) -> bool:
    return isinstance(phi, (Atom, Eq, Top, Bottom)) or (
        isinstance(phi, Not) and isinstance(phi.body, (Atom, Eq))
    )


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Exists, Forall, Lfp)):
        return False
    return is_first_order(phi) and all(is_quantifier_free(c) for c in children(phi))


def rename_apart(phi: Formula) -> Formula:
    """Give every quantifier its own variable, distinct from the free ones."""
    fresh = FreshNames(variable_names(phi))
    used: set[str] = set(free_variables(phi))
    return _rename_apart(phi, fresh, used)


def _rename_apart(phi: Formula, fresh: FreshNames, used: set[str]) -> Formula:
    if isinstance(phi, (Exists, Forall)):
        var = phi.var
        body = phi.body
        if var in used:
            new = fresh(var)
            body = substitute(body, {var: Var(new)})
            var = new
        used.add(var)
        return type(phi)(var, _rename_apart(body, fresh, used))
    if isinstance(phi, Not):
        return Not(_rename_apart(phi.body, fresh, used))
    if isinstance(phi, And):
        return And(tuple(_rename_apart(c, fresh, used) for c in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(_rename_apart(c, fresh, used) for c in phi.items))
    return phi


Prefix = list[tuple[str, str]]


def prenex(phi: Formula) -> tuple[Prefix, Formula]:
    """
    Prenex form of an FO formula as (prefix, matrix).

    The prefix lists ('E'|'A', variable) pairs outermost first. When merging
    the prefixes of conjuncts or disjuncts, existential blocks are pulled out
    before universal ones wherever the order allows, so a conjunction of
    E*A* formulas stays E*A*.
    """
    require_first_order(phi, "Prenexing")
    return _prenex(rename_apart(nnf(phi)))


def _prenex(phi: Formula) -> tuple[Prefix, Formula]:
    if isinstance(phi, Exists):
        prefix, matrix = _prenex(phi.body)
        return [("E", phi.var), *prefix], matrix
    if isinstance(phi, Forall):
        prefix, matrix = _prenex(phi.body)
        return [("A", phi.var), *prefix], matrix
    if isinstance(phi, (And, Or)):
        parts = [_prenex(item) for item in phi.items]
        prefix = _merge_prefixes([p for p, _ in parts])
        matrices = tuple(m for _, m in parts)
        return prefix, (And(matrices) if isinstance(phi, And) else Or(matrices))
    return [], phi


def _merge_prefixes(prefixes: list[Prefix]) -> Prefix:
    queues = [list(p) for p in prefixes]
    merged: Prefix = []
    kind = "E"
    while any(queues):
        progressed = False
        for queue in queues:
            while queue and queue[0][0] == kind:
                merged.append(queue.pop(0))
                progressed = True
        if not progressed:
            kind = "A" if kind == "E" else "E"
    return merged


def prefix_word(phi: Formula) -> str | None:
    """
    Quantifier word of the prenex form, e.g. ``"AE"`` for forall-exists.

    Returns None for formulas with second-order or fixpoint nodes.
    """
    if not is_first_order(phi):
        return None
    prefix, _ = prenex(phi)
    return "".join(kind for kind, _ in prefix)


def apply_prefix(prefix: Prefix, matrix: Formula) -> Formula:
    for kind, var in reversed(prefix):
        matrix = Exists(var, matrix) if kind == "E" else Forall(var, matrix)
    return matrix
