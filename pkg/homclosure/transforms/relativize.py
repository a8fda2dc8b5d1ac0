"""Relativization of sentences to a unary predicate."""

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
    LfpDef,
    Not,
    Or,
    Top,
    Var,
    conj,
    constants_of,
    implies,
    predicates_of,
)
from homclosure.core.signature import Signature
from homclosure.exceptions import SignatureError


def guard_quantifiers(phi: Formula, unary: str) -> Formula:
    """
    Guard every first-order quantifier by the unary predicate.

    ``forall x. f`` becomes ``forall x. (U(x) -> f)`` and ``exists x. f``
    becomes ``exists x. (U(x) & f)``; second-order quantifiers and fixpoint
    blocks are kept, with their bodies guarded.
    """
    if isinstance(phi, (Atom, Eq, Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return Not(guard_quantifiers(phi.body, unary))
    if isinstance(phi, And):
        return And(tuple(guard_quantifiers(i, unary) for i in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(guard_quantifiers(i, unary) for i in phi.items))
    if isinstance(phi, Forall):
        return Forall(phi.var, implies(Atom(unary, (Var(phi.var),)), guard_quantifiers(phi.body, unary)))
    if isinstance(phi, Exists):
        return Exists(phi.var, And((Atom(unary, (Var(phi.var),)), guard_quantifiers(phi.body, unary))))
    if isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        return type(phi)(phi.pred, phi.arity, guard_quantifiers(phi.body, unary))
    if isinstance(phi, Lfp):
        defs = tuple(LfpDef(d.name, d.params, guard_quantifiers(d.body, unary)) for d in phi.defs)
        return Lfp(defs, phi.goal, phi.args)
    raise TypeError(f"Unknown formula node: {phi!r}")


def relativize(phi: Formula, unary: str, sig: Signature | None = None) -> Formula:
    """
    Relativize a sentence to the substructure induced by a unary predicate.

    The result holds in D exactly when the induced substructure [D]_U is a
    model of phi. It conjoins ``U(c)`` for every constant, and ``exists x.
    U(x)`` when there are no constants, so that [D]_U is a legal structure.

    Args:
        phi: Sentence over sig
        unary: Fresh unary predicate name
        sig: Signature supplying the constants (defaults to those of phi)

    Raises:
        SignatureError: If the predicate name is not fresh
    """
    if unary in predicates_of(phi) or (sig is not None and unary in sig.symbols()):
        raise SignatureError(f"Relativization predicate {unary} is not fresh")
    constants = list(sig.constants) if sig is not None else sorted(constants_of(phi))
    parts: list[Formula] = [guard_quantifiers(phi, unary)]
    if constants:
        parts.extend(Atom(unary, (Const(c),)) for c in constants)
    else:
        parts.append(Exists("x", Atom(unary, (Var("x"),))))
    return conj(parts)
