"""Formula printer for the module text grammar."""

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
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
)
from homclosure.core.signature import Signature

_SO_KEYWORDS = {ExistsSO: "existsSO", ForallSO: "forallSO", ExistsFinSO: "existsFin"}


class FormulaPrinter:
    """
    Prints formulas so that parsing the output yields the same AST.

    And/Or children of And/Or are parenthesized, as are quantifier and
    fixpoint children of connectives. Runs of equal quantifiers are merged.
    """

    @staticmethod
    def to_text(phi: Formula) -> str:
        return _print(phi)

    @staticmethod
    def document(sig: Signature, phi: Formula) -> str:
        """Print a signature header followed by the formula."""
        return f"{sig}\n{_print(phi)}\n"


def _terms(terms: tuple[Term, ...]) -> str:
    return ", ".join(t.name for t in terms)


def _is_binder(phi: Formula) -> bool:
    return isinstance(phi, (Exists, Forall, ExistsSO, ForallSO, ExistsFinSO, Lfp))


def _operand(phi: Formula) -> str:
    if isinstance(phi, (And, Or)) and len(phi.items) > 1:
        return f"({_print(phi)})"
    if _is_binder(phi):
        return f"({_print(phi)})"
    return _print(phi)


def _print(phi: Formula) -> str:
    if isinstance(phi, Atom):
        return f"{phi.pred}({_terms(phi.terms)})"
    if isinstance(phi, Eq):
        return f"{phi.left.name} = {phi.right.name}"
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Not):
        body = phi.body
        if isinstance(body, Eq):
            return f"{body.left.name} != {body.right.name}"
        if isinstance(body, (Atom, Top, Bottom, Not)):
            return f"!{_print(body)}"
        return f"!({_print(body)})"
    if isinstance(phi, (And, Or)):
        if not phi.items:
            return "true" if isinstance(phi, And) else "false"
        if len(phi.items) == 1:
            return _print(phi.items[0])
        glue = " & " if isinstance(phi, And) else " | "
        return glue.join(_operand(item) for item in phi.items)
    if isinstance(phi, (Exists, Forall)):
        keyword = "exists" if isinstance(phi, Exists) else "forall"
        names = []
        node: Formula = phi
        while isinstance(node, type(phi)):
            names.append(node.var)
            node = node.body
        return f"{keyword} {' '.join(names)}. {_print(node)}"
    if isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        keyword = _SO_KEYWORDS[type(phi)]
        decls = []
        node = phi
        while type(node) is type(phi):
            decls.append(f"{node.pred}/{node.arity}")
            node = node.body
        return f"{keyword} {' '.join(decls)}. {_print(node)}"
    if isinstance(phi, Lfp):
        defs = "; ".join(f"{d.name}({', '.join(d.params)}) := {_print(d.body)}" for d in phi.defs)
        return f"lfp {defs} in {phi.goal}({_terms(phi.args)})"
    raise TypeError(f"Unknown formula node: {phi!r}")
