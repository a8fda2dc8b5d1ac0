"""
Formula AST.

Terms and formulas are immutable frozen dataclasses, so structural equality
and hashing come for free. The smart constructors ``conj`` and ``disj``
flatten nested connectives and fold the neutral elements: the empty
conjunction is ``Top()`` and the empty disjunction is ``Bottom()``.
"""

from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass
from itertools import count

# Terms


@dataclass(frozen=True)
class Var:
    """First-order variable."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    """Constant symbol occurrence."""

    name: str

    def __str__(self) -> str:
        return self.name


Term = Var | Const


# Formulas


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        from homclosure.utils.formula_printer import FormulaPrinter

        return FormulaPrinter.to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    terms: tuple[Term, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    items: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    items: tuple[Formula, ...]


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class ExistsSO(Formula):
    """Second-order existential quantifier over a relation of the given arity."""

    pred: str
    arity: int
    body: Formula


@dataclass(frozen=True)
class ForallSO(Formula):
    pred: str
    arity: int
    body: Formula


@dataclass(frozen=True)
class ExistsFinSO(Formula):
    """Existential quantifier over finite relations."""

    pred: str
    arity: int
    body: Formula


@dataclass(frozen=True)
class LfpDef:
    """One predicate of a simultaneous fixpoint block: ``name(params) := body``."""

    name: str
    params: tuple[str, ...]
    body: Formula

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Lfp(Formula):
    """Simultaneous least fixpoint of ``defs`` applied to ``goal(args)``."""

    defs: tuple[LfpDef, ...]
    goal: str
    args: tuple[Term, ...]


QUANTIFIERS = (Exists, Forall)
SO_QUANTIFIERS = (ExistsSO, ForallSO, ExistsFinSO)


# Smart constructors


def conj(*items: Formula | Iterable[Formula]) -> Formula:
    """Flattening conjunction; Top is dropped and Bottom absorbs."""
    flat: list[Formula] = []
    for item in _spread(items):
        if isinstance(item, Top):
            continue
        if isinstance(item, Bottom):
            return Bottom()
        if isinstance(item, And):
            flat.extend(item.items)
        else:
            flat.append(item)
    if not flat:
        return Top()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(*items: Formula | Iterable[Formula]) -> Formula:
    """Flattening disjunction; Bottom is dropped and Top absorbs."""
    flat: list[Formula] = []
    for item in _spread(items):
        if isinstance(item, Bottom):
            continue
        if isinstance(item, Top):
            return Top()
        if isinstance(item, Or):
            flat.extend(item.items)
        else:
            flat.append(item)
    if not flat:
        return Bottom()
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def _spread(items: tuple[Formula | Iterable[Formula], ...]) -> Iterator[Formula]:
    for item in items:
        if isinstance(item, Formula):
            yield item
        else:
            yield from item


def neg(phi: Formula) -> Formula:
    """Negation folding the constants and double negation."""
    if isinstance(phi, Top):
        return Bottom()
    if isinstance(phi, Bottom):
        return Top()
    if isinstance(phi, Not):
        return phi.body
    return Not(phi)


def implies(premise: Formula, conclusion: Formula) -> Formula:
    return Or((Not(premise), conclusion))


def iff(left: Formula, right: Formula) -> Formula:
    return And((implies(left, right), implies(right, left)))


def exists_many(variables: Iterable[str], body: Formula) -> Formula:
    for var in reversed(list(variables)):
        body = Exists(var, body)
    return body


def forall_many(variables: Iterable[str], body: Formula) -> Formula:
    for var in reversed(list(variables)):
        body = Forall(var, body)
    return body


def atom(pred: str, *names: str | Term) -> Atom:
    """Build an atom; plain strings become variables."""
    return Atom(pred, tuple(Var(n) if isinstance(n, str) else n for n in names))


# Traversal


def children(phi: Formula) -> tuple[Formula, ...]:
    if isinstance(phi, (And, Or)):
        return phi.items
    if isinstance(phi, (Not, Exists, Forall, ExistsSO, ForallSO, ExistsFinSO)):
        return (phi.body,)
    if isinstance(phi, Lfp):
        return tuple(d.body for d in phi.defs)
    return ()


def subformulas(phi: Formula) -> Iterator[Formula]:
    """Pre-order walk over all subformulas, phi included."""
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def size(phi: Formula) -> int:
    """Number of AST nodes."""
    return sum(1 for _ in subformulas(phi))


def is_first_order(phi: Formula) -> bool:
    return not any(isinstance(n, (*SO_QUANTIFIERS, Lfp)) for n in subformulas(phi))


def has_equality(phi: Formula) -> bool:
    return any(isinstance(n, Eq) for n in subformulas(phi))


def term_vars(terms: Iterable[Term]) -> set[str]:
    return {t.name for t in terms if isinstance(t, Var)}


def free_variables(phi: Formula) -> frozenset[str]:
    """Free first-order variables of phi."""
    if isinstance(phi, Atom):
        return frozenset(term_vars(phi.terms))
    if isinstance(phi, Eq):
        return frozenset(term_vars((phi.left, phi.right)))
    if isinstance(phi, (Exists, Forall)):
        return free_variables(phi.body) - {phi.var}
    if isinstance(phi, Lfp):
        result = set(term_vars(phi.args))
        for d in phi.defs:
            result |= free_variables(d.body) - set(d.params)
        return frozenset(result)
    result_set: set[str] = set()
    for child in children(phi):
        result_set |= free_variables(child)
    return frozenset(result_set)


def is_sentence(phi: Formula) -> bool:
    return not free_variables(phi)


def constants_of(phi: Formula) -> set[str]:
    result: set[str] = set()
    for node in subformulas(phi):
        terms: tuple[Term, ...] = ()
        if isinstance(node, Atom):
            terms = node.terms
        elif isinstance(node, Eq):
            terms = (node.left, node.right)
        elif isinstance(node, Lfp):
            terms = node.args
        result |= {t.name for t in terms if isinstance(t, Const)}
    return result


def predicates_of(phi: Formula) -> set[str]:
    """Predicate names occurring in atoms (bound SO/Lfp names included)."""
    return {n.pred for n in subformulas(phi) if isinstance(n, Atom)}


def variable_names(phi: Formula) -> set[str]:
    """All variable names, bound or free."""
    names: set[str] = set()
    for node in subformulas(phi):
        if isinstance(node, (Exists, Forall)):
            names.add(node.var)
        elif isinstance(node, Atom):
            names |= term_vars(node.terms)
        elif isinstance(node, Eq):
            names |= term_vars((node.left, node.right))
        elif isinstance(node, Lfp):
            names |= term_vars(node.args)
            for d in node.defs:
                names |= set(d.params)
    return names


class FreshNames:
    """Generator of variable names avoiding a given set."""

    def __init__(self, avoid: Iterable[str] = (), prefix: str = "v") -> None:
        self._avoid = set(avoid)
        self._prefix = prefix
        self._counter = count(1)

    def __call__(self, hint: str | None = None) -> str:
        base = hint or self._prefix
        if base not in self._avoid:
            self._avoid.add(base)
            return base
        while True:
            name = f"{base}{next(self._counter)}"
            if name not in self._avoid:
                self._avoid.add(name)
                return name


# Rewriting


def substitute(phi: Formula, mapping: dict[str, Term]) -> Formula:
    """
    Capture-avoiding substitution of free variables by terms.

    Bound variables that would capture a substituted term are renamed.
    """
    if not mapping:
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(_sub_term(t, mapping) for t in phi.terms))
    if isinstance(phi, Eq):
        return Eq(_sub_term(phi.left, mapping), _sub_term(phi.right, mapping))
    if isinstance(phi, (Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return Not(substitute(phi.body, mapping))
    if isinstance(phi, And):
        return And(tuple(substitute(c, mapping) for c in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(substitute(c, mapping) for c in phi.items))
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        if not inner:
            return phi
        incoming = term_vars(inner.values())
        var = phi.var
        if var in incoming:
            fresh = FreshNames(incoming | variable_names(phi.body) | set(inner))(var)
            inner[var] = Var(fresh)
            var = fresh
        return type(phi)(var, substitute(phi.body, inner))
    if isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        return type(phi)(phi.pred, phi.arity, substitute(phi.body, mapping))
    if isinstance(phi, Lfp):
        defs = []
        incoming = term_vars(mapping.values())
        for d in phi.defs:
            inner = {k: v for k, v in mapping.items() if k not in d.params}
            params = d.params
            if set(params) & incoming:
                fresh = FreshNames(incoming | variable_names(d.body) | set(inner))
                renamed = tuple(fresh(p) if p in incoming else p for p in params)
                for old, new in zip(params, renamed, strict=True):
                    if old != new:
                        inner[old] = Var(new)
                params = renamed
            defs.append(LfpDef(d.name, params, substitute(d.body, inner)))
        return Lfp(tuple(defs), phi.goal, tuple(_sub_term(t, mapping) for t in phi.args))
    raise TypeError(f"Unknown formula node: {phi!r}")


def _sub_term(term: Term, mapping: dict[str, Term]) -> Term:
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    return term


def replace_atoms(phi: Formula, fn: Callable[[Atom], Formula | None]) -> Formula:
    """
    Rebuild phi with every atom ``a`` replaced by ``fn(a)`` (kept when None).

    Atoms of predicates bound by an enclosing second-order quantifier or
    fixpoint block are left alone.
    """
    return _replace_atoms(phi, fn, frozenset())


def _replace_atoms(
    phi: Formula, fn: Callable[[Atom], Formula | None], bound: frozenset[str]
) -> Formula:
    if isinstance(phi, Atom):
        if phi.pred in bound:
            return phi
        replacement = fn(phi)
        return phi if replacement is None else replacement
    if isinstance(phi, (Eq, Top, Bottom)):
        return phi
    if isinstance(phi, Not):
        return Not(_replace_atoms(phi.body, fn, bound))
    if isinstance(phi, And):
        return And(tuple(_replace_atoms(c, fn, bound) for c in phi.items))
    if isinstance(phi, Or):
        return Or(tuple(_replace_atoms(c, fn, bound) for c in phi.items))
    if isinstance(phi, (Exists, Forall)):
        return type(phi)(phi.var, _replace_atoms(phi.body, fn, bound))
    if isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
        return type(phi)(phi.pred, phi.arity, _replace_atoms(phi.body, fn, bound | {phi.pred}))
    if isinstance(phi, Lfp):
        inner = bound | {d.name for d in phi.defs}
        defs = tuple(LfpDef(d.name, d.params, _replace_atoms(d.body, fn, inner)) for d in phi.defs)
        return Lfp(defs, phi.goal, phi.args)
    raise TypeError(f"Unknown formula node: {phi!r}")


def rename_predicates(phi: Formula, renaming: dict[str, str]) -> Formula:
    """Rename free predicate occurrences."""
    return replace_atoms(
        phi, lambda a: Atom(renaming[a.pred], a.terms) if a.pred in renaming else None
    )


def rename_constants(phi: Formula, renaming: dict[str, Term]) -> Formula:
    """Replace constant occurrences by terms."""

    def sub(t: Term) -> Term:
        return renaming.get(t.name, t) if isinstance(t, Const) else t

    def walk(node: Formula) -> Formula:
        if isinstance(node, Atom):
            return Atom(node.pred, tuple(sub(t) for t in node.terms))
        if isinstance(node, Eq):
            return Eq(sub(node.left), sub(node.right))
        if isinstance(node, (Top, Bottom)):
            return node
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, And):
            return And(tuple(walk(c) for c in node.items))
        if isinstance(node, Or):
            return Or(tuple(walk(c) for c in node.items))
        if isinstance(node, (Exists, Forall)):
            return type(node)(node.var, walk(node.body))
        if isinstance(node, (ExistsSO, ForallSO, ExistsFinSO)):
            return type(node)(node.pred, node.arity, walk(node.body))
        if isinstance(node, Lfp):
            defs = tuple(LfpDef(d.name, d.params, walk(d.body)) for d in node.defs)
            return Lfp(defs, node.goal, tuple(sub(t) for t in node.args))
        raise TypeError(f"Unknown formula node: {node!r}")

    return walk(phi)
