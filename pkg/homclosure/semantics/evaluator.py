"""Model checking for first-order, second-order and fixpoint formulas."""

import logging
from collections.abc import Mapping
from itertools import product

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
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
    Term,
    Top,
    free_variables,
    is_first_order,
)
from homclosure.core.structure import Element, Structure
from homclosure.core.validator import FormulaValidator
from homclosure.exceptions import (
    BudgetExceededError,
    FormulaValidationError,
    UnknownSymbolError,
)

logger = logging.getLogger(__name__)

Env = Mapping[str, Element]


class ModelChecker:
    """
    Evaluates formulas on one finite structure.

    Second-order quantifiers are evaluated by enumerating every relation of
    the quantified arity (bounded by ``max_so_cells``); finite second-order
    quantifiers behave like plain ones on finite structures. Fixpoint blocks
    are computed by simultaneous bottom-up iteration from the empty relations.
    """

    def __init__(self, structure: Structure, settings: ToolkitSettings | None = None) -> None:
        self.structure = structure
        self.settings = settings or DEFAULT_SETTINGS
        self.domain = structure.domain
        self.relations: dict[str, frozenset[tuple[Element, ...]]] = dict(structure.relations)
        self._positivity_checked: set[int] = set()
        self._lfp_cache: dict[tuple[int, tuple[tuple[str, Element], ...]], dict[str, frozenset[tuple[Element, ...]]]] = {}

    def holds(self, phi: Formula, env: Env | None = None) -> bool:
        """
        Truth value of phi under env.

        Raises:
            FormulaValidationError: On unbound variables or non-positive fixpoints
            UnknownSymbolError: On undeclared symbols
            BudgetExceededError: If a second-order quantifier is too large
        """
        return self._eval(phi, dict(env or {}))

    def term_value(self, term: Term, env: Env) -> Element:
        if isinstance(term, Const):
            try:
                return self.structure.constants[term.name]
            except KeyError:
                raise UnknownSymbolError(f"Unknown constant: {term.name}") from None
        try:
            return env[term.name]
        except KeyError:
            raise FormulaValidationError(f"Unbound variable: {term.name}") from None

    def _relation(self, name: str) -> frozenset[tuple[Element, ...]]:
        try:
            return self.relations[name]
        except KeyError:
            raise UnknownSymbolError(f"Unknown predicate: {name}") from None

    def _eval(self, phi: Formula, env: dict[str, Element]) -> bool:
        if isinstance(phi, Atom):
            return tuple(self.term_value(t, env) for t in phi.terms) in self._relation(phi.pred)
        if isinstance(phi, Eq):
            return self.term_value(phi.left, env) == self.term_value(phi.right, env)
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bottom):
            return False
        if isinstance(phi, Not):
            return not self._eval(phi.body, env)
        if isinstance(phi, And):
            return all(self._eval(item, env) for item in phi.items)
        if isinstance(phi, Or):
            return any(self._eval(item, env) for item in phi.items)
        if isinstance(phi, (Exists, Forall)):
            saved = env.get(phi.var)
            quantifier = any if isinstance(phi, Exists) else all
            try:
                return quantifier(self._bind_eval(phi.body, env, phi.var, a) for a in self.domain)
            finally:
                if saved is None:
                    env.pop(phi.var, None)
                else:
                    env[phi.var] = saved
        if isinstance(phi, (ExistsSO, ForallSO, ExistsFinSO)):
            return self._eval_so(phi, env)
        if isinstance(phi, Lfp):
            return self._eval_lfp(phi, env)
        raise FormulaValidationError(f"Unknown formula node: {phi!r}")

    def _bind_eval(self, body: Formula, env: dict[str, Element], var: str, value: Element) -> bool:
        env[var] = value
        return self._eval(body, env)

    def _eval_so(self, phi: ExistsSO | ForallSO | ExistsFinSO, env: dict[str, Element]) -> bool:
        cells = list(product(self.domain, repeat=phi.arity))
        if len(cells) > self.settings.max_so_cells:
            raise BudgetExceededError(
                f"Second-order quantifier over {phi.pred}/{phi.arity} needs {len(cells)} cells, "
                f"budget is {self.settings.max_so_cells}"
            )
        existential = not isinstance(phi, ForallSO)
        saved = self.relations.get(phi.pred)
        try:
            for mask in range(1 << len(cells)):
                self.relations[phi.pred] = frozenset(
                    cell for i, cell in enumerate(cells) if mask >> i & 1
                )
                self._lfp_cache.clear()
                if self._eval(phi.body, env) == existential:
                    return existential
            return not existential
        finally:
            if saved is None:
                self.relations.pop(phi.pred, None)
            else:
                self.relations[phi.pred] = saved
            self._lfp_cache.clear()

    def _eval_lfp(self, phi: Lfp, env: dict[str, Element]) -> bool:
        if id(phi.defs) not in self._positivity_checked:
            FormulaValidator.check_positive(And(tuple(d.body for d in phi.defs)), {d.name for d in phi.defs})
            self._positivity_checked.add(id(phi.defs))
        if phi.goal not in {d.name for d in phi.defs}:
            raise UnknownSymbolError(f"Unknown fixpoint goal: {phi.goal}")

        free = sorted(
            set().union(*(free_variables(d.body) - set(d.params) for d in phi.defs))
        )
        key = (id(phi.defs), tuple((v, self.term_value_var(v, env)) for v in free))
        fixpoint = self._lfp_cache.get(key)
        if fixpoint is None:
            fixpoint = self.least_fixpoint(phi.defs, {v: env[v] for v in free})
            self._lfp_cache[key] = fixpoint
        args = tuple(self.term_value(t, env) for t in phi.args)
        return args in fixpoint[phi.goal]

    def term_value_var(self, name: str, env: Env) -> Element:
        try:
            return env[name]
        except KeyError:
            raise FormulaValidationError(f"Unbound variable: {name}") from None

    def least_fixpoint(
        self, defs: tuple[LfpDef, ...], env: Env
    ) -> dict[str, frozenset[tuple[Element, ...]]]:
        """
        Simultaneous least fixpoint of a definition block.

        Iterates from the empty relations; each round re-evaluates every body
        against the previous stage, so stages grow monotonically and the loop
        stops after at most the total number of cells.
        """
        names = [d.name for d in defs]
        saved = {name: self.relations.get(name) for name in names}
        stage: dict[str, frozenset[tuple[Element, ...]]] = {name: frozenset() for name in names}
        rounds = 0
        try:
            while True:
                rounds += 1
                for name in names:
                    self.relations[name] = stage[name]
                self._lfp_cache.clear()
                new_stage = {}
                for d in defs:
                    local = dict(env)
                    tuples = set()
                    for tup in product(self.domain, repeat=d.arity):
                        local.update(zip(d.params, tup, strict=True))
                        if self._eval(d.body, local):
                            tuples.add(tup)
                    new_stage[d.name] = frozenset(tuples)
                if new_stage == stage:
                    break
                stage = new_stage
        finally:
            for name, value in saved.items():
                if value is None:
                    self.relations.pop(name, None)
                else:
                    self.relations[name] = value
            self._lfp_cache.clear()
        logger.debug("Fixpoint of %s reached after %d rounds", names, rounds)
        return stage


def eval_fo(structure: Structure, phi: Formula, env: Env | None = None) -> bool:
    """
    First-order truth value.

    Raises:
        FormulaValidationError: If phi is not first-order or a variable is unbound
    """
    if not is_first_order(phi):
        raise FormulaValidationError("eval_fo needs a first-order formula")
    return ModelChecker(structure).holds(phi, env)


def eval_so(
    structure: Structure, phi: Formula, settings: ToolkitSettings | None = None
) -> bool:
    """Truth value of a second-order sentence by relation enumeration."""
    return ModelChecker(structure, settings).holds(phi)


def eval_lfp(structure: Structure, phi: Formula) -> bool:
    """Truth value of a sentence with fixpoint blocks."""
    return ModelChecker(structure).holds(phi)


def evaluate(
    structure: Structure,
    phi: Formula,
    env: Env | None = None,
    settings: ToolkitSettings | None = None,
) -> bool:
    """Truth value of any supported formula."""
    return ModelChecker(structure, settings).holds(phi, env)
