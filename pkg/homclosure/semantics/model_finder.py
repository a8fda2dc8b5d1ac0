"""
Bounded finite model finding.

Structures over domains 0..k-1 are enumerated size by size; for each size,
constant assignments come first (in product order) and relation cells are
then fixed one by one in signature order, False before True. The search is
a depth-first walk over partial structures: first-order formulas are
evaluated in three-valued logic on every partial structure, which prunes
subtrees that can no longer satisfy the formula and short-circuits those
that already do.
"""

import logging
from collections.abc import Iterable, Iterator, Mapping, Sequence
from itertools import product

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
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
    constants_of,
    is_first_order,
    predicates_of,
)
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import BudgetExceededError, FormulaValidationError
from homclosure.semantics.evaluator import ModelChecker

logger = logging.getLogger(__name__)

Cell = tuple[str, tuple[Element, ...]]


class PartialStructure:
    """Relation cells that are true, false, or still open."""

    def __init__(
        self,
        domain: Sequence[Element],
        constants: Mapping[str, Element],
        open_cells: set[Cell],
    ) -> None:
        self.domain = domain
        self.constants = constants
        self.true_cells: set[Cell] = set()
        self.open_cells = open_cells

    def cell_value(self, cell: Cell) -> bool | None:
        if cell in self.true_cells:
            return True
        if cell in self.open_cells:
            return None
        return False


def kleene(partial: PartialStructure, phi: Formula, env: dict[str, Element]) -> bool | None:
    """
    Three-valued truth of a first-order formula on a partial structure.

    None means undetermined: some completion makes phi true and some false.
    """
    if isinstance(phi, Atom):
        return partial.cell_value((phi.pred, tuple(_value(partial, t, env) for t in phi.terms)))
    if isinstance(phi, Eq):
        return _value(partial, phi.left, env) == _value(partial, phi.right, env)
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Not):
        inner = kleene(partial, phi.body, env)
        return None if inner is None else not inner
    if isinstance(phi, (And, Or)):
        decisive = isinstance(phi, Or)
        unknown = False
        for item in phi.items:
            value = kleene(partial, item, env)
            if value is None:
                unknown = True
            elif value == decisive:
                return decisive
        return None if unknown else not decisive
    if isinstance(phi, (Exists, Forall)):
        decisive = isinstance(phi, Exists)
        saved = env.get(phi.var)
        unknown = False
        try:
            for a in partial.domain:
                env[phi.var] = a
                value = kleene(partial, phi.body, env)
                if value is None:
                    unknown = True
                elif value == decisive:
                    return decisive
        finally:
            if saved is None:
                env.pop(phi.var, None)
            else:
                env[phi.var] = saved
        return None if unknown else not decisive
    raise FormulaValidationError("Three-valued evaluation needs a first-order formula")


def _value(partial: PartialStructure, term: Term, env: dict[str, Element]) -> Element:
    if isinstance(term, Const):
        return partial.constants[term.name]
    try:
        return env[term.name]
    except KeyError:
        raise FormulaValidationError(f"Unbound variable: {term.name}") from None


class ModelSearch:
    """
    Depth-first model enumeration for one formula over one signature.

    Every visited search node counts against ``max_candidates``.
    """

    def __init__(
        self, phi: Formula, sig: Signature, settings: ToolkitSettings | None = None
    ) -> None:
        self.phi = phi
        self.sig = sig
        self.settings = settings or DEFAULT_SETTINGS
        self.first_order = is_first_order(phi)
        self.visited = 0

    def _tick(self) -> None:
        self.visited += 1
        if self.visited > self.settings.max_candidates:
            raise BudgetExceededError(
                f"Model search exceeded {self.settings.max_candidates} candidates"
            )

    def models_of_size(
        self,
        size: int,
        constant_choices: Mapping[str, Sequence[Element]] | None = None,
        cells: Iterable[Cell] | None = None,
    ) -> Iterator[Structure]:
        """
        Models with domain 0..size-1.

        Args:
            size: Domain size
            constant_choices: Allowed interpretations per constant (default: all)
            cells: Relation cells allowed to be true, in search order
                (default: every cell, in signature order)
        """
        domain = tuple(range(size))
        if cells is None:
            cell_list = [
                (name, tup)
                for name, arity in self.sig.predicates
                for tup in product(domain, repeat=arity)
            ]
        else:
            cell_list = list(cells)
        choices = [
            (constant_choices or {}).get(c, domain) for c in self.sig.constants
        ]
        for assignment in product(*choices):
            constants = dict(zip(self.sig.constants, assignment, strict=True))
            partial = PartialStructure(domain, constants, set(cell_list))
            yield from self._dfs(partial, cell_list, 0)

    def _dfs(
        self, partial: PartialStructure, cells: list[Cell], index: int
    ) -> Iterator[Structure]:
        self._tick()
        if self.first_order:
            value = kleene(partial, self.phi, {})
            if value is False:
                return
            if value is True:
                yield from self._completions(partial, cells, index)
                return
        if index == len(cells):
            structure = self._materialize(partial)
            if self.first_order or ModelChecker(structure, self.settings).holds(self.phi):
                yield structure
            return
        cell = cells[index]
        partial.open_cells.discard(cell)
        yield from self._dfs(partial, cells, index + 1)
        partial.true_cells.add(cell)
        yield from self._dfs(partial, cells, index + 1)
        partial.true_cells.discard(cell)
        partial.open_cells.add(cell)

    def _completions(
        self, partial: PartialStructure, cells: list[Cell], index: int
    ) -> Iterator[Structure]:
        rest = cells[index:]
        for bits in product((False, True), repeat=len(rest)):
            self._tick()
            added = [cell for cell, bit in zip(rest, bits, strict=True) if bit]
            partial.true_cells.update(added)
            yield self._materialize(partial)
            partial.true_cells.difference_update(added)

    def _materialize(self, partial: PartialStructure) -> Structure:
        relations: dict[str, list[tuple[Element, ...]]] = {n: [] for n, _ in self.sig.predicates}
        for name, tup in partial.true_cells:
            relations[name].append(tup)
        return Structure.build(self.sig, partial.domain, dict(partial.constants), relations)


def relevant_signature(phi: Formula, sig: Signature) -> Signature:
    """Symbols of sig that occur in phi, in declaration order."""
    preds = predicates_of(phi)
    consts = constants_of(phi)
    return Signature(
        tuple(p for p in sig.predicates if p[0] in preds),
        tuple(c for c in sig.constants if c in consts),
    )


def bounded_models(
    phi: Formula, sig: Signature, max_size: int, settings: ToolkitSettings | None = None
) -> Iterator[Structure]:
    """
    All models of phi over sig with at most max_size elements, in canonical order.

    Raises:
        BudgetExceededError: If the search visits too many candidates
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    search = ModelSearch(phi, sig, settings)
    for size in range(1, max_size + 1):
        logger.debug("Searching models of size %d", size)
        yield from search.models_of_size(size)


def bounded_sat(
    phi: Formula, sig: Signature, max_size: int, settings: ToolkitSettings | None = None
) -> Structure | None:
    """
    First model of phi up to max_size, or None (no model up to the bound only).

    The search runs over the symbols phi mentions; the rest are interpreted
    by the first element and the empty relation, which is exactly the first
    model of the full canonical enumeration.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    reduced = relevant_signature(phi, sig)
    search = ModelSearch(phi, reduced, settings)
    for size in range(1, max_size + 1):
        model = next(search.models_of_size(size), None)
        if model is not None:
            logger.debug("Model of size %d found after %d nodes", size, search.visited)
            return extend_to(model, sig)
    logger.debug("No model up to size %d after %d nodes", max_size, search.visited)
    return None


def extend_to(structure: Structure, sig: Signature) -> Structure:
    """Interpret the symbols of sig missing from structure by element 0 and empty relations."""
    constants = {c: structure.constants.get(c, structure.domain[0]) for c in sig.constants}
    relations = {n: structure.relations.get(n, frozenset()) for n, _ in sig.predicates}
    return Structure.build(sig, structure.domain, constants, relations)
