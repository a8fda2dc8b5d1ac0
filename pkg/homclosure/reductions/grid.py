"""Grid sentences and structures, and the tiling sentences of domino systems."""

import logging

from homclosure.core.formula import Formula, atom, conj, disj, exists_many, forall_many, implies
from homclosure.core.signature import Signature
from homclosure.core.structure import Element, Structure
from homclosure.exceptions import ReductionError
from homclosure.reductions.dominoes import (
    DominoSystem,
    PeriodicTilingSpec,
    Tile,
    Tiling,
    check_deterministic,
)

logger = logging.getLogger(__name__)

HORIZONTAL = "H"
VERTICAL = "V"
EMPTY_TILE_PREDICATE = "Tempty"

GRID_SIGNATURE = Signature.build({HORIZONTAL: 2, VERTICAL: 2})


def tile_predicate(tile: Tile | None) -> str:
    """Unary predicate marking a tile; None stands for the empty tile set."""
    return EMPTY_TILE_PREDICATE if tile is None else f"T_{tile}"


def tiling_signature(dsys: DominoSystem) -> Signature:
    return GRID_SIGNATURE.with_predicates(
        [(tile_predicate(None), 1)] + [(tile_predicate(t), 1) for t in dsys.tiles]
    )


def grid_sentence() -> Formula:
    """
    Every element has a right and an upper neighbour, and squares close.

    ``forall x exists y H(x,y)``, ``forall x exists y V(x,y)`` and
    ``forall x y z v (H(x,y) & V(x,z) & V(y,v) -> H(z,v))``.
    """
    return conj(
        forall_many(["x"], exists_many(["y"], atom(HORIZONTAL, "x", "y"))),
        forall_many(["x"], exists_many(["y"], atom(VERTICAL, "x", "y"))),
        forall_many(
            ["x", "y", "z", "v"],
            implies(
                conj(atom(HORIZONTAL, "x", "y"), atom(VERTICAL, "x", "z"), atom(VERTICAL, "y", "v")),
                atom(HORIZONTAL, "z", "v"),
            ),
        ),
    )


def grid_element(x: int, y: int, width: int) -> Element:
    return x + width * y


def grid_fragment(k: int) -> Structure:
    """
    The k x k corner of the quadrant grid.

    Cell (x, y) is element ``x + k*y``; H links each cell to its right
    neighbour and V to its upper neighbour.

    Raises:
        ValueError: If k < 1
    """
    if k < 1:
        raise ValueError("Grid side must be at least 1")
    cells = [(x, y) for y in range(k) for x in range(k)]
    return Structure.build(
        GRID_SIGNATURE,
        k * k,
        relations={
            HORIZONTAL: [
                (grid_element(x, y, k), grid_element(x + 1, y, k)) for x, y in cells if x + 1 < k
            ],
            VERTICAL: [
                (grid_element(x, y, k), grid_element(x, y + 1, k)) for x, y in cells if y + 1 < k
            ],
        },
    )


def domino_structure(dsys: DominoSystem) -> Structure:
    """
    The system as an {H, V}-structure over its tiles, margins ignored.

    Tile ``dsys.tiles[i]`` is element i.
    """
    index = {t: i for i, t in enumerate(dsys.tiles)}
    return Structure.build(
        GRID_SIGNATURE,
        len(dsys.tiles),
        relations={
            HORIZONTAL: [(index[a], index[b]) for a, b in dsys.horizontal],
            VERTICAL: [(index[a], index[b]) for a, b in dsys.vertical],
        },
    )


def _only(tiles: tuple[Tile, ...] | frozenset[Tile]) -> Tile | None:
    return next(iter(tiles)) if tiles else None


def tiling_rules(dsys: DominoSystem) -> Formula:
    """
    Rules propagating tile predicates through a grid model.

    The predicates name the empty set and singletons only, which suffices
    for deterministic systems: each rule conclusion has at most one tile.

    Raises:
        ReductionError: If the system is not deterministic
    """
    deterministic, violation = check_deterministic(dsys)
    if not deterministic:
        raise ReductionError(f"Tiling sentence needs a deterministic system: {violation}")

    def marked(tile: Tile | None, var: str) -> Formula:
        return atom(tile_predicate(tile), var)

    rules: list[Formula] = [exists_many(["v"], marked(_only(dsys.seeds), "v"))]
    for d in dsys.tiles:
        if d in dsys.left:
            rules.append(
                forall_many(
                    ["x", "y"],
                    implies(
                        conj(marked(d, "x"), atom(VERTICAL, "x", "y")),
                        marked(_only(dsys.v_succ(d)), "y"),
                    ),
                )
            )
        if d in dsys.bottom:
            rules.append(
                forall_many(
                    ["x", "y"],
                    implies(
                        conj(marked(d, "x"), atom(HORIZONTAL, "x", "y")),
                        marked(_only(dsys.h_succ(d)), "y"),
                    ),
                )
            )
    for d in dsys.tiles:
        for e in dsys.tiles:
            rules.append(
                forall_many(
                    ["x", "y", "z"],
                    implies(
                        conj(
                            marked(d, "x"),
                            atom(HORIZONTAL, "x", "z"),
                            marked(e, "y"),
                            atom(VERTICAL, "y", "z"),
                        ),
                        marked(_only(dsys.meet(d, e)), "z"),
                    ),
                )
            )
    for i, d in enumerate(dsys.tiles):
        for e in dsys.tiles[i + 1 :]:
            rules.append(
                forall_many(["x"], implies(conj(marked(d, "x"), marked(e, "x")), marked(None, "x")))
            )
    return conj(rules)


def tiling_sentence(dsys: DominoSystem) -> Formula:
    """
    TGD sentence whose models are grid models carrying the system's tiling.

    A model with ``Tempty`` empty assigns consistent tiles along the grid
    reachable from the seed.

    Raises:
        ReductionError: If the system is not deterministic
    """
    result = conj(grid_sentence(), tiling_rules(dsys))
    logger.debug("Tiling sentence over %d tiles", len(dsys.tiles))
    return result


def mdtgd_variant(dsys: DominoSystem) -> Formula:
    """
    The tiling sentence or an inconsistency witness.

    Closed under finite-target homomorphisms exactly when the system has no
    ultimately periodic tiling.

    Raises:
        ReductionError: If the system is not deterministic
    """
    return disj(tiling_sentence(dsys), exists_many(["x"], atom(EMPTY_TILE_PREDICATE, "x")))


def periodic_grid_model(spec: PeriodicTilingSpec) -> Structure:
    """
    Finite grid model of the window of a periodic tiling.

    Cell (x, y) of the ``spec.width`` x ``spec.height`` window is element
    ``x + width*y``. The last column's H edges return to column
    ``k_init`` and the last row's V edges to row ``l_init``, so every
    element has exactly one right and one upper neighbour.
    """
    width, height = spec.width, spec.height
    horizontal = []
    vertical = []
    for y in range(height):
        for x in range(width):
            right = x + 1 if x + 1 < width else spec.k_init
            up = y + 1 if y + 1 < height else spec.l_init
            horizontal.append((grid_element(x, y, width), grid_element(right, y, width)))
            vertical.append((grid_element(x, y, width), grid_element(x, up, width)))
    return Structure.build(
        GRID_SIGNATURE,
        width * height,
        relations={HORIZONTAL: horizontal, VERTICAL: vertical},
    )


def tiled_grid_model(dsys: DominoSystem, window: Tiling, spec: PeriodicTilingSpec) -> Structure:
    """
    Expansion of the periodic grid model by the window's tile predicates.

    For a valid window of a deterministic system this is a model of the
    tiling sentence with ``Tempty`` empty.

    Raises:
        ReductionError: If the window does not have the shape of spec
    """
    if len(window) != spec.height or any(len(row) != spec.width for row in window):
        raise ReductionError("Window shape does not match the periodic tiling spec")
    marks: dict[str, list[tuple[Element]]] = {tile_predicate(None): []}
    marks.update({tile_predicate(t): [] for t in dsys.tiles})
    for y, row in enumerate(window):
        for x, tile in enumerate(row):
            marks[tile_predicate(tile)].append((grid_element(x, y, spec.width),))
    return periodic_grid_model(spec).expand_with(marks, {name: 1 for name in marks})
