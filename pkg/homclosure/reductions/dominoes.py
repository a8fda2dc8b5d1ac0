"""Margin-constrained domino systems and bounded tiling searches."""

import logging
import re
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from itertools import product
from typing import Any

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.exceptions import BudgetExceededError, ReductionError

logger = logging.getLogger(__name__)

TILE_NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_]*$")

Tile = str
Tiling = tuple[tuple[Tile, ...], ...]
"""Rows of tiles, ``tiling[y][x]``; row 0 is the bottom margin, column 0 the left one"""


@dataclass(frozen=True)
class DominoSystem:
    """
    Tiles with bottom and left margin sets and horizontal/vertical compatibility.

    ``(a, b)`` in ``horizontal`` allows ``b`` directly right of ``a``;
    ``(a, b)`` in ``vertical`` allows ``b`` directly above ``a``.
    """

    tiles: tuple[Tile, ...]
    bottom: frozenset[Tile] = frozenset()
    left: frozenset[Tile] = frozenset()
    horizontal: frozenset[tuple[Tile, Tile]] = frozenset()
    vertical: frozenset[tuple[Tile, Tile]] = frozenset()

    _h_succ: dict[Tile, tuple[Tile, ...]] = field(
        init=False, repr=False, compare=False, hash=False
    )
    _v_succ: dict[Tile, tuple[Tile, ...]] = field(
        init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self) -> None:
        errors = []
        if not self.tiles:
            errors.append("Domino system needs at least one tile")
        if len(set(self.tiles)) != len(self.tiles):
            errors.append("Duplicate tile names")
        for tile in self.tiles:
            if not TILE_NAME_PATTERN.match(tile):
                errors.append(f"Invalid tile name: {tile!r}")
        known = set(self.tiles)
        for label, subset in (("B", self.bottom), ("L", self.left)):
            for tile in sorted(subset - known):
                errors.append(f"{label} mentions unknown tile {tile!r}")
        for label, pairs in (("H", self.horizontal), ("V", self.vertical)):
            for a, b in sorted(pairs):
                if a not in known or b not in known:
                    errors.append(f"{label} pair ({a!r}, {b!r}) mentions an unknown tile")
        if errors:
            raise ReductionError("\n".join(errors))

        object.__setattr__(self, "_h_succ", _successors(self.tiles, self.horizontal))
        object.__setattr__(self, "_v_succ", _successors(self.tiles, self.vertical))

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DominoSystem":
        """
        Decode a ``{"tiles", "B", "L", "H", "V"}`` record.

        Raises:
            ReductionError: If the record is malformed
        """
        if not isinstance(data, Mapping):
            raise ReductionError("Domino record must be a JSON object")
        unknown = set(data) - {"tiles", "B", "L", "H", "V"}
        if unknown:
            raise ReductionError(f"Unknown domino record keys: {', '.join(sorted(unknown))}")
        if "tiles" not in data:
            raise ReductionError("Domino record needs a 'tiles' list")
        try:
            return cls(
                tiles=tuple(str(t) for t in data["tiles"]),
                bottom=frozenset(str(t) for t in data.get("B", ())),
                left=frozenset(str(t) for t in data.get("L", ())),
                horizontal=_pairs(data.get("H", ()), "H"),
                vertical=_pairs(data.get("V", ()), "V"),
            )
        except TypeError as e:
            raise ReductionError(f"Malformed domino record: {e}") from e

    def to_dict(self) -> dict[str, Any]:
        return {
            "tiles": list(self.tiles),
            "B": sorted(self.bottom),
            "L": sorted(self.left),
            "H": [list(p) for p in sorted(self.horizontal)],
            "V": [list(p) for p in sorted(self.vertical)],
        }

    @property
    def seeds(self) -> frozenset[Tile]:
        """Tiles allowed in the corner cell."""
        return self.bottom & self.left

    def h_succ(self, tile: Tile) -> tuple[Tile, ...]:
        return self._h_succ[tile]

    def v_succ(self, tile: Tile) -> tuple[Tile, ...]:
        return self._v_succ[tile]

    def meet(self, left: Tile, below: Tile) -> tuple[Tile, ...]:
        """Tiles allowed right of ``left`` and above ``below`` at the same time."""
        above = set(self._v_succ[below])
        return tuple(t for t in self._h_succ[left] if t in above)


def _successors(
    tiles: tuple[Tile, ...], pairs: frozenset[tuple[Tile, Tile]]
) -> dict[Tile, tuple[Tile, ...]]:
    order = {t: i for i, t in enumerate(tiles)}
    result: dict[Tile, list[Tile]] = {t: [] for t in tiles}
    for a, b in pairs:
        if a in result:
            result[a].append(b)
    return {t: tuple(sorted(succ, key=lambda s: order.get(s, 0))) for t, succ in result.items()}


def _pairs(raw: Iterable[Any], label: str) -> frozenset[tuple[Tile, Tile]]:
    pairs = set()
    for item in raw:
        entry = list(item)
        if len(entry) != 2:
            raise ReductionError(f"{label} entries must be pairs, got {entry!r}")
        pairs.add((str(entry[0]), str(entry[1])))
    return frozenset(pairs)


def check_deterministic(dsys: DominoSystem) -> tuple[bool, str | None]:
    """
    Check the four determinism conditions, reporting the first violation.

    1. At most one seed tile lies in both margins.
    2. A bottom tile has at most one horizontal successor, and it is a bottom tile.
    3. A left tile has at most one vertical successor, and it is a left tile.
    4. Each (left neighbour, lower neighbour) pair admits at most one tile.
    """
    if len(dsys.seeds) > 1:
        return False, f"Several seed tiles: {', '.join(sorted(dsys.seeds))}"
    for tile in dsys.tiles:
        if tile in dsys.bottom:
            succ = dsys.h_succ(tile)
            if len(succ) > 1:
                return False, f"Bottom tile {tile} has several horizontal successors"
            if succ and succ[0] not in dsys.bottom:
                return False, f"Horizontal successor {succ[0]} of bottom tile {tile} is not in B"
        if tile in dsys.left:
            succ = dsys.v_succ(tile)
            if len(succ) > 1:
                return False, f"Left tile {tile} has several vertical successors"
            if succ and succ[0] not in dsys.left:
                return False, f"Vertical successor {succ[0]} of left tile {tile} is not in L"
    for left, below in product(dsys.tiles, repeat=2):
        if len(dsys.meet(left, below)) > 1:
            return False, f"Tiles {left} (left) and {below} (below) admit several tiles"
    return True, None


def is_deterministic(dsys: DominoSystem) -> bool:
    return check_deterministic(dsys)[0]


def check_tiling(dsys: DominoSystem, tiling: Tiling, margins: bool = True) -> list[str]:
    """
    Every violated margin or adjacency constraint of a rectangular tiling.

    Returns:
        Problems as messages; empty if the tiling is valid
    """
    problems = []
    if not tiling or not tiling[0]:
        return ["Tiling is empty"]
    width = len(tiling[0])
    if any(len(row) != width for row in tiling):
        return ["Tiling rows have different lengths"]
    known = set(dsys.tiles)
    for y, row in enumerate(tiling):
        for x, tile in enumerate(row):
            if tile not in known:
                problems.append(f"Unknown tile {tile!r} at ({x}, {y})")
                continue
            if margins and y == 0 and tile not in dsys.bottom:
                problems.append(f"Tile {tile} at ({x}, 0) is not a bottom tile")
            if margins and x == 0 and tile not in dsys.left:
                problems.append(f"Tile {tile} at (0, {y}) is not a left tile")
            if x > 0 and (row[x - 1], tile) not in dsys.horizontal:
                problems.append(f"H violated between ({x - 1}, {y}) and ({x}, {y})")
            if y > 0 and (tiling[y - 1][x], tile) not in dsys.vertical:
                problems.append(f"V violated between ({x}, {y - 1}) and ({x}, {y})")
    return problems


@dataclass(frozen=True)
class PeriodicTilingSpec:
    """
    Shape of an ultimately periodic tiling.

    Columns from ``k_init`` on repeat with period ``k_period``; rows from
    ``l_init`` on repeat with period ``l_period``. The tiling is determined
    by its window of ``width`` x ``height`` cells.
    """

    k_init: int
    k_period: int
    l_init: int
    l_period: int

    def __post_init__(self) -> None:
        if self.k_init < 0 or self.l_init < 0:
            raise ValueError("Initial segments must be non-negative")
        if self.k_period < 1 or self.l_period < 1:
            raise ValueError("Periods must be at least 1")

    @property
    def width(self) -> int:
        return self.k_init + self.k_period

    @property
    def height(self) -> int:
        return self.l_init + self.l_period

    def column(self, x: int) -> int:
        """Window column holding the tile of column x of the infinite tiling."""
        if x < self.width:
            return x
        return self.k_init + (x - self.k_init) % self.k_period

    def row(self, y: int) -> int:
        if y < self.height:
            return y
        return self.l_init + (y - self.l_init) % self.l_period

    def to_dict(self) -> dict[str, int]:
        return {
            "k_init": self.k_init,
            "k_period": self.k_period,
            "l_init": self.l_init,
            "l_period": self.l_period,
        }


class _TilingSearch:
    """Row-major backtracking fill of a rectangle, optionally wrapping around."""

    def __init__(
        self,
        dsys: DominoSystem,
        width: int,
        height: int,
        margins: bool,
        wrap: PeriodicTilingSpec | None,
        settings: ToolkitSettings,
    ) -> None:
        self.dsys = dsys
        self.width = width
        self.height = height
        self.margins = margins
        self.wrap = wrap
        self.settings = settings
        self.visited = 0
        self.cells: list[list[Tile]] = [[] for _ in range(height)]

    def run(self) -> Tiling | None:
        if self._fill(0):
            return tuple(tuple(row) for row in self.cells)
        return None

    def _fill(self, index: int) -> bool:
        if index == self.width * self.height:
            return True
        x, y = index % self.width, index // self.width
        for tile in self._candidates(x, y):
            self.visited += 1
            if self.visited > self.settings.max_candidates:
                raise BudgetExceededError("Tiling search exceeded the candidate budget")
            self.cells[y].append(tile)
            if self._fill(index + 1):
                return True
            self.cells[y].pop()
        return False

    def _candidates(self, x: int, y: int) -> Iterable[Tile]:
        dsys = self.dsys
        if x > 0 and y > 0:
            pool: Iterable[Tile] = dsys.meet(self.cells[y][x - 1], self.cells[y - 1][x])
        elif x > 0:
            pool = dsys.h_succ(self.cells[y][x - 1])
        elif y > 0:
            pool = dsys.v_succ(self.cells[y - 1][x])
        else:
            pool = dsys.tiles
        for tile in pool:
            if self.margins and y == 0 and tile not in dsys.bottom:
                continue
            if self.margins and x == 0 and tile not in dsys.left:
                continue
            if self.wrap is not None and not self._wraps(x, y, tile):
                continue
            yield tile

    def _wraps(self, x: int, y: int, tile: Tile) -> bool:
        assert self.wrap is not None
        if x == self.width - 1:
            target = tile if self.wrap.k_init == x else self.cells[y][self.wrap.k_init]
            if (tile, target) not in self.dsys.horizontal:
                return False
        if y == self.height - 1:
            target = tile if self.wrap.l_init == y else self.cells[self.wrap.l_init][x]
            if (tile, target) not in self.dsys.vertical:
                return False
        return True


def bounded_tiling(
    dsys: DominoSystem,
    k: int,
    margins: bool = True,
    settings: ToolkitSettings | None = None,
) -> Tiling | None:
    """
    First k x k tiling in row-major tile order, or None.

    Args:
        dsys: Domino system
        k: Side length, at least 1
        margins: Require bottom and left margin tiles; without margins a
            tiling is exactly a homomorphism from the k x k grid into the
            system's structure
        settings: Search budgets

    Raises:
        ValueError: If k < 1
        BudgetExceededError: If the search visits more than ``max_candidates`` cells
    """
    if k < 1:
        raise ValueError("Tiling side must be at least 1")
    settings = settings or DEFAULT_SETTINGS
    search = _TilingSearch(dsys, k, k, margins, None, settings)
    result = search.run()
    logger.debug("%dx%d tiling search visited %d cells", k, k, search.visited)
    return result


def periodic_specs(settings: ToolkitSettings) -> list[PeriodicTilingSpec]:
    """Candidate shapes within the configured bounds, smallest window first."""
    inits = range(settings.max_periodic_init + 1)
    periods = range(1, settings.max_periodic_period + 1)
    specs = [
        PeriodicTilingSpec(ki, kp, li, lp)
        for ki, kp, li, lp in product(inits, periods, inits, periods)
    ]
    return sorted(specs, key=lambda s: (s.width * s.height, s.k_init, s.k_period, s.l_init))


def periodic_tiling(
    dsys: DominoSystem, settings: ToolkitSettings | None = None
) -> tuple[Tiling, PeriodicTilingSpec] | None:
    """
    Search for an ultimately periodic tiling of the quadrant.

    A window of ``spec.width`` x ``spec.height`` cells is filled so that the
    last column may be followed by column ``k_init`` and the last row by row
    ``l_init``. Repeating the window accordingly tiles the whole quadrant.

    Returns:
        The window and its shape, or None if no shape within the bounds works

    Raises:
        BudgetExceededError: If one window search exceeds ``max_candidates``
    """
    settings = settings or DEFAULT_SETTINGS
    for spec in periodic_specs(settings):
        search = _TilingSearch(dsys, spec.width, spec.height, True, spec, settings)
        window = search.run()
        if window is not None:
            logger.info("Periodic tiling found with %s", spec.to_dict())
            return window, spec
    logger.info("No periodic tiling within the configured bounds")
    return None


def unfold_tiling(window: Tiling, spec: PeriodicTilingSpec, k: int) -> Tiling:
    """The k x k corner of the periodic tiling generated by a window."""
    return tuple(
        tuple(window[spec.row(y)][spec.column(x)] for x in range(k)) for y in range(k)
    )
