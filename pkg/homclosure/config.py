"""Toolkit settings: search budgets and logging defaults."""

from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from homclosure.exceptions import LoadError


class ToolkitSettings(BaseModel):
    """
    Budgets shared by every bounded search in the toolkit.

    The decision procedures are exponential; the budgets keep them at desk
    scale and turn runaway searches into explicit ``BudgetExceededError``.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    max_so_cells: int = Field(
        default=24,
        ge=0,
        description="Maximum number of relation cells enumerated per second-order quantifier",
    )
    max_candidates: int = Field(
        default=10_000_000,
        ge=1,
        description="Maximum number of search nodes visited by the bounded model finder",
    )
    default_max_size: int = Field(
        default=3, ge=1, description="Default domain size bound for model searches"
    )
    max_periodic_init: int = Field(
        default=4, ge=0, description="Largest initial segment tried by the periodic tiling search"
    )
    max_periodic_period: int = Field(
        default=4, ge=1, description="Largest period tried by the periodic tiling search"
    )
    max_fallback_candidates: int = Field(
        default=200_000,
        ge=1,
        description="Budget for the type-assignment search behind non-union-closed capture conjuncts",
    )
    log_level: str = Field(default="WARNING", description="Logging level used by the CLI")


DEFAULT_SETTINGS = ToolkitSettings()


def load_settings(path: Path) -> ToolkitSettings:
    """
    Load settings from a YAML mapping.

    An empty file yields the defaults.

    Args:
        path: Path to the YAML settings file

    Returns:
        Validated settings

    Raises:
        LoadError: If the file is missing, is not a mapping, or holds invalid values
    """
    if not path.exists():
        raise LoadError(f"Settings file not found: {path}")

    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise LoadError(f"Settings file must contain a mapping: {path}")
        return ToolkitSettings(**data)
    except LoadError:
        raise
    except (yaml.YAMLError, ValidationError) as e:
        raise LoadError(f"Failed to load settings from {path}: {e}") from e
