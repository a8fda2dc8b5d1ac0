from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings, load_settings
from homclosure.core.loader import Loader, parse_sentence
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.tools.homclosure_tool import HomclosureTool
from homclosure.workflows import WorkflowReport, run_workflow

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_SETTINGS",
    "HomclosureTool",
    "Loader",
    "Signature",
    "Structure",
    "ToolkitSettings",
    "WorkflowReport",
    "load_settings",
    "parse_sentence",
    "run_workflow",
]
