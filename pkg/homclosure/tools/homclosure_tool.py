"""LangChain tool for homomorphism-closure workflows."""

from typing import Any, Literal

from langchain_core.callbacks import CallbackManagerForToolRun
from langchain_core.tools import BaseTool
from pydantic import BaseModel, Field

from homclosure.config import DEFAULT_SETTINGS, ToolkitSettings
from homclosure.exceptions import LogicError
from homclosure.workflows import run_workflow

# Default tool description template
DEFAULT_TOOL_DESCRIPTION_TEMPLATE = """Decide homomorphism-closure questions about first-order sentences

<homclosure_instructions>
Workflows:
- classify: report the fragments a sentence belongs to (TGD, MDTGD, GNFO, GFO, FO2, ...)
- homclosed: decide whether a sentence is closed under homomorphisms into finite structures
- inhomcl: decide whether a finite structure is a homomorphic image of a finite model

Sentences use the text syntax, optionally preceded by a header such as
`sig {{ P/2; Q/1; }}`. Structures are single-line JSON objects:
{{"domain": [0, 1], "relations": {{"P": [[0, 1]]}}}}.

Searches stop at domain size {bound}; a `no-at-bound` or `yes-at-bound`
verdict only covers models up to that size.
</homclosure_instructions>
"""


class HomclosureInput(BaseModel):
    """Input schema for the homclosure tool."""

    workflow: Literal["classify", "homclosed", "inhomcl"] = Field(
        description='Workflow to run: "classify", "homclosed" or "inhomcl"'
    )
    sentence: str = Field(description='Sentence text, e.g. "sig { P/2; } forall x exists y. P(x,y)"')
    structure: str | None = Field(
        default=None, description="Target structure as JSON (inhomcl only)"
    )
    bound: int | None = Field(default=None, ge=1, description="Override the domain size bound")


class HomclosureTool(BaseTool):
    """
    LangChain tool exposing the decision workflows to agents.

    The agent passes a workflow name, a sentence and (for ``inhomcl``) a
    structure, and receives the JSON report of the workflow. Errors come
    back as text so the agent can correct its input.

    Examples:
        >>> tool = HomclosureTool()
        >>> tool.invoke({"workflow": "classify", "sentence": "sig { P/2; } exists x. P(x,x)"})

        >>> # Larger searches
        >>> tool = HomclosureTool(bound=4)
    """

    name: str = "homclosure"
    description: str = ""
    args_schema: type[BaseModel] = HomclosureInput

    bound: int | None = Field(
        default=None, description="Default domain size bound; falls back to the settings"
    )
    settings: ToolkitSettings = Field(default=DEFAULT_SETTINGS)
    description_template: str | None = Field(
        default=None,
        description="Optional custom template for tool description. Use {bound} placeholder.",
    )

    def __init__(self, **kwargs: Any) -> None:
        """Initialize the tool and render its description."""
        super().__init__(**kwargs)
        template = self.description_template or DEFAULT_TOOL_DESCRIPTION_TEMPLATE
        self.description = template.format(bound=self.default_bound)

    @property
    def default_bound(self) -> int:
        return self.bound or self.settings.default_max_size

    def _run(
        self,
        workflow: str,
        sentence: str,
        structure: str | None = None,
        bound: int | None = None,
        run_manager: CallbackManagerForToolRun | None = None,
    ) -> str:
        """
        Run a workflow and return its report.

        Args:
            workflow: classify, homclosed or inhomcl
            sentence: Sentence text with optional signature header
            structure: Structure JSON for inhomcl
            bound: Domain size bound for this call
            run_manager: Callback manager (optional)

        Returns:
            Report as JSON, or an error message
        """
        try:
            report = run_workflow(
                workflow, sentence, structure, bound or self.default_bound, self.settings
            )
        except (LogicError, ValueError) as e:
            return f"Error: {e}"
        return report.to_json()
