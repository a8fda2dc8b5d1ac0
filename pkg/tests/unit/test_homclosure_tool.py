"""Unit tests for HomclosureTool."""

import json

import pytest
from pydantic import ValidationError

from homclosure.config import ToolkitSettings
from homclosure.tools.homclosure_tool import HomclosureInput, HomclosureTool


@pytest.mark.unit
class TestHomclosureTool:
    """Test HomclosureTool functionality."""

    # Initialization Tests

    def test_defaults(self) -> None:
        """Test the tool name and rendered description."""
        tool = HomclosureTool()

        assert tool.name == "homclosure"
        assert tool.args_schema is HomclosureInput
        assert "<homclosure_instructions>" in tool.description
        assert "domain size 3" in tool.description
        assert "sig { P/2; Q/1; }" in tool.description

    def test_bound_in_description(self) -> None:
        """Test that the bound is rendered into the description."""
        tool = HomclosureTool(bound=5)

        assert tool.default_bound == 5
        assert "domain size 5" in tool.description

    def test_bound_from_settings(self) -> None:
        """Test that the settings supply the bound when none is given."""
        tool = HomclosureTool(settings=ToolkitSettings(default_max_size=2))

        assert tool.default_bound == 2

    def test_custom_template(self) -> None:
        """Test a custom description template."""
        tool = HomclosureTool(description_template="Closure tool, bound {bound}")

        assert tool.description == "Closure tool, bound 3"

    # Input Schema Tests

    def test_input_schema(self) -> None:
        """Test that the input schema checks workflow names and bounds."""
        valid = HomclosureInput(workflow="classify", sentence="exists x. x = x")

        assert valid.structure is None
        with pytest.raises(ValidationError):
            HomclosureInput(workflow="solve", sentence="exists x. x = x")  # type: ignore[arg-type]
        with pytest.raises(ValidationError):
            HomclosureInput(workflow="classify", sentence="exists x. x = x", bound=0)

    # Invocation Tests

    def test_invoke_classify(self, phi_infinity: str) -> None:
        """Test classification through invoke."""
        result = HomclosureTool().invoke({"workflow": "classify", "sentence": phi_infinity})
        report = json.loads(result)

        assert report["command"] == "classify"
        assert report["fragments"]["tgd"] is True

    def test_invoke_inhomcl(self, phi_infinity: str) -> None:
        """Test membership with a JSON structure."""
        tool = HomclosureTool(bound=1)
        result = tool.invoke(
            {
                "workflow": "inhomcl",
                "sentence": phi_infinity,
                "structure": '{"domain": [0], "relations": {"P": [[0, 0]]}}',
            }
        )

        assert json.loads(result)["verdict"] == "yes"

    def test_invoke_homclosed(self, phi_exists_p: str) -> None:
        """Test that the call bound overrides the tool bound."""
        result = HomclosureTool().invoke(
            {"workflow": "homclosed", "sentence": phi_exists_p, "bound": 1}
        )
        report = json.loads(result)

        assert report["verdict"] == "yes-at-bound"
        assert report["bound"] == 1

    # Async Tests

    @pytest.mark.asyncio
    async def test_ainvoke_matches_invoke(self, phi_infinity: str) -> None:
        """Test that ainvoke returns the same report as invoke."""
        tool = HomclosureTool(bound=1)
        payload = {"workflow": "classify", "sentence": phi_infinity}

        sync_result = tool.invoke(payload)
        async_result = await tool.ainvoke(payload)

        assert json.loads(async_result) == json.loads(sync_result)

    @pytest.mark.asyncio
    async def test_arun_returns_errors(self) -> None:
        """Test that async calls return errors as text."""
        result = await HomclosureTool()._arun("classify", "forall x. P(x")

        assert result.startswith("Error: ")

    # Error Tests

    def test_parse_error_is_returned(self) -> None:
        """Test that parse errors come back as text."""
        result = HomclosureTool()._run("classify", "forall x. P(x")

        assert result.startswith("Error: ")

    def test_missing_structure_is_returned(self, phi_infinity: str) -> None:
        """Test that a missing structure comes back as text."""
        result = HomclosureTool()._run("inhomcl", phi_infinity)

        assert result == "Error: inhomcl needs a structure"

    def test_fixpoint_homclosed_is_returned(self, cul_de_sac: str) -> None:
        """Test that validation errors come back as text."""
        result = HomclosureTool()._run("homclosed", cul_de_sac)

        assert result == "Error: homclosed needs a first-order sentence"
