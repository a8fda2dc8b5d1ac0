"""Integration tests for end-to-end workflows."""

import json
from collections.abc import Callable
from pathlib import Path

import pytest

from homclosure.capture.builder import build_capture
from homclosure.cli import main
from homclosure.core.loader import Loader, parse_document
from homclosure.core.structure import Structure
from homclosure.semantics.evaluator import evaluate
from homclosure.semantics.model_finder import bounded_sat
from homclosure.transforms.coloring import coloring, coloring_signature, decode_coloring_witness
from homclosure.transforms.spoilers import SpoilerKind, spoiler_construction
from homclosure.utils.serialization import StructureCodec
from homclosure.workflows import cmd_homclosed, cmd_inhomcl

DigraphFactory = Callable[..., Structure]
WriteFile = Callable[[str, str], Path]


@pytest.mark.integration
class TestEndToEnd:
    """Test complete workflows from input files to verified verdicts."""

    def test_membership_from_files(
        self, write_file: WriteFile, phi_infinity: str, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Test complete workflow: write inputs, decide membership, re-check the witness."""
        # Step 1: Write the sentence and a 2-cycle target
        sentence = write_file("successor.txt", phi_infinity)
        target = write_file(
            "cycle.json", '{"domain": [0, 1], "relations": {"P": [[0, 1], [1, 0]]}}\n'
        )

        # Step 2: Run membership from the command line
        code = main(["inhomcl", str(sentence), str(target), "--max-size", "2", "--json"])
        report = json.loads(capsys.readouterr().out)

        # Step 3: Verify verdict and exit code
        assert code == 0
        assert report["verdict"] == "yes"

        # Step 4: Re-check the reported witness independently
        sig, phi = Loader.load_sentence(sentence)
        model = StructureCodec.from_dict(report["model"], sig)
        assert evaluate(model, phi)

    def test_strategies_agree(self, phi_infinity: str, digraph: DigraphFactory) -> None:
        """Test that the labelled and coloring strategies give the same verdicts."""
        _, phi = parse_document(phi_infinity)
        targets = [digraph(1, []), digraph(2, [(0, 1), (1, 1)]), digraph(2, [(0, 1)])]

        for target in targets:
            # Step 1: Decide with both strategies
            labelled = cmd_inhomcl(phi, target, 2, "labelled")
            colored = cmd_inhomcl(phi, target, 2, "coloring")

            # Step 2: Compare verdicts
            assert labelled.verdict == colored.verdict

    def test_coloring_round_trip(self, phi_infinity: str, digraph: DigraphFactory) -> None:
        """Test workflow: color a sentence, solve it, decode the witness."""
        # Step 1: Build the intrinsic coloring for a target with a loop
        _, phi = parse_document(phi_infinity)
        target = digraph(2, [(0, 1), (1, 1)])
        colored = coloring(phi, target, "int")

        # Step 2: Search a model of the colored sentence
        model = bounded_sat(colored, coloring_signature(target), 2)
        assert model is not None

        # Step 3: Decode and check the model and homomorphism
        witness = decode_coloring_witness(model, target)
        assert evaluate(witness.model, phi)
        assert witness.hom.is_valid()

    def test_homclosedness_engines_agree(self, two_elements: str, phi_exists_p: str) -> None:
        """Test that spoiler and brute engines agree on small sentences."""
        for text in (two_elements, phi_exists_p):
            # Step 1: Parse
            sig, phi = parse_document(text)

            # Step 2: Decide with both bounded engines
            spoiler = cmd_homclosed(sig, phi, 2, "spoiler")
            brute = cmd_homclosed(sig, phi, 2, "brute")

            # Step 3: Compare
            assert spoiler.verdict == brute.verdict

    def test_spoiler_construction_to_verified_spoiler(self, phi_infinity: str) -> None:
        """Test workflow: build an injective spoiler sentence, solve it, verify the spoiler."""
        # Step 1: Build the construction
        sig, phi = parse_document(phi_infinity)
        construction = spoiler_construction(phi, sig, SpoilerKind.INJECTIVE)

        # Step 2: Search a model
        model = bounded_sat(construction.formula, construction.sig, 2)
        assert model is not None

        # Step 3: Decode and verify
        spoiler = construction.decode(model)
        spoiler.verify(phi)
        assert evaluate(spoiler.model, phi)
        assert not evaluate(spoiler.non_model, phi)

    def test_capture_agrees_with_membership(
        self, phi_infinity: str, digraph: DigraphFactory
    ) -> None:
        """Test that capture admission matches the bounded membership search."""
        # Step 1: Build the guarded capture
        sig, phi = parse_document(phi_infinity)
        capture = build_capture(phi, sig, "gfo", size_bound=2)

        # Step 2: Compare on small targets
        for edges in ([], [(0, 0)], [(0, 1)], [(0, 1), (1, 0)], [(0, 1), (1, 1)]):
            size = 1 if edges in ([], [(0, 0)]) else 2
            target = digraph(size, edges)
            member = cmd_inhomcl(phi, target, 2).verdict == "yes"
            assert (capture.admits(target) is not None) == member
