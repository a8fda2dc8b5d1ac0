"""Unit tests for the decision workflows."""

import json

import pytest

from homclosure.core.loader import parse_document
from homclosure.core.structure import Structure, bit_predicate
from homclosure.exceptions import FormulaValidationError, FragmentError
from homclosure.reductions.dominoes import DominoSystem
from homclosure.transforms.spoilers import SURVIVOR_PREDICATE
from homclosure.utils.serialization import StructureCodec
from homclosure.workflows import (
    Engine,
    Strategy,
    Verdict,
    WorkflowReport,
    cmd_capture,
    cmd_charcheck,
    cmd_check,
    cmd_classify,
    cmd_emit,
    cmd_hom,
    cmd_homclosed,
    cmd_inhomcl,
    cmd_parse,
    cmd_reduce_3sat,
    cmd_sat,
    cmd_tgd_homclosed,
    cmd_tiling_check,
    cmd_tiling_sentence,
    cmd_tiling_solve,
    emit_construction,
    run_workflow,
)

Record = dict[str, object]


@pytest.mark.unit
class TestWorkflowReport:
    """Tests for WorkflowReport rendering and exit codes."""

    @pytest.mark.parametrize(
        "verdict, code",
        [(None, 0), ("yes", 0), ("yes-at-bound", 0), ("no", 1), ("no-at-bound", 1)],
    )
    def test_exit_codes(self, verdict: Verdict | None, code: int) -> None:
        """Test the exit code of each verdict."""
        report = WorkflowReport("sat", verdict)

        assert report.exit_code == code

    def test_json(self) -> None:
        """Test that details are flattened next to the verdict."""
        report = WorkflowReport("sat", "yes", {"bound": 2})

        assert json.loads(report.to_json()) == {"command": "sat", "verdict": "yes", "bound": 2}

    def test_text(self) -> None:
        """Test the indented text rendering."""
        report = WorkflowReport("hom", "yes", {"hom": {"0": 0}, "bound": 1})

        assert report.to_text() == 'hom: yes\n  bound: 1\n  hom: {"0": 0}'
        assert WorkflowReport("parse").to_text() == "parse"


@pytest.mark.unit
class TestBasicCommands:
    """Tests for parse, classify, check, hom and sat."""

    def test_parse(self, phi_infinity: str) -> None:
        """Test that the printed sentence re-parses to the same formula."""
        sig, phi = parse_document(phi_infinity)
        report = cmd_parse(sig, phi)

        assert report.verdict is None
        assert parse_document(report.details["sentence"]) == (sig, phi)

    def test_classify(self, phi_infinity: str) -> None:
        """Test the fragment report of the successor sentence."""
        sig, phi = parse_document(phi_infinity)
        fragments = cmd_classify(sig, phi).details["fragments"]

        assert fragments["tgd"]
        assert fragments["fo2"]
        assert fragments["prefix"] == "AE"
        assert not fragments["bernays_schonfinkel"]

    def test_check(self, phi_infinity: str, loop: Structure, two_path: Structure) -> None:
        """Test evaluation verdicts."""
        _, phi = parse_document(phi_infinity)

        assert cmd_check(phi, loop).verdict == "yes"
        assert cmd_check(phi, two_path).verdict == "no"

    def test_hom(self, loop: Structure, two_path: Structure) -> None:
        """Test homomorphism search in both directions."""
        found = cmd_hom(two_path, loop, verify=True)

        assert found.verdict == "yes"
        assert "hom" in found.details
        assert cmd_hom(loop, two_path).verdict == "no"

    def test_sat(self, phi_infinity: str, two_elements: str) -> None:
        """Test that bounded search failure is labelled with the bound."""
        sig, phi = parse_document(phi_infinity)
        found = cmd_sat(sig, phi, 1)
        sig, phi = parse_document(two_elements)
        missing = cmd_sat(sig, phi, 1)

        assert found.verdict == "yes"
        assert StructureCodec.from_dict(found.details["model"], sig) is not None
        assert missing.verdict == "no-at-bound"
        assert missing.details == {"bound": 1}


@pytest.mark.unit
class TestEmit:
    """Tests for emit_construction and cmd_emit."""

    def test_relativize_adds_survivor(self, phi_infinity: str) -> None:
        """Test that relativization declares its guard predicate."""
        sig, phi = parse_document(phi_infinity)
        out_sig, _ = emit_construction("relativize", sig, phi)

        assert out_sig.has_predicate(SURVIVOR_PREDICATE)

    def test_tr_n_bits(self, phi_infinity: str) -> None:
        """Test that three labels add two Bit predicates."""
        sig, phi = parse_document(phi_infinity)
        out_sig, _ = emit_construction("tr-n", sig, phi, n=3)

        assert out_sig.has_predicate(bit_predicate(2))
        assert not out_sig.has_predicate(bit_predicate(3))

    def test_coloring_needs_target(self, phi_infinity: str) -> None:
        """Test that colorings refuse to run without a target."""
        sig, phi = parse_document(phi_infinity)
        with pytest.raises(ValueError, match="target"):
            emit_construction("coloring-int", sig, phi)

    def test_unknown_construction(self, phi_infinity: str) -> None:
        """Test that unknown constructions are rejected."""
        sig, phi = parse_document(phi_infinity)
        with pytest.raises(ValueError, match="Unknown construction"):
            emit_construction("cnf", sig, phi)

    def test_emit_report(self, phi_exists_p: str) -> None:
        """Test that emitted sentences are printed and classified."""
        sig, phi = parse_document(phi_exists_p)
        report = cmd_emit("spoiler-injective", sig, phi)

        assert report.details["construction"] == "spoiler-injective"
        assert report.details["sentence"].startswith("sig {")
        assert report.details["fragments"]["first_order"]


@pytest.mark.unit
class TestInHomclosure:
    """Tests for cmd_inhomcl."""

    @pytest.mark.parametrize("strategy", ["labelled", "coloring"])
    def test_loop_is_a_model(self, phi_infinity: str, loop: Structure, strategy: Strategy) -> None:
        """Test that a model witnesses its own membership."""
        _, phi = parse_document(phi_infinity)
        report = cmd_inhomcl(phi, loop, 1, strategy)

        assert report.verdict == "yes"
        assert report.details["model"]["domain"] == [0]

    def test_path_is_not_an_image(self, phi_infinity: str, two_path: Structure) -> None:
        """Test that an acyclic target needs infinite models."""
        _, phi = parse_document(phi_infinity)
        report = cmd_inhomcl(phi, two_path, 2)

        assert report.verdict == "no-at-bound"
        assert report.details == {"bound": 2, "strategy": "labelled"}

    def test_unknown_strategy(self, phi_infinity: str, loop: Structure) -> None:
        """Test that unknown strategies are rejected."""
        _, phi = parse_document(phi_infinity)
        with pytest.raises(ValueError, match="Unknown strategy"):
            cmd_inhomcl(phi, loop, 1, "guess")  # type: ignore[arg-type]


@pytest.mark.unit
class TestHomclosed:
    """Tests for cmd_homclosed and cmd_tgd_homclosed."""

    def test_existential_positive(self, phi_exists_p: str) -> None:
        """Test that an empty spoiler search ends at the bound."""
        sig, phi = parse_document(phi_exists_p)
        report = cmd_homclosed(sig, phi, 2)

        assert report.verdict == "yes-at-bound"
        assert report.details == {"engine": "spoiler", "bound": 2}

    @pytest.mark.parametrize("engine", ["spoiler", "brute"])
    def test_two_elements(self, two_elements: str, engine: Engine) -> None:
        """Test that a found spoiler is a definite no."""
        sig, phi = parse_document(two_elements)
        report = cmd_homclosed(sig, phi, 2, engine)

        assert report.verdict == "no"
        assert "spoiler" in report.details

    def test_tgd_engine_needs_tgd(self, two_elements: str) -> None:
        """Test that the exact engine refuses other sentences."""
        sig, phi = parse_document(two_elements)
        with pytest.raises(FragmentError):
            cmd_homclosed(sig, phi, 2, "tgd")

    def test_tgd_certificate(self) -> None:
        """Test a disconnected TGD decided exactly."""
        sig, phi = parse_document("sig { B/1; } exists z. B(z)")
        report = cmd_tgd_homclosed(sig, phi)

        assert report.command == "tgd-homclosed"
        assert report.verdict == "yes"
        assert "certificate" in report.details

    def test_tgd_spoiler(self, phi_infinity: str) -> None:
        """Test that the successor sentence is refuted exactly."""
        sig, phi = parse_document(phi_infinity)
        report = cmd_tgd_homclosed(sig, phi)

        assert report.verdict == "no"
        assert "spoiler" in report.details

    def test_unknown_engine(self, phi_exists_p: str) -> None:
        """Test that unknown engines are rejected."""
        sig, phi = parse_document(phi_exists_p)
        with pytest.raises(ValueError, match="Unknown engine"):
            cmd_homclosed(sig, phi, 2, "oracle")  # type: ignore[arg-type]


@pytest.mark.unit
class TestCharcheck:
    """Tests for cmd_charcheck."""

    def test_sentence_characterizes_itself(self, phi_exists_p: str) -> None:
        """Test that a homclosed sentence defines its own closure."""
        sig, phi = parse_document(phi_exists_p)
        report = cmd_charcheck(sig, phi, phi, 2)

        assert report.verdict == "yes-at-bound"
        assert {c["result"] for c in report.details["checks"].values()} == {"pass-at-bound"}

    def test_entailment_failure(self, phi_exists_p: str) -> None:
        """Test that a model of phi falsifying psi is a definite failure."""
        sig, phi = parse_document(phi_exists_p)
        _, psi = parse_document("sig { P/1; } forall x. P(x)")
        report = cmd_charcheck(sig, phi, psi, 2)

        assert report.verdict == "no"
        assert report.details["checks"]["entailment"]["result"] == "fail"


@pytest.mark.unit
class TestCaptureCommand:
    """Tests for cmd_capture."""

    def test_without_structures(self, phi_infinity: str) -> None:
        """Test that the capture alone is informational."""
        sig, phi = parse_document(phi_infinity)
        report = cmd_capture(sig, phi, bound=2, lfp=True)

        assert report.verdict is None
        assert "capture" in report.details
        assert "lfp" in report.details

    def test_memberships(self, phi_infinity: str, loop: Structure, two_path: Structure) -> None:
        """Test that one rejected structure makes the verdict bounded."""
        sig, phi = parse_document(phi_infinity)
        report = cmd_capture(sig, phi, bound=2, structures=[loop, two_path], verify=True)

        assert report.verdict == "no-at-bound"
        assert [m["admitted"] for m in report.details["memberships"]] == [True, False]

    def test_all_admitted(self, phi_infinity: str, loop: Structure, two_cycle: Structure) -> None:
        """Test the yes verdict."""
        sig, phi = parse_document(phi_infinity)
        report = cmd_capture(sig, phi, "fo2", bound=2, structures=[loop, two_cycle])

        assert report.verdict == "yes"


@pytest.mark.unit
class TestTilingCommands:
    """Tests for the tiling workflows."""

    def test_check_deterministic(self, loop_dominoes: Record) -> None:
        """Test a deterministic system with a valid tiling."""
        report = cmd_tiling_check(DominoSystem.from_dict(loop_dominoes), (("a",),))

        assert report.verdict == "yes"
        assert report.details["tiling_problems"] == []

    def test_check_nondeterministic(self, checker_dominoes: Record) -> None:
        """Test that several seeds give a no with the violation."""
        report = cmd_tiling_check(DominoSystem.from_dict(checker_dominoes))

        assert report.verdict == "no"
        assert report.details["deterministic"] is False
        assert report.details["violation"]

    def test_solve(self, loop_dominoes: Record, stuck_dominoes: Record) -> None:
        """Test bounded solving."""
        solved = cmd_tiling_solve(DominoSystem.from_dict(loop_dominoes), 2)
        stuck = cmd_tiling_solve(DominoSystem.from_dict(stuck_dominoes), 2)

        assert solved.verdict == "yes"
        assert solved.details["tiling"] == [["a", "a"], ["a", "a"]]
        assert stuck.verdict == "no"

    def test_solve_periodic(self, loop_dominoes: Record) -> None:
        """Test that the periodic search reports its window."""
        report = cmd_tiling_solve(DominoSystem.from_dict(loop_dominoes), 2, periodic=True)

        assert report.verdict == "yes"
        assert report.details["window"] == [["a"]]

    @pytest.mark.parametrize("mdtgd, variant", [(False, "tgd"), (True, "mdtgd")])
    def test_sentence(self, loop_dominoes: Record, mdtgd: bool, variant: str) -> None:
        """Test the printed tiling sentence variants."""
        report = cmd_tiling_sentence(DominoSystem.from_dict(loop_dominoes), mdtgd)

        assert report.details["variant"] == variant
        assert "T_a" in report.details["sentence"]


@pytest.mark.unit
class TestReduce3Sat:
    """Tests for cmd_reduce_3sat."""

    def test_gadget_only(self) -> None:
        """Test that without decide the report is informational."""
        report = cmd_reduce_3sat([[1, 1, 1]])

        assert report.verdict is None
        assert len(report.details["structure"]["domain"]) == 4

    def test_decide_satisfiable(self) -> None:
        """Test that a satisfiable instance is in the closure."""
        report = cmd_reduce_3sat([[1, 1, 1]], decide=True)

        assert report.verdict == "yes"
        assert report.details["membership"]["bound"] == 4


@pytest.mark.unit
class TestRunWorkflow:
    """Tests for run_workflow on text inputs."""

    def test_classify(self, phi_exists_p: str) -> None:
        """Test classification from text."""
        report = run_workflow("classify", phi_exists_p)

        assert report.details["fragments"]["ucq"]

    def test_inhomcl(self, phi_infinity: str) -> None:
        """Test membership with a JSON structure."""
        structure = '{"domain": [0], "relations": {"P": [[0, 0]]}}'
        report = run_workflow("inhomcl", phi_infinity, structure, bound=1)

        assert report.verdict == "yes"

    def test_inhomcl_needs_structure(self, phi_infinity: str) -> None:
        """Test that membership needs a target."""
        with pytest.raises(ValueError, match="structure"):
            run_workflow("inhomcl", phi_infinity)

    def test_homclosed_needs_first_order(self, cul_de_sac: str) -> None:
        """Test that fixpoint sentences are refused."""
        with pytest.raises(FormulaValidationError):
            run_workflow("homclosed", cul_de_sac)

    def test_unknown_workflow(self, phi_exists_p: str) -> None:
        """Test that unknown workflows are rejected."""
        with pytest.raises(ValueError, match="Unknown workflow"):
            run_workflow("solve", phi_exists_p)
