"""Unit tests for model checking and bounded model search."""

from collections.abc import Callable

import pytest

from homclosure.config import ToolkitSettings
from homclosure.core.formula import Atom, Var
from homclosure.core.loader import parse_document, parse_sentence
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.exceptions import BudgetExceededError, FormulaValidationError
from homclosure.semantics.evaluator import ModelChecker, eval_fo, eval_lfp, eval_so, evaluate
from homclosure.semantics.model_finder import bounded_models, bounded_sat, relevant_signature


@pytest.mark.unit
class TestFirstOrder:
    """Tests for eval_fo."""

    def test_phi_infinity(self, phi_infinity: str, loop: Structure, two_path: Structure) -> None:
        """Test that every element needs a successor."""
        phi = parse_sentence(phi_infinity)

        assert eval_fo(loop, phi)
        assert not eval_fo(two_path, phi)

    def test_equality(self, two_elements: str, loop: Structure, two_path: Structure) -> None:
        """Test equality atoms."""
        phi = parse_sentence(two_elements)

        assert not eval_fo(loop, phi)
        assert eval_fo(two_path, phi)

    def test_constants(self) -> None:
        """Test constant terms."""
        sig, phi = parse_document("sig { P/1; const c; } P(c) & exists x. !P(x)")
        structure = Structure.build(sig, 2, {"c": 0}, {"P": [(0,)]})

        assert eval_fo(structure, phi)

    def test_environment(self, two_path: Structure) -> None:
        """Test evaluation under a variable assignment."""
        formula = Atom("P", (Var("x"), Var("y")))

        assert eval_fo(two_path, formula, {"x": 0, "y": 1})
        assert not eval_fo(two_path, formula, {"x": 1, "y": 0})

    def test_unbound_variable(self, two_path: Structure) -> None:
        """Test that free variables need a value."""
        with pytest.raises(FormulaValidationError, match="Unbound"):
            eval_fo(two_path, Atom("P", (Var("x"), Var("y"))), {"x": 0})

    def test_rejects_second_order(self, loop: Structure) -> None:
        """Test that eval_fo refuses second-order input."""
        _, phi = parse_document("sig { P/2; } existsSO U/1. forall x. U(x)")
        with pytest.raises(FormulaValidationError, match="first-order"):
            eval_fo(loop, phi)


@pytest.mark.unit
class TestSecondOrder:
    """Tests for second-order quantifiers."""

    def test_exists_so(self, two_path: Structure) -> None:
        """Test that some relation can be full."""
        _, phi = parse_document("sig { P/2; } existsSO U/1. forall x. U(x)")

        assert eval_so(two_path, phi)

    def test_forall_so(self, two_path: Structure) -> None:
        """Test that not every relation is full."""
        _, phi = parse_document("sig { P/2; } forallSO U/1. forall x. U(x)")

        assert not eval_so(two_path, phi)

    def test_superstructure_witness(self) -> None:
        """Test choosing the universe of a substructure."""
        sig, phi = parse_document(
            "sig { P/1; } existsSO U/1. (exists x. U(x)) & forall x. (U(x) -> P(x))"
        )
        structure = Structure.build(sig, 2, relations={"P": [(0,)]})

        assert eval_so(structure, phi)

    def test_exists_fin_matches_exists(self, two_cycle: Structure) -> None:
        """Test that finite quantification agrees on finite structures."""
        _, plain = parse_document("sig { P/2; } existsSO U/1. exists x. U(x) & P(x, x)")
        _, finite = parse_document("sig { P/2; } existsFin U/1. exists x. U(x) & P(x, x)")

        assert eval_so(two_cycle, plain) == eval_so(two_cycle, finite)

    def test_cell_budget(self, digraph_sig: Signature) -> None:
        """Test that large relation enumerations are refused."""
        _, phi = parse_document("sig { P/2; } existsSO R/2. forall x. R(x, x)")
        structure = Structure.build(digraph_sig, 3)
        with pytest.raises(BudgetExceededError):
            eval_so(structure, phi, ToolkitSettings(max_so_cells=4))


@pytest.mark.unit
class TestFixpoints:
    """Tests for least fixpoint evaluation."""

    def test_cul_de_sac(
        self, cul_de_sac: str, two_cycle: Structure, two_path: Structure, loop: Structure
    ) -> None:
        """Test that the sentence detects infinite paths."""
        phi = parse_sentence(cul_de_sac)

        assert eval_lfp(two_cycle, phi)
        assert eval_lfp(loop, phi)
        assert not eval_lfp(two_path, phi)

    def test_cycle_behind_path(self, cul_de_sac: str, digraph: Callable[..., Structure]) -> None:
        """Test a path leading into a cycle."""
        phi = parse_sentence(cul_de_sac)
        structure = digraph(3, [(0, 1), (1, 2), (2, 1)])

        assert evaluate(structure, phi)

    def test_simultaneous_block(self) -> None:
        """Test mutually recursive fixpoint predicates."""
        sig, phi = parse_document(
            "sig { P/2; } exists x. lfp Even(z) := (forall y. !P(z, y)) "
            "| exists y. P(z, y) & Odd(y); Odd(z) := exists y. P(z, y) & Even(y) in Odd(x)"
        )
        path = Structure.build(sig, 2, relations={"P": [(0, 1)]})
        point = Structure.build(sig, 1)

        assert eval_lfp(path, phi)
        assert not eval_lfp(point, phi)

    def test_model_checker_reuse(self, phi_infinity: str, loop: Structure) -> None:
        """Test that one checker answers several queries."""
        checker = ModelChecker(loop)

        assert checker.holds(parse_sentence(phi_infinity))
        assert checker.holds(parse_sentence("sig { P/2; } exists x. P(x, x)"))


@pytest.mark.unit
class TestBoundedSearch:
    """Tests for bounded_models and bounded_sat."""

    def test_phi_infinity_at_size_one(self, phi_infinity: str, loop: Structure) -> None:
        """Test that the loop is the only one-element model."""
        sig, phi = parse_document(phi_infinity)

        assert list(bounded_models(phi, sig, 1)) == [loop]
        assert bounded_sat(phi, sig, 1) == loop

    def test_models_are_models(self, phi_infinity: str) -> None:
        """Test that every enumerated structure satisfies the sentence."""
        sig, phi = parse_document(phi_infinity)
        models = list(bounded_models(phi, sig, 2))

        assert models
        assert all(eval_fo(model, phi) for model in models)
        assert len(set(models)) == len(models)

    def test_no_small_model(self, two_elements: str) -> None:
        """Test that two distinct elements need two elements."""
        sig, phi = parse_document(two_elements)

        assert bounded_sat(phi, sig, 1) is None
        model = bounded_sat(phi, sig, 2)
        assert model is not None and len(model) == 2

    def test_contradiction(self) -> None:
        """Test an unsatisfiable sentence."""
        sig, phi = parse_document("sig { P/1; } exists x. P(x) & !P(x)")

        assert bounded_sat(phi, sig, 3) is None

    def test_result_uses_full_signature(self) -> None:
        """Test that unused symbols are interpreted too."""
        sig, phi = parse_document("sig { P/1; Q/2; const c; } exists x. P(x)")
        model = bounded_sat(phi, sig, 2)

        assert model is not None
        assert model.sig == sig
        assert model.rel("Q") == frozenset()

    def test_relevant_signature(self) -> None:
        """Test that only mentioned symbols are kept."""
        sig, phi = parse_document("sig { P/1; Q/2; const c; } exists x. P(x)")

        assert relevant_signature(phi, sig) == Signature.build({"P": 1})

    def test_invalid_bound(self, phi_infinity: str) -> None:
        """Test that the bound must be positive."""
        sig, phi = parse_document(phi_infinity)
        with pytest.raises(ValueError):
            bounded_sat(phi, sig, 0)

    def test_budget(self) -> None:
        """Test that the candidate budget is enforced."""
        sig, phi = parse_document("sig { P/2; } forall x. exists y. P(x, y) & x != y")
        with pytest.raises(BudgetExceededError):
            bounded_sat(phi, sig, 3, ToolkitSettings(max_candidates=3))
