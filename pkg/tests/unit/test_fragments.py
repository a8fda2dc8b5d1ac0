"""Unit tests for fragment classification and normal forms."""

import pytest

from homclosure.core.formula import And, Bottom, Exists, Forall, Not, Or, Top, atom
from homclosure.core.loader import parse_document, parse_sentence
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.exceptions import FormulaValidationError
from homclosure.reductions.grid import grid_sentence
from homclosure.semantics.evaluator import eval_fo
from homclosure.syntax.fragments import classify
from homclosure.syntax.normal_forms import (
    apply_prefix,
    nnf,
    prefix_word,
    prenex,
    quantifier_rank,
)


@pytest.mark.unit
class TestClassify:
    """Tests for classify."""

    def test_phi_infinity(self, phi_infinity: str) -> None:
        """Test the memberships of the successor sentence."""
        report = classify(parse_sentence(phi_infinity))

        assert report.first_order
        assert report.gfo
        assert report.gnfo
        assert report.fo2
        assert report.tgd
        assert report.mdtgd
        assert not report.cq
        assert report.prefix == "AE"
        assert not report.bernays_schonfinkel

    def test_conjunctive_query(self) -> None:
        """Test a conjunctive query."""
        report = classify(parse_sentence("sig { P/2; } exists x y. P(x, y) & P(y, x)"))

        assert report.cq
        assert report.ucq
        assert report.positive_existential
        assert report.tgd
        assert report.bernays_schonfinkel

    def test_union_of_queries(self) -> None:
        """Test a union of conjunctive queries."""
        report = classify(parse_sentence("sig { P/1; Q/1; } (exists x. P(x)) | exists y. Q(y)"))

        assert report.ucq
        assert not report.cq

    def test_equality(self, two_elements: str) -> None:
        """Test that equality leaves FO2 but stays in FO2 with equality."""
        report = classify(parse_sentence(two_elements))

        assert not report.equality_free
        assert not report.fo2
        assert report.fo2_eq
        assert not report.tgd
        assert not report.positive_existential

    def test_mdtgd(self) -> None:
        """Test a TGD sentence joined with a query."""
        report = classify(
            parse_sentence("sig { P/2; } (forall x. exists y. P(x, y)) | exists z. P(z, z)")
        )

        assert not report.tgd
        assert report.mdtgd
        assert report.dtgd

    def test_unguarded_universal(self) -> None:
        """Test that a universal pair without a guard is not guarded."""
        report = classify(parse_sentence("sig { P/2; } forall x y. P(x, y) | P(y, x)"))

        assert not report.gfo

    def test_grid_sentence(self) -> None:
        """Test that the grid sentence is a TGD sentence with four variables."""
        report = classify(grid_sentence())

        assert report.tgd
        assert not report.fo2_eq

    def test_fixpoint_is_not_first_order(self, cul_de_sac: str) -> None:
        """Test that fixpoint sentences leave every FO fragment."""
        report = classify(parse_sentence(cul_de_sac))

        assert not report.first_order
        assert not report.gfo
        assert report.prefix is None

    def test_constants(self) -> None:
        """Test the constant-free flag."""
        report = classify(parse_sentence("sig { P/1; const c; } P(c)"))

        assert not report.constant_free

    def test_to_dict(self, phi_infinity: str) -> None:
        """Test the serialized report."""
        data = classify(parse_sentence(phi_infinity)).to_dict()

        assert data["prefix"] == "AE"
        assert data["bernays_schonfinkel"] is False


@pytest.mark.unit
class TestNormalForms:
    """Tests for nnf, prenex and quantifier_rank."""

    def test_nnf_pushes_negation(self) -> None:
        """Test De Morgan and quantifier duality."""
        phi = Not(And((Forall("x", atom("P", "x")), atom("Q", "y"))))

        assert nnf(phi) == Or((Exists("x", Not(atom("P", "x"))), Not(atom("Q", "y"))))

    def test_nnf_constants(self) -> None:
        """Test that negated truth constants fold."""
        assert nnf(Not(Top())) == Bottom()
        assert nnf(Not(Not(atom("P", "x")))) == atom("P", "x")

    def test_nnf_rejects_fixpoints(self, cul_de_sac: str) -> None:
        """Test that NNF is first-order only."""
        with pytest.raises(FormulaValidationError):
            nnf(parse_sentence(cul_de_sac))

    def test_quantifier_rank(self, phi_infinity: str, cul_de_sac: str) -> None:
        """Test nesting depths."""
        assert quantifier_rank(parse_sentence(phi_infinity)) == 2
        assert quantifier_rank(parse_sentence("sig { P/1; } (exists x. P(x)) & exists y. P(y)")) == 1
        assert quantifier_rank(parse_sentence(cul_de_sac)) == 2

    def test_prenex_pulls_existentials_first(self) -> None:
        """Test that a conjunction of E and A parts stays E*A*."""
        phi = parse_sentence("sig { P/1; Q/1; } (forall x. P(x)) & exists y. Q(y)")

        assert prefix_word(phi) == "EA"

    def test_prenex_renames_apart(self) -> None:
        """Test that clashing bound variables are renamed."""
        prefix, _ = prenex(parse_sentence("sig { P/1; Q/1; } (exists x. P(x)) & exists x. Q(x)"))

        assert len({var for _, var in prefix}) == 2

    def test_prenex_is_equivalent(self) -> None:
        """Test that the prenex form has the same truth value."""
        sig, phi = parse_document(
            "sig { P/1; Q/1; } !(exists x. P(x)) | forall y. Q(y)"
        )
        prefix, matrix = prenex(phi)
        restored = apply_prefix(prefix, matrix)
        structures = [
            Structure.build(sig, 2, relations={"P": p, "Q": q})
            for p in ([], [(0,)])
            for q in ([], [(0,), (1,)])
        ]

        for structure in structures:
            assert eval_fo(structure, restored) == eval_fo(structure, phi)

    def test_prefix_word_of_second_order(self) -> None:
        """Test that second-order input has no prefix word."""
        _, phi = parse_document("existsSO U/1. forall x. U(x)", Signature())

        assert prefix_word(phi) is None
