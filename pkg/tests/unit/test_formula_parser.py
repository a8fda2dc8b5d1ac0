"""Unit tests for the formula grammar, printer and loader-level parsing."""

import pytest

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    ExistsSO,
    Forall,
    Lfp,
    Not,
    Or,
    Top,
    Var,
    atom,
    free_variables,
)
from homclosure.core.loader import parse_document, parse_sentence
from homclosure.core.signature import Signature
from homclosure.exceptions import (
    ArityMismatchError,
    FormulaValidationError,
    ParseError,
    SignatureError,
    UnknownSymbolError,
)
from homclosure.utils.formula_parser import FormulaParser, is_predicate_name, tokenize
from homclosure.utils.formula_printer import FormulaPrinter


@pytest.mark.unit
class TestTokenizer:
    """Tests for tokenize."""

    def test_keywords_and_identifiers(self) -> None:
        """Test that keywords are told apart from identifiers."""
        tokens = tokenize("forall x. P(x)")

        assert [t.kind for t in tokens] == ["kw", "ident", "op", "ident", "op", "ident", "op", "eof"]

    def test_comments_are_skipped(self) -> None:
        """Test that comments run to the end of the line."""
        tokens = tokenize("true # trailing\n")

        assert [t.text for t in tokens] == ["true", ""]

    def test_unexpected_character(self) -> None:
        """Test that stray characters carry a position."""
        with pytest.raises(ParseError) as exc_info:
            tokenize("P(x)\n  $")

        assert exc_info.value.line == 2
        assert exc_info.value.column == 3

    def test_predicate_names(self) -> None:
        """Test the case convention for predicates."""
        assert is_predicate_name("P")
        assert is_predicate_name("__Tp1")
        assert not is_predicate_name("x")


@pytest.mark.unit
class TestSignatureHeader:
    """Tests for the sig block."""

    def test_predicates_and_constants(self) -> None:
        """Test a header with both kinds of symbols."""
        sig = FormulaParser.parse_signature("sig { P/2; Q/1; const c, d; }")

        assert sig == Signature.build({"P": 2, "Q": 1}, ["c", "d"])

    def test_lowercase_predicate(self) -> None:
        """Test that predicate names must be uppercase-initial."""
        with pytest.raises(ParseError, match="uppercase"):
            FormulaParser.parse_signature("sig { p/1; }")

    def test_missing_header(self) -> None:
        """Test that parse_signature needs the keyword."""
        with pytest.raises(ParseError, match="sig"):
            FormulaParser.parse_signature("P/1")

    def test_header_merges_with_ambient_signature(self) -> None:
        """Test that headers extend a given signature."""
        sig, _ = FormulaParser.parse_document(
            "sig { Q/1; } exists x. Q(x)", Signature.build({"P": 2})
        )

        assert sig.predicate_names == ("P", "Q")


@pytest.mark.unit
class TestFormulaGrammar:
    """Tests for formula parsing."""

    def test_quantifier_list(self) -> None:
        """Test that variable lists nest in order."""
        _, phi = FormulaParser.parse_document("sig { P/2; } forall x y. P(x, y)")

        assert phi == Forall("x", Forall("y", atom("P", "x", "y")))

    def test_chained_quantifiers(self) -> None:
        """Test mixed quantifier runs without intermediate dots."""
        _, phi = FormulaParser.parse_document("sig { P/2; } forall x exists y. P(x,y)")

        assert phi == Forall("x", Exists("y", atom("P", "x", "y")))

    def test_precedence(self) -> None:
        """Test that & binds tighter than |."""
        _, phi = FormulaParser.parse_document("sig { P/1; Q/1; } exists x. P(x) | Q(x) & !P(x)")

        assert isinstance(phi, Exists)
        assert isinstance(phi.body, Or)
        assert isinstance(phi.body.items[1], And)

    def test_implication_expands(self) -> None:
        """Test that implications become disjunctions."""
        _, phi = FormulaParser.parse_document("sig { P/1; Q/1; } forall x. P(x) -> Q(x)")

        assert phi == Forall("x", Or((Not(atom("P", "x")), atom("Q", "x"))))

    def test_equality_and_constants(self) -> None:
        """Test equality atoms and constant resolution."""
        _, phi = FormulaParser.parse_document("sig { const c; } exists x. x != c & x = x")

        assert isinstance(phi, Exists) and isinstance(phi.body, And)
        assert phi.body.items[0] == Not(Eq(Var("x"), Const("c")))
        assert phi.body.items[1] == Eq(Var("x"), Var("x"))

    def test_truth_constants(self) -> None:
        """Test true and false."""
        _, phi = FormulaParser.parse_document("true | false")

        assert phi == Or((Top(), Bottom()))

    def test_second_order_quantifier(self) -> None:
        """Test existsSO with a declared arity."""
        _, phi = FormulaParser.parse_document("existsSO U/1. forall x. U(x)")

        assert phi == ExistsSO("U", 1, Forall("x", Atom("U", (Var("x"),))))

    def test_fixpoint(self, cul_de_sac: str) -> None:
        """Test the fixpoint block syntax."""
        _, phi = FormulaParser.parse_document(cul_de_sac)

        assert isinstance(phi, Exists) and isinstance(phi.body, Not)
        lfp = phi.body.body
        assert isinstance(lfp, Lfp)
        assert lfp.goal == "Cds"
        assert lfp.defs[0].params == ("z",)
        assert free_variables(lfp) == {"x"}

    def test_missing_dot(self) -> None:
        """Test that quantifier bodies need a dot."""
        with pytest.raises(ParseError, match="Expected '.'"):
            FormulaParser.parse_document("sig { P/1; } forall x (P(x))")

    def test_trailing_input(self) -> None:
        """Test that leftovers are reported."""
        with pytest.raises(ParseError, match="trailing"):
            FormulaParser.parse_document("true false")

    def test_reserved_names_rejected(self) -> None:
        """Test that the reserved prefix is refused by default."""
        with pytest.raises(ParseError, match="Reserved"):
            FormulaParser.parse_document("sig { __U/1; } exists x. __U(x)")

    def test_reserved_names_allowed(self) -> None:
        """Test that constructions may use the reserved prefix."""
        sig, _ = FormulaParser.parse_document(
            "sig { __U/1; } exists x. __U(x)", allow_reserved=True
        )

        assert sig.has_predicate("__U")


@pytest.mark.unit
class TestPrinter:
    """Tests for FormulaPrinter."""

    def test_printed_sentence_parses_back(self, phi_infinity: str, cul_de_sac: str) -> None:
        """Test that printing then parsing gives the same tree."""
        for text in (phi_infinity, cul_de_sac):
            sig, phi = FormulaParser.parse_document(text)
            _, again = FormulaParser.parse_document(FormulaPrinter.document(sig, phi))
            assert again == phi

    def test_document_header(self) -> None:
        """Test that documents start with the header."""
        sig = Signature.build({"P": 1})
        text = FormulaPrinter.document(sig, Exists("x", atom("P", "x")))

        assert text.startswith("sig { P/1; }\n")


@pytest.mark.unit
class TestParseSentence:
    """Tests for validated parsing."""

    def test_valid_sentence(self, phi_infinity: str) -> None:
        """Test that a valid sentence passes validation."""
        sig, phi = parse_document(phi_infinity)

        assert sig.arity("P") == 2
        assert isinstance(phi, Forall)

    def test_arity_mismatch(self) -> None:
        """Test that atoms must follow the declared arity."""
        with pytest.raises(ArityMismatchError):
            parse_sentence("sig { Q/1; } exists x. Q(x, x)")

    def test_unknown_predicate(self) -> None:
        """Test that undeclared predicates are rejected."""
        with pytest.raises(UnknownSymbolError):
            parse_sentence("exists x. P(x)")

    def test_free_variable(self) -> None:
        """Test that sentences may not have free variables."""
        with pytest.raises(FormulaValidationError, match="Free variables"):
            parse_sentence("sig { P/1; } P(x)")

    def test_negative_fixpoint(self) -> None:
        """Test that fixpoint predicates must occur positively."""
        text = "sig { P/1; } exists x. lfp R(z) := !R(z) in R(x)"
        with pytest.raises(FormulaValidationError, match="negatively"):
            parse_sentence(text)

    def test_reserved_header_rejected(self) -> None:
        """Test that user headers may not declare reserved names."""
        with pytest.raises((ParseError, SignatureError)):
            parse_sentence("sig { __U/1; } exists x. __U(x)")
