"""Unit tests for relativization, labels, colorings and second-order normal forms."""

from collections.abc import Callable
from itertools import combinations
from typing import Literal

import pytest

from homclosure.core.formula import Atom, Bottom, Top, Var, atom, exists_many
from homclosure.core.loader import parse_document
from homclosure.core.signature import Signature
from homclosure.core.structure import Labeling, Structure, bit_predicate
from homclosure.exceptions import FormulaValidationError, SignatureError
from homclosure.semantics.evaluator import eval_fo, evaluate
from homclosure.semantics.model_finder import bounded_sat
from homclosure.transforms.coloring import (
    chi,
    coloring,
    coloring_signature,
    decode_coloring_witness,
    homclosure_witness,
)
from homclosure.transforms.labels import label_formula, tr_n
from homclosure.transforms.relativize import relativize
from homclosure.transforms.second_order import (
    eso_fin_wrap,
    in_superstructure_closure,
    in_surjective_closure,
    set_partitions,
    so_shom,
    so_sup,
    substructures,
    surjective_images,
)

DigraphFactory = Callable[..., Structure]
GraphFactory = Callable[[int], Structure]


@pytest.mark.unit
class TestRelativize:
    """Tests for relativize."""

    def test_matches_induced_substructures(
        self, phi_infinity: str, digraph: DigraphFactory
    ) -> None:
        """Test the relativization against every induced substructure."""
        _, phi = parse_document(phi_infinity)
        structure = digraph(2, [(0, 0), (0, 1)])
        relativized = relativize(phi, "U")

        for k in range(3):
            for subset in combinations(structure.domain, k):
                expanded = structure.expand_with({"U": [(a,) for a in subset]}, arities={"U": 1})
                expected = bool(subset) and eval_fo(structure.induced_substructure(subset), phi)
                assert eval_fo(expanded, relativized) == expected

    def test_constants_must_survive(self) -> None:
        """Test that constants are forced into the predicate."""
        sig, phi = parse_document("sig { P/1; const c; } exists x. P(x)")
        structure = Structure.build(sig, 2, {"c": 0}, {"P": [(1,)]})
        relativized = relativize(phi, "U", sig)

        assert not eval_fo(structure.expand_with({"U": [(1,)]}, arities={"U": 1}), relativized)
        assert eval_fo(structure.expand_with({"U": [(0,), (1,)]}, arities={"U": 1}), relativized)

    def test_name_must_be_fresh(self, phi_exists_p: str) -> None:
        """Test that the guard cannot reuse a predicate of the sentence."""
        _, phi = parse_document(phi_exists_p)
        with pytest.raises(SignatureError):
            relativize(phi, "P")


@pytest.mark.unit
class TestLabels:
    """Tests for label formulas and tr_n."""

    def test_single_label_is_trivial(self) -> None:
        """Test that n = 1 needs no Bit predicates."""
        assert label_formula(Var("x"), 1, 1) == Top()
        assert label_formula(Var("x"), 1, 4, "geq") == Top()

    def test_label_range(self) -> None:
        """Test that labels stay within 1..n."""
        with pytest.raises(FormulaValidationError):
            label_formula(Var("x"), 0, 3)
        with pytest.raises(FormulaValidationError):
            label_formula(Var("x"), 4, 3)

    @pytest.mark.parametrize("cmp", ["eq", "geq"])
    def test_label_semantics(self, digraph_sig: Signature, cmp: Literal["eq", "geq"]) -> None:
        """Test label formulas on an implicit representation."""
        lam = {0: 1, 1: 2, 2: 3, 3: 4}
        rep = Labeling(Structure.build(digraph_sig, 4), 4, lam).implicit_representation()

        for a, label in lam.items():
            for m in range(1, 5):
                expected = label == m if cmp == "eq" else label >= m
                formula = label_formula(Var("x"), m, 4, cmp)
                assert eval_fo(rep, formula, {"x": a}) == expected

    @pytest.mark.parametrize("label, expected", [(1, True), (2, False)])
    def test_tr_n_singleton_sentence(self, loop: Structure, label: int, expected: bool) -> None:
        """Test 'exists x forall y. x = y' on a labelled loop."""
        _, phi = parse_document("sig { P/2; } exists x. forall y. x = y")
        labeling = Labeling(loop, 2, {0: label})
        unfolded, _ = labeling.unfold()

        assert eval_fo(unfolded, phi) == expected
        assert eval_fo(labeling.implicit_representation(), tr_n(phi, 2)) == expected

    def test_tr_n_matches_unfolding(self, two_elements: str, two_path: Structure) -> None:
        """Test the translation over every 2-labeling of a path."""
        _, phi = parse_document(two_elements)
        translated = tr_n(phi, 2)

        for lam in ({0: 1, 1: 1}, {0: 2, 1: 1}, {0: 1, 1: 2}, {0: 2, 1: 2}):
            labeling = Labeling(two_path, 2, lam)
            unfolded, _ = labeling.unfold()
            assert eval_fo(labeling.implicit_representation(), translated) == eval_fo(unfolded, phi)

    def test_tr_n_needs_a_sentence(self) -> None:
        """Test that free variables are rejected."""
        with pytest.raises(FormulaValidationError, match="sentence"):
            tr_n(atom("P", "x", "y"), 2)

    def test_tr_n_needs_first_order(self, cul_de_sac: str) -> None:
        """Test that fixpoints are rejected."""
        _, phi = parse_document(cul_de_sac)
        with pytest.raises(FormulaValidationError):
            tr_n(phi, 2)


@pytest.mark.unit
class TestColoring:
    """Tests for colorings by a finite target."""

    def test_coloring_signature(self, clique: GraphFactory) -> None:
        """Test that three labels need two Bit predicates."""
        sig = coloring_signature(clique(3))

        assert sig.has_predicate(bit_predicate(1))
        assert sig.has_predicate(bit_predicate(2))
        assert not sig.has_predicate(bit_predicate(3))

    def test_chi_of_empty_relation(self, isolated_points: Structure) -> None:
        """Test that an empty target relation admits no colored tuple."""
        assert chi("P", (Var("x"), Var("y")), isolated_points) == Bottom()

    def test_loop_target_changes_nothing(self, phi_infinity: str, loop: Structure) -> None:
        """Test that the one-element target colors trivially."""
        _, phi = parse_document(phi_infinity)

        assert coloring(phi, loop) == phi

    @pytest.mark.parametrize("mode", ["ext", "int"])
    def test_agrees_with_witness_search(
        self, phi_infinity: str, loop: Structure, two_path: Structure, mode: Literal["ext", "int"]
    ) -> None:
        """Test that both colorings agree with the explicit witness search."""
        _, phi = parse_document(phi_infinity)

        for target in (loop, two_path):
            colored = coloring(phi, target, mode)
            satisfiable = bounded_sat(colored, coloring_signature(target), 2) is not None
            assert satisfiable == (homclosure_witness(phi, target, 2) is not None)

    def test_witness_round_trip(self, clique: GraphFactory) -> None:
        """Test that a colored witness decodes back to its model and hom."""
        _, phi = parse_document("sig { E/2; } exists x y. E(x, y)")
        target = clique(3)
        witness = homclosure_witness(phi, target, 2)
        assert witness is not None

        colored = witness.encode()
        decoded = decode_coloring_witness(colored, target)

        assert evaluate(colored, coloring(phi, target, "ext"))
        assert evaluate(colored, coloring(phi, target, "int"))
        assert decoded.model == witness.model
        assert dict(decoded.hom.mapping) == dict(witness.hom.mapping)

    def test_no_witness_into_acyclic_target(self, phi_infinity: str, two_path: Structure) -> None:
        """Test that models with a successor everywhere need a cycle in the target."""
        _, phi = parse_document(phi_infinity)

        assert homclosure_witness(phi, two_path, 3) is None

    def test_bit_clash(self, clique: GraphFactory) -> None:
        """Test that the sentence may not use the Bit predicates."""
        phi = exists_many(["x"], Atom(bit_predicate(1), (Var("x"),)))
        with pytest.raises(SignatureError):
            coloring(phi, clique(3))


@pytest.mark.unit
class TestSecondOrderForms:
    """Tests for so_sup, eso_fin_wrap and so_shom."""

    def test_so_sup(self) -> None:
        """Test that a model inside the structure is found."""
        sig, psi = parse_document("sig { P/1; } forall x. P(x)")
        partial = Structure.build(sig, 2, relations={"P": [(0,)]})
        empty = Structure.build(sig, 2)

        assert evaluate(partial, so_sup(psi, sig))
        assert not evaluate(empty, so_sup(psi, sig))
        assert evaluate(partial, eso_fin_wrap(psi, "U", sig))

    def test_so_sup_matches_closure(self, phi_infinity: str, digraph: DigraphFactory) -> None:
        """Test so_sup against the brute-force superstructure closure."""
        sig, psi = parse_document(phi_infinity)
        structures = [digraph(2, []), digraph(2, [(0, 0)]), digraph(2, [(0, 1)])]

        for structure in structures:
            assert evaluate(structure, so_sup(psi, sig)) == in_superstructure_closure(
                structure, psi
            )

    def test_so_shom(self, loop: Structure, two_path: Structure) -> None:
        """Test so_shom against the brute-force surjective closure."""
        sig, psi = parse_document("sig { P/2; } exists x. P(x, x)")
        sentence = so_shom(psi, sig)

        assert evaluate(loop, sentence)
        assert in_surjective_closure(loop, psi)
        assert not evaluate(two_path, sentence)
        assert not in_surjective_closure(two_path, psi)

    def test_so_shom_equality(self, two_elements: str, two_path: Structure) -> None:
        """Test that merging both elements breaks 'two elements'."""
        sig, psi = parse_document(two_elements)

        assert not evaluate(two_path, so_shom(psi, sig))

    def test_so_shom_fresh_names(self) -> None:
        """Test that the inclusion predicate must be fresh."""
        sig, psi = parse_document("sig { U/1; } exists x. U(x)")
        with pytest.raises(SignatureError):
            so_shom(psi, sig, unary="U")


@pytest.mark.unit
class TestClosureOperators:
    """Tests for the brute-force closure helpers."""

    def test_set_partitions(self) -> None:
        """Test the Bell numbers."""
        assert len(list(set_partitions(()))) == 1
        assert len(list(set_partitions((0, 1, 2)))) == 5

    def test_substructures(self, two_path: Structure) -> None:
        """Test the non-empty induced substructures."""
        assert sorted(len(s) for s in substructures(two_path)) == [1, 1, 2]

    def test_substructures_keep_constants(self) -> None:
        """Test that every substructure contains the constants."""
        sig = Signature.build({"P": 1}, ["c"])
        structure = Structure.build(sig, 3, {"c": 1})

        assert all(1 in s.domain for s in substructures(structure))
        assert len(list(substructures(structure))) == 4

    def test_surjective_images(self, loop: Structure, two_path: Structure) -> None:
        """Test that every image is reached through a valid surjective hom."""
        assert [len(h.target) for h in surjective_images(loop)] == [1]

        images = list(surjective_images(two_path))
        assert all(h.is_valid() and h.is_surjective() for h in images)
        assert {len(h.target) for h in images} == {1, 2}
