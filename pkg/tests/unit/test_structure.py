"""Unit tests for signatures, structures and labelings."""

from collections.abc import Callable

import pytest

from homclosure.core.formula import And, Const, Eq, Exists, Var
from homclosure.core.signature import Signature
from homclosure.core.structure import (
    Labeling,
    Structure,
    bit_predicate,
    bit_width,
    canonical_query,
    canonical_structure,
    decode_label,
    disjoint_union,
    glued_union,
    label_bit,
)
from homclosure.exceptions import (
    SignatureError,
    StructureValidationError,
    UnknownSymbolError,
)
from homclosure.semantics.evaluator import eval_fo
from homclosure.semantics.homs import find_hom


@pytest.mark.unit
class TestSignature:
    """Tests for Signature."""

    def test_build_keeps_declaration_order(self) -> None:
        """Test that predicates keep their order."""
        sig = Signature.build({"Q": 1, "P": 2}, ["c"])

        assert sig.predicate_names == ("Q", "P")
        assert sig.arity("P") == 2
        assert sig.has_constant("c")
        assert str(sig) == "sig { Q/1; P/2; const c; }"

    def test_duplicate_symbol(self) -> None:
        """Test that a name declared twice is rejected."""
        with pytest.raises(SignatureError, match="Duplicate"):
            Signature((("P", 1),), ("P",))

    def test_zero_arity(self) -> None:
        """Test that nullary predicates are rejected."""
        with pytest.raises(SignatureError, match="arity"):
            Signature.build({"P": 0})

    def test_unknown_arity(self) -> None:
        """Test arity lookup of an undeclared predicate."""
        with pytest.raises(UnknownSymbolError):
            Signature.build({"P": 1}).arity("Q")

    def test_union_conflict(self) -> None:
        """Test that union rejects conflicting arities."""
        with pytest.raises(SignatureError, match="Conflicting"):
            Signature.build({"P": 1}).union(Signature.build({"P": 2}))

    def test_union_and_subsignature(self) -> None:
        """Test union followed by subsignature checks."""
        left = Signature.build({"P": 2})
        union = left.union(Signature.build({"Q": 1}, ["c"]))

        assert left.is_subsignature(union)
        assert not union.is_subsignature(left)
        assert union.without(["Q", "c"]) == left

    def test_check_fresh(self) -> None:
        """Test fresh-name checks."""
        sig = Signature.build({"P": 2})
        sig.check_fresh(["U"])
        with pytest.raises(SignatureError, match="clash"):
            sig.check_fresh(["P"])

    def test_reserved_names(self) -> None:
        """Test that user signatures cannot use the reserved prefix."""
        with pytest.raises(SignatureError, match="reserved"):
            Signature.build({"__U": 1}).check_user_names()


@pytest.mark.unit
class TestStructure:
    """Tests for Structure construction and accessors."""

    def test_build_fills_missing_relations(self, digraph_sig: Signature) -> None:
        """Test that unmentioned predicates are empty."""
        structure = Structure.build(digraph_sig, 2)

        assert len(structure) == 2
        assert structure.rel("P") == frozenset()

    def test_empty_domain(self, digraph_sig: Signature) -> None:
        """Test that an empty domain is rejected."""
        with pytest.raises(StructureValidationError, match="non-empty"):
            Structure.build(digraph_sig, 0)

    def test_uninterpreted_constant(self) -> None:
        """Test that every constant needs an interpretation."""
        sig = Signature.build({"P": 1}, ["c"])
        with pytest.raises(StructureValidationError, match="not interpreted"):
            Structure.build(sig, 1)

    def test_tuple_outside_domain(self, digraph_sig: Signature) -> None:
        """Test that tuples must stay inside the domain."""
        with pytest.raises(StructureValidationError, match="leaves the domain"):
            Structure.build(digraph_sig, 1, relations={"P": [(0, 1)]})

    def test_wrong_tuple_length(self, digraph_sig: Signature) -> None:
        """Test that tuple lengths follow the arity."""
        with pytest.raises(StructureValidationError, match="length"):
            Structure.build(digraph_sig, 2, relations={"P": [(0,)]})

    def test_equality_is_structural(self, loop: Structure, digraph_sig: Signature) -> None:
        """Test equality and hashing through the canonical key."""
        other = Structure.build(digraph_sig, 1, relations={"P": [[0, 0]]})

        assert loop == other
        assert hash(loop) == hash(other)

    def test_degree_and_gaifman_graph(self, two_path: Structure) -> None:
        """Test degree counting and the Gaifman graph."""
        graph = two_path.gaifman_graph()

        assert two_path.degree(0) == 1
        assert set(graph.nodes) == {0, 1}
        assert graph.has_edge(0, 1)


@pytest.mark.unit
class TestConstructions:
    """Tests for reducts, expansions and substructures."""

    def test_reduct(self) -> None:
        """Test restriction to a subsignature."""
        sig = Signature.build({"P": 2, "Q": 1})
        structure = Structure.build(sig, 2, relations={"P": [(0, 1)], "Q": [(1,)]})
        reduct = structure.reduct(Signature.build({"Q": 1}))

        assert reduct.sig.predicate_names == ("Q",)
        assert reduct.rel("Q") == {(1,)}

    def test_reduct_requires_subsignature(self, loop: Structure) -> None:
        """Test that reducts to foreign signatures fail."""
        with pytest.raises(SignatureError):
            loop.reduct(Signature.build({"Q": 1}))

    def test_expand_full_and_empty(self, two_path: Structure) -> None:
        """Test expansion by full and empty relations."""
        full = two_path.expand([("U", 1)], mode="full")
        empty = two_path.expand([("U", 1)], mode="empty")

        assert full.rel("U") == {(0,), (1,)}
        assert empty.rel("U") == frozenset()
        assert full.reduct(two_path.sig) == two_path

    def test_expand_with(self, two_path: Structure) -> None:
        """Test expansion by explicit relations and constants."""
        expanded = two_path.expand_with({"U": [(1,)]}, constants={"c": 0})

        assert expanded.sig.arity("U") == 1
        assert expanded.constants["c"] == 0
        assert expanded.rel("U") == {(1,)}

    def test_induced_substructure(self, digraph: Callable[..., Structure]) -> None:
        """Test that induced substructures keep only inner tuples."""
        path = digraph(3, [(0, 1), (1, 2)])
        sub = path.induced_substructure([0, 1])

        assert sub.domain == (0, 1)
        assert sub.rel("P") == {(0, 1)}

    def test_induced_substructure_empty(self, loop: Structure) -> None:
        """Test that empty subsets are rejected."""
        with pytest.raises(StructureValidationError, match="non-empty"):
            loop.induced_substructure([])

    def test_induced_substructure_missing_constant(self) -> None:
        """Test that subsets must contain every constant."""
        sig = Signature.build({"P": 1}, ["c"])
        structure = Structure.build(sig, 2, {"c": 1})
        with pytest.raises(StructureValidationError, match="misses"):
            structure.induced_substructure([0])

    def test_rename_and_normalize(self, digraph_sig: Signature) -> None:
        """Test isomorphic renaming."""
        structure = Structure.build(digraph_sig, [3, 7], relations={"P": [(3, 7)]})
        normal, mapping = structure.normalized()

        assert normal.domain == (0, 1)
        assert normal.rel("P") == {(0, 1)}
        assert mapping == {3: 0, 7: 1}


@pytest.mark.unit
class TestCanonicalStructures:
    """Tests for initial and final structures, unions and canonical queries."""

    def test_initial_maps_everywhere(self, two_cycle: Structure, loop: Structure) -> None:
        """Test that the initial structure maps into every structure."""
        initial = canonical_structure(two_cycle.sig, "initial")

        assert len(initial) == 1
        assert find_hom(initial, two_cycle) is not None
        assert find_hom(initial, loop) is not None

    def test_everything_maps_to_final(self, two_cycle: Structure, two_path: Structure) -> None:
        """Test that every structure maps into the final structure."""
        final = canonical_structure(two_cycle.sig, "final")

        assert final.rel("P") == {(0, 0)}
        assert find_hom(two_cycle, final) is not None
        assert find_hom(two_path, final) is not None

    def test_initial_with_constants(self) -> None:
        """Test that constants get distinct elements in the initial structure."""
        sig = Signature.build({"P": 1}, ["c", "d"])
        initial = canonical_structure(sig, "initial")

        assert len(initial) == 2
        assert initial.constants == {"c": 0, "d": 1}

    def test_disjoint_union(self, loop: Structure) -> None:
        """Test the union of a loop with the initial structure."""
        union = disjoint_union(loop, canonical_structure(loop.sig, "initial"))

        assert len(union) == 2
        assert union.rel("P") == {(0, 0)}

    def test_disjoint_union_signature_mismatch(self, loop: Structure) -> None:
        """Test that unions need equal signatures."""
        other = Structure.build(Signature.build({"Q": 1}), 1)
        with pytest.raises(SignatureError):
            disjoint_union(loop, other)

    def test_glued_union(self) -> None:
        """Test that named elements of the right operand land on the left constants."""
        sig = Signature.build({"P": 2}, ["c"])
        left = Structure.build(sig, 2, {"c": 1}, {"P": [(0, 1)]})
        right = Structure.build(sig, 2, {"c": 0}, {"P": [(1, 0)]})
        union, left_map, right_map = glued_union(left, right)

        assert len(union) == 3
        assert right_map == {0: 1, 1: 2}
        assert left_map == {0: 0, 1: 1}
        assert union.rel("P") == {(0, 1), (2, 1)}
        assert dict(union.constants) == {"c": 1}

    def test_glued_union_without_constants(self, loop: Structure) -> None:
        """Test that without constants the glued union is the disjoint union."""
        initial = canonical_structure(loop.sig, "initial")

        assert glued_union(loop, initial)[0] == disjoint_union(loop, initial)

    def test_glued_union_conflict(self) -> None:
        """Test that one element cannot name constants the left keeps apart."""
        sig = Signature.build({"P": 1}, ["c", "d"])
        left = Structure.build(sig, 2, {"c": 0, "d": 1})
        right = Structure.build(sig, 1, {"c": 0, "d": 0})
        with pytest.raises(StructureValidationError, match="different interpretations"):
            glued_union(left, right)

    def test_canonical_query_of_loop(self, loop: Structure) -> None:
        """Test the canonical query of a loop."""
        query = canonical_query(loop)

        assert eval_fo(loop, query)
        assert isinstance(query, Exists) and query.var == "x0"

    def test_canonical_query_with_constant(self) -> None:
        """Test that constants are pinned by equalities."""
        sig = Signature.build({"P": 1}, ["c"])
        structure = Structure.build(sig, 1, {"c": 0}, {"P": [(0,)]})
        query = canonical_query(structure)

        assert isinstance(query, Exists) and isinstance(query.body, And)
        assert Eq(Const("c"), Var("x0")) in query.body.items


@pytest.mark.unit
class TestLabeling:
    """Tests for labelings, implicit representations and unfoldings."""

    def test_bit_width(self) -> None:
        """Test the number of Bit predicates per label bound."""
        assert bit_width(1) == 0
        assert bit_width(2) == 1
        assert bit_width(4) == 2
        assert bit_width(5) == 3

    def test_unfold_loop(self, loop: Structure) -> None:
        """Test that unfolding a loop with label 2 yields all four pairs."""
        unfolded, projection = Labeling(loop, 2, {0: 2}).unfold()

        assert len(unfolded) == 2
        assert unfolded.rel("P") == {(0, 0), (0, 1), (1, 0), (1, 1)}
        assert set(projection.values()) == {0}

    def test_implicit_representation_n1(self, two_path: Structure) -> None:
        """Test that the bound 1 adds no Bit predicates."""
        labeling = Labeling(two_path, 1, {0: 1, 1: 1})

        assert labeling.implicit_representation() == two_path

    def test_implicit_representation_decodes(self, two_path: Structure) -> None:
        """Test that labels are recoverable from Bit predicates."""
        labeling = Labeling(two_path, 3, {0: 1, 1: 3})
        implicit = labeling.implicit_representation()

        assert implicit.sig.has_predicate(bit_predicate(1))
        assert decode_label(implicit, 0, labeling.width) == 1
        assert decode_label(implicit, 1, labeling.width) == 3

    def test_bits_most_significant_first(self, two_path: Structure) -> None:
        """Test that Bit1 carries the high bit of label-1."""
        labeling = Labeling(two_path, 4, {0: 2, 1: 3})
        implicit = labeling.implicit_representation()

        assert labeling.width == 2
        assert implicit.rel(bit_predicate(1)) == {(1,)}
        assert implicit.rel(bit_predicate(2)) == {(0,)}
        assert [label_bit(4, j, 2) for j in (1, 2)] == [True, True]

    def test_label_out_of_range(self, loop: Structure) -> None:
        """Test that labels must lie in 1..n."""
        with pytest.raises(StructureValidationError, match="outside"):
            Labeling(loop, 2, {0: 3})

    def test_unfold_requires_constant_sole(self) -> None:
        """Test that constants must carry label 1."""
        sig = Signature.build({"P": 1}, ["c"])
        structure = Structure.build(sig, 1, {"c": 0})
        labeling = Labeling(structure, 2, {0: 2})

        assert not labeling.is_constant_sole
        with pytest.raises(StructureValidationError, match="constant-sole"):
            labeling.unfold()
