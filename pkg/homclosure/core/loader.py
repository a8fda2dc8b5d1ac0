from pathlib import Path

from homclosure.core.formula import Formula
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.core.validator import FormulaValidator
from homclosure.exceptions import LoadError, LogicError
from homclosure.reductions.dominoes import DominoSystem
from homclosure.utils.formula_parser import FormulaParser
from homclosure.utils.serialization import StructureCodec, iter_records


def parse_sentence(
    text: str, sig: Signature | None = None, allow_reserved: bool = False
) -> Formula:
    """
    Parse and validate a sentence.

    Args:
        text: Sentence text, optionally preceded by a ``sig { ... }`` header
        sig: Ambient signature
        allow_reserved: Accept ``__``-prefixed names

    Returns:
        Validated sentence

    Raises:
        ParseError: On syntax errors
        UnknownSymbolError: On undeclared symbols
        ArityMismatchError: On wrong atom lengths
        FormulaValidationError: On free variables or non-positive fixpoints
    """
    return parse_document(text, sig, allow_reserved)[1]


def parse_document(
    text: str, sig: Signature | None = None, allow_reserved: bool = False
) -> tuple[Signature, Formula]:
    """Parse and validate a sentence, returning the effective signature too."""
    full_sig, phi = FormulaParser.parse_document(text, sig, allow_reserved)
    if not allow_reserved:
        full_sig.check_user_names()
    FormulaValidator.validate(phi, full_sig, sentence=True)
    return full_sig, phi


class Loader:
    @staticmethod
    def load_sentence(path: Path, sig: Signature | None = None) -> tuple[Signature, Formula]:
        """
        Load a sentence file (signature header plus sentence).

        Raises:
            LoadError: If the file is missing or unreadable
            LogicError: Parse and validation errors are re-raised unchanged
        """
        if not path.exists():
            raise LoadError(f"Sentence file not found: {path}")

        try:
            return parse_document(path.read_text(encoding="utf-8"), sig, allow_reserved=True)
        except LogicError:
            raise
        except Exception as e:
            raise LoadError(f"Failed to load sentence from {path}: {e}") from e

    @staticmethod
    def load_structures(path: Path, sig: Signature | None = None) -> list[Structure]:
        """
        Load every structure record of a line-JSON file.

        Raises:
            LoadError: If the file is missing, unreadable or empty
        """
        if not path.exists():
            raise LoadError(f"Structure file not found: {path}")

        try:
            structures = StructureCodec.loads(path.read_text(encoding="utf-8"), sig)
        except LogicError:
            raise
        except Exception as e:
            raise LoadError(f"Failed to load structure from {path}: {e}") from e
        if not structures:
            raise LoadError(f"No structure records in {path}")
        return structures

    @staticmethod
    def load_structure(path: Path, sig: Signature | None = None) -> Structure:
        """Load the first structure record of a file."""
        return Loader.load_structures(path, sig)[0]

    @staticmethod
    def load_domino_system(path: Path) -> DominoSystem:
        """
        Load a domino system record.

        Raises:
            LoadError: If the file is missing or unreadable
            ReductionError: If the record is malformed
        """
        if not path.exists():
            raise LoadError(f"Domino file not found: {path}")

        try:
            records = list(iter_records(path.read_text(encoding="utf-8")))
            if not records:
                raise LoadError(f"No domino record in {path}")
            return DominoSystem.from_dict(records[0])
        except LogicError:
            raise
        except Exception as e:
            raise LoadError(f"Failed to load domino system from {path}: {e}") from e

    @staticmethod
    def load_clauses(path: Path) -> list[list[int | str]]:
        """
        Load 3SAT clauses, one JSON array of literals per line.

        A single line holding a list of clauses is accepted too.

        Raises:
            LoadError: If the file is missing, unreadable or holds no clause
        """
        if not path.exists():
            raise LoadError(f"Clause file not found: {path}")

        try:
            records = list(iter_records(path.read_text(encoding="utf-8")))
        except LogicError:
            raise
        except Exception as e:
            raise LoadError(f"Failed to load clauses from {path}: {e}") from e
        if len(records) == 1 and isinstance(records[0], list) and records[0]:
            if all(isinstance(r, list) for r in records[0]):
                records = records[0]
        if not records:
            raise LoadError(f"No clauses in {path}")
        if not all(isinstance(r, list) for r in records):
            raise LoadError(f"Each clause must be a JSON array of literals: {path}")
        return [list(r) for r in records]

    @staticmethod
    def load_tiling(path: Path) -> tuple[tuple[str, ...], ...]:
        """
        Load a rectangular tiling, one JSON array of tile names per row, bottom row first.

        Raises:
            LoadError: If the file is missing, unreadable or empty
        """
        if not path.exists():
            raise LoadError(f"Tiling file not found: {path}")

        try:
            rows = [tuple(str(t) for t in row) for row in iter_records(path.read_text(encoding="utf-8"))]
        except LogicError:
            raise
        except Exception as e:
            raise LoadError(f"Failed to load tiling from {path}: {e}") from e
        if not rows:
            raise LoadError(f"No tiling rows in {path}")
        return tuple(rows)
