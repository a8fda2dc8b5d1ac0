from homclosure.core.formula import Formula
from homclosure.core.loader import Loader, parse_document, parse_sentence
from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.core.validator import FormulaValidator, StructureValidator

__all__ = [
    "Formula",
    "FormulaValidator",
    "Loader",
    "Signature",
    "Structure",
    "StructureValidator",
    "parse_document",
    "parse_sentence",
]
