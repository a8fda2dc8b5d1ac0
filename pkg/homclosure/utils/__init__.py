from homclosure.utils.formula_parser import FormulaParser
from homclosure.utils.formula_printer import FormulaPrinter
from homclosure.utils.serialization import StructureCodec

__all__ = ["FormulaParser", "FormulaPrinter", "StructureCodec"]
