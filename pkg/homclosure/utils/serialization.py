"""Line-oriented JSON serialization for structures and reports."""

import json
from collections.abc import Iterator, Mapping
from typing import Any

from homclosure.core.signature import Signature
from homclosure.core.structure import Structure
from homclosure.exceptions import ArityMismatchError, ParseError, UnknownSymbolError


class StructureCodec:
    """
    Encodes structures as one JSON object per line.

    Keys and tuples are sorted, so equal structures always serialize to the
    same bytes.

    Example:
        ```
        {"constants": {"c": 0}, "domain": [0, 1], "relations": {"P": [[0, 1]]}}
        ```
    """

    @staticmethod
    def to_dict(structure: Structure) -> dict[str, Any]:
        return {
            "domain": list(structure.domain),
            "constants": dict(sorted(structure.constants.items())),
            "relations": {
                name: [list(t) for t in sorted(structure.relations[name])]
                for name, _ in structure.sig.predicates
            },
        }

    @staticmethod
    def dumps(structure: Structure) -> str:
        return dumps_line(StructureCodec.to_dict(structure))

    @staticmethod
    def from_dict(data: Mapping[str, Any], sig: Signature | None = None) -> Structure:
        """
        Decode a structure record.

        Without a signature, arities are inferred from the tuples and every
        constant key is declared.

        Raises:
            ParseError: If required keys are missing or malformed
            UnknownSymbolError: If a symbol is not declared in sig
            ArityMismatchError: If an arity cannot be inferred
        """
        if not isinstance(data, Mapping) or "domain" not in data:
            raise ParseError("Structure record needs a 'domain' key")
        relations = data.get("relations", {}) or {}
        constants = data.get("constants", {}) or {}
        if not isinstance(relations, Mapping) or not isinstance(constants, Mapping):
            raise ParseError("'relations' and 'constants' must be objects")

        if sig is None:
            predicates = []
            for name, tuples in relations.items():
                if not tuples:
                    raise ArityMismatchError(
                        f"Cannot infer the arity of empty relation {name}; supply a signature"
                    )
                predicates.append((name, len(tuples[0])))
            sig = Signature(tuple(predicates), tuple(constants))
        else:
            unknown = sorted(
                [n for n in relations if not sig.has_predicate(n)]
                + [c for c in constants if not sig.has_constant(c)]
            )
            if unknown:
                raise UnknownSymbolError(f"Unknown symbols in structure record: {unknown}")

        return Structure.build(
            sig,
            [int(a) for a in data["domain"]],
            {str(c): int(a) for c, a in constants.items()},
            {str(n): [tuple(int(a) for a in t) for t in ts] for n, ts in relations.items()},
        )

    @staticmethod
    def loads(text: str, sig: Signature | None = None) -> list[Structure]:
        """Decode every non-empty line of text as a structure."""
        return [StructureCodec.from_dict(record, sig) for record in iter_records(text)]


def dumps_line(record: Mapping[str, Any]) -> str:
    """Canonical single-line JSON."""
    return json.dumps(record, sort_keys=True, separators=(", ", ": "))


def iter_records(text: str) -> Iterator[Any]:
    """
    Parse one JSON value per non-empty line.

    Raises:
        ParseError: On invalid JSON, with the line number
    """
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError as e:
            raise ParseError(f"Invalid JSON: {e.msg}", number, e.colno) from e
