"""Signature data model."""

from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from homclosure.exceptions import SignatureError, UnknownSymbolError

RESERVED_PREFIX = "__"


@dataclass(frozen=True)
class Signature:
    """
    Finite vocabulary of predicate symbols (with arities) and constant symbols.

    Predicates and constants keep their declaration order; every ordered
    enumeration in the toolkit (model search, type enumeration) follows it.
    """

    predicates: tuple[tuple[str, int], ...] = ()
    """Predicate symbols as (name, arity) pairs, arity >= 1"""

    constants: tuple[str, ...] = ()
    """Constant symbol names"""

    _arities: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        errors = []
        seen: set[str] = set()
        for name, arity in self.predicates:
            if name in seen:
                errors.append(f"Duplicate symbol: {name}")
            seen.add(name)
            if arity < 1:
                errors.append(f"Predicate {name} must have arity >= 1, got {arity}")
        for name in self.constants:
            if name in seen:
                errors.append(f"Duplicate symbol: {name}")
            seen.add(name)
        if errors:
            raise SignatureError("\n".join(errors))
        object.__setattr__(self, "_arities", dict(self.predicates))

    @classmethod
    def build(
        cls, predicates: Mapping[str, int] | None = None, constants: Iterable[str] = ()
    ) -> "Signature":
        """Build a signature from a name->arity mapping and a constant list."""
        return cls(tuple((predicates or {}).items()), tuple(constants))

    @property
    def predicate_names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.predicates)

    def has_predicate(self, name: str) -> bool:
        return name in self._arities

    def has_constant(self, name: str) -> bool:
        return name in self.constants

    def arity(self, name: str) -> int:
        """
        Get the arity of a predicate.

        Raises:
            UnknownSymbolError: If the predicate is not declared
        """
        try:
            return self._arities[name]
        except KeyError:
            raise UnknownSymbolError(f"Unknown predicate: {name}") from None

    def with_predicates(self, predicates: Iterable[tuple[str, int]]) -> "Signature":
        """Extend by fresh predicates; clashes raise SignatureError."""
        return Signature(self.predicates + tuple(predicates), self.constants)

    def with_constants(self, constants: Iterable[str]) -> "Signature":
        """Extend by fresh constants; clashes raise SignatureError."""
        return Signature(self.predicates, self.constants + tuple(constants))

    def without(self, names: Iterable[str]) -> "Signature":
        drop = set(names)
        return Signature(
            tuple(p for p in self.predicates if p[0] not in drop),
            tuple(c for c in self.constants if c not in drop),
        )

    def union(self, other: "Signature") -> "Signature":
        """
        Merge two signatures; shared symbols must agree on their kind and arity.

        Raises:
            SignatureError: If a shared name is declared incompatibly
        """
        predicates = list(self.predicates)
        for name, arity in other.predicates:
            if name in self._arities:
                if self._arities[name] != arity:
                    raise SignatureError(f"Conflicting arities for {name}")
                continue
            predicates.append((name, arity))
        constants = list(self.constants)
        for name in other.constants:
            if name not in constants:
                constants.append(name)
        return Signature(tuple(predicates), tuple(constants))

    def is_subsignature(self, other: "Signature") -> bool:
        """True if every symbol of self is declared identically in other."""
        return all(
            other.has_predicate(n) and other.arity(n) == a for n, a in self.predicates
        ) and all(other.has_constant(c) for c in self.constants)

    def symbols(self) -> set[str]:
        return set(self._arities) | set(self.constants)

    def check_fresh(self, names: Iterable[str]) -> None:
        """
        Ensure that the given names are not declared.

        Raises:
            SignatureError: If a name already occurs in the signature
        """
        clashes = sorted(set(names) & self.symbols())
        if clashes:
            raise SignatureError(f"Fresh symbols clash with signature: {clashes}")

    def check_user_names(self) -> None:
        """
        Ensure that no symbol uses the reserved prefix.

        Raises:
            SignatureError: If a reserved name is declared
        """
        reserved = sorted(n for n in self.symbols() if n.startswith(RESERVED_PREFIX))
        if reserved:
            raise SignatureError(
                f"Symbols may not use the reserved prefix '{RESERVED_PREFIX}': {reserved}"
            )

    def __str__(self) -> str:
        parts = [f"{n}/{a}" for n, a in self.predicates] + [f"const {c}" for c in self.constants]
        return "sig { " + "".join(p + "; " for p in parts) + "}"
