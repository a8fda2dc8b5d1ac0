"""Text grammar for signatures and formulas."""

import re
from dataclasses import dataclass

from homclosure.core.formula import (
    And,
    Atom,
    Bottom,
    Const,
    Eq,
    Exists,
    ExistsFinSO,
    ExistsSO,
    Forall,
    ForallSO,
    Formula,
    Lfp,
    LfpDef,
    Not,
    Or,
    Term,
    Top,
    Var,
    iff,
    implies,
)
from homclosure.core.signature import RESERVED_PREFIX, Signature
from homclosure.exceptions import ParseError

KEYWORDS = frozenset(
    {"forall", "exists", "existsSO", "forallSO", "existsFin", "lfp", "in", "true", "false", "sig", "const"}
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
    |(?P<newline>\n)
    |(?P<comment>\#[^\n]*)
    |(?P<op><->|->|!=|:=|[!&|(){},.;/=])
    |(?P<int>[0-9]+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    """One of 'op', 'int', 'ident', 'kw', 'eof'"""

    text: str
    line: int
    column: int


def is_predicate_name(name: str) -> bool:
    """Predicates start (after leading underscores) with an uppercase letter."""
    stripped = name.lstrip("_")
    return bool(stripped) and stripped[0].isupper()


def tokenize(text: str) -> list[Token]:
    """
    Split text into tokens.

    Raises:
        ParseError: On an unexpected character
    """
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if not match:
            raise ParseError(f"Unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup or ""
        column = pos - line_start + 1
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind == "ident":
            value = match.group()
            tokens.append(Token("kw" if value in KEYWORDS else "ident", value, line, column))
        elif kind in ("op", "int"):
            tokens.append(Token(kind, match.group(), line, column))
        pos = match.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature | None, allow_reserved: bool) -> None:
        self.tokens = tokenize(text)
        self.pos = 0
        self.sig = sig or Signature()
        self.allow_reserved = allow_reserved

    # token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def error(self, message: str, token: Token | None = None) -> ParseError:
        token = token or self.current
        found = token.text or "end of input"
        return ParseError(f"{message}, found {found!r}", token.line, token.column)

    def at(self, text: str) -> bool:
        token = self.current
        return token.kind in ("op", "kw") and token.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"Expected {text!r}")
        token = self.current
        self.pos += 1
        return token

    def ident(self, what: str) -> Token:
        token = self.current
        if token.kind != "ident":
            raise self.error(f"Expected {what}")
        if token.text.startswith(RESERVED_PREFIX) and not self.allow_reserved:
            raise ParseError(
                f"Reserved name {token.text!r} is not allowed", token.line, token.column
            )
        self.pos += 1
        return token

    def integer(self) -> int:
        token = self.current
        if token.kind != "int":
            raise self.error("Expected an integer")
        self.pos += 1
        return int(token.text)

    # signature header

    def signature_header(self) -> Signature | None:
        if not self.accept("sig"):
            return None
        self.expect("{")
        predicates: list[tuple[str, int]] = []
        constants: list[str] = []
        while not self.accept("}"):
            if self.accept("const"):
                while True:
                    token = self.ident("constant name")
                    if is_predicate_name(token.text):
                        raise ParseError(
                            f"Constant names must be lowercase: {token.text!r}",
                            token.line,
                            token.column,
                        )
                    constants.append(token.text)
                    if not self.accept(","):
                        break
            else:
                token = self.ident("predicate declaration")
                if not is_predicate_name(token.text):
                    raise ParseError(
                        f"Predicate names must be uppercase-initial: {token.text!r}",
                        token.line,
                        token.column,
                    )
                self.expect("/")
                predicates.append((token.text, self.integer()))
            if not self.at("}"):
                self.expect(";")
        return Signature(tuple(predicates), tuple(constants))

    # formulas, lowest precedence first

    def formula(self) -> Formula:
        left = self.implication()
        while self.accept("<->"):
            left = iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.accept("->"):
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        items = [self.conjunction()]
        while self.accept("|"):
            items.append(self.conjunction())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def conjunction(self) -> Formula:
        items = [self.unary()]
        while self.accept("&"):
            items.append(self.unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def unary(self) -> Formula:
        if self.accept("!"):
            return Not(self.unary())
        if self.at("forall") or self.at("exists"):
            quantifier = Forall if self.current.text == "forall" else Exists
            self.pos += 1
            names = self.variable_list()
            # "forall x exists y. ..." chains without a dot
            if not (self.at("forall") or self.at("exists")):
                self.expect(".")
            body = self.formula()
            for name in reversed(names):
                body = quantifier(name, body)
            return body
        if self.at("existsSO") or self.at("forallSO") or self.at("existsFin"):
            so_quantifier = {"existsSO": ExistsSO, "forallSO": ForallSO, "existsFin": ExistsFinSO}[
                self.current.text
            ]
            self.pos += 1
            declared: list[tuple[str, int]] = []
            while not self.at("."):
                token = self.ident("predicate variable")
                if not is_predicate_name(token.text):
                    raise ParseError(
                        f"Second-order variables must be uppercase-initial: {token.text!r}",
                        token.line,
                        token.column,
                    )
                self.expect("/")
                declared.append((token.text, self.integer()))
                self.accept(",")
            if not declared:
                raise self.error("Expected predicate variable")
            self.expect(".")
            body = self.formula()
            for name, arity in reversed(declared):
                body = so_quantifier(name, arity, body)
            return body
        if self.accept("lfp"):
            return self.fixpoint()
        return self.primary()

    def variable_list(self) -> list[str]:
        names = []
        while self.current.kind == "ident":
            token = self.ident("variable")
            if is_predicate_name(token.text):
                raise ParseError(
                    f"Variables must be lowercase: {token.text!r}", token.line, token.column
                )
            names.append(token.text)
            self.accept(",")
        if not names:
            raise self.error("Expected variable")
        return names

    def fixpoint(self) -> Formula:
        defs = []
        while True:
            token = self.ident("fixpoint predicate")
            self.expect("(")
            params = tuple(self.variable_list()) if not self.at(")") else ()
            self.expect(")")
            self.expect(":=")
            defs.append(LfpDef(token.text, params, self.formula()))
            if self.accept("in"):
                break
            self.expect(";")
        goal = self.ident("fixpoint goal")
        return Lfp(tuple(defs), goal.text, self.argument_list())

    def argument_list(self) -> tuple[Term, ...]:
        self.expect("(")
        terms: list[Term] = []
        if not self.at(")"):
            terms.append(self.term())
            while self.accept(","):
                terms.append(self.term())
        self.expect(")")
        return tuple(terms)

    def term(self) -> Term:
        token = self.ident("term")
        if is_predicate_name(token.text):
            raise ParseError(
                f"Terms must be lowercase: {token.text!r}", token.line, token.column
            )
        if self.sig.has_constant(token.text):
            return Const(token.text)
        return Var(token.text)

    def primary(self) -> Formula:
        if self.accept("true"):
            return Top()
        if self.accept("false"):
            return Bottom()
        if self.accept("("):
            inner = self.formula()
            self.expect(")")
            return inner
        token = self.current
        if token.kind == "ident" and is_predicate_name(token.text):
            self.ident("predicate")
            return Atom(token.text, self.argument_list())
        if token.kind == "ident":
            left = self.term()
            if self.accept("="):
                return Eq(left, self.term())
            if self.accept("!="):
                return Not(Eq(left, self.term()))
            raise self.error("Expected '=' or '!='")
        raise self.error("Expected formula")

    def end(self) -> None:
        if self.current.kind != "eof":
            raise self.error("Unexpected trailing input")


class FormulaParser:
    """
    Parser for the keyword-based ASCII formula grammar.

    Precedence from tightest to loosest: ``!``, ``&``, ``|``, ``->``
    (right associative), ``<->``. Quantifier bodies extend as far right as
    possible. Implications and equivalences are expanded on the fly.

    Example:
        ```python
        sig, phi = FormulaParser.parse_document("sig { P/2; } forall x exists y. P(x,y)")
        ```
    """

    @staticmethod
    def parse_document(
        text: str, sig: Signature | None = None, allow_reserved: bool = False
    ) -> tuple[Signature, Formula]:
        """
        Parse an optional ``sig { ... }`` header followed by a formula.

        A header is merged into ``sig`` when both are present.

        Args:
            text: Source text
            sig: Ambient signature
            allow_reserved: Accept ``__``-prefixed names produced by constructions

        Returns:
            Tuple of (signature, unvalidated formula)

        Raises:
            ParseError: On syntax errors, with line and column
        """
        parser = _Parser(text, sig, allow_reserved)
        header = parser.signature_header()
        if header is not None:
            parser.sig = header if sig is None else sig.union(header)
        formula = parser.formula()
        parser.end()
        return parser.sig, formula

    @staticmethod
    def parse_signature(text: str, allow_reserved: bool = False) -> Signature:
        """Parse a standalone ``sig { ... }`` block."""
        parser = _Parser(text, None, allow_reserved)
        header = parser.signature_header()
        if header is None:
            raise parser.error("Expected 'sig'")
        parser.end()
        return header
