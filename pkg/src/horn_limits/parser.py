"""Parsing and printing of programs, interpretations and ground atoms.

Grammar (UTF-8, whitespace-insensitive, ``%`` starts a comment to end of
line)::

    clause  := atom "." | atom ":-" atomlist "."
    atomlist:= atom ("," atom)*
    atom    := pred | pred "(" term ("," term)* ")"
    term    := VARIABLE | CONSTANT | functor "(" term ("," term)* ")"

Variables start with ``A``-``Z`` or ``_``; constants, functors and
predicates start with a lowercase letter.  In any term position,
``f^3(t)`` abbreviates ``f(f(f(t)))`` (positive integer exponent).
Sequence-schema templates may additionally use the meta exponents ``n``,
``{n}`` and ``{n+c}``, which instantiate once the sequence index is known.

Printing produces the normalized form: canonical variable names,
expanded exponents, one clause per line.  ``parse(print(parse(text)))``
equals ``parse(text)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ArityError, GoalClauseError, ParseError
from .syntax import (
    Application,
    Atom,
    Constant,
    HornClause,
    Interpretation,
    MetaPower,
    Program,
    Variable,
    atom_is_ground,
)

# ---------------------------------------------------------------------------
# Tokenizer

_PUNCT = {
    "(": "LPAREN",
    ")": "RPAREN",
    ",": "COMMA",
    ".": "PERIOD",
    "^": "CARET",
    "{": "LBRACE",
    "}": "RBRACE",
    "+": "PLUS",
}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str, source: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c == ":" and i + 1 < n and text[i + 1] == "-":
            tokens.append(_Token("IMPLIES", ":-", line, col))
            i += 2
            col += 2
            continue
        if c in _PUNCT:
            tokens.append(_Token(_PUNCT[c], c, line, col))
            i += 1
            col += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("INT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if (c == "_" or c.isupper()) else "NAME"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {c!r}", source=source, line=line, column=col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser


class _Parser:
    def __init__(self, text: str, source: str, *, allow_meta: bool = False) -> None:
        self.tokens = _tokenize(text, source)
        self.source = source
        self.allow_meta = allow_meta
        self.pos = 0
        # symbol -> (arity, first-use token), for located arity diagnostics
        self.term_arity: dict[str, tuple[int, _Token]] = {}
        self.pred_arity: dict[str, tuple[int, _Token]] = {}

    # -- token plumbing

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}", tok)
        return self.advance()

    def fail(self, message: str, tok: _Token | None = None) -> None:
        tok = tok or self.peek()
        raise ParseError(message, source=self.source, line=tok.line, column=tok.column)

    # -- arity bookkeeping

    def record_term_symbol(self, name: str, arity: int, tok: _Token) -> None:
        known = self.term_arity.setdefault(name, (arity, tok))[0]
        if known != arity:
            raise ArityError(
                name,
                f"term symbol {name!r} used with arities {known} and {arity}",
                source=self.source,
                line=tok.line,
                column=tok.column,
            )

    def record_predicate(self, name: str, arity: int, tok: _Token) -> None:
        known = self.pred_arity.setdefault(name, (arity, tok))[0]
        if known != arity:
            raise ArityError(
                name,
                f"predicate {name!r} used with arities {known} and {arity}",
                source=self.source,
                line=tok.line,
                column=tok.column,
            )

    # -- grammar

    def parse_clauses(self) -> list[HornClause]:
        clauses: list[HornClause] = []
        while self.peek().kind != "EOF":
            clauses.append(self.clause())
        return clauses

    def clause(self) -> HornClause:
        tok = self.peek()
        if tok.kind == "IMPLIES":
            raise GoalClauseError(
                "goal clause (no head atom) is not accepted",
                source=self.source,
                line=tok.line,
                column=tok.column,
            )
        head = self.atom()
        body: list[Atom] = []
        if self.peek().kind == "IMPLIES":
            self.advance()
            body.append(self.atom())
            while self.peek().kind == "COMMA":
                self.advance()
                body.append(self.atom())
        self.expect("PERIOD", "'.'")
        return HornClause(head, tuple(body))

    def atom(self) -> Atom:
        tok = self.expect("NAME", "a predicate name")
        args: list = []
        if self.peek().kind == "LPAREN":
            self.advance()
            args.append(self.term())
            while self.peek().kind == "COMMA":
                self.advance()
                args.append(self.term())
            self.expect("RPAREN", "')'")
        self.record_predicate(tok.text, len(args), tok)
        return Atom(tok.text, tuple(args))

    def term(self):
        tok = self.peek()
        if tok.kind == "VAR":
            self.advance()
            return Variable(tok.text)
        if tok.kind != "NAME":
            self.fail(f"expected a term, found {tok.text!r}" if tok.text else "expected a term")
        self.advance()
        if self.peek().kind == "CARET":
            self.advance()
            return self.power_term(tok)
        if self.peek().kind == "LPAREN":
            self.advance()
            args = [self.term()]
            while self.peek().kind == "COMMA":
                self.advance()
                args.append(self.term())
            self.expect("RPAREN", "')'")
            self.record_term_symbol(tok.text, len(args), tok)
            return Application(tok.text, tuple(args))
        self.record_term_symbol(tok.text, 0, tok)
        return Constant(tok.text)

    def power_term(self, functor_tok: _Token):
        """``f^3(t)``, and in template mode ``f^n(t)`` / ``f^{n+c}(t)``."""
        count, offset = self.exponent()
        self.expect("LPAREN", "'('")
        inner = self.term()
        self.expect("RPAREN", "')'")
        self.record_term_symbol(functor_tok.text, 1, functor_tok)
        if count is not None:
            result = inner
            for _ in range(count):
                result = Application(functor_tok.text, (result,))
            return result
        return MetaPower(functor_tok.text, offset, inner)

    def exponent(self) -> tuple[int | None, int]:
        """Returns (literal count, 0) or, for a meta exponent, (None, offset)."""
        tok = self.peek()
        braced = tok.kind == "LBRACE"
        if braced:
            self.advance()
            tok = self.peek()
        if tok.kind == "INT":
            self.advance()
            value = int(tok.text)
            if value < 1:
                self.fail("exponent must be a positive integer", tok)
            result: tuple[int | None, int] = (value, 0)
        elif tok.kind == "NAME" and tok.text == "n" and self.allow_meta:
            self.advance()
            offset = 0
            if braced and self.peek().kind == "PLUS":
                self.advance()
                off_tok = self.expect("INT", "a non-negative integer offset")
                offset = int(off_tok.text)
            result = (None, offset)
        else:
            what = "an exponent (positive integer"
            what += " or n, {n}, {n+c})" if self.allow_meta else ")"
            self.fail(f"expected {what}", tok)
        if braced:
            self.expect("RBRACE", "'}'")
        return result


# ---------------------------------------------------------------------------
# Entry points


def parse_program(text: str, source: str = "<string>") -> Program:
    """Parse a whole program.  Total over the grammar; empty text is fine."""
    clauses = _Parser(text, source).parse_clauses()
    return Program.from_clauses(clauses)


def parse_clause(text: str, source: str = "<string>", *, allow_meta: bool = False) -> HornClause:
    """Parse exactly one clause (used for schema entries and templates)."""
    parser = _Parser(text, source, allow_meta=allow_meta)
    clause = parser.clause()
    tok = parser.peek()
    if tok.kind != "EOF":
        parser.fail("expected a single clause", tok)
    return clause


def parse_ground_atom(text: str, source: str = "<string>") -> Atom:
    parser = _Parser(text, source)
    atom = parser.atom()
    tok = parser.peek()
    if tok.kind != "EOF":
        parser.fail("expected a single atom", tok)
    if not atom_is_ground(atom):
        raise ParseError(f"atom must be ground: {atom}", source=source)
    return atom


def parse_interpretation(text: str, source: str = "<string>") -> Interpretation:
    """Parse an interpretation file: one ground atom per line, ``%`` comments."""
    parser = _Parser(text, source)
    atoms: set[Atom] = set()
    while parser.peek().kind != "EOF":
        tok = parser.peek()
        atom = parser.atom()
        if not atom_is_ground(atom):
            raise ParseError(
                f"interpretation atom must be ground: {atom}",
                source=source,
                line=tok.line,
                column=tok.column,
            )
        atoms.add(atom)
    return Interpretation(frozenset(atoms))


def program_to_text(program: Program) -> str:
    """Normalized textual form; inverse of :func:`parse_program` up to normalization."""
    if not program.clauses:
        return ""
    return "\n".join(str(c) for c in program.clauses) + "\n"


def interpretation_to_text(interp: Interpretation) -> str:
    return "\n".join(str(a) for a in interp.in_canonical_order()) + ("\n" if interp.atoms else "")
