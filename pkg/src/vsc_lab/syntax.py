"""Concrete syntax.

    term     ::= lam | app
    lam      ::= ('\\' | 'λ') ident '.' term
    app      ::= app suffixed | suffixed
    suffixed ::= atom | suffixed '[' ident '<-' term ']'
    atom     ::= ident | '(' term ')'
"""

from __future__ import annotations

import re

from .terms import App, Es, Lam, Term, Var


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<ident>[a-z][A-Za-z0-9_']*)|(?P<arrow><-)|(?P<lam>[\\λ])|(?P<punct>[.()\[\]])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind == "ws":
            for i, ch in enumerate(value):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        else:
            if kind == "punct":
                kind = value
            tokens.append((kind, value, line, pos - line_start + 1))
        pos = m.end()
    tokens.append(("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.tokens[self.i][0]

    def expect(self, kind: str) -> str:
        tok_kind, value, line, col = self.tokens[self.i]
        if tok_kind != kind:
            shown = value or "end of input"
            raise ParseError(f"expected {kind!r} but found {shown!r}", line, col)
        self.i += 1
        return value

    def error(self, message: str) -> ParseError:
        _, value, line, col = self.tokens[self.i]
        return ParseError(f"{message} (found {value or 'end of input'!r})", line, col)

    def term(self) -> Term:
        if self.peek() == "lam":
            self.i += 1
            binder = self.expect("ident")
            self.expect(".")
            return Lam(binder, self.term())
        t = self.suffixed()
        while self.peek() in ("ident", "("):
            t = App(t, self.suffixed())
        if self.peek() == "lam":
            raise self.error("an abstraction in argument position needs parentheses")
        return t

    def suffixed(self) -> Term:
        t = self.atom()
        while self.peek() == "[":
            self.i += 1
            binder = self.expect("ident")
            self.expect("arrow")
            subject = self.term()
            self.expect("]")
            t = Es(t, binder, subject)
        return t

    def atom(self) -> Term:
        kind = self.peek()
        if kind == "ident":
            return Var(self.expect("ident"))
        if kind == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        raise self.error("expected a variable or '('")


def parse(text: str) -> Term:
    p = _Parser(text)
    t = p.term()
    p.expect("eof")
    return t


def print_term(t: Term, full_parens: bool = False) -> str:
    if full_parens:
        return _full(t)
    return _term(t)


def _term(t: Term) -> str:
    if isinstance(t, Lam):
        return f"\\{t.binder}.{_term(t.body)}"
    return _app(t)


def _app(t: Term) -> str:
    if isinstance(t, App):
        return f"{_app(t.fun)} {_suffixed(t.arg)}"
    return _suffixed(t)


def _suffixed(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Es):
        return f"{_suffixed(t.body)}[{t.binder} <- {_term(t.subject)}]"
    return f"({_term(t)})"


def _full(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Lam):
        return f"(\\{t.binder}.{_full(t.body)})"
    if isinstance(t, App):
        return f"({_full(t.fun)} {_full(t.arg)})"
    return f"({_full(t.body)}[{t.binder} <- {_full(t.subject)}])"
