"""Minimal s-expression reader.

Forms are parenthesized lists of symbols; `;` starts a comment that runs to
end of line.  Symbols are bare tokens (no string or numeric literals -- the
formula language treats everything as a symbol).  The reader returns nested
``list`` / ``str`` structures and tracks line/column for error messages.
"""

from __future__ import annotations

from .errors import ParseError

Sexp = "str | list"  # informal alias; real type is str | list[Sexp]

_DELIMS = "()"


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def skip_blank(self) -> None:
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == ";":
                while self.pos < len(self.text) and self.text[self.pos] != "\n":
                    self._advance()
            elif c.isspace():
                self._advance()
            else:
                return

    def at_end(self) -> bool:
        self.skip_blank()
        return self.pos >= len(self.text)

    def read(self):
        self.skip_blank()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        c = self.text[self.pos]
        if c == "(":
            self._advance()
            items = []
            while True:
                self.skip_blank()
                if self.pos >= len(self.text):
                    raise self.error("unclosed '('")
                if self.text[self.pos] == ")":
                    self._advance()
                    return items
                items.append(self.read())
        if c == ")":
            raise self.error("unexpected ')'")
        return self._read_symbol()

    def _read_symbol(self) -> str:
        start = self.pos
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c.isspace() or c in _DELIMS or c == ";":
                break
            self._advance()
        if self.pos == start:
            raise self.error("expected a symbol")
        return self.text[start : self.pos]


def read(text: str):
    """Read exactly one form; trailing non-blank input is an error."""
    r = _Reader(text)
    form = r.read()
    if not r.at_end():
        raise r.error("trailing input after form")
    return form


def read_all(text: str) -> list:
    r = _Reader(text)
    forms = []
    while not r.at_end():
        forms.append(r.read())
    return forms


def write(form) -> str:
    if isinstance(form, str):
        return form
    return "(" + " ".join(write(f) for f in form) + ")"
