"""Tokenizer for the MiniKer C subset.

Whitespace and comments are discarded; the `/*@selector(field)*/` pragma
survives as its own token kind because the parser attaches it to type
declarations. No preprocessor directives are permitted.
"""

from __future__ import annotations

from dataclasses import dataclass

from civscan.errors import LexError, Pos

KEYWORDS = frozenset(
    {
        "void", "char", "short", "int", "long", "unsigned", "signed",
        "struct", "union", "enum", "typedef", "sizeof",
        "if", "else", "while", "for", "switch", "case", "default",
        "break", "continue", "return",
    }
)

# Longest-match punctuators, ordered by length.
_PUNCTS3 = ("<<=", ">>=")
_PUNCTS2 = (
    "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
)
_PUNCTS1 = "()[]{};,.&*+-/%!~^|<>=?:"

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "0": "\0", "\\": "\\", "'": "'", '"': '"'}


@dataclass(frozen=True)
class Token:
    kind: str  # kw | ident | int | str | punct | pragma
    text: str
    pos: Pos
    value: int | str | None = None


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Scanner:
    def __init__(self, path: str, text: str):
        self.path = path
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def pos(self) -> Pos:
        return Pos(self.path, self.line, self.col)

    def peek(self, off: int = 0) -> str:
        j = self.i + off
        return self.text[j] if j < len(self.text) else ""

    def advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.i < len(self.text):
                if self.text[self.i] == "\n":
                    self.line += 1
                    self.col = 1
                else:
                    self.col += 1
                self.i += 1

    def at_end(self) -> bool:
        return self.i >= len(self.text)


def tokenize(path: str, text: str) -> list[Token]:
    """Tokenize one source file; raises LexError with a position on bad input."""
    for ch in text:
        if not (ch.isprintable() or ch in "\n\t\r"):
            raise LexError(Pos(path, 1, 1), f"illegal character {ch!r} in input")

    sc = _Scanner(path, text)
    out: list[Token] = []
    while not sc.at_end():
        c = sc.peek()
        if c in " \t\r\n":
            sc.advance()
            continue
        if c == "/" and sc.peek(1) == "/":
            while not sc.at_end() and sc.peek() != "\n":
                sc.advance()
            continue
        if c == "/" and sc.peek(1) == "*":
            start = sc.pos()
            if sc.peek(2) == "@":
                tok = _scan_pragma(sc, start)
                if tok is not None:
                    out.append(tok)
                continue
            sc.advance(2)
            while not (sc.peek() == "*" and sc.peek(1) == "/"):
                if sc.at_end():
                    raise LexError(start, "unterminated comment")
                sc.advance()
            sc.advance(2)
            continue
        if c == "#":
            raise LexError(sc.pos(), "preprocessor directives are not permitted")
        if _is_ident_start(c):
            start = sc.pos()
            begin = sc.i
            while not sc.at_end() and _is_ident(sc.peek()):
                sc.advance()
            word = text[begin : sc.i]
            kind = "kw" if word in KEYWORDS else "ident"
            out.append(Token(kind, word, start))
            continue
        if c.isdigit():
            out.append(_scan_number(sc))
            continue
        if c == "'":
            out.append(_scan_char(sc))
            continue
        if c == '"':
            out.append(_scan_string(sc))
            continue
        three = text[sc.i : sc.i + 3]
        if three in _PUNCTS3:
            start = sc.pos()
            sc.advance(3)
            out.append(Token("punct", three, start))
            continue
        two = text[sc.i : sc.i + 2]
        if two in _PUNCTS2:
            start = sc.pos()
            sc.advance(2)
            out.append(Token("punct", two, start))
            continue
        if c in _PUNCTS1:
            start = sc.pos()
            sc.advance()
            out.append(Token("punct", c, start))
            continue
        raise LexError(sc.pos(), f"illegal character {c!r}")
    return out


def _scan_pragma(sc: _Scanner, start: Pos) -> Token | None:
    # /*@selector(field)*/ is the only recognized pragma; anything else
    # inside /*@ ... */ is a lex error rather than a silent comment.
    end = sc.text.find("*/", sc.i)
    if end < 0:
        raise LexError(start, "unterminated comment")
    body = sc.text[sc.i + 3 : end].strip()
    sc.advance(end + 2 - sc.i)
    if not (body.startswith("selector(") and body.endswith(")")):
        raise LexError(start, f"unknown pragma {body!r}")
    field = body[len("selector(") : -1].strip()
    if not field or not all(_is_ident(ch) for ch in field) or field[0].isdigit():
        raise LexError(start, f"bad selector pragma argument {field!r}")
    return Token("pragma", f"selector({field})", start, value=field)


def _scan_number(sc: _Scanner) -> Token:
    start = sc.pos()
    begin = sc.i
    if sc.peek() == "0" and sc.peek(1) in "xX":
        sc.advance(2)
        if not sc.peek() or sc.peek() not in "0123456789abcdefABCDEF":
            raise LexError(start, "malformed hex literal")
        while sc.peek() in "0123456789abcdefABCDEF":
            sc.advance()
        value = int(sc.text[begin : sc.i], 16)
    else:
        while sc.peek().isdigit():
            sc.advance()
        value = int(sc.text[begin : sc.i])
    # Width suffixes are accepted and ignored; widths come from context.
    while sc.peek() in "uUlL":
        sc.advance()
    return Token("int", sc.text[begin : sc.i], start, value=value)


def _scan_char(sc: _Scanner) -> Token:
    start = sc.pos()
    sc.advance()
    if sc.at_end():
        raise LexError(start, "unterminated character literal")
    c = sc.peek()
    if c == "\\":
        sc.advance()
        esc = sc.peek()
        if esc not in _ESCAPES:
            raise LexError(start, f"unknown escape '\\{esc}'")
        value = ord(_ESCAPES[esc])
        sc.advance()
    elif c == "'":
        raise LexError(start, "empty character literal")
    else:
        value = ord(c)
        sc.advance()
    if sc.peek() != "'":
        raise LexError(start, "unterminated character literal")
    sc.advance()
    return Token("int", f"{value}", start, value=value)


def _scan_string(sc: _Scanner) -> Token:
    start = sc.pos()
    sc.advance()
    chars: list[str] = []
    while True:
        if sc.at_end() or sc.peek() == "\n":
            raise LexError(start, "unterminated string literal")
        c = sc.peek()
        if c == '"':
            sc.advance()
            break
        if c == "\\":
            sc.advance()
            esc = sc.peek()
            if esc not in _ESCAPES:
                raise LexError(start, f"unknown escape '\\{esc}'")
            chars.append(_ESCAPES[esc])
            sc.advance()
            continue
        chars.append(c)
        sc.advance()
    return Token("str", "".join(chars), start, value="".join(chars))
