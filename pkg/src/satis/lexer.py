"""Regex tokenizer shared by the Turtle and query parsers."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, UnknownPrefix
from .rdf import Iri

PN_LOCAL = r"[\w\-]+(?:\.[\w\-]+)*"
PN_PREFIX = r"[A-Za-z][\w\-]*(?:\.[\w\-]+)*"
_LOCAL_RE = re.compile(PN_LOCAL)
_PREFIX_RE = re.compile(PN_PREFIX)

_TOKEN_SPEC = [
    ("newline", r"\n"),
    ("ws", r"[ \t\r]+"),
    ("comment", r"#[^\n]*"),
    ("subsumed", r"<=:"),
    ("iri", r"<[^<>\"{}|^`\\\s]*>"),
    ("pname", rf"(?:{PN_PREFIX})?:(?:{PN_LOCAL})?"),
    ("blank", r"_:[\w\-]+"),
    ("var", r"[?$][A-Za-z_]\w*"),
    ("string", r'"(?:[^"\\\n]|\\.)*"'),
    ("directive", r"@[A-Za-z]+"),
    ("name", r"[A-Za-z][\w]*"),
    ("same", r"=:"),
    ("punct", r"[.;,{}()=*]"),
]
_MASTER = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))
_UNESCAPES = {"\\": "\\", '"': '"', "n": "\n", "r": "\r", "t": "\t", "'": "'"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int
    newline_before: bool = False

    def is_name(self, *words: str) -> bool:
        return self.kind == "name" and self.text.lower() in words

    def is_punct(self, char: str) -> bool:
        return self.kind == "punct" and self.text == char


def tokenize(text: str, source: Optional[str] = None) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    saw_newline = True
    while pos < len(text):
        m = _MASTER.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}", source)
        kind = m.lastgroup
        if kind == "newline":
            line += 1
            line_start = m.end()
            saw_newline = True
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1, saw_newline))
            saw_newline = False
        pos = m.end()
    return tokens


def unescape(token: Token, source: Optional[str] = None) -> str:
    body = token.text[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _UNESCAPES:
                raise ParseError(token.line, token.column + i + 1, f"bad escape \\{nxt}", source)
            out.append(_UNESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


class TokenStream:
    """Cursor over a token list with error helpers."""

    def __init__(self, tokens: list[Token], source: Optional[str] = None, text: str = ""):
        self.tokens = tokens
        self.pos = 0
        self.source = source
        self._end = _end_position(text)

    def peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def next(self, what: str = "token") -> Token:
        tok = self.peek()
        if tok is None:
            self.fail(None, f"unexpected end of input, expected {what}")
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def fail(self, tok: Optional[Token], message: str):
        line, col = (tok.line, tok.column) if tok else self._end
        raise ParseError(line, col, message, self.source)

    def expect_punct(self, char: str) -> Token:
        tok = self.next(repr(char))
        if not tok.is_punct(char):
            self.fail(tok, f"expected {char!r}, found {tok.text!r}")
        return tok

    def expect_name(self, *words: str) -> Token:
        tok = self.next(" or ".join(words))
        if not tok.is_name(*words):
            self.fail(tok, f"expected {' or '.join(words)}, found {tok.text!r}")
        return tok

    def iri(self, tok: Token, prefixes: dict[str, str]) -> Iri:
        """Resolve an ``iri`` or ``pname`` token to an absolute IRI."""
        if tok.kind == "iri":
            value = tok.text[1:-1]
        elif tok.kind == "pname":
            prefix, _, local = tok.text.partition(":")
            if prefix not in prefixes:
                raise UnknownPrefix(prefix, tok.line, tok.column, self.source)
            value = prefixes[prefix] + local
        else:
            self.fail(tok, f"expected an IRI, found {tok.text!r}")
        if ":" not in value:
            self.fail(tok, f"IRI {value!r} is not absolute")
        return Iri(value)


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")
    return len(lines), len(lines[-1]) + 1


def compact(iri: str, prefixes: dict[str, str]) -> str:
    """Shortest prefixed name for ``iri``, or the bracketed IRI."""
    best = None
    for prefix, ns in prefixes.items():
        if iri.startswith(ns) and (prefix == "" or _PREFIX_RE.fullmatch(prefix)):
            local = iri[len(ns):]
            if local == "" or _LOCAL_RE.fullmatch(local):
                cand = f"{prefix}:{local}"
                if best is None or len(cand) < len(best) or (len(cand) == len(best) and cand < best):
                    best = cand
    return best if best is not None else f"<{iri}>"
