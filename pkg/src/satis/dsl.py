"""Line-oriented fragment authoring format (``.frag`` files).

::

    prefix : <http://satis.example/dom#>

    fragment debias
      kind: operational
      author: service designer
      signature:
        source: start
        target: intention(Homogenise, Image)
        strategy: Debiasing
      body:
        query: <<
          select ?service where { ... }
        >>

Intentional bodies list sections instead of a query::

      body:
        map: preprocessing
        section s1: start -> intention(Homogenise, Image) via Normalization
        section s9: intention(Align, Image) -> stop via anonymous

Bare names resolve against the empty prefix ``:``; ``*`` is the verb or
object wildcard; ``role=Concept`` arguments after the object add
parameters.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ParseError, UnknownPrefix
from .fragments import Fragment, FragmentKind
from .lexer import compact
from .mapmodel import ANONYMOUS, ANY_OBJECT, ANY_VERB, Intention, Map, Section, Strategy
from .rdf import Iri
from .sparql import parse_query, serialize_query
from .vocab import BASE_PREFIXES

_PREFIX = re.compile(r"^@?prefix\s+([A-Za-z][\w\-.]*)?:\s*<([^>]*)>\s*\.?$", re.IGNORECASE)
_SECTION = re.compile(r"^(?:map:\s*)?section\s+([\w\-.]+)\s*:\s*(.+?)\s*->\s*(.+?)\s+via\s+(\S+)$")
_KEY = re.compile(r"^([a-z]+)\s*:\s*(.*)$")
_INTENTION = re.compile(r"^intention\s*\((.*)\)$")
FRAGMENT_ID = re.compile(r"^[A-Za-z0-9_][\w\-.]*$")


@dataclass
class _Draft:
    id: str
    line: int
    kind: Optional[str] = None
    author: str = ""
    timestamp: str = ""
    source: Optional[Intention] = None
    target: Optional[Intention] = None
    strategy: Strategy = ANONYMOUS
    query: Optional[object] = None
    map_name: Optional[str] = None
    sections: list = field(default_factory=list)


def _strip_comment(raw: str) -> str:
    depth = 0
    for i, ch in enumerate(raw):
        if ch == "<":
            depth += 1
        elif ch == ">" and depth:
            depth -= 1
        elif ch == "#" and depth == 0 and (i == 0 or raw[i - 1].isspace()):
            return raw[:i]
    return raw


class _Parser:
    def __init__(self, text: str, source: Optional[str], prefixes: dict[str, str]):
        self.lines = text.split("\n")
        self.source = source
        self.prefixes = dict(prefixes)
        self.fragments: list[Fragment] = []
        self.draft: Optional[_Draft] = None

    def fail(self, line: int, column: int, message: str):
        raise ParseError(line, column, message, self.source)

    def run(self) -> list[Fragment]:
        n = 0
        while n < len(self.lines):
            raw = self.lines[n]
            n += 1
            text = _strip_comment(raw).strip()
            if not text:
                continue
            col = len(raw) - len(raw.lstrip()) + 1
            n = self.line(text, n, col)
        self.finish()
        return self.fragments

    def line(self, text: str, n: int, col: int) -> int:
        """Handle one logical line; returns the index of the next line to read."""
        m = _PREFIX.match(text)
        if m:
            ns = m.group(2)
            if ":" not in ns:
                self.fail(n, col, f"namespace {ns!r} is not absolute")
            self.prefixes[m.group(1) or ""] = ns
            return n
        if text.startswith("fragment ") or text == "fragment":
            self.finish()
            fid = text[len("fragment"):].strip()
            if not FRAGMENT_ID.match(fid):
                self.fail(n, col, f"bad fragment id {fid!r}")
            self.draft = _Draft(fid, n)
            return n
        d = self.draft
        if d is None:
            self.fail(n, col, f"expected 'fragment <id>' or a prefix declaration, found {text!r}")
        m = _SECTION.match(text)
        if m:
            _, src, tgt, via = m.groups()
            section = Section(
                self.intention(src, n, col, special=True),
                self.intention(tgt, n, col, special=True),
                self.strategy(via, n, col),
            )
            d.sections.append(section)
            return n
        m = _KEY.match(text)
        if not m:
            self.fail(n, col, f"cannot read line {text!r}")
        key, value = m.group(1), m.group(2).strip()
        if key in ("signature", "body") and not value:
            return n
        if key == "kind":
            if value not in ("operational", "intentional"):
                self.fail(n, col, f"kind must be operational or intentional, not {value!r}")
            d.kind = value
        elif key == "author":
            d.author = value
        elif key == "timestamp":
            d.timestamp = value
        elif key == "source":
            d.source = self.intention(value, n, col, special=False)
        elif key == "target":
            d.target = self.intention(value, n, col, special=False)
        elif key == "strategy":
            d.strategy = self.strategy(value, n, col)
        elif key == "map":
            d.map_name = value or None
        elif key == "query":
            return self.query(value, n, col)
        else:
            self.fail(n, col, f"unknown key {key!r}")
        return n

    def query(self, value: str, n: int, col: int) -> int:
        if not value.startswith("<<"):
            self.fail(n, col, "query must be introduced by '<<'")
        body = value[2:]
        start = n
        chunks = []
        if body.rstrip().endswith(">>"):
            chunks.append(body.rstrip()[:-2])
        else:
            chunks.append(body)
            while True:
                if n >= len(self.lines):
                    self.fail(start, col, "unterminated query block, expected '>>'")
                raw = self.lines[n]
                n += 1
                if raw.rstrip().endswith(">>"):
                    chunks.append(raw.rstrip()[:-2])
                    break
                chunks.append(raw)
        try:
            self.draft.query = parse_query("\n".join(chunks), inherited=self.prefixes)
        except ParseError as exc:
            self.fail(start + exc.line - 1, exc.column, exc.message)
        return n

    def concept(self, text: str, n: int, col: int, wildcard: Optional[Iri] = None) -> Iri:
        text = text.strip()
        if text == "*":
            if wildcard is None:
                self.fail(n, col, "wildcard '*' not allowed here")
            return wildcard
        if text.startswith("<") and text.endswith(">"):
            value = text[1:-1]
            if ":" not in value:
                self.fail(n, col, f"IRI {value!r} is not absolute")
            return Iri(value)
        prefix, sep, local = text.rpartition(":") if ":" in text else ("", "", text)
        if not re.fullmatch(r"[\w\-.]*", local) or not re.fullmatch(r"([A-Za-z][\w\-.]*)?", prefix):
            self.fail(n, col, f"bad concept name {text!r}")
        if prefix not in self.prefixes:
            raise UnknownPrefix(prefix, n, col, self.source)
        return Iri(self.prefixes[prefix] + local)

    def intention(self, text: str, n: int, col: int, special: bool) -> Intention:
        text = text.strip()
        if text == "start":
            return Intention.start()
        if text == "stop":
            if not special:
                self.fail(n, col, "stop is only valid inside a body map")
            return Intention.stop()
        m = _INTENTION.match(text)
        if not m:
            self.fail(n, col, f"expected start, stop or intention(...), found {text!r}")
        args = [a.strip() for a in m.group(1).split(",")]
        if len(args) < 2:
            self.fail(n, col, "intention needs a verb and an object")
        verb = self.concept(args[0], n, col, ANY_VERB)
        obj = self.concept(args[1], n, col, ANY_OBJECT)
        params = set()
        for arg in args[2:]:
            role, eq, concept = arg.partition("=")
            if not eq or not role.strip():
                self.fail(n, col, f"parameter must read role=Concept, found {arg!r}")
            params.add((role.strip(), self.concept(concept, n, col)))
        return Intention(verb, obj, frozenset(params))

    def strategy(self, text: str, n: int, col: int) -> Strategy:
        text = text.strip()
        if text == "anonymous":
            return ANONYMOUS
        return Strategy(self.concept(text, n, col))

    def finish(self) -> None:
        d = self.draft
        self.draft = None
        if d is None:
            return
        if d.kind is None:
            self.fail(d.line, 1, f"fragment {d.id} has no kind")
        if d.target is None:
            self.fail(d.line, 1, f"fragment {d.id} has no target intention")
        signature = Section(d.source or Intention.start(), d.target, d.strategy)
        if d.kind == "operational":
            if d.query is None or d.sections:
                self.fail(d.line, 1, f"operational fragment {d.id} needs a query body and no map")
            kind, body = FragmentKind.OPERATIONAL, d.query
        else:
            if not d.sections or d.query is not None:
                self.fail(d.line, 1, f"intentional fragment {d.id} needs map sections and no query")
            kind, body = FragmentKind.INTENTIONAL, Map(d.map_name or d.id, d.sections)
        self.fragments.append(Fragment(d.id, kind, signature, body, d.author, d.timestamp))


def parse_fragments(text: str, source: Optional[str] = None, prefixes: Optional[dict[str, str]] = None) -> list[Fragment]:
    return _Parser(text, source, {**BASE_PREFIXES, **(prefixes or {})}).run()


def load_fragments(path, prefixes: Optional[dict[str, str]] = None) -> list[Fragment]:
    path = Path(path)
    return parse_fragments(path.read_text(encoding="utf-8"), str(path), prefixes)


# writing


def _concept_text(iri: Iri, prefixes: dict[str, str]) -> str:
    name = compact(iri.value, prefixes)
    return name[1:] if name.startswith(":") else name


def _intention_text(i: Intention, prefixes: dict[str, str]) -> str:
    if i.is_start:
        return "start"
    if i.is_stop:
        return "stop"
    args = [
        "*" if i.verb == ANY_VERB else _concept_text(i.verb, prefixes),
        "*" if i.object == ANY_OBJECT else _concept_text(i.object, prefixes),
    ]
    args += [f"{r}={_concept_text(c, prefixes)}" for r, c in sorted(i.parameters, key=lambda p: (p[0], p[1].value))]
    return f"intention({', '.join(args)})"


def _strategy_text(st: Strategy, prefixes: dict[str, str]) -> str:
    return "anonymous" if st.anonymous else _concept_text(st.manner, prefixes)


def dump_fragment(f: Fragment, prefixes: dict[str, str]) -> str:
    out = [f"fragment {f.id}", f"  kind: {f.kind.value}"]
    if f.author:
        out.append(f"  author: {f.author}")
    if f.timestamp:
        out.append(f"  timestamp: {f.timestamp}")
    sig = f.signature
    out += [
        "  signature:",
        f"    source: {_intention_text(sig.source, prefixes)}",
        f"    target: {_intention_text(sig.target, prefixes)}",
        f"    strategy: {_strategy_text(sig.strategy, prefixes)}",
        "  body:",
    ]
    if f.kind is FragmentKind.OPERATIONAL:
        out.append("    query: <<")
        out.extend("      " + line for line in serialize_query(f.body).splitlines())
        out.append("    >>")
    else:
        out.append(f"    map: {f.body.name}")
        for n, s in enumerate(f.body.ordered_sections(), 1):
            out.append(
                f"    section s{n}: {_intention_text(s.source, prefixes)} -> "
                f"{_intention_text(s.target, prefixes)} via {_strategy_text(s.strategy, prefixes)}"
            )
    return "\n".join(out) + "\n"


def dump_fragments(fragments, prefixes: dict[str, str]) -> str:
    """Whole ``.frag`` document; declares every prefix in ``prefixes``."""
    head = [f"prefix {name}: <{ns}>" for name, ns in sorted(prefixes.items()) if name not in BASE_PREFIXES or BASE_PREFIXES[name] != ns]
    parts = ["\n".join(head) + "\n"] if head else []
    parts += [dump_fragment(f, prefixes) for f in fragments]
    return "\n".join(parts)
