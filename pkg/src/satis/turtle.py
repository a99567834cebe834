"""Reader and writer for the supported Turtle subset.

Supported: ``@prefix`` (and SPARQL-style ``PREFIX``) directives, triples with
``;`` and ``,`` abbreviations, the ``a`` keyword, IRIs, prefixed names,
``_:label`` blank nodes and plain string literals.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from .lexer import Token, TokenStream, compact, tokenize, unescape
from .rdf import BlankNode, Graph, Iri, Literal, Term, Triple
from .vocab import BASE_PREFIXES, RDF_TYPE


def parse_turtle(text: str, base_prefixes: Optional[dict[str, str]] = None, source: Optional[str] = None) -> Graph:
    prefixes = dict(BASE_PREFIXES if base_prefixes is None else base_prefixes)
    stream = TokenStream(tokenize(text, source), source, text)
    graph = Graph()
    declared: dict[str, str] = {}
    while not stream.at_end():
        tok = stream.peek()
        if tok.kind == "directive":
            if tok.text != "@prefix":
                stream.fail(tok, f"unsupported directive {tok.text}")
            stream.next()
            name, ns = _prefix_decl(stream, prefixes)
            stream.expect_punct(".")
            declared[name] = ns
        elif tok.is_name("prefix"):
            stream.next()
            name, ns = _prefix_decl(stream, prefixes)
            declared[name] = ns
        else:
            _statement(stream, prefixes, graph)
    graph.prefixes = {**{k: v for k, v in prefixes.items() if k not in declared}, **declared}
    return graph


def load_turtle(path, base_prefixes: Optional[dict[str, str]] = None) -> Graph:
    path = Path(path)
    return parse_turtle(path.read_text(encoding="utf-8"), base_prefixes, source=str(path))


def _prefix_decl(stream: TokenStream, prefixes: dict[str, str]) -> tuple[str, str]:
    name_tok = stream.next("prefix name")
    if name_tok.kind != "pname" or not name_tok.text.endswith(":") or name_tok.text.count(":") != 1:
        stream.fail(name_tok, f"expected a prefix name like 'dom:', found {name_tok.text!r}")
    iri_tok = stream.next("namespace IRI")
    if iri_tok.kind != "iri":
        stream.fail(iri_tok, f"expected <namespace>, found {iri_tok.text!r}")
    ns = stream.iri(iri_tok, prefixes).value
    name = name_tok.text[:-1]
    prefixes[name] = ns
    return name, ns


def _statement(stream: TokenStream, prefixes: dict[str, str], graph: Graph) -> None:
    subject = _node(stream, stream.next("subject"), prefixes, allow_literal=False)
    while True:
        verb_tok = stream.next("predicate")
        if verb_tok.is_name("a") and verb_tok.text == "a":
            predicate = Iri(RDF_TYPE)
        else:
            predicate = _node(stream, verb_tok, prefixes, allow_literal=False)
            if not isinstance(predicate, Iri):
                stream.fail(verb_tok, "predicate must be an IRI")
        while True:
            obj = _node(stream, stream.next("object"), prefixes, allow_literal=True)
            graph.add(Triple(subject, predicate, obj))
            sep = stream.next("',', ';' or '.'")
            if sep.is_punct(","):
                continue
            break
        if sep.is_punct(";"):
            # trailing ';' before '.' is allowed
            nxt = stream.peek()
            if nxt is not None and nxt.is_punct("."):
                stream.next()
                return
            continue
        if sep.is_punct("."):
            return
        stream.fail(sep, f"expected ',', ';' or '.', found {sep.text!r}")


def _node(stream: TokenStream, tok: Token, prefixes: dict[str, str], allow_literal: bool) -> Term:
    if tok.kind in ("iri", "pname"):
        return stream.iri(tok, prefixes)
    if tok.kind == "blank":
        return BlankNode(tok.text[2:])
    if tok.kind == "string":
        if not allow_literal:
            stream.fail(tok, "literal not allowed here")
        return Literal(unescape(tok, stream.source))
    stream.fail(tok, f"unexpected {tok.text!r}")


def serialize_turtle(g: Graph, prefixes: Optional[dict[str, str]] = None) -> str:
    """Sorted triples, one statement per line, prefixes declared alphabetically."""
    table = {**BASE_PREFIXES, **g.prefixes, **(prefixes or {})}
    lines = [f"@prefix {name}: <{ns}> ." for name, ns in sorted(table.items())]
    if lines:
        lines.append("")
    for s, p, o in g:
        pred = "a" if p == Iri(RDF_TYPE) else _write(p, table)
        lines.append(f"{_write(s, table)} {pred} {_write(o, table)} .")
    return "\n".join(lines) + "\n"


def _write(term: Term, prefixes: dict[str, str]) -> str:
    if isinstance(term, Iri):
        return compact(term.value, prefixes)
    return term.n3()
