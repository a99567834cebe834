"""SELECT / CONSTRUCT over basic graph patterns with subsumption filters.

Filter operators:

``=``    term equality with the constant
``=:``   the bound term is exactly the constant concept IRI
``<=:``  the bound term is the constant or one of its subclasses

Filters compare concept IRIs; a Literal reaching a filter raises
:class:`TypeMismatch` unless another filter already rejects that solution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .errors import ParseError, TypeMismatch, UnboundFilterVariable
from .lexer import Token, TokenStream, compact, tokenize, unescape
from .rdf import Graph, Iri, Literal, Term, Triple, Variable, is_subclass, match_pattern, term_key
from .vocab import BASE_PREFIXES, RDF_TYPE

FILTER_OPS = ("=", "=:", "<=:")


@dataclass(frozen=True)
class Filter:
    variable: str
    op: str
    value: Iri

    def __post_init__(self):
        if self.op not in FILTER_OPS:
            raise ValueError(f"unknown filter operator {self.op!r}")


PatternElement = Union[Triple, Filter]


@dataclass(frozen=True)
class Query:
    form: str  # "select" or "construct"
    where: tuple[PatternElement, ...]
    variables: tuple[str, ...] = ()
    template: tuple[Triple, ...] = ()
    # presentation only, like Graph.prefixes
    prefixes: tuple[tuple[str, str], ...] = field(default=(), compare=False)

    @property
    def patterns(self) -> list[Triple]:
        return [e for e in self.where if isinstance(e, Triple)]

    @property
    def filters(self) -> list[Filter]:
        return [e for e in self.where if isinstance(e, Filter)]

    def prefix_map(self) -> dict[str, str]:
        return dict(self.prefixes)

    def where_variables(self) -> set[str]:
        return {t.name for p in self.patterns for t in p if isinstance(t, Variable)}


@dataclass
class ResultSet:
    variables: tuple[str, ...]
    rows: list[dict[str, Term]]
    graph: Optional[Graph] = None

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> list[Term]:
        return [row[name] for row in self.rows]


# parsing


def parse_query(text: str, source: Optional[str] = None, inherited: Optional[dict[str, str]] = None) -> Query:
    """Parse the query subset.

    ``inherited`` prefixes (e.g. from an enclosing fragment file) resolve
    like declared ones; those the query uses are recorded on it so that it
    serializes stand-alone.
    """
    stream = TokenStream(tokenize(text, source), source, text)
    declared: list[tuple[str, str]] = []
    prefixes = {**BASE_PREFIXES, **(inherited or {})}
    while stream.peek() is not None and stream.peek().is_name("prefix"):
        stream.next()
        name_tok = stream.next("prefix name")
        if name_tok.kind != "pname" or not name_tok.text.endswith(":") or name_tok.text.count(":") != 1:
            stream.fail(name_tok, f"expected a prefix name like 'dom:', found {name_tok.text!r}")
        iri_tok = stream.next("namespace IRI")
        if iri_tok.kind != "iri":
            stream.fail(iri_tok, f"expected <namespace>, found {iri_tok.text!r}")
        ns = stream.iri(iri_tok, prefixes).value
        name = name_tok.text[:-1]
        prefixes[name] = ns
        declared = [(k, v) for k, v in declared if k != name] + [(name, ns)]

    form_tok = stream.next("select or construct")
    variables: tuple[str, ...] = ()
    template: tuple[Triple, ...] = ()
    if form_tok.is_name("select"):
        form = "select"
        if stream.peek() is not None and stream.peek().is_name("distinct"):
            stream.next()
        names = []
        while stream.peek() is not None and stream.peek().kind == "var":
            names.append(stream.next().text[1:])
        if not names:
            stream.fail(stream.peek(), "select needs at least one projected variable")
        variables = tuple(dict.fromkeys(names))
    elif form_tok.is_name("construct"):
        form = "construct"
        stream.expect_punct("{")
        template = tuple(e for e, _ in _group(stream, prefixes, allow_filters=False))
    else:
        stream.fail(form_tok, f"expected select or construct, found {form_tok.text!r}")

    if stream.peek() is not None and stream.peek().is_name("where"):
        stream.next()
    open_tok = stream.expect_punct("{")
    positioned = _group(stream, prefixes, allow_filters=True)
    if not stream.at_end():
        stream.fail(stream.peek(), f"unexpected {stream.peek().text!r} after query")

    elements = tuple(e for e, _ in positioned)
    if inherited:
        own = {k for k, _ in declared}
        used = _iris(elements + template)
        borrowed = [
            (k, v) for k, v in sorted(inherited.items())
            if k not in own and BASE_PREFIXES.get(k) != v and any(i.startswith(v) for i in used)
        ]
        declared = borrowed + declared
    query = Query(form, elements, variables, template, tuple(declared))
    _check_scoping(query, positioned, stream, open_tok)
    return query


def _iris(elements) -> set[str]:
    found = set()
    for e in elements:
        terms = (e.value,) if isinstance(e, Filter) else tuple(e)
        found.update(t.value for t in terms if isinstance(t, Iri))
    return found


def load_query(path) -> Query:
    path = Path(path)
    return parse_query(path.read_text(encoding="utf-8"), source=str(path))


def _group(stream: TokenStream, prefixes: dict[str, str], allow_filters: bool) -> list[tuple[PatternElement, Token]]:
    elements: list[tuple[PatternElement, Token]] = []
    while True:
        tok = stream.peek()
        if tok is None:
            stream.fail(None, "unterminated '{' group")
        if tok.is_punct("}"):
            stream.next()
            return elements
        if tok.is_name("filter") and allow_filters:
            stream.next()
            elements.append(_filter(stream, prefixes))
            _terminator(stream)
            continue
        s = _pattern_term(stream, prefixes, "subject")
        p = _pattern_term(stream, prefixes, "predicate")
        o = _pattern_term(stream, prefixes, "object")
        elements.append((Triple(s, p, o), tok))
        _terminator(stream)


def _terminator(stream: TokenStream) -> None:
    tok = stream.peek()
    if tok is None:
        return
    if tok.is_punct("."):
        stream.next()
        return
    if tok.is_punct("}") or tok.newline_before:
        return
    stream.fail(tok, f"expected '.' or a line break before {tok.text!r}")


def _filter(stream: TokenStream, prefixes: dict[str, str]) -> tuple[Filter, Token]:
    stream.expect_punct("(")
    var_tok = stream.next("variable")
    if var_tok.kind != "var":
        stream.fail(var_tok, f"filter expects a variable, found {var_tok.text!r}")
    op_tok = stream.next("filter operator")
    if op_tok.kind == "subsumed":
        op = "<=:"
    elif op_tok.kind == "same":
        op = "=:"
    elif op_tok.is_punct("="):
        op = "="
    else:
        stream.fail(op_tok, f"expected '=', '=:' or '<=:', found {op_tok.text!r}")
    value = stream.iri(stream.next("constant IRI"), prefixes)
    stream.expect_punct(")")
    return Filter(var_tok.text[1:], op, value), var_tok


def _pattern_term(stream: TokenStream, prefixes: dict[str, str], role: str) -> Term:
    tok = stream.next(role)
    if tok.kind == "var":
        return Variable(tok.text[1:])
    if tok.kind in ("iri", "pname"):
        return stream.iri(tok, prefixes)
    if tok.kind == "name" and tok.text == "a" and role == "predicate":
        return Iri(RDF_TYPE)
    if tok.kind == "string" and role == "object":
        return Literal(unescape(tok, stream.source))
    stream.fail(tok, f"unexpected {tok.text!r} as {role}")


def _check_scoping(q: Query, positioned, stream: TokenStream, open_tok: Token) -> None:
    if not q.patterns:
        stream.fail(open_tok, "where clause needs at least one triple pattern")
    bound = q.where_variables()
    for element, tok in positioned:
        if isinstance(element, Filter) and element.variable not in bound:
            raise UnboundFilterVariable(element.variable, tok.line, tok.column, stream.source)
    needed = list(q.variables) + [t.name for tr in q.template for t in tr if isinstance(t, Variable)]
    for name in needed:
        if name not in bound:
            raise ParseError(open_tok.line, open_tok.column, f"variable ?{name} does not occur in the where clause", stream.source)


# serialization


def serialize_query(q: Query) -> str:
    table = {**BASE_PREFIXES, **q.prefix_map()}
    lines = [f"prefix {name}: <{ns}>" for name, ns in q.prefixes]
    if q.form == "select":
        lines.append("select " + " ".join(f"?{v}" for v in q.variables))
    else:
        lines.append("construct {")
        lines.extend(f"  {_write_triple(t, table)} ." for t in q.template)
        lines.append("}")
    lines.append("where {")
    for e in q.where:
        if isinstance(e, Filter):
            lines.append(f"  filter(?{e.variable} {e.op} {compact(e.value.value, table)})")
        else:
            lines.append(f"  {_write_triple(e, table)} .")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _write_triple(t: Triple, table: dict[str, str]) -> str:
    parts = []
    for i, term in enumerate(t):
        if i == 1 and term == Iri(RDF_TYPE):
            parts.append("a")
        elif isinstance(term, Iri):
            parts.append(compact(term.value, table))
        else:
            parts.append(term.n3())
    return " ".join(parts)


# evaluation


def filter_outcome(f: Filter, term: Term, ontology: Graph) -> Optional[bool]:
    """True/False for a concept term, None (error) for a Literal."""
    if isinstance(term, Literal):
        return None
    if f.op == "=":
        return term == f.value
    if f.op == "=:":
        return isinstance(term, Iri) and term == f.value
    return is_subclass(ontology, term, f.value)


def solutions(q: Query, data: Graph, ontology: Optional[Graph] = None) -> list[dict[str, Term]]:
    """All complete bindings of the where clause, in no particular order."""
    ontology = ontology if ontology is not None else Graph()
    patterns = q.patterns
    by_var: dict[str, list[Filter]] = {}
    for f in q.filters:
        by_var.setdefault(f.variable, []).append(f)
    found: list[dict[str, Term]] = []
    mismatch: list[str] = []

    def step(bindings: dict[str, Term], remaining: list[int], errored: bool) -> None:
        if not remaining:
            if errored:
                mismatch.append(str(bindings))
            else:
                found.append(bindings)
            return
        idx = min(remaining, key=lambda i: _selectivity(patterns[i], bindings, data))
        rest = [i for i in remaining if i != idx]
        for ext in match_pattern(data, patterns[idx], bindings):
            flag = errored
            rejected = False
            for name in ext.keys() - bindings.keys():
                for f in by_var.get(name, ()):
                    outcome = filter_outcome(f, ext[name], ontology)
                    if outcome is False:
                        rejected = True
                        break
                    if outcome is None:
                        flag = True
                if rejected:
                    break
            if not rejected:
                step(ext, rest, flag)

    step({}, list(range(len(patterns))), False)
    if mismatch:
        raise TypeMismatch(f"filter applied to a literal binding in solution {mismatch[0]}")
    return found


def _selectivity(pattern: Triple, bindings: dict[str, Term], data: Graph) -> tuple[int, int]:
    resolved = [bindings.get(t.name) if isinstance(t, Variable) else t for t in pattern]
    unbound = sum(1 for t in resolved if t is None)
    return (unbound, data.count(*resolved))


def evaluate(q: Query, data: Graph, ontology: Optional[Graph] = None) -> ResultSet:
    sols = solutions(q, data, ontology)
    if q.form == "select":
        names = q.variables
    else:
        names = tuple(sorted(q.where_variables()))
    unique = {tuple(row[n] for n in names) for row in sols}
    ordered = sorted(unique, key=lambda vals: tuple(term_key(v) for v in vals))
    rows = [dict(zip(names, vals)) for vals in ordered]
    if q.form == "select":
        return ResultSet(names, rows)
    graph = Graph(prefixes=q.prefix_map())
    for row in rows:
        for t in q.template:
            inst = [row.get(term.name) if isinstance(term, Variable) else term for term in t]
            if any(v is None for v in inst):
                continue
            try:
                graph.add(Triple(*inst))
            except ValueError:
                continue
    return ResultSet(names, rows, graph)
