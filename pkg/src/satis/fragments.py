"""Fragments: reusable search know-how, their catalog, and rule export.

A fragment pairs a signature (a map section saying when it applies) with a
body. Operational bodies are SELECT queries over service descriptions;
intentional bodies are maps refining the goal into sub-goals.

Exported rules are CONSTRUCT queries. The WHERE clause matches a goal
section and the premises; the head asserts ``satis:achievedBy`` links from
the goal to its results, plus ``satis:viaFragment`` naming the fragment.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .errors import CyclicMap, DuplicateId, InvalidBody, InvalidSignature, MalformedSection, UnknownConcept
from .mapmodel import (
    ANY_OBJECT,
    ANY_VERB,
    Intention,
    Kind,
    Map,
    Section,
    intention_matches,
    map_to_rdf,
    paths,
    rdf_to_map,
    rdf_to_section,
    section_concepts,
    section_to_rdf,
    validate_map,
)
from .rdf import BlankNode, Graph, Iri, Literal, Term, Triple, Variable, declared_concepts
from .sparql import Filter, Query, parse_query, serialize_query
from .vocab import MAP, RDF_TYPE, SATIS

ACHIEVED_BY = Iri(SATIS + "achievedBy")
VIA_FRAGMENT = Iri(SATIS + "viaFragment")
_HAS = {name: Iri(MAP + name) for name in (
    "hasSource", "hasTarget", "hasStrategy", "hasVerb", "hasObject",
    "hasManner", "hasParameter", "hasRole", "hasConcept",
)}


class FragmentKind(enum.Enum):
    OPERATIONAL = "operational"
    INTENTIONAL = "intentional"


@dataclass(frozen=True)
class Fragment:
    id: str
    kind: FragmentKind
    signature: Section
    body: Union[Query, Map]
    author: str = ""
    timestamp: str = ""

    @property
    def iri(self) -> Iri:
        return fragment_iri(self.id)

    def concepts(self) -> list[Iri]:
        found = section_concepts(self.signature)
        if isinstance(self.body, Map):
            for s in self.body.ordered_sections():
                found.extend(section_concepts(s))
        else:
            found.extend(f.value for f in self.body.filters if f.op != "=")
        return found


def fragment_iri(fragment_id: str) -> Iri:
    return Iri(f"{SATIS}fragment/{fragment_id}")


def specificity(f: Fragment) -> int:
    """0 = source and strategy given, 1 = strategy only, 2 = source only, 3 = target only."""
    has_source = not f.signature.source.is_open
    has_strategy = not f.signature.strategy.anonymous
    if has_source and has_strategy:
        return 0
    if has_strategy:
        return 1
    if has_source:
        return 2
    return 3


def check_fragment(f: Fragment, ontology: Optional[Graph] = None) -> None:
    """Raise if ``f`` breaks a fragment invariant."""
    target = f.signature.target
    if target.kind is not Kind.ORDINARY:
        raise InvalidSignature(f"{f.id}: signature target must be an ordinary intention, not {target.kind.value}")
    if target.verb == ANY_VERB or target.object == ANY_OBJECT:
        raise InvalidSignature(f"{f.id}: signature target needs a concrete verb and object")
    if f.signature.source.is_stop:
        raise InvalidSignature(f"{f.id}: signature source cannot be Stop")
    if f.kind is FragmentKind.OPERATIONAL:
        if not isinstance(f.body, Query) or f.body.form != "select" or len(f.body.variables) != 1:
            raise InvalidBody(f"{f.id}: operational body must be a select projecting one service variable")
    else:
        if not isinstance(f.body, Map):
            raise InvalidBody(f"{f.id}: intentional body must be a map")
        violations = validate_map(f.body)
        if violations:
            raise InvalidBody(f"{f.id}: body map is invalid: " + "; ".join(map(str, violations)))
        try:
            paths(f.body)
        except CyclicMap as exc:
            raise InvalidBody(f"{f.id}: {exc}") from exc
    if ontology is not None:
        known = declared_concepts(ontology)
        for c in f.concepts():
            if c not in known:
                raise UnknownConcept(f.id, c)


class Catalog:
    """Fragments by id, indexed on the (verb, object) of signature targets."""

    def __init__(self, fragments: Iterable[Fragment] = ()):
        self._fragments: dict[str, Fragment] = {}
        self._index: dict[tuple[Iri, Iri], list[str]] = defaultdict(list)
        for f in fragments:
            self._put(f)

    def _put(self, f: Fragment) -> None:
        if f.id in self._fragments:
            raise DuplicateId(f.id)
        self._fragments[f.id] = f
        t = f.signature.target
        self._index[(t.verb, t.object)].append(f.id)

    def __iter__(self):
        return iter(self._fragments[k] for k in sorted(self._fragments))

    def __len__(self) -> int:
        return len(self._fragments)

    def __contains__(self, fragment_id) -> bool:
        return fragment_id in self._fragments

    def __getitem__(self, fragment_id: str) -> Fragment:
        return self._fragments[fragment_id]

    def candidates(self, goal: Section, ontology: Graph) -> list[Fragment]:
        """Fragments whose target verb and object could cover the goal target."""
        verb, obj = goal.target.verb, goal.target.object
        ids: set[str] = set()
        for sup in {obj} | ontology.superclasses(obj):
            ids.update(self._index.get((verb, sup), ()))
        return [self._fragments[i] for i in ids]


def add_fragment(c: Catalog, f: Fragment, ontology: Optional[Graph] = None) -> Catalog:
    if f.id in c:
        raise DuplicateId(f.id)
    check_fragment(f, ontology)
    return Catalog(list(c) + [f])


def signature_matches(f: Fragment, goal: Section, ontology: Graph) -> bool:
    sig = f.signature
    if not intention_matches(sig.target, goal.target, ontology):
        return False
    if not sig.source.is_open and not intention_matches(sig.source, goal.source, ontology):
        return False
    if sig.strategy.anonymous or goal.strategy.anonymous:
        return True
    return sig.strategy.manner == goal.strategy.manner


def find_matching(c: Catalog, goal: Section, ontology: Graph) -> list[Fragment]:
    """Matching fragments, most specific signature first, ties by id."""
    found = [f for f in c.candidates(goal, ontology) if signature_matches(f, goal, ontology)]
    return sorted(found, key=lambda f: (specificity(f), f.id))


# rule export


def compile_queries(f: Fragment) -> list[Query]:
    """One CONSTRUCT per operational fragment, one per body path otherwise."""
    goal = Variable("_goal")
    head_base = [Triple(goal, VIA_FRAGMENT, f.iri)]
    sig_where = _match_section(goal, f.signature, "_g", subsumed=True)
    prefixes = [("map", MAP), ("satis", SATIS)]
    if f.kind is FragmentKind.OPERATIONAL:
        body = _rename_private(f.body)
        service = Variable(body.variables[0])
        for p in body.prefixes:
            if p[0] not in dict(prefixes):
                prefixes.append(p)
        head = tuple(head_base + [Triple(goal, ACHIEVED_BY, service)])
        return [Query("construct", tuple(sig_where) + body.where, (), head, tuple(prefixes))]

    rules = []
    for path in paths(f.body):
        where = list(sig_where)
        head = list(head_base)
        for k, section in enumerate(path):
            if section.target.is_stop:
                continue
            sub, result = Variable(f"_sub{k}"), Variable(f"_r{k}")
            where.append(Triple(sub, ACHIEVED_BY, result))
            where.extend(_match_section(sub, section, f"_s{k}", subsumed=False))
            head.append(Triple(goal, ACHIEVED_BY, result))
        rules.append(Query("construct", tuple(where), (), tuple(head), tuple(prefixes)))
    return rules


def compile_to_rule(f: Fragment) -> list[str]:
    return [serialize_query(q) for q in compile_queries(f)]


def export_rules(catalog: Catalog, out_dir) -> list[Path]:
    """Write ``<fragmentId>.<pathIndex>.rq`` files; returns the paths written."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for f in catalog:
        for n, text in enumerate(compile_to_rule(f)):
            path = out / f"{f.id}.{n}.rq"
            path.write_text(text, encoding="utf-8")
            written.append(path)
    return written


def _match_section(node: Variable, section: Section, tag: str, subsumed: bool) -> list:
    """Patterns binding ``node`` to a section shaped like ``section``.

    With ``subsumed`` the target object and parameter concepts may be
    subclasses (signature matching); otherwise concepts are taken verbatim
    (premises naming the body map's own sections).
    """
    where: list = []
    target = Variable(f"{tag}t")
    where.append(Triple(node, _HAS["hasTarget"], target))
    where.extend(_match_intention(target, section.target, f"{tag}t", subsumed))
    if not section.source.is_open:
        source = Variable(f"{tag}s")
        where.append(Triple(node, _HAS["hasSource"], source))
        where.extend(_match_intention(source, section.source, f"{tag}s", subsumed))
    if not section.strategy.anonymous:
        strat = Variable(f"{tag}m")
        where.append(Triple(node, _HAS["hasStrategy"], strat))
        where.append(Triple(strat, _HAS["hasManner"], section.strategy.manner))
    return where


def _match_intention(node: Variable, i: Intention, tag: str, subsumed: bool) -> list:
    where: list = []
    if i.verb != ANY_VERB:
        where.append(Triple(node, _HAS["hasVerb"], i.verb))
    if i.object != ANY_OBJECT:
        if subsumed:
            obj = Variable(f"{tag}o")
            where.append(Triple(node, _HAS["hasObject"], obj))
            where.append(Filter(obj.name, "<=:", i.object))
        else:
            where.append(Triple(node, _HAS["hasObject"], i.object))
    for n, (role, concept) in enumerate(sorted(i.parameters, key=lambda p: (p[0], p[1].value))):
        param = Variable(f"{tag}p{n}")
        where.append(Triple(node, _HAS["hasParameter"], param))
        where.append(Triple(param, _HAS["hasRole"], Literal(role)))
        if subsumed:
            value = Variable(f"{tag}p{n}c")
            where.append(Triple(param, _HAS["hasConcept"], value))
            where.append(Filter(value.name, "<=:", concept))
        else:
            where.append(Triple(param, _HAS["hasConcept"], concept))
    return where


def _rename_private(q: Query) -> Query:
    """Rename body variables that start with '_' so they cannot clash with rule variables."""
    names = {n for n in q.where_variables() if n.startswith("_")}
    if not names:
        return q

    def fix(term: Term) -> Term:
        if isinstance(term, Variable) and term.name in names:
            return Variable("q" + term.name)
        return term

    where = tuple(
        Filter("q" + e.variable if e.variable in names else e.variable, e.op, e.value)
        if isinstance(e, Filter)
        else Triple(*(fix(t) for t in e))
        for e in q.where
    )
    variables = tuple("q" + v if v in names else v for v in q.variables)
    return Query(q.form, where, variables, q.template, q.prefixes)


# RDF form of fragments

_S = {name: Iri(SATIS + name) for name in (
    "Fragment", "Operational", "Intentional", "id", "kind", "author",
    "timestamp", "signature", "query", "body",
)}
_TYPE = Iri(RDF_TYPE)


def fragment_to_rdf(f: Fragment, graph: Optional[Graph] = None, label: Optional[str] = None) -> Graph:
    graph = graph if graph is not None else Graph(prefixes={"map": MAP, "satis": SATIS})
    label = label or f"f_{f.id}"
    node = BlankNode(label)
    graph.add(Triple(node, _TYPE, _S["Fragment"]))
    graph.add(Triple(node, _S["id"], Literal(f.id)))
    kind = _S["Operational"] if f.kind is FragmentKind.OPERATIONAL else _S["Intentional"]
    graph.add(Triple(node, _S["kind"], kind))
    if f.author:
        graph.add(Triple(node, _S["author"], Literal(f.author)))
    if f.timestamp:
        graph.add(Triple(node, _S["timestamp"], Literal(f.timestamp)))
    section_to_rdf(f.signature, graph, f"{label}sig")
    graph.add(Triple(node, _S["signature"], BlankNode(f"{label}sig")))
    if f.kind is FragmentKind.OPERATIONAL:
        graph.add(Triple(node, _S["query"], Literal(serialize_query(f.body))))
    else:
        map_to_rdf(f.body, graph, f"{label}m")
        graph.add(Triple(node, _S["body"], BlankNode(f"{label}m")))
    return graph


def fragments_from_rdf(g: Graph) -> list[Fragment]:
    found = []
    for t in g.match(p=_TYPE, o=_S["Fragment"]):
        node = t.subject
        fid, sig = g.value(node, _S["id"]), g.value(node, _S["signature"])
        if not isinstance(fid, Literal) or sig is None:
            raise MalformedSection(node, ["satis:id and satis:signature on fragment"])
        author, stamp = g.value(node, _S["author"]), g.value(node, _S["timestamp"])
        if g.value(node, _S["kind"]) == _S["Operational"]:
            text = g.value(node, _S["query"])
            if not isinstance(text, Literal):
                raise InvalidBody(f"{fid.value}: operational fragment without satis:query")
            kind, body = FragmentKind.OPERATIONAL, parse_query(text.value)
        else:
            map_node = g.value(node, _S["body"])
            if map_node is None:
                raise InvalidBody(f"{fid.value}: intentional fragment without satis:body")
            kind, body = FragmentKind.INTENTIONAL, rdf_to_map(g, map_node)
        found.append(Fragment(
            fid.value,
            kind,
            rdf_to_section(g, sig),
            body,
            author.value if isinstance(author, Literal) else "",
            stamp.value if isinstance(stamp, Literal) else "",
        ))
    return sorted(found, key=lambda f: f.id)
