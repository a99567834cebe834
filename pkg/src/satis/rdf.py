"""In-memory RDF terms, triples and graph store with subclass entailment."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Optional, Union

from .errors import VariableInData
from .vocab import RDF_TYPE, RDFS_SUBCLASS_OF


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if ":" not in self.value:
            raise ValueError(f"IRI {self.value!r} is not absolute")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self) -> str:
        return self.n3()


@dataclass(frozen=True, slots=True)
class Literal:
    value: str

    def n3(self) -> str:
        return '"' + escape_string(self.value) + '"'

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def n3(self) -> str:
        return f"?{self.name}"

    def __str__(self) -> str:
        return self.n3()


Term = Union[Iri, BlankNode, Literal, Variable]
Bindings = dict  # variable name -> Term

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def escape_string(text: str) -> str:
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def term_key(term: Term) -> str:
    """Lexical sort key; shared by graph iteration and result ordering."""
    return term.n3()


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term

    def key(self) -> tuple[str, str, str]:
        return (self.subject.n3(), self.predicate.n3(), self.object.n3())

    def has_variables(self) -> bool:
        return any(isinstance(t, Variable) for t in self)


def _check_storable(t: Triple) -> None:
    if t.has_variables():
        raise VariableInData(f"triple {t} holds a variable")
    if not isinstance(t.subject, (Iri, BlankNode)):
        raise ValueError(f"subject must be an IRI or blank node, got {t.subject!r}")
    if not isinstance(t.predicate, Iri):
        raise ValueError(f"predicate must be an IRI, got {t.predicate!r}")


class Graph:
    """A set of triples with three lookup indexes.

    Iteration is sorted by the lexical form of subject, predicate and object,
    which keeps serialization and query results reproducible. Equality
    compares triples only; ``prefixes`` are presentation hints for the
    serializer.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[dict[str, str]] = None):
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self._triples: set[Triple] = set()
        self._spo: dict[Term, dict[Term, set[Term]]] = {}
        self._pos: dict[Term, dict[Term, set[Term]]] = {}
        self._osp: dict[Term, dict[Term, set[Term]]] = {}
        self._sorted: Optional[list[Triple]] = None
        self._supers: dict[Term, frozenset] = {}
        for t in triples:
            self.add(t)

    # mutation (single writer; build a snapshot, then only read it)

    def add(self, t: Triple) -> bool:
        t = Triple(*t)
        _check_storable(t)
        if t in self._triples:
            return False
        self._triples.add(t)
        s, p, o = t
        self._spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)
        self._sorted = None
        self._supers.clear()
        return True

    def update(self, triples: Iterable[Triple]) -> None:
        for t in triples:
            self.add(t)

    def remove(self, t: Triple) -> bool:
        if t not in self._triples:
            return False
        self._triples.discard(t)
        s, p, o = t
        for index, a, b, c in ((self._spo, s, p, o), (self._pos, p, o, s), (self._osp, o, s, p)):
            bucket = index[a][b]
            bucket.discard(c)
            if not bucket:
                del index[a][b]
                if not index[a]:
                    del index[a]
        self._sorted = None
        self._supers.clear()
        return True

    def copy(self) -> "Graph":
        g = Graph(prefixes=self.prefixes)
        g.update(self._triples)
        return g

    def merge(self, other: "Graph") -> "Graph":
        """Union with ``other``, renaming its blank nodes that collide with ours."""
        result = self.copy()
        for prefix, ns in other.prefixes.items():
            result.prefixes.setdefault(prefix, ns)
        taken = {t.label for t in self.terms() if isinstance(t, BlankNode)}
        renames: dict[BlankNode, BlankNode] = {}
        counter = itertools.count()

        def rename(term: Term) -> Term:
            if not isinstance(term, BlankNode) or term.label not in taken:
                return term
            if term not in renames:
                while True:
                    label = f"{term.label}_{next(counter)}"
                    if label not in taken:
                        break
                taken.add(label)
                renames[term] = BlankNode(label)
            return renames[term]

        for t in other:
            result.add(Triple(rename(t.subject), t.predicate, rename(t.object)))
        return result

    # reading

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, t) -> bool:
        return Triple(*t) in self._triples

    def __iter__(self) -> Iterator[Triple]:
        if self._sorted is None:
            self._sorted = sorted(self._triples, key=Triple.key)
        return iter(self._sorted)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self) -> str:
        return f"<Graph of {len(self)} triples>"

    def triples(self) -> frozenset[Triple]:
        return frozenset(self._triples)

    def terms(self) -> set[Term]:
        return set(self._spo) | set(self._pos) | set(self._osp)

    def subjects(self) -> set[Term]:
        return set(self._spo)

    def match(self, s: Optional[Term] = None, p: Optional[Term] = None, o: Optional[Term] = None) -> Iterator[Triple]:
        """Yield stored triples agreeing with every non-None position."""
        if s is not None:
            by_p = self._spo.get(s, {})
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    if o in objs:
                        yield Triple(s, p, o)
                    return
                for obj in objs:
                    yield Triple(s, p, obj)
                return
            if o is not None:
                for pred in self._osp.get(o, {}).get(s, ()):
                    yield Triple(s, pred, o)
                return
            for pred, objs in by_p.items():
                for obj in objs:
                    yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self._pos.get(p, {})
            if o is not None:
                for subj in by_o.get(o, ()):
                    yield Triple(subj, p, o)
                return
            for obj, subjs in by_o.items():
                for subj in subjs:
                    yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        yield from self._triples

    def count(self, s=None, p=None, o=None) -> int:
        if s is None and p is None and o is None:
            return len(self._triples)
        if s is not None and p is not None and o is None:
            return len(self._spo.get(s, {}).get(p, ()))
        if s is None and p is not None and o is not None:
            return len(self._pos.get(p, {}).get(o, ()))
        return sum(1 for _ in self.match(s, p, o))

    def value(self, s: Term, p: Term) -> Optional[Term]:
        """The single object of (s, p), or None; ties broken lexically."""
        objs = self._spo.get(s, {}).get(p)
        if not objs:
            return None
        return min(objs, key=term_key)

    def objects(self, s: Term, p: Term) -> list[Term]:
        return sorted(self._spo.get(s, {}).get(p, ()), key=term_key)

    def superclasses(self, cls: Term) -> frozenset:
        """Terms reachable from ``cls`` along one or more subClassOf edges."""
        cached = self._supers.get(cls)
        if cached is not None:
            return cached
        sub_of = Iri(RDFS_SUBCLASS_OF)
        seen: set[Term] = set()
        queue = deque(self._spo.get(cls, {}).get(sub_of, ()))
        while queue:
            c = queue.popleft()
            if c in seen:
                continue
            seen.add(c)
            queue.extend(self._spo.get(c, {}).get(sub_of, ()))
        result = frozenset(seen)
        self._supers[cls] = result
        return result


def insert(g: Graph, t: Triple) -> Graph:
    """Return a new snapshot holding ``g`` plus ``t``."""
    _check_storable(Triple(*t))
    result = g.copy()
    result.add(t)
    return result


def rdfs_closure(g: Graph) -> Graph:
    """Materialize subClassOf transitivity and rdf:type propagation.

    Reflexive subClassOf edges are not added, except where a cycle of
    subclass axioms derives them.
    """
    sub_of = Iri(RDFS_SUBCLASS_OF)
    rdf_type = Iri(RDF_TYPE)
    closed = g.copy()
    for cls in {t.subject for t in g.match(p=sub_of)}:
        for sup in g.superclasses(cls):
            closed.add(Triple(cls, sub_of, sup))
    for t in list(g.match(p=rdf_type)):
        for sup in g.superclasses(t.object):
            closed.add(Triple(t.subject, rdf_type, sup))
    return closed


def is_subclass(g: Graph, sub: Term, sup: Term) -> bool:
    """Reflexive-transitive subsumption over subClassOf edges."""
    return sub == sup or sup in g.superclasses(sub)


def declared_concepts(ontology: Graph) -> set[Term]:
    """IRIs the ontology declares, i.e. that occur as the subject of a triple."""
    return {s for s in ontology.subjects() if isinstance(s, Iri)}


def match_pattern(g: Graph, pattern: Triple, bindings: Optional[Bindings] = None) -> list[Bindings]:
    """Every extension of ``bindings`` that instantiates ``pattern`` into ``g``."""
    bindings = bindings or {}
    resolved = []
    for term in pattern:
        if isinstance(term, Variable):
            resolved.append(bindings.get(term.name))
        else:
            resolved.append(term)
    results = []
    for triple in g.match(*resolved):
        extended = dict(bindings)
        ok = True
        for term, value in zip(pattern, triple):
            if isinstance(term, Variable):
                bound = extended.get(term.name)
                if bound is None:
                    extended[term.name] = value
                elif bound != value:
                    ok = False
                    break
        if ok:
            results.append(extended)
    return results
