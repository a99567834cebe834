"""Intentional process model: intentions, strategies, sections and maps.

An intention is a verb acting on an object, optionally with named
parameters. ``Start`` and ``Stop`` are special intentions carrying the
wildcard verb and object. Intentions are compared structurally, so two
sections naming the same verb/object pair meet at one map node.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

from .errors import CyclicMap, InvalidMap, MalformedSection
from .rdf import BlankNode, Graph, Iri, Literal, Term, Triple, is_subclass
from .vocab import MAP, RDF_TYPE

ANY_VERB = Iri(MAP + "AnyVerb")
ANY_OBJECT = Iri(MAP + "AnyObject")

_M = {name: Iri(MAP + name) for name in (
    "Map", "Section", "Intention", "Start", "Stop", "Strategy", "Parameter",
    "hasName", "hasSection", "hasSource", "hasTarget", "hasStrategy",
    "hasVerb", "hasObject", "hasManner", "hasParameter", "hasRole", "hasConcept",
)}
_TYPE = Iri(RDF_TYPE)


class Kind(enum.Enum):
    ORDINARY = "ordinary"
    START = "start"
    STOP = "stop"


@dataclass(frozen=True, order=False)
class Intention:
    verb: Iri
    object: Iri
    parameters: frozenset = frozenset()  # of (role, concept Iri)
    kind: Kind = Kind.ORDINARY

    @classmethod
    def start(cls) -> "Intention":
        return cls(ANY_VERB, ANY_OBJECT, kind=Kind.START)

    @classmethod
    def stop(cls) -> "Intention":
        return cls(ANY_VERB, ANY_OBJECT, kind=Kind.STOP)

    @property
    def is_start(self) -> bool:
        return self.kind is Kind.START

    @property
    def is_stop(self) -> bool:
        return self.kind is Kind.STOP

    @property
    def is_open(self) -> bool:
        """Wildcard verb and object, no parameters (Start or a ``*,*`` pattern)."""
        return self.verb == ANY_VERB and self.object == ANY_OBJECT and not self.parameters

    def concepts(self) -> list[Iri]:
        found = [c for c in (self.verb, self.object) if c not in (ANY_VERB, ANY_OBJECT)]
        found.extend(c for _, c in sorted(self.parameters, key=_param_key))
        return found

    def key(self) -> tuple:
        return (
            self.kind.value,
            self.verb.value,
            self.object.value,
            tuple(sorted((r, c.value) for r, c in self.parameters)),
        )

    def __str__(self) -> str:
        if self.is_start:
            return "start"
        if self.is_stop:
            return "stop"
        return f"intention({self.verb.value}, {self.object.value})"


def _param_key(param) -> tuple:
    return (param[0], param[1].value)


@dataclass(frozen=True)
class Strategy:
    manner: Optional[Iri] = None  # None is the anonymous strategy

    @property
    def anonymous(self) -> bool:
        return self.manner is None

    def key(self) -> str:
        return "" if self.manner is None else self.manner.value


ANONYMOUS = Strategy()


@dataclass(frozen=True)
class Section:
    source: Intention
    target: Intention
    strategy: Strategy = ANONYMOUS

    def key(self) -> tuple:
        return (self.source.key(), self.target.key(), self.strategy.key())

    def __str__(self) -> str:
        via = "anonymous" if self.strategy.anonymous else self.strategy.manner.value
        return f"{self.source} -> {self.target} via {via}"


@dataclass(frozen=True)
class Map:
    name: str
    sections: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "sections", frozenset(self.sections))

    def ordered_sections(self) -> list[Section]:
        return sorted(self.sections, key=Section.key)

    def intentions(self) -> list[Intention]:
        found = {i for s in self.sections for i in (s.source, s.target)}
        return sorted(found, key=Intention.key)

    def start(self) -> Optional[Intention]:
        starts = [i for i in self.intentions() if i.is_start]
        return starts[0] if len(starts) == 1 else None

    def stop(self) -> Optional[Intention]:
        stops = [i for i in self.intentions() if i.is_stop]
        return stops[0] if len(stops) == 1 else None


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    subject: object = None

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def validate_map(m: Map, concepts: Optional[set] = None) -> list[Violation]:
    """List every broken map invariant; empty means well formed.

    ``concepts`` (IRIs declared by the domain ontology) enables the
    unknown-concept check for verbs, objects, manners and parameters.
    """
    report: list[Violation] = []
    intentions = m.intentions()
    if not m.sections:
        report.append(Violation("Empty", f"map {m.name!r} has no sections"))
        return report
    starts = [i for i in intentions if i.is_start]
    stops = [i for i in intentions if i.is_stop]
    if not starts:
        report.append(Violation("NoStart", "no Start intention"))
    if len(starts) > 1:
        report.append(Violation("MultipleStart", f"{len(starts)} distinct Start intentions", tuple(starts)))
    if not stops:
        report.append(Violation("NoStop", "no Stop intention"))
    if len(stops) > 1:
        report.append(Violation("MultipleStop", f"{len(stops)} distinct Stop intentions", tuple(stops)))
    for i in starts + stops:
        if not i.is_open:
            report.append(Violation("SpecialNotWildcard", f"{i.kind.value} intention must carry wildcard verb and object", i))
    for s in m.ordered_sections():
        if s.target.is_start:
            report.append(Violation("StartAsTarget", f"section {s} targets Start", s))
        if s.source.is_stop:
            report.append(Violation("StopAsSource", f"section {s} leaves Stop", s))

    forward = _reach(m.sections, starts, lambda s: (s.source, s.target))
    backward = _reach(m.sections, stops, lambda s: (s.target, s.source))
    for i in intentions:
        if starts and i not in forward:
            report.append(Violation("Unreachable", f"{i} is not reachable from Start", i))
        if stops and i not in backward:
            report.append(Violation("DeadEnd", f"{i} cannot reach Stop", i))

    if concepts is not None:
        for s in m.ordered_sections():
            for c in section_concepts(s):
                if c not in concepts:
                    report.append(Violation("UnknownConcept", f"{c.value} in section {s} is not declared", s))
    return report


def section_concepts(s: Section) -> list[Iri]:
    found = s.source.concepts() + s.target.concepts()
    if s.strategy.manner is not None:
        found.append(s.strategy.manner)
    return found


def _reach(sections, roots, edge) -> set:
    succ = defaultdict(list)
    for s in sections:
        a, b = edge(s)
        succ[a].append(b)
    seen = set()
    stack = list(roots)
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(succ[node])
    return seen


def paths(m: Map) -> list[tuple[Section, ...]]:
    """Every Start to Stop section sequence, in deterministic order.

    Raises :class:`CyclicMap` if the section graph has any directed cycle.
    """
    start, stop = m.start(), m.stop()
    if start is None or stop is None:
        raise InvalidMap([v for v in validate_map(m) if v.code in ("NoStart", "NoStop", "MultipleStart", "MultipleStop", "Empty")])
    outgoing: dict[Intention, list[Section]] = defaultdict(list)
    indegree: dict[Intention, int] = {i: 0 for i in m.intentions()}
    for s in m.ordered_sections():
        outgoing[s.source].append(s)
        indegree[s.target] += 1

    # Kahn's algorithm gives a topological order or exposes a cycle
    order = []
    ready = sorted((i for i, d in indegree.items() if d == 0), key=Intention.key)
    remaining = dict(indegree)
    while ready:
        node = ready.pop(0)
        order.append(node)
        for s in outgoing[node]:
            remaining[s.target] -= 1
            if remaining[s.target] == 0:
                ready.append(s.target)
    if len(order) != len(indegree):
        raise CyclicMap(_find_cycle(outgoing, [i for i in indegree if remaining[i] > 0]))

    # suffix paths to Stop, built from the sink end of the order
    suffixes: dict[Intention, list[tuple[Section, ...]]] = {stop: [()]}
    for node in reversed(order):
        if node == stop:
            continue
        collected = []
        for s in outgoing[node]:
            for tail in suffixes.get(s.target, ()):
                collected.append((s,) + tail)
        suffixes[node] = collected
    return sorted(suffixes.get(start, []), key=lambda p: tuple(s.key() for s in p))


def _find_cycle(outgoing, candidates) -> list[Intention]:
    onstack: dict[Intention, int] = {}
    trail: list[Intention] = []
    done: set = set()

    def visit(node):
        onstack[node] = len(trail)
        trail.append(node)
        for s in outgoing[node]:
            if s.target in onstack:
                return trail[onstack[s.target]:]
            if s.target not in done:
                found = visit(s.target)
                if found:
                    return found
        trail.pop()
        del onstack[node]
        done.add(node)
        return None

    for c in sorted(candidates, key=Intention.key):
        if c not in done:
            found = visit(c)
            if found:
                return found
    return list(candidates)


def intention_matches(general: Intention, specific: Intention, ontology: Graph) -> bool:
    """Does ``general`` cover ``specific``?

    Verbs match exactly or by wildcard; objects and parameter concepts match
    by subsumption. Every parameter role of ``general`` must occur in
    ``specific``.
    """
    if general.verb != ANY_VERB and general.verb != specific.verb:
        return False
    if general.object != ANY_OBJECT and not is_subclass(ontology, specific.object, general.object):
        return False
    for role, concept in general.parameters:
        if not any(r == role and is_subclass(ontology, c, concept) for r, c in specific.parameters):
            return False
    return True


# RDF form


def intention_to_rdf(i: Intention, node: BlankNode, graph: Graph) -> None:
    kind = {Kind.START: "Start", Kind.STOP: "Stop", Kind.ORDINARY: "Intention"}[i.kind]
    graph.add(Triple(node, _TYPE, _M[kind]))
    graph.add(Triple(node, _M["hasVerb"], i.verb))
    graph.add(Triple(node, _M["hasObject"], i.object))
    for n, (role, concept) in enumerate(sorted(i.parameters, key=_param_key)):
        p = BlankNode(f"{node.label}p{n}")
        graph.add(Triple(node, _M["hasParameter"], p))
        graph.add(Triple(p, _TYPE, _M["Parameter"]))
        graph.add(Triple(p, _M["hasRole"], Literal(role)))
        graph.add(Triple(p, _M["hasConcept"], concept))


def _strategy_to_rdf(st: Strategy, node: BlankNode, graph: Graph) -> None:
    graph.add(Triple(node, _TYPE, _M["Strategy"]))
    if st.manner is not None:
        graph.add(Triple(node, _M["hasManner"], st.manner))


def section_to_rdf(
    s: Section,
    graph: Optional[Graph] = None,
    label: str = "s",
    shared: Optional[dict] = None,
    shared_prefix: str = "i",
) -> Graph:
    """Add (or emit) the map-ontology triples describing ``s``.

    The section node is ``_:<label>``. Passing a ``shared`` dict lets a map
    reuse one node per distinct intention across its sections.
    """
    graph = graph if graph is not None else Graph(prefixes={"map": MAP})
    node = BlankNode(label)
    graph.add(Triple(node, _TYPE, _M["Section"]))
    ends = []
    for role, intention in (("src", s.source), ("tgt", s.target)):
        if shared is None:
            inode = BlankNode(f"{label}{role}")
            intention_to_rdf(intention, inode, graph)
        else:
            if intention not in shared:
                shared[intention] = BlankNode(f"{shared_prefix}{len(shared)}")
                intention_to_rdf(intention, shared[intention], graph)
            inode = shared[intention]
        ends.append(inode)
    strat = BlankNode(f"{label}st")
    graph.add(Triple(node, _M["hasSource"], ends[0]))
    graph.add(Triple(node, _M["hasTarget"], ends[1]))
    graph.add(Triple(node, _M["hasStrategy"], strat))
    _strategy_to_rdf(s.strategy, strat, graph)
    return graph


def rdf_to_intention(g: Graph, node: Term) -> Intention:
    missing = [p for p in ("hasVerb", "hasObject") if g.value(node, _M[p]) is None]
    if missing:
        raise MalformedSection(node, [f"{p} on intention" for p in missing])
    types = set(g.objects(node, _TYPE))
    kind = Kind.START if _M["Start"] in types else Kind.STOP if _M["Stop"] in types else Kind.ORDINARY
    params = set()
    for p in g.objects(node, _M["hasParameter"]):
        role, concept = g.value(p, _M["hasRole"]), g.value(p, _M["hasConcept"])
        if not isinstance(role, Literal) or not isinstance(concept, Iri):
            raise MalformedSection(node, ["hasRole/hasConcept on parameter"])
        params.add((role.value, concept))
    return Intention(g.value(node, _M["hasVerb"]), g.value(node, _M["hasObject"]), frozenset(params), kind)


def rdf_to_section(g: Graph, node: Term) -> Section:
    parts = {p: g.value(node, _M[p]) for p in ("hasSource", "hasTarget", "hasStrategy")}
    missing = [p for p, v in parts.items() if v is None]
    if missing:
        raise MalformedSection(node, missing)
    manner = g.value(parts["hasStrategy"], _M["hasManner"])
    return Section(
        rdf_to_intention(g, parts["hasSource"]),
        rdf_to_intention(g, parts["hasTarget"]),
        Strategy(manner),
    )


def section_nodes(g: Graph) -> list[Term]:
    return [t.subject for t in g.match(p=_TYPE, o=_M["Section"])]


def map_to_rdf(m: Map, graph: Optional[Graph] = None, label: str = "m") -> Graph:
    graph = graph if graph is not None else Graph(prefixes={"map": MAP})
    node = BlankNode(label)
    graph.add(Triple(node, _TYPE, _M["Map"]))
    graph.add(Triple(node, _M["hasName"], Literal(m.name)))
    shared: dict[Intention, BlankNode] = {}
    for n, s in enumerate(m.ordered_sections()):
        slabel = f"{label}s{n}"
        section_to_rdf(s, graph, slabel, shared, f"{label}i")
        graph.add(Triple(node, _M["hasSection"], BlankNode(slabel)))
    return graph


def rdf_to_map(g: Graph, node: Term) -> Map:
    name = g.value(node, _M["hasName"])
    sections = [rdf_to_section(g, s) for s in g.objects(node, _M["hasSection"])]
    return Map(name.value if isinstance(name, Literal) else str(node), sections)


def maps_in(g: Graph) -> list[Map]:
    return [rdf_to_map(g, t.subject) for t in g.match(p=_TYPE, o=_M["Map"])]
