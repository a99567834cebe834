"""Random instance generators shared by property tests and the acceptance suite.

Each generator takes a ``random.Random`` so suites can be seeded, and
``hypothesis`` strategies wrap them through ``st.randoms``.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

from satis.fragments import Fragment, FragmentKind
from satis.mapmodel import ANONYMOUS, ANY_OBJECT, ANY_VERB, Intention, Map, Section, Strategy
from satis.rdf import BlankNode, Graph, Iri, Literal, Triple, Variable
from satis.sparql import Filter, Query
from satis.vocab import DOM, RDF_TYPE, RDFS_SUBCLASS_OF

EX = "http://example.org/t#"
SUB = Iri(RDFS_SUBCLASS_OF)
TYPE = Iri(RDF_TYPE)

CLASSES = [Iri(f"{EX}C{n}") for n in range(10)]
NODES = [Iri(f"{EX}n{n}") for n in range(6)]
PREDICATES = [Iri(f"{EX}p{n}") for n in range(3)]
LITERALS = [Literal("x"), Literal('say "hi"\n'), Literal("")]
BLANKS = [BlankNode("b0"), BlankNode("b1")]
VERBS = [Iri(f"{DOM}V{n}") for n in range(4)]
MANNERS = [Iri(f"{DOM}M{n}") for n in range(4)]


def rdfs_graph(rng: random.Random, max_triples: int = 50) -> Graph:
    """Mixed subClassOf / type / other triples over 10 classes."""
    g = Graph()
    for _ in range(rng.randint(0, max_triples)):
        roll = rng.random()
        if roll < 0.5:
            g.add(Triple(rng.choice(CLASSES), SUB, rng.choice(CLASSES)))
        elif roll < 0.8:
            g.add(Triple(rng.choice(NODES + BLANKS), TYPE, rng.choice(CLASSES)))
        else:
            g.add(Triple(rng.choice(NODES), rng.choice(PREDICATES), rng.choice(NODES + LITERALS)))
    return g


def dag(rng: random.Random, n: int = 10) -> Graph:
    """Random subclass DAG: edges only point from higher to lower index."""
    g = Graph()
    for i in range(1, n):
        for j in range(i):
            if rng.random() < 0.25:
                g.add(Triple(CLASSES[i], SUB, CLASSES[j]))
    return g


def data_graph(rng: random.Random, max_triples: int = 100) -> Graph:
    g = Graph()
    objects = NODES + CLASSES[:4] + LITERALS[:1] + BLANKS[:1]
    for _ in range(rng.randint(0, max_triples)):
        if rng.random() < 0.15:
            g.add(Triple(rng.choice(NODES), TYPE, rng.choice(CLASSES[:4])))
        else:
            g.add(Triple(rng.choice(NODES + BLANKS[:1]), rng.choice(PREDICATES), rng.choice(objects)))
    return g


def _pattern_term(rng: random.Random, names: list[str], pool: list):
    if rng.random() < 0.6:
        return Variable(rng.choice(names))
    return rng.choice(pool)


def select_query(rng: random.Random, max_patterns: int = 3, max_filters: int = 2) -> Query:
    names = ["a", "b", "c", "d"][: rng.randint(1, 4)]
    patterns = []
    for _ in range(rng.randint(1, max_patterns)):
        patterns.append(Triple(
            _pattern_term(rng, names, NODES),
            _pattern_term(rng, names, PREDICATES + [TYPE]) if rng.random() < 0.3 else rng.choice(PREDICATES + [TYPE]),
            _pattern_term(rng, names, NODES + CLASSES[:4] + LITERALS[:1]),
        ))
    used = sorted({t.name for p in patterns for t in p if isinstance(t, Variable)})
    if not used:
        patterns[0] = Triple(Variable(names[0]), patterns[0].predicate, patterns[0].object)
        used = [names[0]]
    where: list = list(patterns)
    for _ in range(rng.randint(0, max_filters)):
        f = Filter(rng.choice(used), rng.choice(["=", "=:", "<=:"]), rng.choice(NODES[:2] + CLASSES[:4]))
        where.insert(rng.randint(0, len(where)), f)
    projected = tuple(rng.sample(used, rng.randint(1, len(used))))
    prefixes = (("ex", EX),) if rng.random() < 0.7 else ()
    return Query("select", tuple(where), projected, (), prefixes)


def construct_query(rng: random.Random) -> Query:
    q = select_query(rng)
    used = sorted(q.where_variables())
    template = tuple(
        Triple(Variable(rng.choice(used)), rng.choice(PREDICATES), Variable(rng.choice(used)) if rng.random() < 0.5 else rng.choice(NODES))
        for _ in range(rng.randint(1, 3))
    )
    return Query("construct", q.where, (), template, q.prefixes)


def intention(rng: random.Random, objects: list[Iri] = CLASSES) -> Intention:
    params = frozenset(
        (rng.choice(["from", "to", "with"]), rng.choice(objects)) for _ in range(rng.choice([0, 0, 0, 1, 2]))
    )
    return Intention(rng.choice(VERBS), rng.choice(objects), params)


def strategy(rng: random.Random) -> Strategy:
    return ANONYMOUS if rng.random() < 0.3 else Strategy(rng.choice(MANNERS))


def section(rng: random.Random) -> Section:
    source = Intention.start() if rng.random() < 0.3 else intention(rng)
    target = Intention.stop() if rng.random() < 0.2 else intention(rng)
    return Section(source, target, strategy(rng))


def layered_map(rng: random.Random, max_sections: int = 8, name: str = "m") -> Map:
    """Acyclic well-formed map: intentions in layers, edges only go forward."""
    while True:
        width = rng.randint(1, 4)
        layer = [Intention(VERBS[n], CLASSES[rng.randrange(10)]) for n in range(width)]
        layer = list(dict.fromkeys(layer))
        order = [Intention.start()] + rng.sample(layer, len(layer)) + [Intention.stop()]
        sections = set()
        # a spine guarantees reachability and co-reachability
        for a, b in zip(order, order[1:]):
            sections.add(Section(a, b, strategy(rng)))
        for _ in range(rng.randint(0, max_sections)):
            i = rng.randrange(len(order) - 1)
            j = rng.randrange(i + 1, len(order))
            sections.add(Section(order[i], order[j], strategy(rng)))
        if len(sections) <= max_sections:
            return Map(name, sections)


def cyclic_map(rng: random.Random) -> Map:
    m = layered_map(rng, 7)
    ordinary = [i for i in m.intentions() if not i.is_open]
    a = rng.choice(ordinary)
    return Map(m.name, set(m.sections) | {Section(a, a, Strategy(MANNERS[0]))})


def operational_fragment(rng: random.Random, fid: str) -> Fragment:
    sig = Section(Intention.start(), Intention(rng.choice(VERBS), rng.choice(CLASSES)), strategy(rng))
    q = select_query(rng)
    q = Query("select", q.where, q.variables[:1], (), q.prefixes)
    return Fragment(fid, FragmentKind.OPERATIONAL, sig, q, "gen", "2026-01-01")


def intentional_fragment(rng: random.Random, fid: str) -> Fragment:
    sig = Section(Intention.start(), Intention(rng.choice(VERBS), rng.choice(CLASSES)), strategy(rng))
    return Fragment(fid, FragmentKind.INTENTIONAL, sig, layered_map(rng, 6, name=f"{fid}-map"))


def seeds(n: int, base: int = 0) -> list[random.Random]:
    return [random.Random(base * 1_000_003 + k) for k in range(n)]


randoms = st.randoms(use_true_random=False)
