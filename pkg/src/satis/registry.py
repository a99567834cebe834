"""Service descriptions: the profile view of services held in memory.

A service is any subject with ``process:hasInput`` / ``process:hasOutput``
links, or typed ``service:Service``. Inputs and outputs must be concepts
declared by the domain ontology. Other triples about a service (labels,
grounding details) are kept as opaque annotations and never interpreted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import EmptyProfile, NotFound, SatisError, UnknownConcept
from .rdf import Graph, Iri, Literal, Term, Triple, declared_concepts
from .vocab import PROCESS, RDF_TYPE, RDFS_LABEL, SERVICE, SVC

HAS_INPUT = Iri(PROCESS + "hasInput")
HAS_OUTPUT = Iri(PROCESS + "hasOutput")
SERVICE_CLASS = Iri(SERVICE + "Service")
_TYPE = Iri(RDF_TYPE)
_LABEL = Iri(RDFS_LABEL)


@dataclass(frozen=True)
class ServiceDescription:
    iri: Iri
    inputs: tuple[Iri, ...]
    outputs: tuple[Iri, ...]
    label: Optional[str] = None
    annotations: tuple[tuple[Iri, Term], ...] = ()

    def triples(self) -> list[Triple]:
        out = [Triple(self.iri, _TYPE, SERVICE_CLASS)]
        out += [Triple(self.iri, HAS_INPUT, c) for c in self.inputs]
        out += [Triple(self.iri, HAS_OUTPUT, c) for c in self.outputs]
        if self.label is not None:
            out.append(Triple(self.iri, _LABEL, Literal(self.label)))
        out += [Triple(self.iri, p, o) for p, o in self.annotations]
        return out


def ingest_services(
    g: Graph, ontology: Graph
) -> tuple[Graph, list[ServiceDescription], list[SatisError]]:
    """Validate every service found in ``g``.

    Invalid services are rejected one at a time; the third element lists
    the reasons (mostly :class:`UnknownConcept` and :class:`EmptyProfile`).
    """
    known = declared_concepts(ontology)
    candidates = {t.subject for t in g.match(p=HAS_INPUT)}
    candidates |= {t.subject for t in g.match(p=HAS_OUTPUT)}
    candidates |= {t.subject for t in g.match(p=_TYPE, o=SERVICE_CLASS)}
    services: list[ServiceDescription] = []
    rejected: list[SatisError] = []
    for svc in sorted(candidates, key=lambda t: t.n3()):
        try:
            services.append(_describe(g, svc, known))
        except SatisError as exc:
            rejected.append(exc)
    data = Graph(prefixes=g.prefixes)
    for d in services:
        data.update(d.triples())
    return data, services, rejected


def _describe(g: Graph, svc: Term, known: set) -> ServiceDescription:
    if not isinstance(svc, Iri):
        raise SatisError(f"service {svc.n3()} must be named by an IRI")
    inputs = tuple(g.objects(svc, HAS_INPUT))
    outputs = tuple(g.objects(svc, HAS_OUTPUT))
    if not inputs and not outputs:
        raise EmptyProfile(svc)
    for c in inputs + outputs:
        if c not in known:
            raise UnknownConcept(svc, c)
    label = g.value(svc, _LABEL)
    annotations = tuple(
        (t.predicate, t.object)
        for t in g.match(s=svc)
        if t.predicate not in (HAS_INPUT, HAS_OUTPUT, _LABEL)
        and not (t.predicate == _TYPE and t.object == SERVICE_CLASS)
        and isinstance(t.object, (Iri, Literal))
    )
    return ServiceDescription(
        svc,
        inputs,
        outputs,
        label.value if isinstance(label, Literal) else None,
        tuple(sorted(annotations, key=lambda a: (a[0].n3(), a[1].n3()))),
    )


class Registry:
    """Snapshot of validated service descriptions plus their data graph.

    Mutating operations return a new snapshot; existing snapshots stay valid
    for renders already reading them.
    """

    def __init__(self, services: Iterable[ServiceDescription] = (), prefixes: Optional[dict[str, str]] = None):
        self._services = {d.iri: d for d in services}
        self.graph = Graph(prefixes=prefixes or {"process": PROCESS, "svc": SVC})
        for d in self:
            self.graph.update(d.triples())

    def __iter__(self):
        return iter(sorted(self._services.values(), key=lambda d: d.iri.value))

    def __len__(self) -> int:
        return len(self._services)

    def __contains__(self, iri) -> bool:
        return iri in self._services

    def __getitem__(self, iri: Iri) -> ServiceDescription:
        return self._services[iri]

    def __eq__(self, other) -> bool:
        return isinstance(other, Registry) and self._services == other._services

    def ingest(self, g: Graph, ontology: Graph) -> tuple["Registry", list[SatisError]]:
        _, found, rejected = ingest_services(g, ontology)
        merged = dict(self._services)
        merged.update((d.iri, d) for d in found)
        return Registry(merged.values(), {**self.graph.prefixes, **g.prefixes}), rejected

    def remove(self, iri: Iri) -> "Registry":
        if iri not in self._services:
            raise NotFound(iri)
        return Registry((d for k, d in self._services.items() if k != iri), self.graph.prefixes)


def remove_service(registry: Registry, iri: Iri) -> Registry:
    return registry.remove(iri)
