"""Load ontology, service and fragment files into one consistent snapshot.

A workspace directory holds ``ontology/*.ttl``, ``services/*.ttl`` and
``fragments/*.frag`` (fragments may also be given as RDF in ``.ttl``).
Loading either succeeds completely or raises :class:`WorkspaceError`
listing every problem found.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from .dsl import load_fragments
from .errors import ParseError, SatisError, UnknownConcept
from .fragments import Catalog, Fragment, check_fragment, fragments_from_rdf
from .rdf import Graph, Iri, declared_concepts, rdfs_closure
from .registry import Registry, ingest_services
from .turtle import load_turtle
from .vocab import DISPLAY_PREFIXES


class WorkspaceError(SatisError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(self.diagnostics))


@dataclass
class Workspace:
    ontology: Graph
    registry: Registry
    catalog: Catalog
    prefixes: dict[str, str] = field(default_factory=dict)
    asserted_triples: int = 0

    def concept(self, text: str) -> Iri:
        """Resolve a user-supplied concept name (IRI, prefixed or bare local name)."""
        return resolve_concept(text, self.ontology, self.prefixes)


def _files(paths: Iterable, suffixes: tuple[str, ...]) -> list[Path]:
    out = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            out.extend(sorted(q for q in p.iterdir() if q.suffix in suffixes))
        else:
            out.append(p)
    return out


def discover(root) -> dict[str, list[Path]]:
    root = Path(root)
    return {
        "ontology": _files([root / "ontology"], (".ttl",)) if (root / "ontology").is_dir() else [],
        "services": _files([root / "services"], (".ttl",)) if (root / "services").is_dir() else [],
        "fragments": _files([root / "fragments"], (".frag", ".ttl")) if (root / "fragments").is_dir() else [],
    }


def load_workspace(
    ontology_files: Iterable = (),
    service_files: Iterable = (),
    fragment_files: Iterable = (),
) -> Workspace:
    problems: list[str] = []
    prefixes = dict(DISPLAY_PREFIXES)

    asserted = Graph()
    for path in _files(ontology_files, (".ttl",)):
        g = _read_turtle(path, problems)
        if g is not None:
            asserted = asserted.merge(g)
            prefixes.update(g.prefixes)
    ontology = rdfs_closure(asserted)
    ontology.prefixes = dict(prefixes)

    registry = Registry()
    for path in _files(service_files, (".ttl",)):
        g = _read_turtle(path, problems)
        if g is None:
            continue
        prefixes.update(g.prefixes)
        _, found, rejected = ingest_services(g, ontology)
        for exc in rejected:
            problems.append(_locate(path, exc))
        registry = Registry(list(registry) + found, prefixes)

    fragments: list[tuple[Path, Fragment]] = []
    for path in _files(fragment_files, (".frag", ".ttl")):
        try:
            if path.suffix == ".ttl":
                parsed = fragments_from_rdf(load_turtle(path))
            else:
                parsed = load_fragments(path)
        except ParseError as exc:
            problems.append(exc.diagnostic())
            continue
        except (OSError, SatisError) as exc:
            problems.append(f"{path}:1:1: {exc}")
            continue
        fragments.extend((path, f) for f in parsed)

    catalog = Catalog()
    seen: dict[str, Path] = {}
    accepted = []
    for path, f in fragments:
        if f.id in seen:
            problems.append(f"{_where(path, 'fragment ' + f.id)}: fragment id {f.id!r} already defined in {seen[f.id]}")
            continue
        try:
            check_fragment(f, ontology)
        except SatisError as exc:
            problems.append(_locate(path, exc, fallback=f"fragment {f.id}"))
            continue
        seen[f.id] = path
        accepted.append(f)
    catalog = Catalog(accepted)

    if problems:
        raise WorkspaceError(problems)
    registry = Registry(list(registry), prefixes)
    return Workspace(ontology, registry, catalog, prefixes, len(asserted))


def load_directory(root) -> Workspace:
    found = discover(root)
    return load_workspace(found["ontology"], found["services"], found["fragments"])


def _read_turtle(path: Path, problems: list[str]) -> Optional[Graph]:
    try:
        return load_turtle(path)
    except ParseError as exc:
        problems.append(exc.diagnostic())
    except OSError as exc:
        problems.append(f"{path}:1:1: cannot read file ({exc.strerror})")
    return None


def _where(path: Path, needle: str) -> str:
    """``file:line:column`` of the first occurrence of ``needle`` (or 1:1)."""
    try:
        for n, line in enumerate(path.read_text(encoding="utf-8").split("\n"), 1):
            col = line.find(needle)
            if col >= 0:
                return f"{path}:{n}:{col + 1}"
    except OSError:
        pass
    return f"{path}:1:1"


def _locate(path: Path, exc: SatisError, fallback: Optional[str] = None) -> str:
    needle = fallback or ""
    if isinstance(exc, UnknownConcept) and isinstance(exc.concept, Iri):
        needle = local_name(exc.concept.value)
    elif getattr(exc, "service", None) is not None:
        needle = local_name(str(exc.service))
    return f"{_where(path, needle) if needle else str(path) + ':1:1'}: {exc}"


def local_name(iri: str) -> str:
    return re.split(r"[#/:]", iri)[-1]


def resolve_concept(text: str, ontology: Graph, prefixes: dict[str, str]) -> Iri:
    known = declared_concepts(ontology)
    if text.startswith("<") and text.endswith(">"):
        iri = Iri(text[1:-1])
    elif "://" in text:
        iri = Iri(text)
    elif ":" in text:
        prefix, _, local = text.partition(":")
        if prefix not in prefixes:
            raise UnknownConcept("argument", text)
        iri = Iri(prefixes[prefix] + local)
    else:
        matches = sorted((c for c in known if local_name(c.value) == text), key=lambda c: c.value)
        if len(matches) > 1:
            raise SatisError(f"concept name {text!r} is ambiguous: {', '.join(m.value for m in matches)}")
        if not matches:
            raise UnknownConcept("argument", text)
        iri = matches[0]
    if iri not in known:
        raise UnknownConcept("argument", iri.value)
    return iri
