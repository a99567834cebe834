"""Backward-chaining render: from a goal section to service descriptions.

Every fragment matching a goal is tried. Operational fragments run their
query against the registry graph. Intentional fragments are tried once per
Start to Stop path of their body map, and a path holds only when each of
its sections is proven in turn. Sections into Stop need no proof.

Proof search is bounded by depth and cut on goals already on the current
proof stack, so it terminates on any finite catalog.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .errors import InvalidGoal, TypeMismatch
from .fragments import Catalog, Fragment, FragmentKind, find_matching
from .lexer import compact
from .mapmodel import ANONYMOUS, ANY_OBJECT, ANY_VERB, Intention, Kind, Section, Strategy, paths
from .rdf import Graph, Iri, Term
from .registry import Registry
from .sparql import evaluate
from .vocab import DISPLAY_PREFIXES

DEFAULT_MAX_DEPTH = 16
NO_ROWS = "query returned no rows"
NO_MATCH = "no matching fragments"
CYCLE = "cycle"
DEPTH_LIMIT = "depth limit"


@dataclass(frozen=True)
class RenderRequest:
    goal: Section
    max_depth: int = DEFAULT_MAX_DEPTH

    def __post_init__(self):
        target = self.goal.target
        if target.kind is not Kind.ORDINARY or target.verb == ANY_VERB or target.object == ANY_OBJECT:
            raise InvalidGoal(f"goal target must be a concrete intention, got {target}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be a positive integer")


def goal_section(
    verb: Iri,
    obj: Iri,
    manner: Optional[Iri] = None,
    source: Optional[Intention] = None,
) -> Section:
    """Goal with Start-wildcard source and anonymous strategy unless given."""
    return Section(source or Intention.start(), Intention(verb, obj), Strategy(manner) if manner else ANONYMOUS)


@dataclass(frozen=True)
class OperationalLeaf:
    rows: tuple[tuple[tuple[str, Term], ...], ...]
    services: tuple[Iri, ...]


@dataclass(frozen=True)
class Failure:
    reason: str


@dataclass(frozen=True)
class SubGoal:
    """One section of an intentional path with the proofs found for it."""

    section: Section
    proofs: tuple["ProofNode", ...] = ()

    @property
    def trivial(self) -> bool:
        return self.section.target.is_stop

    @property
    def succeeded(self) -> bool:
        return self.trivial or any(p.succeeded for p in self.proofs)

    def services(self) -> set[Iri]:
        return {s for p in self.proofs for s in p.services()}


@dataclass(frozen=True)
class IntentionalBranch:
    path_index: int
    children: tuple[SubGoal, ...]


@dataclass(frozen=True)
class ProofNode:
    section: Section
    fragment_id: Optional[str]
    outcome: Union[OperationalLeaf, IntentionalBranch, Failure]

    @property
    def succeeded(self) -> bool:
        if isinstance(self.outcome, OperationalLeaf):
            return True
        if isinstance(self.outcome, IntentionalBranch):
            return all(c.succeeded for c in self.outcome.children)
        return False

    def services(self) -> set[Iri]:
        """Services of this proof, empty unless the proof succeeded."""
        if not self.succeeded:
            return set()
        if isinstance(self.outcome, OperationalLeaf):
            return set(self.outcome.services)
        return {s for c in self.outcome.children for s in c.services()}


@dataclass(frozen=True)
class RenderReport:
    goal: Section
    proofs: tuple[ProofNode, ...]
    services: tuple[Iri, ...]
    diagnostics: tuple[str, ...] = ()
    max_depth: int = DEFAULT_MAX_DEPTH

    @property
    def structurally_sound(self) -> bool:
        """Every goal met a fragment and no branch was cut by a cycle or the depth bound."""
        return not self.diagnostics

    def services_by_section(self) -> dict[Section, set[Iri]]:
        """Services proven for each goal and sub-goal section, successful proofs only."""
        found: dict[Section, set[Iri]] = {}

        def visit(node: ProofNode) -> None:
            if not node.succeeded:
                return
            found.setdefault(node.section, set()).update(node.services())
            if isinstance(node.outcome, IntentionalBranch):
                for child in node.outcome.children:
                    for p in child.proofs:
                        visit(p)

        for p in self.proofs:
            visit(p)
        return found


@dataclass
class Renderer:
    catalog: Catalog
    registry: Registry
    ontology: Graph
    diagnostics: list[str] = field(default_factory=list)

    def prove_section(self, section: Section, depth: int, stack: tuple[Section, ...] = ()) -> list[ProofNode]:
        if section in stack:
            self._note(f"cycle cut at {format_section(section)}")
            return [ProofNode(section, None, Failure(CYCLE))]
        if depth <= 0:
            self._note(f"depth limit reached at {format_section(section)}")
            return [ProofNode(section, None, Failure(DEPTH_LIMIT))]
        matching = find_matching(self.catalog, section, self.ontology)
        if not matching:
            self._note(f"unmatched sub-goal {format_section(section)}")
            return [ProofNode(section, None, Failure(NO_MATCH))]
        nodes: list[ProofNode] = []
        for f in matching:
            if f.kind is FragmentKind.OPERATIONAL:
                nodes.append(self._operational(section, f))
            else:
                nodes.extend(self._intentional(section, f, depth, stack + (section,)))
        return nodes

    def _note(self, message: str) -> None:
        if message not in self.diagnostics:
            self.diagnostics.append(message)

    def _operational(self, section: Section, f: Fragment) -> ProofNode:
        try:
            result = evaluate(f.body, self.registry.graph, self.ontology)
        except TypeMismatch as exc:
            return ProofNode(section, f.id, Failure(f"type mismatch: {exc}"))
        if not result.rows:
            return ProofNode(section, f.id, Failure(NO_ROWS))
        var = f.body.variables[0]
        rows = tuple(tuple(sorted(row.items())) for row in result.rows)
        services = tuple(sorted({t for t in result.column(var) if isinstance(t, Iri)}, key=lambda t: t.value))
        return ProofNode(section, f.id, OperationalLeaf(rows, services))

    def _intentional(self, section: Section, f: Fragment, depth: int, stack) -> list[ProofNode]:
        nodes = []
        for index, path in enumerate(paths(f.body)):
            children = []
            for sub in path:
                if sub.target.is_stop:
                    children.append(SubGoal(sub))
                else:
                    children.append(SubGoal(sub, tuple(self.prove_section(sub, depth - 1, stack))))
            nodes.append(ProofNode(section, f.id, IntentionalBranch(index, tuple(children))))
        return nodes


def render(req: RenderRequest, catalog: Catalog, registry: Registry, ontology: Graph) -> RenderReport:
    renderer = Renderer(catalog, registry, ontology)
    proofs = tuple(renderer.prove_section(req.goal, req.max_depth))
    services = sorted({s for p in proofs for s in p.services()}, key=lambda t: t.value)
    return RenderReport(req.goal, proofs, tuple(services), tuple(renderer.diagnostics), req.max_depth)


# output


def _name(iri: Iri, prefixes: dict[str, str]) -> str:
    return compact(iri.value, prefixes)


def format_intention(i: Intention, prefixes: dict[str, str] = DISPLAY_PREFIXES) -> str:
    if i.is_start:
        return "start"
    if i.is_stop:
        return "stop"
    parts = ["*" if i.verb == ANY_VERB else _name(i.verb, prefixes), "*" if i.object == ANY_OBJECT else _name(i.object, prefixes)]
    parts += [f"{role}={_name(c, prefixes)}" for role, c in sorted(i.parameters, key=lambda p: (p[0], p[1].value))]
    return f"intention({', '.join(parts)})"


def format_section(s: Section, prefixes: dict[str, str] = DISPLAY_PREFIXES) -> str:
    via = "anonymous" if s.strategy.anonymous else _name(s.strategy.manner, prefixes)
    return f"{format_intention(s.source, prefixes)} -> {format_intention(s.target, prefixes)} via {via}"


def explain(report: RenderReport, prefixes: dict[str, str] = DISPLAY_PREFIXES) -> str:
    """Indented derivation tree; stable so it can be compared to golden files."""
    lines = [f"goal: {format_section(report.goal, prefixes)}"]
    for node in report.proofs:
        _explain_node(node, 1, lines, prefixes)
    names = ", ".join(_name(s, prefixes) for s in report.services)
    lines.append(f"services: {names or 'none'}")
    lines.extend(f"diagnostic: {d}" for d in report.diagnostics)
    return "\n".join(lines) + "\n"


def _explain_node(node: ProofNode, level: int, lines: list[str], prefixes) -> None:
    pad = "  " * level
    out = node.outcome
    if isinstance(out, Failure):
        if node.fragment_id is None:
            lines.append(f"{pad}failed: {out.reason}")
        else:
            lines.append(f"{pad}fragment {node.fragment_id} failed: {out.reason}")
        return
    if isinstance(out, OperationalLeaf):
        lines.append(f"{pad}fragment {node.fragment_id} [operational]")
        for row in out.rows:
            pairs = " ".join(f"{name}={_term(value, prefixes)}" for name, value in row)
            lines.append(f"{pad}  bindings: {pairs}")
        lines.append(f"{pad}  services: {', '.join(_name(s, prefixes) for s in out.services)}")
        return
    status = "ok" if node.succeeded else "failed"
    lines.append(f"{pad}fragment {node.fragment_id} [intentional] path {out.path_index}: {status}")
    for child in out.children:
        lines.append(f"{pad}  section {format_section(child.section, prefixes)}")
        if child.trivial:
            lines.append(f"{pad}    stop reached")
            continue
        for p in child.proofs:
            _explain_node(p, level + 2, lines, prefixes)


def _term(value: Term, prefixes) -> str:
    return _name(value, prefixes) if isinstance(value, Iri) else value.n3()


def report_to_dict(report: RenderReport) -> dict:
    return {
        "goal": _section_dict(report.goal),
        "max_depth": report.max_depth,
        "services": [s.value for s in report.services],
        "proofs": [_node_dict(p) for p in report.proofs],
        "diagnostics": list(report.diagnostics),
    }


def report_to_json(report: RenderReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def _intention_dict(i: Intention) -> dict:
    return {
        "kind": i.kind.value,
        "verb": i.verb.value,
        "object": i.object.value,
        "parameters": [f"{r}={c.value}" for r, c in sorted(i.parameters, key=lambda p: (p[0], p[1].value))],
    }


def _section_dict(s: Section) -> dict:
    return {
        "source": _intention_dict(s.source),
        "target": _intention_dict(s.target),
        "strategy": None if s.strategy.anonymous else s.strategy.manner.value,
    }


def _node_dict(node: ProofNode) -> dict:
    record: dict = {"section": _section_dict(node.section), "fragment": node.fragment_id, "succeeded": node.succeeded}
    out = node.outcome
    if isinstance(out, OperationalLeaf):
        record["kind"] = "operational"
        record["bindings"] = [[f"{n}={v.value if isinstance(v, Iri) else v.n3()}" for n, v in row] for row in out.rows]
        record["services"] = [s.value for s in out.services]
    elif isinstance(out, IntentionalBranch):
        record["kind"] = "intentional"
        record["path_index"] = out.path_index
        record["children"] = [
            {
                "section": _section_dict(c.section),
                "trivial": c.trivial,
                "succeeded": c.succeeded,
                "proofs": [_node_dict(p) for p in c.proofs],
            }
            for c in out.children
        ]
    else:
        record["kind"] = "failure"
        record["reason"] = out.reason
    return record
