"""``satis`` command line: load, validate, fragments, render, export-rules.

Workspace files come from ``--workspace DIR`` (default: ``$SATIS_WORKSPACE``
or the current directory) unless given explicitly with ``--ontology``,
``--services`` and ``--fragments``. Results go to stdout; diagnostics go
to stderr. Exit status is 0 on success and 2 on any input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from .dsl import load_fragments
from .errors import CyclicMap, ParseError, SatisError
from .fragments import FragmentKind, export_rules
from .mapmodel import Intention, intention_matches, maps_in, paths, validate_map
from .rdf import declared_concepts, rdfs_closure
from .render import DEFAULT_MAX_DEPTH, RenderRequest, explain, format_section, goal_section, render, report_to_json
from .turtle import load_turtle
from .workspace import Workspace, WorkspaceError, _where, discover, load_workspace, local_name

EXIT_OK = 0
EXIT_INPUT = 2


class _Fail(Exception):
    def __init__(self, *lines: str):
        self.lines = lines


def _workspace_files(args) -> dict[str, list[Path]]:
    found = discover(args.workspace)
    for key in ("ontology", "services", "fragments"):
        given = getattr(args, key)
        if given:
            found[key] = [Path(p) for p in given]
    return found


def _load(args) -> Workspace:
    files = _workspace_files(args)
    try:
        return load_workspace(files["ontology"], files["services"], files["fragments"])
    except WorkspaceError as exc:
        raise _Fail(*exc.diagnostics)


def cmd_load(args, out) -> int:
    ws = _load(args)
    out.write(f"ontology: {ws.asserted_triples} triples, {len(ws.ontology)} after closure\n")
    out.write(f"services: {len(ws.registry)}\n")
    out.write(f"fragments: {len(ws.catalog)}\n")
    return EXIT_OK


def cmd_validate(args, out) -> int:
    path = Path(args.map)
    concepts = None
    files = _workspace_files(args)
    if files["ontology"]:
        onto = None
        for f in files["ontology"]:
            g = _turtle(f)
            onto = g if onto is None else onto.merge(g)
        concepts = declared_concepts(rdfs_closure(onto))
    if path.suffix == ".frag":
        try:
            maps = [f.body for f in load_fragments(path) if f.kind is FragmentKind.INTENTIONAL]
        except ParseError as exc:
            raise _Fail(exc.diagnostic())
        except OSError as exc:
            raise _Fail(f"{path}:1:1: cannot read file ({exc.strerror})")
    else:
        try:
            maps = maps_in(_turtle(path))
        except SatisError as exc:
            raise _Fail(f"{path}:1:1: {exc}")
    if not maps:
        raise _Fail(f"{path}:1:1: no map found")
    problems = []
    for m in sorted(maps, key=lambda m: m.name):
        violations = validate_map(m, concepts)
        for v in violations:
            problems.append(f"{_locate_violation(path, v.subject, m.name)}: {m.name}: {v}")
        if not violations:
            try:
                paths(m)
            except CyclicMap as exc:
                problems.append(f"{_where(path, m.name)}: {m.name}: Cyclic: {exc}")
    if problems:
        raise _Fail(*problems)
    for m in sorted(maps, key=lambda m: m.name):
        out.write(f"{m.name}: ok, {len(m.sections)} sections, {len(paths(m))} paths\n")
    return EXIT_OK


def _locate_violation(path: Path, subject, map_name: str) -> str:
    """Best source position for a violation: the first section line naming its intention."""
    intention = getattr(subject, "target", subject)
    if isinstance(intention, Intention) and not intention.is_open:
        verb, obj = local_name(intention.verb.value), local_name(intention.object.value)
        try:
            lines = path.read_text(encoding="utf-8").split("\n")
        except OSError:
            lines = []
        for n, line in enumerate(lines, 1):
            if "section" in line and verb in line and obj in line:
                return f"{path}:{n}:{line.index(verb) + 1}"
    return _where(path, map_name)


def _turtle(path: Path):
    try:
        return load_turtle(path)
    except ParseError as exc:
        raise _Fail(exc.diagnostic())
    except OSError as exc:
        raise _Fail(f"{path}:1:1: cannot read file ({exc.strerror})")


def cmd_fragments(args, out) -> int:
    ws = _load(args)
    chosen = list(ws.catalog)
    if args.verb or args.object:
        if not (args.verb and args.object):
            raise _Fail("fragments: --verb and --object go together")
        wanted = Intention(_concept(ws, args.verb), _concept(ws, args.object))
        chosen = [f for f in chosen if intention_matches(f.signature.target, wanted, ws.ontology)]
    for f in chosen:
        out.write(f"{f.id}\t{f.kind.value}\t{format_section(f.signature, ws.prefixes)}\n")
    return EXIT_OK


def _concept(ws: Workspace, text: str):
    try:
        return ws.concept(text)
    except SatisError as exc:
        raise _Fail(f"{type(exc).__name__}: {exc}")


def _depth(args) -> int:
    if args.depth is not None:
        return args.depth
    env = os.environ.get("SATIS_DEPTH")
    if env:
        try:
            return int(env)
        except ValueError:
            raise _Fail(f"SATIS_DEPTH must be an integer, got {env!r}")
    return DEFAULT_MAX_DEPTH


def cmd_render(args, out, err) -> int:
    ws = _load(args)
    source = None
    if args.source_verb or args.source_object:
        if not (args.source_verb and args.source_object):
            raise _Fail("render: --source-verb and --source-object go together")
        source = Intention(_concept(ws, args.source_verb), _concept(ws, args.source_object))
    goal = goal_section(
        _concept(ws, args.verb),
        _concept(ws, args.object),
        _concept(ws, args.strategy) if args.strategy else None,
        source,
    )
    depth = _depth(args)
    if depth < 1:
        raise _Fail(f"depth must be at least 1, got {depth}")
    try:
        report = render(RenderRequest(goal, depth), ws.catalog, ws.registry, ws.ontology)
    except SatisError as exc:
        raise _Fail(f"render: {type(exc).__name__}: {exc}")
    for s in report.services:
        out.write(s.value + "\n")
    out.write(f"# services: {len(report.services)}\n")
    for d in report.diagnostics:
        err.write(f"diagnostic: {d}\n")
    if args.explain:
        err.write(explain(report, ws.prefixes))
    if args.trace:
        text = report_to_json(report)
        if args.trace == "-":
            err.write(text)
        else:
            Path(args.trace).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_export(args, out) -> int:
    ws = _load(args)
    try:
        written = export_rules(ws.catalog, args.out)
    except OSError as exc:
        raise _Fail(f"{args.out}: cannot write rules ({exc.strerror})")
    for p in written:
        out.write(f"{p}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-w", "--workspace", default=os.environ.get("SATIS_WORKSPACE", "."),
                        help="directory with ontology/, services/ and fragments/")
    common.add_argument("--ontology", nargs="+", metavar="F", help="ontology Turtle files or directories")
    common.add_argument("--services", nargs="+", metavar="F", help="service description Turtle files")
    common.add_argument("--fragments", nargs="+", metavar="F", help="fragment files (.frag or .ttl)")

    parser = argparse.ArgumentParser(prog="satis", description="Intentional workflow fragments to web services.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("load", parents=[common], help="load a workspace and report counts")

    p = sub.add_parser("validate", parents=[common], help="check a map's well-formedness")
    p.add_argument("--map", required=True, metavar="F", help="map in Turtle, or a .frag file")

    p = sub.add_parser("fragments", parents=[common], help="list catalog entries")
    p.add_argument("--verb")
    p.add_argument("--object")

    p = sub.add_parser("render", parents=[common], help="find services achieving a goal")
    p.add_argument("--verb", required=True)
    p.add_argument("--object", required=True)
    p.add_argument("--strategy", help="manner of the goal section (default anonymous)")
    p.add_argument("--source-verb")
    p.add_argument("--source-object")
    p.add_argument("--depth", type=int, help=f"proof depth bound (default $SATIS_DEPTH or {DEFAULT_MAX_DEPTH})")
    p.add_argument("--trace", metavar="FILE", help="write the JSON proof tree ('-' for stderr)")
    p.add_argument("--explain", action="store_true", help="print the derivation tree on stderr")

    p = sub.add_parser("export-rules", parents=[common], help="write every fragment as SPARQL rule files")
    p.add_argument("--out", required=True, metavar="DIR")
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "load":
            return cmd_load(args, out)
        if args.command == "validate":
            return cmd_validate(args, out)
        if args.command == "fragments":
            return cmd_fragments(args, out)
        if args.command == "render":
            return cmd_render(args, out, err)
        return cmd_export(args, out)
    except _Fail as exc:
        for line in exc.lines:
            err.write(line + "\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
