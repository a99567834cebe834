"""Render the debias goal on the canonical workspace and print the derivation."""

import sys
from pathlib import Path

from satis.rdf import Iri
from satis.render import RenderRequest, explain, goal_section, render
from satis.vocab import DOM, SVC
from satis.workspace import load_directory

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ws = load_directory(ROOT / "workspaces" / "canonical")
    goal = goal_section(Iri(DOM + "Homogenise"), Iri(DOM + "Image"), Iri(DOM + "Debiasing"))
    report = render(RenderRequest(goal), ws.catalog, ws.registry, ws.ontology)
    sys.stdout.write(explain(report, ws.prefixes))
    return 0 if report.services == (Iri(SVC + "DebiasSvc"),) else 1


if __name__ == "__main__":
    sys.exit(main())
