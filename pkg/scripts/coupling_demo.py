"""Show that registry edits change render output without touching fragments.

Copies the canonical workspace to a temp directory, then renders the debias
goal three times: as shipped, with a second debias service added, and with
the registry emptied.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from satis.rdf import Iri
from satis.render import RenderRequest, goal_section, render
from satis.vocab import DOM
from satis.workspace import load_directory

ROOT = Path(__file__).resolve().parents[1]
EXTRA = """@prefix dom: <http://satis.example/dom#> .
@prefix svc: <http://satis.example/svc#> .
@prefix process: <http://www.daml.org/services/owl-s/1.2/Process.owl#> .
svc:NewDebiasSvc process:hasInput dom:Image ;
    process:hasOutput dom:DebiasedImage , dom:BiasField .
"""


def run(ws_dir: Path, label: str) -> None:
    ws = load_directory(ws_dir)
    goal = goal_section(Iri(DOM + "Homogenise"), Iri(DOM + "Image"), Iri(DOM + "Debiasing"))
    report = render(RenderRequest(goal), ws.catalog, ws.registry, ws.ontology)
    names = ", ".join(s.value.rsplit("#", 1)[-1] for s in report.services) or "(none)"
    print(f"{label:<12} services={len(ws.registry)}  result: {names}  diagnostics: {len(report.diagnostics)}")


def main() -> int:
    with tempfile.TemporaryDirectory() as tmp:
        ws = Path(tmp) / "ws"
        shutil.copytree(ROOT / "workspaces" / "canonical", ws)
        run(ws, "shipped")
        (ws / "services" / "new_debias.ttl").write_text(EXTRA)
        run(ws, "added")
        for f in (ws / "services").iterdir():
            f.unlink()
        run(ws, "emptied")
    return 0


if __name__ == "__main__":
    sys.exit(main())
