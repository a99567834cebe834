"""Fixed namespaces used across the engine.

``MAP`` is the map ontology (intentions, sections, strategies). ``SATIS`` holds
the rule-head vocabulary and fragment export terms. ``PROCESS`` is the OWL-S
process namespace carrying ``hasInput`` / ``hasOutput``.
"""

from __future__ import annotations

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
MAP = "http://satis.example/map#"
SATIS = "http://satis.example/satis#"
DOM = "http://satis.example/dom#"
SVC = "http://satis.example/svc#"
PROCESS = "http://www.daml.org/services/owl-s/1.2/Process.owl#"
SERVICE = "http://www.daml.org/services/owl-s/1.2/Service.owl#"

RDF_TYPE = RDF + "type"
RDFS_SUBCLASS_OF = RDFS + "subClassOf"
RDFS_LABEL = RDFS + "label"

# Prefixes every parser knows without an explicit declaration.
BASE_PREFIXES: dict[str, str] = {"rdf": RDF, "rdfs": RDFS}

# Prefixes used when printing IRIs for humans.
DISPLAY_PREFIXES: dict[str, str] = {
    "rdf": RDF,
    "rdfs": RDFS,
    "map": MAP,
    "satis": SATIS,
    "dom": DOM,
    "svc": SVC,
    "process": PROCESS,
    "service": SERVICE,
}
