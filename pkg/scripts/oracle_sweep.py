"""Seeded sweep comparing the engine against the brute-force oracles in tests/.

    python3 scripts/oracle_sweep.py --cases 1000 --seed 7
"""

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import gen  # noqa: E402
import oracles  # noqa: E402
from satis.mapmodel import paths  # noqa: E402
from satis.rdf import rdfs_closure  # noqa: E402
from satis.sparql import TypeMismatch, evaluate  # noqa: E402


@dataclass
class SweepConfig:
    cases: int = 250
    seed: int = 0
    max_closure_triples: int = 50
    max_data_triples: int = 100
    max_patterns: int = 3
    max_filters: int = 2
    max_sections: int = 8


def _rows(q, g, onto):
    try:
        return {tuple(r[v] for v in q.variables) for r in evaluate(q, g, onto).rows}
    except TypeMismatch:
        return "mismatch"


def _oracle_rows(q, g, onto):
    try:
        return oracles.select_rows(q, g, onto)
    except oracles.Mismatch:
        return "mismatch"


def sweep(cfg: SweepConfig) -> dict[str, int]:
    bad = {"closure": 0, "evaluate": 0, "paths": 0}
    for rng in gen.seeds(cfg.cases, cfg.seed * 10 + 1):
        g = gen.rdfs_graph(rng, cfg.max_closure_triples)
        bad["closure"] += rdfs_closure(g).triples() != oracles.naive_closure(g)
    for rng in gen.seeds(cfg.cases, cfg.seed * 10 + 2):
        g, onto = gen.data_graph(rng, cfg.max_data_triples), gen.dag(rng, 4)
        q = gen.select_query(rng, cfg.max_patterns, cfg.max_filters)
        bad["evaluate"] += _rows(q, g, onto) != _oracle_rows(q, g, onto)
    for rng in gen.seeds(cfg.cases, cfg.seed * 10 + 3):
        m = gen.layered_map(rng, cfg.max_sections)
        bad["paths"] += set(paths(m)) != oracles.dfs_paths(list(m.sections))
    return bad


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cases", type=int, default=SweepConfig.cases)
    ap.add_argument("--seed", type=int, default=SweepConfig.seed)
    args = ap.parse_args(argv)
    cfg = SweepConfig(cases=args.cases, seed=args.seed)
    start = time.perf_counter()
    bad = sweep(cfg)
    for name, n in bad.items():
        print(f"{name:<9} {cfg.cases} cases, {n} mismatches")
    print(f"elapsed {time.perf_counter() - start:.1f}s")
    return 1 if any(bad.values()) else 0


if __name__ == "__main__":
    sys.exit(main())
