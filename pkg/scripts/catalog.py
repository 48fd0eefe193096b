"""Enumerate multilinear types and compare the N = 4 list with the reference catalog.

    python3 scripts/catalog.py --n 4 --out catalog_n4.json
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from qshuffle.classify import BoundaryDecision, diff_against_reference, enumerate_multilinear_types, render_catalog


@dataclass
class CatalogConfig:
    n: int = 4
    max_degree: int | None = None
    seed: int = 0
    out: str | None = None


def run(cfg: CatalogConfig) -> dict:
    log: list[BoundaryDecision] = []
    t0 = time.perf_counter()
    types = enumerate_multilinear_types(cfg.n, cfg.max_degree, cfg.seed, log)
    elapsed = time.perf_counter() - t0
    result = {"config": asdict(cfg), "seconds": round(elapsed, 2),
              "types": [t.to_json() | {"origin": t.origin} for t in types],
              "decisions": [{"subset": list(d.subset), "brute": d.brute, "predicate": d.predicate,
                             "forces": [list(s) for s in d.forces]} for d in log]}
    print(render_catalog(types))
    if cfg.n == 4:
        diff = diff_against_reference(types)
        result["reference_diff"] = diff.to_json()
        print("\n".join(diff.notes))
        print("extra:", diff.extra, "missing:", diff.missing)
    skipped = sum(1 for d in log if d.forces)
    print(f"{len(types)} types in {elapsed:.1f} s; {len(log)} boundary decisions, {skipped} degenerations")
    return result


def main():
    p = argparse.ArgumentParser(description=__doc__)
    for name, default in asdict(CatalogConfig()).items():
        p.add_argument("--" + name.replace("_", "-"), type=str if name == "out" else int, default=default)
    cfg = CatalogConfig(**vars(p.parse_args()))
    result = run(cfg)
    if cfg.out:
        Path(cfg.out).write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
