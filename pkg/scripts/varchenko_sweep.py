"""Compare det B with the product over edges for plane-removed braid arrangements.

Runs every canonical set of removed planes for the given n and reports the
formula, the verdict and the time per arrangement.  At n = 4 the single
removed plane {12} is the slow case (an 18 x 18 symbolic determinant).
"""
import argparse
import itertools
import time
from dataclasses import dataclass

from qshuffle.braid import WeightedArrangement, render_formula, varchenko_det, varchenko_det_formula
from qshuffle.classify import canonical_constraints
from qshuffle.quotient import ConstraintSet


@dataclass
class VarchenkoConfig:
    n: int = 3
    skip_slow: bool = False


SLOW = {(4, ((1, 2),))}


def removal_sets(n: int) -> list:
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    seen = {}
    for k in range(len(pairs) + 1):
        for P in itertools.combinations(pairs, k):
            c = canonical_constraints(ConstraintSet.of(n, P))
            seen.setdefault(c.subsets, c)
    return list(seen.values())


def run(cfg: VarchenkoConfig) -> int:
    mismatches = 0
    for Q in removal_sets(cfg.n):
        if cfg.skip_slow and (cfg.n, Q.subsets) in SLOW:
            print(f"{str(Q):<26} skipped")
            continue
        arr = WeightedArrangement.symbolic(cfg.n, Q.subsets)
        t0 = time.perf_counter()
        f = varchenko_det_formula(arr)
        ok = varchenko_det(arr) == f.expand()
        mismatches += not ok
        print(f"{str(Q):<26} {len(arr.domains()):>3} chambers  {'MATCH' if ok else 'MISMATCH'}  "
              f"{time.perf_counter() - t0:7.2f} s  {render_formula(f, arr)}")
    return mismatches


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n", type=int, default=VarchenkoConfig.n)
    p.add_argument("--skip-slow", action="store_true")
    a = p.parse_args()
    raise SystemExit(1 if run(VarchenkoConfig(a.n, a.skip_slow)) else 0)


if __name__ == "__main__":
    main()
