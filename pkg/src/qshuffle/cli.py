"""Command line front end.

Exit status: 0 on success, 2 on bad flags or inputs, 3 when two independent
routes to the same quantity disagree.
"""
from __future__ import annotations

import argparse
import difflib
import io
import json
import os
import sys
from contextlib import redirect_stdout
from dataclasses import dataclass, field
from pathlib import Path

from . import braid, classify, kernelconst, quotient, smatrix
from .errors import MathematicalInconsistency, QShuffleError
from .exactring import render
from .freealg import (CARTAN_RANK2, DEFAULT_CONVENTION, QBinomialConvention, cartan_params, is_constant,
                      render_ncpoly, serre_element)

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_MATH = 0, 2, 3
COMMANDS = ("det", "constants", "varchenko", "classify", "table", "serre-check")


@dataclass
class RunConfig:
    command: str
    n: int = 0
    sigma_one: list = field(default_factory=list)
    force: list = field(default_factory=list)
    remove: list = field(default_factory=list)
    seed: int = 0
    output: str | None = None
    format: str = "text"
    factor: bool = False
    max_degree: int | None = None
    degree: list | None = None
    cartan: str = "all"
    convention: str = DEFAULT_CONVENTION.value


class UsageError(QShuffleError):
    pass


def _subset(text: str) -> tuple:
    try:
        s = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated index list: {text!r}") from None
    if len(s) < 2 and "," in text:
        raise argparse.ArgumentTypeError(f"subset {text!r} needs two distinct indices")
    return s


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qshuffle", description="S-matrix determinants, constants and types.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_n=True):
        if with_n:
            sp.add_argument("--n", type=int, required=True, help="number of generators")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--output", default=None, help="write to this path instead of stdout")

    def constraints(sp):
        sp.add_argument("--sigma-one", action="append", type=_subset, default=[], metavar="I,J,...",
                        help="impose sigma_S = 1 (repeatable)")
        sp.add_argument("--constraints", default=None, metavar="FILE",
                        help='JSON {"n": N, "sigma_one": [[1,2], ...]}')

    sp = sub.add_parser("det", help="determinant of S_G or S_G(Q)")
    common(sp)
    constraints(sp)
    sp.add_argument("--factor", action="store_true", help="print as a product of (1 - sigma) factors")

    sp = sub.add_parser("constants", help="constants at a certified rational point")
    common(sp)
    constraints(sp)
    sp.add_argument("--force", action="append", type=_subset, default=[], metavar="I,J,...",
                    help="also set sigma_S = 1 at the point (repeatable)")
    sp.add_argument("--degree", type=_subset, default=None, help="degree G (default 1..n)")

    sp = sub.add_parser("varchenko", help="compare det B with the product over edges")
    common(sp)
    sp.add_argument("--remove", action="append", type=_subset, default=[], metavar="I,J",
                    help="remove the plane x_i = x_j (weight 1)")

    sp = sub.add_parser("classify", help="enumerate multilinear types")
    common(sp)
    sp.add_argument("--max-degree", type=int, default=None)

    sp = sub.add_parser("table", help="word-class table of B_G(Q)")
    common(sp)
    constraints(sp)

    sp = sub.add_parser("serre-check", help="constancy of Serre elements for rank-2 Cartan data")
    common(sp, with_n=False)
    sp.add_argument("--cartan", choices=("all", *CARTAN_RANK2), default="all")
    sp.add_argument("--convention", choices=[c.value for c in QBinomialConvention], default=DEFAULT_CONVENTION.value)

    sp = sub.add_parser("regen-goldens", help="recompute golden outputs and report differences")
    sp.add_argument("--corpus", default="tests/golden")
    sp.add_argument("--write", action="store_true", help="write the recomputed files (listing every change)")
    return p


def _config(args) -> RunConfig:
    seed = args.seed
    env = os.environ.get("QSHUFFLE_SEED")
    if env is not None:
        try:
            seed = int(env)
        except ValueError:
            raise UsageError(f"QSHUFFLE_SEED is not an integer: {env!r}") from None
    cfg = RunConfig(args.command, getattr(args, "n", 0) or 0, list(getattr(args, "sigma_one", []) or []),
                    list(getattr(args, "force", []) or []), list(getattr(args, "remove", []) or []),
                    seed, args.output, args.format, getattr(args, "factor", False),
                    getattr(args, "max_degree", None), getattr(args, "degree", None),
                    getattr(args, "cartan", "all"), getattr(args, "convention", DEFAULT_CONVENTION.value))
    path = getattr(args, "constraints", None)
    if path:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: {exc}") from None
        cs = quotient.ConstraintSet.from_json(data)
        if cfg.n and cs.n != cfg.n:
            raise UsageError(f"{path} is for n = {cs.n}, not {cfg.n}")
        cfg.sigma_one.extend(cs.subsets)
    return cfg


def _constraint_set(cfg: RunConfig) -> quotient.ConstraintSet:
    return quotient.ConstraintSet.of(cfg.n, cfg.sigma_one)


# commands; each returns (json payload, text)

def cmd_det(cfg: RunConfig):
    Q = _constraint_set(cfg)
    G = tuple(range(1, cfg.n + 1))
    if not Q.subsets:
        route = "structural"
        q = None
        d = smatrix.smatrix_det(G)
        size = len(smatrix.multilinear_basis(G))
    else:
        # the determinant depends on the sigma_ij only; the gauge slice q_ji = 1 computes it fastest
        route = "gauge"
        q = quotient.gauge_params(cfg.n, Q)
        m = quotient.build_smatrix_q(G, Q, q, check=False)
        d = smatrix.det_exact(m)
        size = m.size
    f = smatrix.factor_determinant(d, cfg.n, params=q)
    payload = {"command": "det", "n": cfg.n, "constraints": Q.to_json(), "size": size, "route": route,
               "factorization": f.to_json(), "terms": len(d)}
    if cfg.factor or route == "gauge" or len(d) > 40:
        text = f.render()
    else:
        text = render(d, sigma=True)
    return payload, text


def cmd_constants(cfg: RunConfig):
    Q = _constraint_set(cfg)
    G = tuple(cfg.degree) if cfg.degree else tuple(range(1, cfg.n + 1))
    spec = kernelconst.generic_specialization(cfg.n, list(Q.subsets) + list(cfg.force), seed=cfg.seed)
    cs = kernelconst.constant_space(G, Q, spec)
    basis = [render_ncpoly(c) for c in cs.basis]
    primitive = [render_ncpoly(c) for c in cs.quotient_kernel]
    payload = {"command": "constants", "n": cfg.n, "degree": list(G), "constraints": Q.to_json(),
               "force": [list(s) for s in cfg.force], "seed": spec.seed,
               "point": {f"q{v.i}_{v.j}": str(x) for v, x in sorted(spec.assignment.items())},
               "dim": cs.dim, "primitive_dim": cs.primitive_dim, "basis": basis,
               "primitive_representatives": primitive}
    lines = [f"constants of degree {''.join(map(str, G))}: dim {cs.dim}, primitive {cs.primitive_dim}"]
    lines += [f"  C{k + 1} = {b}" for k, b in enumerate(basis)]
    if primitive:
        lines.append("primitive representatives in B_G(Q):")
        lines += [f"  P{k + 1} = {b}" for k, b in enumerate(primitive)]
    return payload, "\n".join(lines)


def cmd_varchenko(cfg: RunConfig):
    arr = braid.WeightedArrangement.symbolic(cfg.n, cfg.remove)
    f = braid.varchenko_det_formula(arr)
    d = braid.varchenko_det(arr)
    match = d == f.expand()
    lhs = braid.render_weights(d) if len(d) <= 12 else f"{len(d)} terms"
    rhs = braid.render_formula(f, arr)
    edges = []
    for L in braid.edges(arr):
        n_l, p_l = braid.edge_numbers(arr, L)
        edges.append({"partition": [list(b) for b in L.partition], "n": n_l, "p": p_l})
    payload = {"command": "varchenko", "n": cfg.n, "removed": [list(p) for p in sorted(arr.removed)],
               "chambers": len(arr.domains()), "det": lhs, "formula": rhs,
               "factors": [{"block": list(s), "exponent": e} for s, e in f.factors],
               "edges": edges, "verdict": "MATCH" if match else "MISMATCH"}
    text = f"det B   = {lhs}\nformula = {rhs}\n{'MATCH' if match else 'MISMATCH'}"
    if not match:
        raise_after = MathematicalInconsistency("det B differs from the product over edges")
        raise_after.payload = (payload, text)
        raise raise_after
    return payload, text


def cmd_classify(cfg: RunConfig):
    types = classify.enumerate_multilinear_types(cfg.n, cfg.max_degree, seed=cfg.seed)
    payload = {"command": "classify", "n": cfg.n, "max_degree": cfg.max_degree or cfg.n,
               "count": len(types), "types": [t.to_json() for t in types]}
    text = f"{len(types)} types\n" + classify.render_catalog(types)
    if cfg.n == 4:
        diff = classify.diff_against_reference(types)
        payload["reference_diff"] = diff.to_json()
        extra = "; ".join(str(quotient.ConstraintSet(4, e)) for e in diff.extra) or "none"
        text += (f"\nlisted items missing: {diff.missing or 'none'}\nnot in the list: {extra}\n"
                 + "\n".join(diff.notes))
    elif cfg.n == 3:
        text += f"\nreference count: {classify.REFERENCE_N3_COUNT}"
    return payload, text


def cmd_table(cfg: RunConfig):
    Q = _constraint_set(cfg)
    t = classify.word_class_table(range(1, cfg.n + 1), Q, seed=cfg.seed)
    payload = {"command": "table", **t.to_json(), "first_sum_rule": t.first_sum_rule()}
    return payload, t.render()


def cmd_serre(cfg: RunConfig):
    conv = QBinomialConvention(cfg.convention)
    names = list(CARTAN_RANK2) if cfg.cartan == "all" else [cfg.cartan]
    results, lines = [], [f"convention: {conv.value}"]
    for name in names:
        cartan = CARTAN_RANK2[name]
        q = cartan_params(cartan)
        for i, j in ((1, 2), (2, 1)):
            ok = is_constant(serre_element(i, j, q, cartan[i - 1][j - 1], conv), q)
            results.append({"cartan": name, "i": i, "j": j, "constant": ok})
            lines.append(f"{name:6} ({i},{j})  {'constant' if ok else 'NOT constant'}")
    payload = {"command": "serre-check", "convention": conv.value, "results": results,
               "all_constant": all(r["constant"] for r in results)}
    return payload, "\n".join(lines)


HANDLERS = {"det": cmd_det, "constants": cmd_constants, "varchenko": cmd_varchenko,
            "classify": cmd_classify, "table": cmd_table, "serre-check": cmd_serre}


def dumps(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def run(cfg: RunConfig) -> tuple[int, str]:
    """Execute one configured command; returns (exit status, output text)."""
    try:
        payload, text = HANDLERS[cfg.command](cfg)
        status = EXIT_OK
    except MathematicalInconsistency as exc:
        if not hasattr(exc, "payload"):
            raise
        payload, text = exc.payload
        status = EXIT_MATH
    out = dumps(payload) if cfg.format == "json" else text + "\n"
    return status, out


# goldens

GOLDENS = [
    ("det_n2", ["det", "--n", "2", "--factor"]),
    ("det_n3", ["det", "--n", "3", "--factor"]),
    ("det_n3_plain", ["det", "--n", "3"]),
    ("det_n4", ["det", "--n", "4", "--factor", "--format", "json"]),
    ("det_n3_q12", ["det", "--n", "3", "--sigma-one", "1,2", "--factor"]),
    ("det_n4_q12_q34", ["det", "--n", "4", "--sigma-one", "1,2", "--sigma-one", "3,4", "--factor",
                        "--format", "json"]),
    ("constants_n3_boundary", ["constants", "--n", "3", "--force", "1,2,3", "--format", "json"]),
    ("constants_n4_boundary", ["constants", "--n", "4", "--force", "1,2,3,4", "--format", "json"]),
    ("constants_n3_q12", ["constants", "--n", "3", "--sigma-one", "1,2", "--force", "1,2,3"]),
    ("constants_n4_q12_q34", ["constants", "--n", "4", "--sigma-one", "1,2", "--sigma-one", "3,4",
                              "--force", "1,2,3,4", "--format", "json"]),
    ("varchenko_n2", ["varchenko", "--n", "2"]),
    ("varchenko_n3", ["varchenko", "--n", "3", "--format", "json"]),
    ("varchenko_n4_r12_r34", ["varchenko", "--n", "4", "--remove", "1,2", "--remove", "3,4"]),
    ("classify_n3", ["classify", "--n", "3", "--format", "json"]),
    ("classify_n4", ["classify", "--n", "4", "--max-degree", "4"]),
    ("table_q12", ["table", "--n", "4", "--sigma-one", "1,2"]),
    ("table_q123", ["table", "--n", "4", "--sigma-one", "1,2,3", "--format", "json"]),
    ("serre_all", ["serre-check", "--format", "json"]),
]


def golden_name(name: str, argv: list) -> str:
    return name + (".json" if "json" in argv else ".txt")


def render_golden(argv: list) -> str:
    buf = io.StringIO()
    with redirect_stdout(buf):
        status = main(argv, _env_seed=False)
    if status != EXIT_OK:
        raise MathematicalInconsistency(f"{' '.join(argv)} exited with status {status}")
    return buf.getvalue()


def regenerate_goldens(corpus: str | Path, write: bool = False) -> list:
    """Recompute every golden file; returns [(file, unified diff)] for each difference.

    Nothing is written unless ``write`` is set, and every written change is reported.
    """
    corpus = Path(corpus)
    diffs = []
    for name, argv in GOLDENS:
        path = corpus / golden_name(name, argv)
        new = render_golden(argv)
        old = path.read_text(encoding="utf-8") if path.exists() else None
        if old != new:
            d = "".join(difflib.unified_diff((old or "").splitlines(True), new.splitlines(True),
                                             str(path), str(path) + " (recomputed)"))
            diffs.append((str(path), d or f"{path}: new file"))
            if write:
                corpus.mkdir(parents=True, exist_ok=True)
                path.write_text(new, encoding="utf-8")
    return diffs


def main(argv: list | None = None, _env_seed: bool = True) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "regen-goldens":
        diffs = regenerate_goldens(args.corpus, args.write)
        for path, d in diffs:
            print(d, end="" if d.endswith("\n") else "\n")
        verb = "written" if args.write else "found"
        print(f"{len(diffs)} diffs {verb}" if diffs else "0 diffs")
        return EXIT_OK
    saved = os.environ.pop("QSHUFFLE_SEED", None) if not _env_seed else None
    try:
        cfg = _config(args)
        if cfg.command in ("det", "constants", "varchenko", "classify", "table") and cfg.n < 2:
            raise UsageError("--n must be at least 2")
        status, out = run(cfg)
    except MathematicalInconsistency as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH
    except (QShuffleError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved is not None:
            os.environ["QSHUFFLE_SEED"] = saved
    if cfg.output:
        Path(cfg.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
