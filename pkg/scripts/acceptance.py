#!/usr/bin/env python3
"""
Run the acceptance checks at full scale and print one line per check with
its timing. Exits 1 if any check fails.

    python scripts/acceptance.py [--pairs 1000]
"""
import argparse
import logging
import sys
import tempfile
import time
from pathlib import Path
from typing import Callable, List, Tuple

import numpy as np

# Add project root to Python path
sys.path.insert(0, str(Path(__file__).parent.parent))

from main import main as softpairs
from src.algebra.funcalg import bott_projection, chern_number, constant_field
from src.algebra.homotopy import build_path, linear_scaling_path, reparam_path, rotation_flip_path, verify_path
from src.algebra.matrix import random_projection, random_unitary, seeded_rng, smoothstep, square
from src.algebra.pairs import (
    SoftPair,
    check_derived_identities,
    check_relations,
    conjugate_pair,
    random_valid_pair,
)
from src.algebra.reduction import class_of_pair, reduce_to_projections
from src.algebra.spaces import sphere_grid
from src.algebra.universal import (
    build_PQ,
    check_membership,
    default_grid,
    generator_a,
    generator_b,
    iota,
    kappa,
    multiply,
    scaling_homotopy_PQ,
)

logging.basicConfig(format='%(asctime)s - %(name)s - %(levelname)s - %(message)s', level=logging.ERROR)
logger = logging.getLogger(__name__)

Check = Callable[[List[SoftPair]], Tuple[bool, str]]


def corpus(count: int) -> List[SoftPair]:
    pairs = []
    for seed in range(count):
        n = 1 + seed % 8
        pairs.append(random_valid_pair(n, (seed // 8) % (n + 1), seed))
    return pairs


def relation_soundness(pairs: List[SoftPair]) -> Tuple[bool, str]:
    worst = max(max(r.r1, r.r2) for r in (check_relations(p, 1e-10) for p in pairs))
    return worst <= 1e-10, f"worst residual {worst:.2e} over {len(pairs)} pairs"


def derived_identities(pairs: List[SoftPair]) -> Tuple[bool, str]:
    worst = max(check_derived_identities(p, 1e-10).worst for p in pairs)
    return worst <= 1e-8, f"worst deviation {worst:.2e}"


def integer_class(pairs: List[SoftPair]) -> Tuple[bool, str]:
    for index, pair in enumerate(pairs):
        k0_class = class_of_pair(pair)
        if abs(k0_class - float(np.trace(pair.a - pair.b).real)) > 1e-8:
            return False, f"pair {index}: class off the trace"
        if k0_class != reduce_to_projections(pair).k0_class:
            return False, f"pair {index}: class differs from the rank difference"
        rng = seeded_rng(index, stream=1)
        for _ in range(10):
            if class_of_pair(conjugate_pair(pair, random_unitary(pair.n, rng))) != k0_class:
                return False, f"pair {index}: class changed under conjugation"
    return True, f"{len(pairs)} pairs, 10 conjugations each"


def flip_certification(pairs: List[SoftPair]) -> Tuple[bool, str]:
    worst = 0.0
    for pair in pairs[:100]:
        path = rotation_flip_path(pair, 101)
        report = verify_path(path, 1e-9)
        if not report.passed or set(report.classes) != {0}:
            return False, f"seed {pair.meta['seed']} not certified"
        start = np.abs(path.start.b - np.block([[pair.b, 0 * pair.b], [0 * pair.b, pair.a]])).max()
        end = np.abs(path.end.b - path.end.a).max()
        if max(start, end) > 1e-12:
            return False, f"seed {pair.meta['seed']}: endpoint error {max(start, end):.2e}"
        worst = max(worst, report.worst_r1, report.worst_r2)
    return True, f"worst residual {worst:.2e}"


def reparametrization(pairs: List[SoftPair]) -> Tuple[bool, str]:
    for f in (square, smoothstep):
        for pair in pairs[:100]:
            path = reparam_path(pair, f, 21)
            if not verify_path(path, 1e-8).passed:
                return False, f"{f.name}: seed {pair.meta['seed']} not certified"
            gap = np.abs((path.end.a - path.end.b) - (pair.a - pair.b)).max()
            if gap > 1e-8:
                return False, f"{f.name}: f(a) − f(b) differs from a − b by {gap:.2e}"
    return True, "square and smoothstep"


def universal_model(pairs: List[SoftPair]) -> Tuple[bool, str]:
    grid = default_grid(201)
    a, b = generator_a(grid), generator_b(grid)
    if not all(check_membership(e).passed for e in (a, b, multiply(a, b))):
        return False, "generators leave the algebra"
    defect = max(build_PQ(p).projection_defect for p in pairs)
    if defect > 1e-8:
        return False, f"projection defect {defect:.2e}"
    for pair in pairs[:50]:
        if not verify_path(scaling_homotopy_PQ(pair, 21), 1e-8).passed:
            return False, f"P_s path for seed {pair.meta['seed']} not certified"
    for seed in range(200):
        rng = seeded_rng(seed, stream=2)
        n = 1 + seed % 6
        rank_p, rank_q = rng.integers(0, n + 1, size=2)
        p = random_projection(n, int(rank_p), rng)
        q = random_projection(n, int(rank_q), rng)
        if kappa(iota(p, q)) != rank_p - rank_q:
            return False, f"kappa(iota) wrong for seed {seed}"
    return True, f"max projection defect {defect:.2e}"


def topological_demo(_: List[SoftPair]) -> Tuple[bool, str]:
    coarse = sphere_grid(32, 64)
    bott = bott_projection(coarse)
    values = (
        chern_number(bott),
        chern_number(bott_projection(sphere_grid(64, 128))),
        chern_number(constant_field(coarse, np.diag([1.0, 0.0]))),
        chern_number(bott.complement()),
    )
    return values == (1, 1, 0, -1), f"chern numbers {values}"


def negative_controls(_: List[SoftPair]) -> Tuple[bool, str]:
    report = check_relations(SoftPair(np.diag([0.5, 1.0]), np.diag([0.6, 0.0])))
    if report.passed or abs(report.r1 - 0.025) > 1e-12:
        return False, f"bad pair accepted or r1 = {report.r1}"
    ts = np.linspace(0.0, 1.0, 101)
    pairs = [SoftPair((1 - t) * np.diag([1.0, 0.0]), t * np.diag([0.0, 1.0])) for t in ts]
    path_report = verify_path(build_path(ts, pairs))
    if path_report.passed or path_report.r1[50] <= 1e-10:
        return False, "linear path certified"
    if not verify_path(linear_scaling_path(np.diag([1.0, 0.5]))).passed:
        return False, "scaling path rejected"
    return True, f"r1 = {report.r1:.15g}, midpoint r1 = {path_report.r1[50]:.3g}"


def determinism(_: List[SoftPair]) -> Tuple[bool, str]:
    runs = [
        ["gen", "6", "2", "11", "--out", "{dir}/pair.json"],
        ["homotopy", "flip", "{dir}/pair.json", "--out", "{dir}/trace.tsv"],
        ["reduce", "{dir}/pair.json", "--out", "{dir}/blocks"],
        ["demo", "clutch", "--grid", "8", "--out", "{dir}/clutch"],
        ["demo", "universal", "--out", "{dir}/universal"],
    ]
    outputs = []
    for _attempt in range(2):
        with tempfile.TemporaryDirectory() as tmp:
            for argv in runs:
                if softpairs([arg.format(dir=tmp) for arg in argv]) != 0:
                    return False, f"{argv[0]} failed"
            outputs.append({str(p.relative_to(tmp)): p.read_bytes()
                            for p in sorted(Path(tmp).rglob("*")) if p.is_file()})
    return outputs[0] == outputs[1], f"{len(outputs[0])} files compared"


CHECKS: List[Tuple[str, Check]] = [
    ("relation soundness", relation_soundness),
    ("derived identities", derived_identities),
    ("integer class", integer_class),
    ("flip certification", flip_certification),
    ("reparametrization", reparametrization),
    ("universal model", universal_model),
    ("topological demo", topological_demo),
    ("negative controls", negative_controls),
    ("determinism", determinism),
]


def main() -> int:
    parser = argparse.ArgumentParser(description="softpairs acceptance checks")
    parser.add_argument("--pairs", type=int, default=1000, help="size of the seeded pair corpus")
    args = parser.parse_args()

    pairs = corpus(args.pairs)
    failures = 0
    for number, (name, check) in enumerate(CHECKS, start=1):
        started = time.perf_counter()
        try:
            ok, detail = check(pairs)
        except Exception as e:
            logger.exception(f"Check {name} raised")
            ok, detail = False, f"{type(e).__name__}: {e}"
        elapsed = time.perf_counter() - started
        failures += not ok
        print(f"{number}. {name:<20} {'PASS' if ok else 'FAIL'}  {elapsed:7.2f}s  {detail}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
