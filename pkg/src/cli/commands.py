"""
Subcommands of the ``softpairs`` front end.

Every command takes the parsed arguments and a RunConfig and returns a
CommandResult; errors from the algebra layer propagate to ``main``, which maps
them to exit codes. Reports go to standard error, data to standard output.
"""
import argparse
import logging
from dataclasses import dataclass, field
from difflib import get_close_matches
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence, Tuple

import numpy as np

from src.algebra.errors import FileFormatError, InvalidInput
from src.algebra.funcalg import (
    FieldPair,
    bott_projection,
    check_relations_field,
    chern_report,
    circle_cutoff,
    hemisphere_clutch,
    pointwise_class,
)
from src.algebra.homotopy import (
    PairPath,
    common_part_path,
    linear_scaling_path,
    reparam_path,
    rotation_flip_path,
    verify_path,
)
from src.algebra.matrix import REPARAMETRIZATIONS, direct_sum, op_norm
from src.algebra.pairs import (
    SoftPair,
    check_derived_identities,
    check_relations,
    compare_spectra,
    random_valid_pair,
)
from src.algebra.reduction import CLASS_TOL, class_of_pair, reduce_to_projections
from src.algebra.spaces import circle_grid, sphere_grid
from src.algebra.universal import (
    DEFAULT_GRID_POINTS,
    build_PQ,
    check_membership,
    default_grid,
    generator_a,
    generator_b,
    generator_PQ,
    multiply,
    pointwise_relations,
    scaling_homotopy_PQ,
)
from src.cli.config import FORMATS, RunConfig
from src.cli.render import mapping_rows, relation_rows, render_rows
from src.storage import formats

logger = logging.getLogger(__name__)

HOMOTOPY_KINDS = ("flip", "scale", "reparam", "pq-scale", "common")
DEMOS = ("universal", "bott", "clutch", "cutoff")
ENDPOINT_TOL = 1e-12
REASSEMBLY_TOL = 1e-8


class UsageError(InvalidInput):
    """Bad command-line usage."""


@dataclass(frozen=True)
class Artifact:
    path: str
    kind: str
    sha256: str


@dataclass
class CommandResult:
    exit_code: int
    summary: str
    report: str = ""
    data: str = ""
    artifacts: List[Artifact] = field(default_factory=list)


def suggest(name: str, choices: Sequence[str]) -> str:
    close = get_close_matches(name, choices, n=1, cutoff=0.5)
    hint = f"; did you mean {close[0]!r}?" if close else ""
    return f"unknown name {name!r} (choose from {', '.join(choices)}){hint}"


def _result(exit_code: int, summary: str, title: str, rows: List[Tuple[str, Any]],
            run: RunConfig, data: str = "", artifacts: Optional[List[Artifact]] = None) -> CommandResult:
    rendered = render_rows(title, rows, run.format)
    if run.format == "tabular":
        return CommandResult(exit_code, summary, "", data + rendered, artifacts or [])
    return CommandResult(exit_code, summary, rendered, data, artifacts or [])


def _write(path: Path, doc: Dict[str, Any], kind: str) -> Artifact:
    return Artifact(str(path), kind, formats.write_document(path, doc))


def _out_dir(run: RunConfig) -> Path:
    out = run.out if run.out is not None else Path(".")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise FileFormatError(f"cannot create {out}: {e}")
    return out


def cmd_verify(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    pair = formats.read_pair(args.pair)
    report = check_relations(pair, run.tol)
    rows = relation_rows(report)
    if report.passed and getattr(args, "derived", False):
        derived = check_derived_identities(pair, run.tol)
        spectra = compare_spectra(pair, tol=run.tol)
        rows += mapping_rows(derived.deviations, "derived.")
        rows += [("derived.passed", derived.passed), ("spectra.interior", len(spectra.matching)),
                 ("spectra.max_gap", spectra.max_gap)]
        if not derived.passed:
            return _result(2, "derived identities fail", "Relations", rows, run)
    verdict = "pass" if report.passed else "fail"
    return _result(0 if report.passed else 2, f"relations {verdict}, r1={report.r1:.3e}, r2={report.r2:.3e}",
                   f"Relations ({verdict})", rows, run)


def cmd_class(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    pair = formats.read_pair(args.pair)
    k0_class = class_of_pair(pair, CLASS_TOL, run.tol)
    return CommandResult(0, f"class {k0_class}", data=f"{k0_class}\n")


def cmd_reduce(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    pair = formats.read_pair(args.pair)
    reduction = reduce_to_projections(pair, run.cluster_tol, run.tol)
    a, b = reduction.reassemble()
    reassembly = max(op_norm(a - pair.a), op_norm(b - pair.b))
    rows: List[Tuple[str, Any]] = [
        ("n", pair.n),
        ("k", reduction.k),
        ("rank_p", reduction.rank_p),
        ("rank_q", reduction.rank_q),
        ("class", reduction.k0_class),
        ("residual_a", reduction.residual_a),
        ("residual_b", reduction.residual_b),
        ("reassembly", reassembly),
    ]
    if reduction.k == pair.n:
        rows.append(("note", "projection part empty"))
    elif reduction.k == 0:
        rows.append(("note", "common part empty"))
    artifacts = []
    if run.out is not None:
        out = _out_dir(run)
        blocks = {"c": reduction.c, "p": reduction.p, "q": reduction.q, "frame": reduction.frame}
        artifacts = [_write(out / f"{name}.json", formats.matrix_to_doc(M), name) for name, M in blocks.items()]
    exit_code = 0 if reassembly <= REASSEMBLY_TOL else 2
    return _result(exit_code, f"k={reduction.k}, class {reduction.k0_class}", "Reduction", rows, run,
                   artifacts=artifacts)


def _build_path(kind: str, pair: SoftPair, args: argparse.Namespace, run: RunConfig) -> PairPath:
    if kind == "flip":
        return rotation_flip_path(pair, run.steps, run.tol)
    if kind == "scale":
        return linear_scaling_path(pair.a, run.steps, run.tol)
    if kind == "reparam":
        name = args.function
        if name not in REPARAMETRIZATIONS:
            raise UsageError(suggest(name, sorted(REPARAMETRIZATIONS)))
        return reparam_path(pair, REPARAMETRIZATIONS[name], run.steps, run.tol)
    if kind == "pq-scale":
        return scaling_homotopy_PQ(pair, run.steps, run.tol)
    return common_part_path(pair, run.steps, run.cluster_tol, run.tol)


def _endpoint_errors(kind: str, pair: SoftPair, path: PairPath, run: RunConfig) -> Dict[str, float]:
    start, end = path.start, path.end
    if kind == "flip":
        return {
            "start_error": op_norm(start.b - direct_sum(pair.b, pair.a)),
            "end_error": op_norm(end.b - direct_sum(pair.a, pair.b)),
        }
    if kind == "pq-scale":
        zero = np.zeros((pair.n, pair.n))
        pq = build_PQ(pair, run.tol)
        return {
            "start_error": max(
                op_norm(start.a - direct_sum(zero, pair.a)), op_norm(start.b - direct_sum(zero, pair.b))
            ),
            "end_error": max(op_norm(end.a - pq.P), op_norm(end.b - pq.Q)),
        }
    if kind == "scale":
        return {"start_error": op_norm(start.a), "end_error": op_norm(end.a - pair.a)}
    return {"start_error": max(op_norm(start.a - pair.a), op_norm(start.b - pair.b))}


def cmd_homotopy(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    kind = args.kind
    if kind not in HOMOTOPY_KINDS:
        raise UsageError(suggest(kind, HOMOTOPY_KINDS))
    pair = formats.read_pair(args.pair)
    path = _build_path(kind, pair, args, run)
    report = verify_path(path, path.tol)
    endpoints = _endpoint_errors(kind, pair, path, run)
    # only these constructions reproduce their endpoints exactly
    exact_ends = kind in ("flip", "pq-scale", "scale")
    certified = report.passed and (not exact_ends or max(endpoints.values()) <= ENDPOINT_TOL)
    table = formats.trace_table(report)
    artifacts = []
    data = ""
    if run.out is not None:
        artifacts.append(Artifact(str(run.out), "trace", formats.write_text(run.out, table)))
    else:
        data = table
    classes = sorted({c for c in report.classes if c is not None})
    rows: List[Tuple[str, Any]] = [
        ("kind", kind),
        ("samples", len(path)),
        ("worst_r1", report.worst_r1),
        ("worst_r2", report.worst_r2),
        ("step_bound", path.step_bound),
        ("classes", classes),
        ("class_constant", report.class_constant),
        ("failing_index", report.failing_index),
        ("certified", certified),
    ] + mapping_rows(endpoints)
    for key, value in sorted(path.meta.items()):
        rows.append((f"meta.{key}", value))
    exit_code = 0 if certified else 2
    summary = f"{kind} path certified: {certified}"
    if run.format == "tabular" and run.out is None:
        # the trace owns standard output
        return CommandResult(exit_code, summary, render_rows("Homotopy", rows, "human"), data, artifacts)
    return _result(exit_code, summary, f"Homotopy {kind}", rows, run, data, artifacts)


def _demo_universal(run: RunConfig, out: Path) -> Tuple[bool, List[Tuple[str, Any]], List[Artifact]]:
    # --grid counts samples on each half of [−1, 1]
    grid = default_grid(2 * run.grid + 1 if run.grid_given else DEFAULT_GRID_POINTS)
    a, b = generator_a(grid), generator_b(grid)
    memberships = {
        "a": check_membership(a),
        "b": check_membership(b),
        "ab": check_membership(multiply(a, b)),
    }
    residuals = pointwise_relations(grid)
    pq = generator_PQ(grid)
    worst = float(max(residuals.r1.max(), residuals.r2.max()))
    max_trace = float(np.abs(pq.trace_differences).max())
    ok = (
        all(m.passed for m in memberships.values())
        and bool(residuals.passed(run.tol).all())
        and pq.max_projection_defect <= 1e-8
        and pq.max_left_difference <= 1e-8
        and max_trace <= CLASS_TOL
    )
    rows: List[Tuple[str, Any]] = [(f"membership.{k}", m.passed) for k, m in memberships.items()]
    rows += [
        ("grid_points", int(grid.size)),
        ("worst_residual", worst),
        ("pq.projection_defect", pq.max_projection_defect),
        ("pq.left_difference", pq.max_left_difference),
        ("pq.max_trace_difference", max_trace),
    ]
    artifacts = [
        _write(out / "generator_a.json", formats.delement_to_doc(a), "delement"),
        _write(out / "generator_b.json", formats.delement_to_doc(b), "delement"),
    ]
    return ok, rows, artifacts


def _demo_bott(run: RunConfig, out: Path) -> Tuple[bool, List[Tuple[str, Any]], List[Artifact]]:
    grid = sphere_grid(run.grid, 2 * run.grid)
    bott = bott_projection(grid)
    report = chern_report(bott)
    complement = chern_report(bott.complement())
    ok = report.chern == 1 and complement.chern == -1
    rows: List[Tuple[str, Any]] = [
        ("mesh", f"{run.grid}x{2 * run.grid}"),
        ("chern", report.chern),
        ("chern_raw", report.raw),
        ("chern_complement", complement.chern),
        ("min_overlap", report.min_overlap),
        ("continuity", bott.continuity_witness()),
    ]
    return ok, rows, [_write(out / "bott.json", formats.field_to_doc(bott), "field")]


def _field_demo(name: str, fp: FieldPair, run: RunConfig,
                out: Path) -> Tuple[bool, List[Tuple[str, Any]], List[Artifact]]:
    relations = check_relations_field(fp, run.tol)
    classes = pointwise_class(fp, CLASS_TOL, run.tol)
    rows: List[Tuple[str, Any]] = [
        ("points", fp.grid.size),
        ("relations", relations.passed),
        ("worst_r1", relations.worst_r1),
        ("worst_r2", relations.worst_r2),
        ("continuity_a", fp.a.continuity_witness()),
        ("continuity_b", fp.b.continuity_witness()),
    ]
    rows += [(f"class.{region}", values) for region, values in classes.regions.items()]
    artifacts = [
        _write(out / f"{name}.json", formats.field_pair_to_doc(fp), "field-pair"),
        Artifact(str(out / f"{name}.csv"), "table",
                 formats.write_text(out / f"{name}.csv", formats.field_table(fp, relations))),
    ]
    return relations.passed, rows, artifacts


def _demo_clutch(run: RunConfig, out: Path) -> Tuple[bool, List[Tuple[str, Any]], List[Artifact]]:
    fp = hemisphere_clutch(sphere_grid(run.grid, 2 * run.grid), run.gluing_tol)
    ok, rows, artifacts = _field_demo("clutch", fp, run, out)
    Z = fp.grid.region("Z")
    K = fp.grid.region("K")
    off_K = np.setdiff1d(Z, K)
    difference_on_Z = float(np.abs(fp.a.values[off_K] - fp.b.values[off_K]).max()) if off_K.size else 0.0
    rows.append(("a_minus_b_on_Z", difference_on_Z))
    return ok and difference_on_Z == 0.0, rows, artifacts


def _demo_cutoff(run: RunConfig, out: Path) -> Tuple[bool, List[Tuple[str, Any]], List[Artifact]]:
    fp = circle_cutoff(circle_grid(4 * run.grid))
    ok, rows, artifacts = _field_demo("cutoff", fp, run, out)
    at_base = max(op_norm(fp.a.at(0)), op_norm(fp.b.at(0)))
    rows.append(("norm_at_basepoint", at_base))
    return ok and at_base == 0.0, rows, artifacts


DEMO_BUILDERS: Dict[str, Callable[[RunConfig, Path], Tuple[bool, List[Tuple[str, Any]], List[Artifact]]]] = {
    "universal": _demo_universal,
    "bott": _demo_bott,
    "clutch": _demo_clutch,
    "cutoff": _demo_cutoff,
}


def cmd_demo(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    name = args.name
    if name not in DEMO_BUILDERS:
        raise UsageError(suggest(name, DEMOS))
    ok, rows, artifacts = DEMO_BUILDERS[name](run, _out_dir(run))
    rows.append(("verified", ok))
    if not ok:
        logger.error(f"Demo {name} failed its own checks")
    return _result(0 if ok else 2, f"demo {name} verified: {ok}", f"Demo {name}", rows, run, artifacts=artifacts)


def cmd_gen(args: argparse.Namespace, run: RunConfig) -> CommandResult:
    seed = run.seed if args.pair_seed is None else args.pair_seed
    if seed < 0:
        raise InvalidInput(f"seed must be non-negative, got {seed}")
    pair = random_valid_pair(args.n, args.k, seed)
    doc = formats.pair_to_doc(pair)
    summary = f"generated n={args.n} k={args.k} seed={seed}, rank difference {pair.meta['rank_difference']}"
    if run.out is None:
        return CommandResult(0, summary, data=formats.dumps(doc))
    return CommandResult(0, summary, artifacts=[_write(run.out, doc, "pair")])


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], CommandResult]] = {
    "verify": cmd_verify,
    "class": cmd_class,
    "reduce": cmd_reduce,
    "homotopy": cmd_homotopy,
    "demo": cmd_demo,
    "gen": cmd_gen,
}


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(f"{self.prog}: {message}")


def _common_flags() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--tol", type=float, help="relation tolerance (default 1e-10)")
    common.add_argument("--cluster-tol", type=float, help="spectral clustering tolerance (default 1e-6)")
    common.add_argument("--steps", type=int, help="samples per homotopy (default 101)")
    common.add_argument("--seed", type=int, help="seed for generated data (default 0)")
    common.add_argument("--grid", type=int,
                        help="sphere bands, circle quarter points or half-interval samples (default 32)")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--format", choices=FORMATS, help="human (default) or tabular")
    common.add_argument("-v", "--verbose", action="count", help="-v for INFO, -vv for DEBUG")
    common.add_argument("--config", help="configuration file (default .env)")
    return common


def build_parser() -> ArgumentParser:
    common = _common_flags()
    parser = ArgumentParser(prog="softpairs", description="Soft projection pairs toolkit", parents=[common])
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=ArgumentParser)
    sub.required = True

    verify = sub.add_parser("verify", parents=[common], help="check the relations for a pair file")
    verify.add_argument("pair")
    verify.add_argument("--derived", action="store_true", default=False,
                        help="also check derived identities and interior spectra")

    klass = sub.add_parser("class", parents=[common], help="print the integer class tr(a - b)")
    klass.add_argument("pair")

    reduce = sub.add_parser("reduce", parents=[common], help="split a pair into common part and projections")
    reduce.add_argument("pair")

    homotopy = sub.add_parser("homotopy", parents=[common], help="build and certify a homotopy")
    homotopy.add_argument("kind", help=", ".join(HOMOTOPY_KINDS))
    homotopy.add_argument("pair")
    homotopy.add_argument("--function", default="square",
                          help=f"reparametrization for 'reparam': {', '.join(sorted(REPARAMETRIZATIONS))}")

    demo = sub.add_parser("demo", parents=[common], help="build and verify a demo")
    demo.add_argument("name", help=", ".join(DEMOS))

    gen = sub.add_parser("gen", parents=[common], help="write a seeded valid pair")
    gen.add_argument("n", type=int)
    gen.add_argument("k", type=int)
    gen.add_argument("pair_seed", metavar="seed", type=int, nargs="?", default=None)
    return parser
