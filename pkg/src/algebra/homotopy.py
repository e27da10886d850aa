"""
Explicit homotopies of soft pairs and a certifier that re-checks the relations
at every sample.

Paths store their parameter normalized to [0, 1]; constructions with a
natural angle record the map in ``meta["angle_map"]``.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInput, NotNearInteger
from .matrix import (
    ATOL,
    CMatrix,
    RealFunction,
    adjoint,
    direct_sum,
    eig_hermitian,
    hermitian_part,
)
from .pairs import SoftPair, relation_residuals, reparametrize, require_valid, validate_reparametrization
from .reduction import CLASS_TOL, CLUSTER_TOL, reduce_to_projections, trace_class

logger = logging.getLogger(__name__)

DEFAULT_STEPS = 101


@dataclass(frozen=True, eq=False)
class PairPath:
    """Sampled homotopy t ↦ (a_t, b_t)."""

    params: np.ndarray
    pairs: Tuple[SoftPair, ...]
    worst_r1: float
    worst_r2: float
    step_bound: float
    tol: float
    meta: Dict[str, Any] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def start(self) -> SoftPair:
        return self.pairs[0]

    @property
    def end(self) -> SoftPair:
        return self.pairs[-1]


def _stacks(pairs: Sequence[SoftPair]) -> Tuple[np.ndarray, np.ndarray]:
    return np.stack([p.a for p in pairs]), np.stack([p.b for p in pairs])


def _step_distances(a_stack: np.ndarray, b_stack: np.ndarray) -> np.ndarray:
    if a_stack.shape[0] < 2 or a_stack.shape[1] == 0:
        return np.zeros(max(a_stack.shape[0] - 1, 0))
    da = np.linalg.norm(np.diff(a_stack, axis=0), ord=2, axis=(1, 2))
    db = np.linalg.norm(np.diff(b_stack, axis=0), ord=2, axis=(1, 2))
    return np.maximum(da, db)


def build_path(params: Sequence[float], pairs: Sequence[SoftPair], tol: float = ATOL,
               meta: Optional[Dict[str, Any]] = None) -> PairPath:
    """Wrap samples into a PairPath, recording worst residuals and the step bound."""
    params_arr = np.asarray(params, dtype=np.float64)
    if len(pairs) == 0 or params_arr.shape != (len(pairs),):
        raise InvalidInput("a path needs one parameter per sample and at least one sample")
    if np.any(np.diff(params_arr) <= 0) or params_arr[0] < 0.0 or params_arr[-1] > 1.0:
        raise InvalidInput("path parameters must ascend inside [0, 1]")
    a_stack, b_stack = _stacks(pairs)
    batch = relation_residuals(a_stack, b_stack)
    steps = _step_distances(a_stack, b_stack)
    return PairPath(
        params=params_arr,
        pairs=tuple(pairs),
        worst_r1=float(batch.r1.max()),
        worst_r2=float(batch.r2.max()),
        step_bound=float(steps.max()) if steps.size else 0.0,
        tol=tol,
        meta=dict(meta or {}),
    )


def _check_steps(steps: int) -> np.ndarray:
    if steps < 2:
        raise InvalidInput(f"a path needs at least 2 samples, got {steps}")
    return np.linspace(0.0, 1.0, steps)


def linear_scaling_path(a: CMatrix, steps: int = DEFAULT_STEPS, tol: float = ATOL) -> PairPath:
    """(t·a, t·a) for t from 0 to 1; connects (0, 0) to (a, a)."""
    ts = _check_steps(steps)
    system = eig_hermitian(a)
    lam = system.eigenvalues
    if lam.size and (lam[0] < -tol or lam[-1] > 1.0 + tol):
        raise InvalidInput(f"scaling needs 0 ≤ a ≤ 1, spectrum is [{lam[0]:.6g}, {lam[-1]:.6g}]")
    H = hermitian_part(np.asarray(a, dtype=np.complex128))
    pairs = [SoftPair(t * H, t * H) for t in ts]
    logger.info(f"Built linear scaling path with {steps} samples")
    return build_path(ts, pairs, tol, {"kind": "scale"})


def rotation_matrix(theta: float, n: int) -> CMatrix:
    """[[cos θ, −sin θ], [sin θ, cos θ]] ⊗ 1ₙ."""
    c, s = np.cos(theta), np.sin(theta)
    return np.kron(np.array([[c, -s], [s, c]], dtype=np.complex128), np.eye(n))


def rotation_flip_path(p: SoftPair, steps: int = DEFAULT_STEPS, tol: float = ATOL) -> PairPath:
    """
    (a ⊕ b, B_θ) with B_θ = U_θ*(b ⊕ a)U_θ and θ = (π/2)·t.

    At t = 0 the pair is (a ⊕ b, b ⊕ a), at t = 1 it is (a ⊕ b, a ⊕ b).
    """
    require_valid(p, tol)
    ts = _check_steps(steps)
    first = direct_sum(p.a, p.b)
    flipped = direct_sum(p.b, p.a)
    pairs = []
    for t in ts:
        U = rotation_matrix(0.5 * np.pi * t, p.n)
        pairs.append(SoftPair(first, hermitian_part(adjoint(U) @ flipped @ U)))
    logger.info(f"Built rotation flip path for n={p.n} with {steps} samples")
    return build_path(ts, pairs, tol, {"kind": "flip", "angle_map": "theta = pi/2 * t"})


class _Blend:
    """f_u(t) = (1 − u)·t + u·f(t)."""

    def __init__(self, f: RealFunction, u: float):
        self.f = f
        self.u = u
        self.name = f"blend({getattr(f, 'name', 'f')}, {u:.6g})"

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        return (1.0 - self.u) * t + self.u * np.asarray(self.f(t), dtype=np.float64)


def reparam_path(p: SoftPair, f: RealFunction, steps: int = DEFAULT_STEPS,
                 tol: float = ATOL) -> PairPath:
    """(f_u(a), f_u(b)) for u from 0 to 1; connects (a, b) to (f(a), f(b))."""
    validate_reparametrization(f)
    require_valid(p, tol)
    us = _check_steps(steps)
    pairs = [reparametrize(p, _Blend(f, float(u)), tol) for u in us]
    logger.info(f"Built reparametrization path towards {getattr(f, 'name', 'f')}")
    return build_path(us, pairs, tol, {"kind": "reparam", "function": getattr(f, "name", repr(f))})


def common_part_path(p: SoftPair, steps: int = DEFAULT_STEPS, cluster_tol: float = CLUSTER_TOL,
                     tol: float = ATOL) -> PairPath:
    """
    Shrinks the common part: frame·((1−s)·c ⊕ p)·frame* against the same with
    q, for s from 0 to 1; ends at (0 ⊕ p, 0 ⊕ q) in the reduction frame.
    """
    reduction = reduce_to_projections(p, cluster_tol, tol)
    ss = _check_steps(steps)
    U = reduction.frame
    pairs = []
    for s in ss:
        shrunk = (1.0 - s) * reduction.c
        a_s = hermitian_part(U @ direct_sum(shrunk, reduction.p) @ adjoint(U))
        b_s = hermitian_part(U @ direct_sum(shrunk, reduction.q) @ adjoint(U))
        pairs.append(SoftPair(a_s, b_s))
    logger.info(f"Built common-part path, k={reduction.k}, class {reduction.k0_class}")
    return build_path(ss, pairs, tol, {"kind": "common", "k": reduction.k})


@dataclass(frozen=True)
class PathReport:
    passed: bool
    relations_passed: bool
    class_constant: bool
    worst_r1: float
    worst_r2: float
    failing_index: Optional[int]
    classes: List[Optional[int]]
    r1: List[float]
    r2: List[float]
    step_distances: List[float]
    params: List[float]
    tol: float

    def rows(self) -> List[Tuple[float, float, float, Optional[int], float]]:
        """(t, r1, r2, class, distance from the previous sample) per sample."""
        steps = [0.0] + self.step_distances
        return list(zip(self.params, self.r1, self.r2, self.classes, steps))


def verify_path(path: PairPath, tol: float = ATOL, class_tol: float = CLASS_TOL) -> PathReport:
    """
    Re-check every sample at ``tol`` and track the class tr(a_t − b_t).

    Samples are checked as one batch; the failing index reported is the
    smallest one.
    """
    a_stack, b_stack = _stacks(path.pairs)
    batch = relation_residuals(a_stack, b_stack)
    ok = batch.passed(tol)
    failing = np.flatnonzero(~ok)
    classes: List[Optional[int]] = []
    for pair in path.pairs:
        try:
            classes.append(trace_class(pair, class_tol))
        except NotNearInteger:
            classes.append(None)
    class_constant = None not in classes and len(set(classes)) == 1
    relations_passed = failing.size == 0
    report = PathReport(
        passed=relations_passed and class_constant,
        relations_passed=relations_passed,
        class_constant=class_constant,
        worst_r1=float(batch.r1.max()),
        worst_r2=float(batch.r2.max()),
        failing_index=int(failing[0]) if failing.size else None,
        classes=classes,
        r1=[float(x) for x in batch.r1],
        r2=[float(x) for x in batch.r2],
        step_distances=[float(x) for x in _step_distances(a_stack, b_stack)],
        params=[float(x) for x in path.params],
        tol=tol,
    )
    if report.passed:
        logger.info(f"Path {path.meta.get('kind', '?')} certified over {len(path)} samples")
    else:
        logger.warning(
            f"Path {path.meta.get('kind', '?')} not certified: first failing sample "
            f"{report.failing_index}, class constant: {class_constant}"
        )
    return report
