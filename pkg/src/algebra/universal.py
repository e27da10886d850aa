"""
Sampled model of the universal C*-algebra D for the soft relations,

    D = {f ∈ C([−1, 1]; M₂) : f(−1) = 0, f(1) diagonal, f(t) ∈ M₁ for t ≤ 0},

its generators, the projections P, Q built from a pair, the scaling homotopy
P_s = C_s P C_s, and the maps κ and ι between pairs and K₀ classes.
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import BadGrid, InvalidInput, NotAProjection, ProjectionDefect, ShapeError
from .homotopy import DEFAULT_STEPS, PairPath, build_path
from .matrix import (
    ATOL,
    SNAP_TOL,
    UNIT,
    CMatrix,
    apply_function,
    as_cmatrix,
    gap_root,
    hermitian_defect,
    hermitian_part,
    op_norm,
)
from .pairs import DERIVED_FACTOR, ResidualBatch, SoftPair, relation_residuals, require_valid
from .reduction import CLASS_TOL, class_of_pair

logger = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 201
MEMBERSHIP_TOL = 1e-12


def default_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Uniform grid on [−1, 1] containing −1, 0 and 1 exactly."""
    if points < 3 or points % 2 == 0:
        raise BadGrid(f"need an odd number of points ≥ 3 to hit −1, 0, 1; got {points}")
    grid = np.linspace(-1.0, 1.0, points)
    grid[points // 2] = 0.0
    return grid


def validate_grid(grid: np.ndarray) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 3:
        raise BadGrid("grid must be a 1-d array with at least 3 points")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise BadGrid("grid must be finite and strictly ascending")
    if grid[0] != -1.0 or grid[-1] != 1.0:
        raise BadGrid("grid must start at −1 and end at 1")
    if not np.any(grid == 0.0):
        raise BadGrid("grid must contain 0 exactly")
    return grid


@dataclass(frozen=True, eq=False)
class DElement:
    """An M₂-valued function on [−1, 1] sampled on ``grid``."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        grid = validate_grid(self.grid)
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (grid.size, 2, 2):
            raise ShapeError(f"expected values of shape ({grid.size}, 2, 2), got {values.shape}")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def at(self, t: float) -> CMatrix:
        hits = np.flatnonzero(self.grid == t)
        if not hits.size:
            raise BadGrid(f"{t} is not a grid point")
        return self.values[hits[0]]


def generator_a(grid: np.ndarray) -> DElement:
    """diag(cos²(πt/2), 0) on [−1, 0], diag(1, 0) on [0, 1]."""
    grid = validate_grid(grid)
    values = np.zeros((grid.size, 2, 2), dtype=np.complex128)
    left = grid <= 0.0
    values[left, 0, 0] = np.cos(0.5 * np.pi * grid[left]) ** 2
    values[~left, 0, 0] = 1.0
    return DElement(grid, values)


def generator_b(grid: np.ndarray) -> DElement:
    """
    diag(cos²(πt/2), 0) on [−1, 0]; on [0, 1] the rank-one projection onto
    (cos(πt/2), sin(πt/2)).
    """
    grid = validate_grid(grid)
    values = np.zeros((grid.size, 2, 2), dtype=np.complex128)
    c = np.cos(0.5 * np.pi * grid)
    s = np.sin(0.5 * np.pi * grid)
    left = grid <= 0.0
    values[left, 0, 0] = c[left] ** 2
    right = ~left
    values[right, 0, 0] = c[right] ** 2
    values[right, 0, 1] = c[right] * s[right]
    values[right, 1, 0] = c[right] * s[right]
    values[right, 1, 1] = s[right] ** 2
    return DElement(grid, values)


def multiply(e1: DElement, e2: DElement) -> DElement:
    if e1.grid.shape != e2.grid.shape or np.any(e1.grid != e2.grid):
        raise BadGrid("elements are sampled on different grids")
    return DElement(e1.grid, e1.values @ e2.values)


def generator_pairs(grid: np.ndarray) -> List[SoftPair]:
    """The pointwise pairs (𝐚(t), 𝐛(t))."""
    a, b = generator_a(grid), generator_b(grid)
    return [SoftPair(x, y) for x, y in zip(a.values, b.values)]


def pointwise_relations(grid: np.ndarray) -> ResidualBatch:
    """Relation residuals of (𝐚(t), 𝐛(t)) at every grid point."""
    a, b = generator_a(grid), generator_b(grid)
    return relation_residuals(a.values, b.values)


@dataclass(frozen=True)
class MembershipReport:
    at_minus_one: float
    off_diagonal_at_one: float
    corner_leak: float
    tol: float
    passed: bool


def check_membership(e: DElement, tol: float = MEMBERSHIP_TOL) -> MembershipReport:
    """f(−1) = 0, f(1) diagonal, f(t) supported in the upper-left corner for t ≤ 0."""
    at_minus_one = float(np.abs(e.at(-1.0)).max())
    top = e.at(1.0)
    off_diagonal = float(max(abs(top[0, 1]), abs(top[1, 0])))
    left = e.values[e.grid <= 0.0]
    leak = float(max(np.abs(left[:, 0, 1]).max(), np.abs(left[:, 1, 0]).max(), np.abs(left[:, 1, 1]).max()))
    passed = at_minus_one <= tol and off_diagonal <= tol and leak <= tol
    return MembershipReport(at_minus_one, off_diagonal, leak, tol, passed)


@dataclass(frozen=True, eq=False)
class PQPair:
    """P = [[1−b, f(a)], [f(a), a]], Q = [[1−b, f(a)], [f(a), b]] with f(t) = √(t − t²)."""

    P: CMatrix
    Q: CMatrix
    n: int

    @property
    def projection_defect(self) -> float:
        return max(op_norm(self.P @ self.P - self.P), op_norm(self.Q @ self.Q - self.Q))

    def as_pair(self) -> SoftPair:
        return SoftPair(self.P, self.Q)


def _assemble(top_left: CMatrix, off: CMatrix, bottom_right: CMatrix) -> CMatrix:
    return hermitian_part(np.block([[top_left, off], [off, bottom_right]]))


def build_PQ(pair: SoftPair, tol: float = ATOL) -> PQPair:
    require_valid(pair, tol)
    n = pair.n
    one = np.eye(n, dtype=np.complex128)
    root = apply_function(pair.a, gap_root, UNIT, atol=max(tol, ATOL), snap=SNAP_TOL)
    pq = PQPair(
        P=_assemble(one - pair.b, root, pair.a),
        Q=_assemble(one - pair.b, root, pair.b),
        n=n,
    )
    defect = pq.projection_defect
    if defect > DERIVED_FACTOR * tol:
        raise ProjectionDefect(f"‖P² − P‖ or ‖Q² − Q‖ is {defect:.3e}")
    logger.debug(f"Built P, Q for n={n} with projection defect {defect:.3e}")
    return pq


def scaling_homotopy_PQ(pair: SoftPair, steps: int = DEFAULT_STEPS, tol: float = ATOL) -> PairPath:
    """(C_s P C_s, C_s Q C_s) with C_s = diag(s·1, 1); from (0 ⊕ a, 0 ⊕ b) at s = 0 to (P, Q)."""
    pq = build_PQ(pair, tol)
    if steps < 2:
        raise InvalidInput(f"a path needs at least 2 samples, got {steps}")
    ss = np.linspace(0.0, 1.0, steps)
    pairs = []
    for s in ss:
        scale = np.concatenate([np.full(pq.n, s), np.ones(pq.n)])
        C = np.diag(scale).astype(np.complex128)
        pairs.append(SoftPair(C @ pq.P @ C, C @ pq.Q @ C))
    logger.info(f"Built P_s scaling path for n={pq.n} with {steps} samples")
    return build_path(ss, pairs, DERIVED_FACTOR * tol, {"kind": "pq-scale"})


def kappa(pair: SoftPair, tol: float = ATOL) -> int:
    """Image of [P] − [Q] under evaluation at the pair: tr(P − Q) = tr(a − b)."""
    pq = build_PQ(pair, tol)
    return class_of_pair(pq.as_pair(), CLASS_TOL, DERIVED_FACTOR * tol)


def iota(p: CMatrix, q: CMatrix, tol: float = ATOL) -> SoftPair:
    """A pair of projections regarded as a soft pair."""
    p = as_cmatrix(p)
    q = as_cmatrix(q)
    if p.shape != q.shape:
        raise ShapeError(f"projections of different sizes {p.shape} and {q.shape}")
    for label, M in (("p", p), ("q", q)):
        if hermitian_defect(M) > tol or op_norm(M @ M - M) > tol:
            raise NotAProjection(f"{label} is not a projection within {tol:.1e}")
    rank_difference = int(round(float(np.trace(p - q).real)))
    return SoftPair(hermitian_part(p), hermitian_part(q), {"rank_difference": rank_difference})


@dataclass(frozen=True)
class GeneratorPQReport:
    """P(t), Q(t) of the universal pair over the grid."""

    pairs: List[PQPair]
    max_projection_defect: float
    max_left_difference: float
    trace_differences: List[float]


def generator_PQ(grid: np.ndarray) -> GeneratorPQReport:
    """P(t) and Q(t) for the generators; P(t) = Q(t) wherever t ≤ 0."""
    grid = validate_grid(grid)
    pqs = [build_PQ(pair) for pair in generator_pairs(grid)]
    left = [pq for pq, t in zip(pqs, grid) if t <= 0.0]
    return GeneratorPQReport(
        pairs=pqs,
        max_projection_defect=max(pq.projection_defect for pq in pqs),
        max_left_difference=max(op_norm(pq.P - pq.Q) for pq in left),
        trace_differences=[float(np.trace(pq.P - pq.Q).real) for pq in pqs],
    )
