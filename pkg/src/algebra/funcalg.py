"""
Matrix-valued functions over sampled compact spaces.

Relations are checked pointwise. On top of that: the cut-off pair vanishing
at a basepoint, the clutching of projection fields on Y with a contraction on
Z, the Bott projection on the sphere, lattice Chern numbers and the pointwise
integer class.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    BadGrid,
    DomainError,
    GluingMismatch,
    InvalidInput,
    NotAProjection,
    NotHermitian,
    NotLocallyConstant,
    NotNearInteger,
    RankDrop,
    RelationViolation,
    ShapeError,
    SupportMismatch,
)
from .matrix import ATOL, HERMITIAN_TOL, CMatrix, as_cmatrix, is_projection
from .pairs import SoftPair, relation_residuals
from .reduction import CLASS_TOL
from .spaces import SpaceGrid, circle_angles

logger = logging.getLogger(__name__)

GLUING_TOL = 1e-9
PROJECTION_TOL = 1e-8
OVERLAP_TOL = 1e-2
CHERN_TOL = 0.05


def _norms(stack: np.ndarray) -> np.ndarray:
    if stack.shape[0] == 0 or stack.shape[-1] == 0:
        return np.zeros(stack.shape[0])
    return np.linalg.norm(stack, ord=2, axis=(1, 2))


def _dagger(stack: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(stack, -1, -2))


@dataclass(frozen=True, eq=False)
class MatrixField:
    """
    One Hermitian n×n matrix per point of ``grid.points[indices]``.

    ``indices`` defaults to every point of the grid; a field on a region keeps
    the region's indices.
    """

    grid: SpaceGrid
    values: np.ndarray
    indices: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        indices = np.arange(self.grid.size) if self.indices is None else np.asarray(self.indices, dtype=np.int64)
        values = np.asarray(self.values, dtype=np.complex128)
        if values.ndim != 3 or values.shape[0] != indices.size or values.shape[1] != values.shape[2]:
            raise ShapeError(f"expected {indices.size} square matrices, got an array of shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise InvalidInput("field has non-finite entries")
        skew = _norms(values - _dagger(values))
        bad = np.flatnonzero(skew > HERMITIAN_TOL * np.maximum(1.0, _norms(values)))
        if bad.size:
            raise NotHermitian(f"field is not Hermitian at point {int(indices[bad[0]])}")
        values = 0.5 * (values + _dagger(values))
        values.setflags(write=False)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.shape[1])

    @property
    def is_global(self) -> bool:
        return self.indices.size == self.grid.size

    def at(self, point: int) -> CMatrix:
        hits = np.flatnonzero(self.indices == point)
        if not hits.size:
            raise BadGrid(f"field is not defined at point {point}")
        return self.values[hits[0]]

    def restrict(self, indices: np.ndarray) -> "MatrixField":
        indices = np.asarray(indices, dtype=np.int64)
        local = np.full(self.grid.size, -1, dtype=np.int64)
        local[self.indices] = np.arange(self.indices.size)
        positions = local[indices]
        if np.any(positions < 0):
            raise BadGrid("restriction leaves the field's domain")
        return MatrixField(self.grid, self.values[positions], indices)

    def on(self, region: str) -> "MatrixField":
        return self.restrict(self.grid.region(region))

    def continuity_witness(self) -> float:
        """Largest ‖v_i − v_j‖ over grid edges with both ends in the domain."""
        local = np.full(self.grid.size, -1, dtype=np.int64)
        local[self.indices] = np.arange(self.indices.size)
        ends = local[self.grid.edges]
        ends = ends[(ends[:, 0] >= 0) & (ends[:, 1] >= 0)]
        if not ends.size:
            return 0.0
        return float(_norms(self.values[ends[:, 0]] - self.values[ends[:, 1]]).max())

    def complement(self) -> "MatrixField":
        return MatrixField(self.grid, np.eye(self.n) - self.values, self.indices)

    def direct_sum(self, other: "MatrixField") -> "MatrixField":
        if other.grid is not self.grid or not np.array_equal(other.indices, self.indices):
            raise ShapeError("direct sum needs fields on the same points")
        n, k = self.n, other.n
        values = np.zeros((self.indices.size, n + k, n + k), dtype=np.complex128)
        values[:, :n, :n] = self.values
        values[:, n:, n:] = other.values
        return MatrixField(self.grid, values, self.indices)


def constant_field(grid: SpaceGrid, M: CMatrix, indices: Optional[np.ndarray] = None) -> MatrixField:
    M = as_cmatrix(M)
    count = grid.size if indices is None else len(indices)
    return MatrixField(grid, np.broadcast_to(M, (count,) + M.shape).copy(), indices)


@dataclass(frozen=True, eq=False)
class FieldPair:
    a: MatrixField
    b: MatrixField

    def __post_init__(self) -> None:
        if self.a.grid is not self.b.grid:
            raise ShapeError("field pair components live on different grids")
        if not np.array_equal(self.a.indices, self.b.indices) or self.a.n != self.b.n:
            raise ShapeError("field pair components have different domains or sizes")

    @property
    def grid(self) -> SpaceGrid:
        return self.a.grid

    def pair_at(self, point: int) -> SoftPair:
        return SoftPair(self.a.at(point), self.b.at(point))


def constant_field_pair(grid: SpaceGrid, pair: SoftPair) -> FieldPair:
    return FieldPair(constant_field(grid, pair.a), constant_field(grid, pair.b))


@dataclass(frozen=True)
class RegionResiduals:
    worst_r1: float
    worst_r2: float
    max_norm: float
    min_positivity: float
    passed: bool


@dataclass(frozen=True)
class FieldRelationReport:
    worst_r1: float
    worst_r2: float
    passed: bool
    failing_points: List[int]
    regions: Dict[str, RegionResiduals]
    r1: np.ndarray = field(repr=False)
    r2: np.ndarray = field(repr=False)
    tol: float = ATOL


def check_relations_field(fp: FieldPair, tol: float = ATOL) -> FieldRelationReport:
    """Relations at every point, with the worst residuals per named region."""
    batch = relation_residuals(fp.a.values, fp.b.values)
    ok = batch.passed(tol)
    local = np.full(fp.grid.size, -1, dtype=np.int64)
    local[fp.a.indices] = np.arange(fp.a.indices.size)
    regions: Dict[str, RegionResiduals] = {}
    for name, members in sorted(fp.grid.regions.items()):
        pos = local[members]
        pos = pos[pos >= 0]
        if not pos.size:
            continue
        regions[name] = RegionResiduals(
            worst_r1=float(batch.r1[pos].max()),
            worst_r2=float(batch.r2[pos].max()),
            max_norm=float(np.maximum(batch.norm_a[pos], batch.norm_b[pos]).max()),
            min_positivity=float(np.minimum(batch.positivity_a[pos], batch.positivity_b[pos]).min()),
            passed=bool(ok[pos].all()),
        )
    failing = [int(fp.a.indices[i]) for i in np.flatnonzero(~ok)]
    report = FieldRelationReport(
        worst_r1=float(batch.r1.max()) if batch.r1.size else 0.0,
        worst_r2=float(batch.r2.max()) if batch.r2.size else 0.0,
        passed=not failing,
        failing_points=failing,
        regions=regions,
        r1=batch.r1,
        r2=batch.r2,
        tol=tol,
    )
    if failing:
        logger.warning(f"Field pair fails the relations at {len(failing)} point(s), first {failing[0]}")
    return report


def _projection_defects(values: np.ndarray) -> np.ndarray:
    return _norms(values @ values - values)


def cutoff_pair(p0: CMatrix, alpha: MatrixField, beta: MatrixField, h: np.ndarray,
                basepoint: int = 0, tol: float = ATOL) -> FieldPair:
    """
    a = h·p0 + α, b = h·p0 + β for a scalar cut-off h with h(basepoint) = 0.

    α and β must vanish wherever h < 1, and p0 + α, p0 + β must be
    projections wherever h = 1.
    """
    p0 = as_cmatrix(p0)
    if not is_projection(p0, tol):
        raise NotAProjection("p0 is not a projection")
    if not (alpha.is_global and beta.is_global) or alpha.grid is not beta.grid:
        raise ShapeError("alpha and beta must be fields on the whole grid")
    if alpha.n != p0.shape[0] or beta.n != p0.shape[0]:
        raise ShapeError("alpha, beta and p0 have different sizes")
    h = np.array(h, dtype=np.float64)
    if h.shape != (alpha.grid.size,):
        raise ShapeError(f"cut-off needs one value per point, got shape {h.shape}")
    if h.min() < -tol or h.max() > 1.0 + tol:
        raise DomainError(f"cut-off leaves [0, 1]: range [{h.min():.6g}, {h.max():.6g}]")
    h = np.clip(h, 0.0, 1.0)
    if h[basepoint] != 0.0:
        logger.warning(f"Cut-off is {h[basepoint]:.3g} at the basepoint, forcing it to 0")
        h[basepoint] = 0.0

    below = h < 1.0 - tol
    leak = float(max(_norms(alpha.values[below]).max(initial=0.0), _norms(beta.values[below]).max(initial=0.0)))
    if leak > tol:
        raise SupportMismatch(f"alpha or beta is {leak:.3e} where the cut-off is below 1")
    for label, part in (("alpha", alpha), ("beta", beta)):
        defect = _projection_defects(p0 + part.values[~below]).max(initial=0.0)
        if defect > tol:
            raise NotAProjection(f"p0 + {label} is not a projection where the cut-off is 1 ({defect:.3e})")

    base = h[:, None, None] * p0
    return FieldPair(
        MatrixField(alpha.grid, base + alpha.values),
        MatrixField(alpha.grid, base + beta.values),
    )


def clutch(pY: MatrixField, qY: MatrixField, sZ: MatrixField, tol: float = GLUING_TOL) -> FieldPair:
    """
    a = p on Y, s on Z; b = q on Y, s on Z.

    Needs p, q projections on Y, 0 ≤ s ≤ 1 on Z, and p = q = s on K = Y ∩ Z
    within ``tol``. Y and Z must cover the grid.
    """
    grid = pY.grid
    Y, Z = grid.region("Y"), grid.region("Z")
    K = np.intersect1d(Y, Z)
    if not K.size:
        raise BadGrid("regions Y and Z do not overlap")
    if "K" in grid.regions and not np.array_equal(grid.regions["K"], K):
        raise BadGrid("region K is not the overlap of Y and Z")
    if np.union1d(Y, Z).size != grid.size:
        raise BadGrid("regions Y and Z do not cover the grid")
    if qY.grid is not grid or sZ.grid is not grid:
        raise ShapeError("clutch inputs live on different grids")
    if not (np.array_equal(pY.indices, Y) and np.array_equal(qY.indices, Y) and np.array_equal(sZ.indices, Z)):
        raise ShapeError("p and q must be fields on Y and s a field on Z")
    if not pY.n == qY.n == sZ.n:
        raise ShapeError("clutch inputs have different matrix sizes")

    for label, part in (("p", pY), ("q", qY)):
        defect = float(_projection_defects(part.values).max())
        if defect > PROJECTION_TOL:
            raise NotAProjection(f"{label} is not a projection field on Y ({defect:.3e})")
    spectra = np.linalg.eigvalsh(sZ.values)
    if spectra.min() < -ATOL or spectra.max() > 1.0 + ATOL:
        raise DomainError(f"s leaves 0 ≤ s ≤ 1 on Z: spectrum [{spectra.min():.6g}, {spectra.max():.6g}]")

    pK, qK, sK = pY.restrict(K).values, qY.restrict(K).values, sZ.restrict(K).values
    mismatch = float(max(_norms(pK - qK).max(), _norms(pK - sK).max()))
    if mismatch > tol:
        raise GluingMismatch(f"p, q and s disagree on K by {mismatch:.3e}")

    n = pY.n
    a = np.zeros((grid.size, n, n), dtype=np.complex128)
    b = np.zeros((grid.size, n, n), dtype=np.complex128)
    a[Z] = sZ.values
    b[Z] = sZ.values
    a[Y] = pY.values
    b[Y] = qY.values
    logger.info(f"Clutched fields over {Y.size} points of Y and {Z.size} of Z, mismatch on K {mismatch:.3e}")
    return FieldPair(MatrixField(grid, a), MatrixField(grid, b))


def bott_projection(grid: SpaceGrid) -> MatrixField:
    """½·[[1 + z, x − iy], [x + iy, 1 − z]] at every point (x, y, z) of a sphere grid."""
    if grid.kind != "sphere":
        raise BadGrid(f"the Bott projection lives on a sphere grid, got {grid.kind}")
    x, y, z = grid.points[:, 0], grid.points[:, 1], grid.points[:, 2]
    values = np.empty((grid.size, 2, 2), dtype=np.complex128)
    values[:, 0, 0] = 0.5 * (1.0 + z)
    values[:, 0, 1] = 0.5 * (x - 1j * y)
    values[:, 1, 0] = 0.5 * (x + 1j * y)
    values[:, 1, 1] = 0.5 * (1.0 - z)
    return MatrixField(grid, values)


def _frames(field_: MatrixField) -> Tuple[np.ndarray, int]:
    """Orthonormal frames of the ranges, largest component of each column real positive."""
    eigenvalues, vectors = np.linalg.eigh(field_.values)
    traces = np.trace(field_.values, axis1=1, axis2=2).real
    rank = int(round(float(traces[0])))
    off = np.minimum(np.abs(eigenvalues), np.abs(eigenvalues - 1.0)).max()
    if off > PROJECTION_TOL:
        raise NotAProjection(f"field is not pointwise a projection (eigenvalue off by {off:.3e})")
    counts = (eigenvalues > 0.5).sum(axis=1)
    if np.any(counts != rank):
        point = int(field_.indices[np.flatnonzero(counts != rank)[0]])
        raise RankDrop(f"projection rank changes from {rank} at point {point}")
    frames = vectors[:, :, field_.n - rank:]
    if rank:
        lead = np.argmax(np.abs(frames), axis=1)
        entries = np.take_along_axis(frames, lead[:, None, :], axis=1)
        frames = frames * (np.conj(entries) / np.abs(entries))
    return frames, rank


@dataclass(frozen=True)
class ChernReport:
    chern: int
    raw: float
    deviation: float
    rank: int
    plaquettes: int
    min_overlap: float


def chern_report(field_: MatrixField) -> ChernReport:
    """
    Lattice Chern number of a projection field on a sphere grid.

    Per plaquette the phase of det(F₁*F₂·F₂*F₃·F₃*F₄·F₄*F₁), wrapped to
    (−π, π]; the phases are summed in plaquette order.
    """
    grid = field_.grid
    if grid.kind != "sphere" or not grid.plaquettes.size:
        raise BadGrid("Chern numbers need a sphere grid with plaquettes")
    if not field_.is_global:
        raise ShapeError("Chern numbers need a field on the whole grid")
    frames, rank = _frames(field_)
    if rank == 0:
        return ChernReport(0, 0.0, 0.0, 0, int(grid.plaquettes.shape[0]), 1.0)
    corners = frames[grid.plaquettes]
    product = np.broadcast_to(np.eye(rank, dtype=np.complex128), (grid.plaquettes.shape[0], rank, rank))
    min_overlap = np.inf
    for k in range(4):
        overlap = _dagger(corners[:, k]) @ corners[:, (k + 1) % 4]
        singular = np.linalg.svd(overlap, compute_uv=False)
        min_overlap = min(min_overlap, float(singular.min()))
        product = product @ overlap
    if min_overlap < OVERLAP_TOL:
        raise RankDrop(f"frame overlap {min_overlap:.3e} is near-singular; refine the mesh")
    phases = np.angle(np.linalg.det(product))
    phases = np.where(phases <= -np.pi, phases + 2.0 * np.pi, phases)
    raw = math.fsum(phases.tolist()) / (2.0 * math.pi)
    chern = int(round(raw))
    deviation = abs(raw - chern)
    if deviation > CHERN_TOL:
        raise NotNearInteger(f"plaquette sum {raw:.6g} is not near an integer; refine the mesh")
    logger.info(f"Chern number {chern} (raw {raw:.12g}) over {grid.plaquettes.shape[0]} plaquettes, rank {rank}")
    return ChernReport(chern, raw, deviation, rank, int(grid.plaquettes.shape[0]), min_overlap)


def chern_number(field_: MatrixField) -> int:
    return chern_report(field_).chern


@dataclass(frozen=True)
class PointwiseClassReport:
    classes: List[int]
    components: List[Tuple[int, int]]
    regions: Dict[str, List[int]]
    max_deviation: float


def pointwise_class(fp: FieldPair, tol: float = CLASS_TOL, relation_tol: float = ATOL) -> PointwiseClassReport:
    """
    round(tr(a − b)) at every point, which must be constant along grid edges.

    ``components`` lists (size, class) per connected component of the domain.
    """
    relations = check_relations_field(fp, relation_tol)
    if not relations.passed:
        raise RelationViolation(f"field pair fails the relations at point {relations.failing_points[0]}")
    traces = np.trace(fp.a.values - fp.b.values, axis1=1, axis2=2).real
    classes = np.rint(traces).astype(np.int64)
    deviations = np.abs(traces - classes)
    if deviations.size and deviations.max() > tol:
        worst = int(np.argmax(deviations))
        raise NotNearInteger(f"tr(a − b) = {traces[worst]:.12g} at point {int(fp.a.indices[worst])}")

    grid = fp.grid
    local = np.full(grid.size, -1, dtype=np.int64)
    local[fp.a.indices] = np.arange(fp.a.indices.size)
    ends = local[grid.edges]
    ends = ends[(ends[:, 0] >= 0) & (ends[:, 1] >= 0)]
    jumps = ends[classes[ends[:, 0]] != classes[ends[:, 1]]]
    if jumps.size:
        i, j = (int(fp.a.indices[k]) for k in jumps[0])
        raise NotLocallyConstant(f"class jumps between adjacent points {i} and {j}; refine the grid")

    labels = grid.components(fp.a.indices)
    components = []
    for label in range(int(labels.max()) + 1 if labels.size else 0):
        members = np.flatnonzero(labels == label)
        components.append((int(members.size), int(classes[members[0]])))
    regions = {}
    for name, members in sorted(grid.regions.items()):
        pos = local[members]
        pos = pos[pos >= 0]
        if pos.size:
            regions[name] = sorted({int(c) for c in classes[pos]})
    return PointwiseClassReport(
        classes=[int(c) for c in classes],
        components=components,
        regions=regions,
        max_deviation=float(deviations.max()) if deviations.size else 0.0,
    )


def hemisphere_clutch(grid: SpaceGrid, tol: float = GLUING_TOL) -> FieldPair:
    """
    p the Bott projection on the northern hemisphere Y, q its reflection
    z ↦ −z (equal to p on the equator), s = ½(1 + ρ·n·σ) on Z shrinking from
    the Bott projection at the equator to ½ at the south pole.
    """
    if grid.kind != "sphere" or "K" not in grid.regions:
        raise BadGrid("the hemisphere clutch needs a sphere grid with an even number of bands")
    Y, Z = grid.region("Y"), grid.region("Z")
    x, y, z = grid.points[:, 0], grid.points[:, 1], grid.points[:, 2]

    def spin(rho: np.ndarray, zz: np.ndarray, idx: np.ndarray) -> np.ndarray:
        values = np.empty((idx.size, 2, 2), dtype=np.complex128)
        values[:, 0, 0] = 0.5 * (1.0 + rho * zz[idx])
        values[:, 0, 1] = 0.5 * rho * (x[idx] - 1j * y[idx])
        values[:, 1, 0] = 0.5 * rho * (x[idx] + 1j * y[idx])
        values[:, 1, 1] = 0.5 * (1.0 - rho * zz[idx])
        return values

    one = np.ones(Y.size)
    theta = np.arccos(np.clip(z[Z], -1.0, 1.0))
    rho = np.clip(2.0 * (np.pi - theta) / np.pi, 0.0, 1.0)
    p = MatrixField(grid, spin(one, z, Y), Y)
    q = MatrixField(grid, spin(one, -z, Y), Y)
    s = MatrixField(grid, spin(rho, z, Z), Z)
    return clutch(p, q, s, tol)


def circle_cutoff(grid: SpaceGrid, width: float = 0.5 * np.pi) -> FieldPair:
    """
    p0 = diag(1, 0); h rises linearly from 0 at the basepoint to 1 at angular
    distance ``width``; α rotates p0 towards diag(0, 1) beyond that distance
    and β = 0.
    """
    angles = circle_angles(grid)
    distance = np.minimum(angles, 2.0 * np.pi - angles)
    h = np.clip(distance / width, 0.0, 1.0)
    bump = np.clip((distance - width) / (np.pi - width), 0.0, 1.0)
    phi = 0.5 * np.pi * bump
    c, s = np.cos(phi), np.sin(phi)
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    rotated = np.empty((grid.size, 2, 2), dtype=np.complex128)
    rotated[:, 0, 0] = c * c
    rotated[:, 0, 1] = c * s
    rotated[:, 1, 0] = c * s
    rotated[:, 1, 1] = s * s
    alpha = MatrixField(grid, rotated - p0)
    beta = constant_field(grid, np.zeros((2, 2)))
    return cutoff_pair(p0, alpha, beta, h, basepoint=0)
