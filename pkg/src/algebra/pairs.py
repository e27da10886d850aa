"""
Soft projection pairs: verification of the relations

    ‖a‖ ≤ 1, ‖b‖ ≤ 1, a, b ≥ 0, (a − a²)(a − b) = 0, (b − b²)(a − b) = 0,

the identities they imply, spectra comparison, direct sums,
reparametrization and a seeded generator of exactly valid pairs.
"""
import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np

from .errors import DomainError, NoMatching, NotHermitian, RelationViolation, ShapeError
from .matrix import (
    ATOL,
    HERMITIAN_TOL,
    SNAP_TOL,
    UNIT,
    CMatrix,
    RealFunction,
    adjoint,
    apply_function,
    as_cmatrix,
    conjugate,
    direct_sum as matrix_direct_sum,
    eig_hermitian,
    gap,
    gap_cubic,
    gap_root,
    hermitian_part,
    op_norm,
    random_unitary,
    seeded_rng,
)

logger = logging.getLogger(__name__)

DERIVED_FACTOR = 100.0
SPECTRUM_DELTA = 1e-6
FUNCTION_SAMPLES = 1024


@dataclass(frozen=True, eq=False)
class SoftPair:
    """
    A candidate pair (a, b) of n×n Hermitian matrices.

    Validity is checked by ``check_relations``, not enforced here, so that
    failing pairs can be represented. Arrays are stored read-only.
    """

    a: CMatrix
    b: CMatrix
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("a", "b"):
            arr = as_cmatrix(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(self.a.shape[0])

    def swapped(self) -> "SoftPair":
        return SoftPair(self.b, self.a)


@dataclass(frozen=True)
class RelationReport:
    norm_a: float
    norm_b: float
    positivity_a: float
    positivity_b: float
    r1: float
    r2: float
    tol: float
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ResidualBatch:
    """Relation quantities for a stack of pairs, one entry per pair."""

    norm_a: np.ndarray
    norm_b: np.ndarray
    positivity_a: np.ndarray
    positivity_b: np.ndarray
    r1: np.ndarray
    r2: np.ndarray

    def passed(self, tol: float) -> np.ndarray:
        return (
            (self.norm_a <= 1.0 + tol)
            & (self.norm_b <= 1.0 + tol)
            & (self.positivity_a >= -tol)
            & (self.positivity_b >= -tol)
            & (self.r1 <= tol)
            & (self.r2 <= tol)
        )

    def report(self, index: int, tol: float) -> RelationReport:
        return RelationReport(
            norm_a=float(self.norm_a[index]),
            norm_b=float(self.norm_b[index]),
            positivity_a=float(self.positivity_a[index]),
            positivity_b=float(self.positivity_b[index]),
            r1=float(self.r1[index]),
            r2=float(self.r2[index]),
            tol=tol,
            passed=bool(self.passed(tol)[index]),
        )


def _batched_norm(stack: np.ndarray) -> np.ndarray:
    if stack.shape[-1] == 0:
        return np.zeros(stack.shape[0])
    return np.linalg.norm(stack, ord=2, axis=(1, 2))


def _hermitian_stack(stack: np.ndarray, label: str) -> np.ndarray:
    skew = stack - np.conj(np.swapaxes(stack, 1, 2))
    bound = HERMITIAN_TOL * np.maximum(1.0, _batched_norm(stack))
    bad = np.flatnonzero(_batched_norm(skew) > bound)
    if bad.size:
        raise NotHermitian(f"{label} is not Hermitian at sample {int(bad[0])}")
    return 0.5 * (stack + np.conj(np.swapaxes(stack, 1, 2)))


def relation_residuals(a_stack: np.ndarray, b_stack: np.ndarray) -> ResidualBatch:
    """Norms, minimal eigenvalues and both relation residuals for stacks of pairs."""
    a_stack = np.asarray(a_stack, dtype=np.complex128)
    b_stack = np.asarray(b_stack, dtype=np.complex128)
    if a_stack.ndim != 3 or a_stack.shape != b_stack.shape or a_stack.shape[1] != a_stack.shape[2]:
        raise ShapeError(f"pair stacks have shapes {a_stack.shape} and {b_stack.shape}")
    m, n, _ = a_stack.shape
    if n == 0:
        zeros = np.zeros(m)
        return ResidualBatch(zeros, zeros, zeros, zeros, zeros, zeros)
    a = _hermitian_stack(a_stack, "a")
    b = _hermitian_stack(b_stack, "b")
    eig_a = np.linalg.eigvalsh(a)
    eig_b = np.linalg.eigvalsh(b)
    d = a - b
    return ResidualBatch(
        norm_a=np.maximum(np.abs(eig_a[:, 0]), np.abs(eig_a[:, -1])),
        norm_b=np.maximum(np.abs(eig_b[:, 0]), np.abs(eig_b[:, -1])),
        positivity_a=eig_a[:, 0],
        positivity_b=eig_b[:, 0],
        r1=_batched_norm((a - a @ a) @ d),
        r2=_batched_norm((b - b @ b) @ d),
    )


def check_relations(p: SoftPair, tol: float = ATOL) -> RelationReport:
    if p.a.shape != p.b.shape:
        raise ShapeError(f"a is {p.a.shape[0]}×{p.a.shape[0]} but b is {p.b.shape[0]}×{p.b.shape[0]}")
    return relation_residuals(p.a[None], p.b[None]).report(0, tol)


def require_valid(p: SoftPair, tol: float = ATOL) -> RelationReport:
    report = check_relations(p, tol)
    if not report.passed:
        raise RelationViolation(
            f"pair fails the relations at tol={tol:.1e}: r1={report.r1:.3e}, r2={report.r2:.3e}, "
            f"‖a‖={report.norm_a:.6g}, ‖b‖={report.norm_b:.6g}, "
            f"min λ(a)={report.positivity_a:.3e}, min λ(b)={report.positivity_b:.3e}"
        )
    return report


@dataclass(frozen=True)
class DerivedIdentityReport:
    deviations: Dict[str, float]
    tol: float
    passed: bool

    @property
    def worst(self) -> float:
        return max(self.deviations.values())


def check_derived_identities(p: SoftPair, tol: float = ATOL) -> DerivedIdentityReport:
    """
    Identities that valid pairs satisfy: (a−a²)² = (b−b²)², a−a² = b−b², and
    f(a) = f(b), f(a)(a−b) = 0 for f ∈ {t−t², t(t−t²), √(t−t²)}.
    """
    require_valid(p, tol)
    a, b = p.a, p.b
    d = a - b
    gap_a = a - a @ a
    gap_b = b - b @ b
    atol = max(tol, ATOL)
    deviations: Dict[str, float] = {
        "gap_squares": op_norm(gap_a @ gap_a - gap_b @ gap_b),
        "gap": op_norm(gap_a - gap_b),
    }
    for label, f in (("g", gap), ("h", gap_cubic), ("root", gap_root)):
        fa = apply_function(a, f, UNIT, atol=atol, snap=SNAP_TOL)
        fb = apply_function(b, f, UNIT, atol=atol, snap=SNAP_TOL)
        deviations[f"{label}_equal"] = op_norm(fa - fb)
        deviations[f"{label}_annihilates"] = op_norm(fa @ d)
    derived_tol = DERIVED_FACTOR * tol
    passed = all(value <= derived_tol for value in deviations.values())
    if not passed:
        logger.warning(f"Derived identities exceed {derived_tol:.1e}: {deviations}")
    return DerivedIdentityReport(deviations, derived_tol, passed)


@dataclass(frozen=True)
class SpectraReport:
    interior_a: List[float]
    interior_b: List[float]
    matching: List[Tuple[float, float]]
    max_gap: float
    delta: float


def _interior(eigenvalues: np.ndarray, delta: float) -> List[float]:
    return [float(x) for x in eigenvalues if delta <= x <= 1.0 - delta]


def compare_spectra(p: SoftPair, delta: float = SPECTRUM_DELTA, tol: float = ATOL) -> SpectraReport:
    """Match the spectra of a and b inside [delta, 1 − delta] as multisets."""
    require_valid(p, tol)
    interior_a = _interior(eig_hermitian(p.a).eigenvalues, delta)
    interior_b = _interior(eig_hermitian(p.b).eigenvalues, delta)
    if len(interior_a) != len(interior_b):
        raise NoMatching(
            f"interior spectra differ in size: {len(interior_a)} for a, {len(interior_b)} for b"
        )
    pairing_tol = 10.0 * delta
    unused = list(interior_b)
    matching: List[Tuple[float, float]] = []
    for lam in interior_a:
        j = min(range(len(unused)), key=lambda i: abs(unused[i] - lam))
        mu = unused.pop(j)
        if abs(mu - lam) > pairing_tol:
            raise NoMatching(f"eigenvalue {lam:.12g} of a has no partner in b (nearest {mu:.12g})")
        matching.append((lam, mu))
    max_gap = max((abs(x - y) for x, y in matching), default=0.0)
    return SpectraReport(interior_a, interior_b, matching, max_gap, delta)


def direct_sum(p: SoftPair, q: SoftPair) -> SoftPair:
    """(a ⊕ c, b ⊕ d)."""
    meta: Dict[str, Any] = {}
    if "rank_difference" in p.meta and "rank_difference" in q.meta:
        meta["rank_difference"] = int(p.meta["rank_difference"]) + int(q.meta["rank_difference"])
    return SoftPair(matrix_direct_sum(p.a, q.a), matrix_direct_sum(p.b, q.b), meta)


def conjugate_pair(p: SoftPair, U: CMatrix) -> SoftPair:
    """(U a U*, U b U*); the relations and the class are unitarily invariant."""
    return SoftPair(conjugate(p.a, U), conjugate(p.b, U), dict(p.meta))


def validate_reparametrization(f: RealFunction, atol: float = ATOL,
                               samples: int = FUNCTION_SAMPLES) -> None:
    """Check f(0) = 0, f(1) = 1 and f([0,1]) ⊂ [0,1] on a uniform sample."""
    ts = np.linspace(0.0, 1.0, samples)
    ys = np.asarray(f(ts), dtype=np.float64)
    if ys.shape != ts.shape or not np.all(np.isfinite(ys)):
        raise DomainError("reparametrization is not finite on [0, 1]")
    if abs(ys[0]) > atol or abs(ys[-1] - 1.0) > atol:
        raise DomainError(f"reparametrization must fix 0 and 1, got f(0)={ys[0]:.6g}, f(1)={ys[-1]:.6g}")
    if ys.min() < -atol or ys.max() > 1.0 + atol:
        raise DomainError(f"reparametrization leaves [0, 1]: range [{ys.min():.6g}, {ys.max():.6g}]")


def reparametrize(p: SoftPair, f: RealFunction, tol: float = ATOL,
                  samples: int = FUNCTION_SAMPLES) -> SoftPair:
    """(f(a), f(b)) for a continuous f: [0,1] → [0,1] with f(0) = 0, f(1) = 1."""
    validate_reparametrization(f, ATOL, samples)
    require_valid(p, tol)
    atol = max(tol, ATOL)
    meta = dict(p.meta)
    meta["reparametrization"] = getattr(f, "name", repr(f))
    fa = apply_function(p.a, f, UNIT, atol=atol)
    fb = apply_function(p.b, f, UNIT, atol=atol)
    drift = op_norm((fa - fb) - (p.a - p.b))
    if drift > DERIVED_FACTOR * tol:
        raise RelationViolation(f"f(a) − f(b) moved away from a − b by {drift:.3e}")
    result = SoftPair(fa, fb, meta)
    require_valid(result, tol)
    return result


def random_valid_pair(n: int, k: int, seed: int) -> SoftPair:
    """
    Seeded exactly valid pair a = U(c ⊕ p)U*, b = U(c ⊕ q)U*.

    c is k×k with eigenvalues in (0.05, 0.95), p and q are diagonal 0/1
    projections of size n − k and U is a seeded unitary. ``meta`` records
    the seed, k and rank p − rank q.
    """
    if n < 1 or not 0 <= k <= n:
        raise ShapeError(f"need n ≥ 1 and 0 ≤ k ≤ n, got n={n}, k={k}")
    rng = seeded_rng(seed)
    common = rng.uniform(0.05, 0.95, size=k)
    p_diag = rng.integers(0, 2, size=n - k).astype(np.float64)
    q_diag = rng.integers(0, 2, size=n - k).astype(np.float64)
    U = random_unitary(n, rng)
    a = hermitian_part((U * np.concatenate([common, p_diag])) @ adjoint(U))
    b = hermitian_part((U * np.concatenate([common, q_diag])) @ adjoint(U))
    rank_p = int(p_diag.sum())
    rank_q = int(q_diag.sum())
    meta = {
        "seed": seed,
        "n": n,
        "k": k,
        "rank_p": rank_p,
        "rank_q": rank_q,
        "rank_difference": rank_p - rank_q,
    }
    logger.debug(f"Generated pair n={n} k={k} seed={seed} ranks {rank_p}/{rank_q}")
    return SoftPair(a, b, meta)
