"""
Dense complex Hermitian linear algebra: norms, positivity, eigendecomposition
and continuous functional calculus.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Every function
here is pure and returns fresh arrays.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import block_diag, qr

from .errors import DomainError, InvalidInput, NotHermitian, ShapeError

logger = logging.getLogger(__name__)

CMatrix = np.ndarray

ATOL = 1e-10
RTOL = 1e-9
HERMITIAN_TOL = 1e-12
SNAP_TOL = 1e-12
PHASE_TOL = 1e-10

Interval = Tuple[float, float]


def as_cmatrix(M: Union[CMatrix, Sequence[Sequence[complex]], float, complex]) -> CMatrix:
    """Convert ``M`` to a finite square complex128 array (scalars become 1x1)."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return arr
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix has non-finite entries")
    return arr


def adjoint(M: CMatrix) -> CMatrix:
    return np.conj(M).T


def hermitian_part(M: CMatrix) -> CMatrix:
    return 0.5 * (M + adjoint(M))


def op_norm(M: CMatrix) -> float:
    """Spectral norm: the largest singular value."""
    M = as_cmatrix(M)
    if M.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(M, ord=2))


def hermitian_defect(M: CMatrix) -> float:
    """Relative distance to the Hermitian matrices, ‖M − M*‖ / max(1, ‖M‖)."""
    M = as_cmatrix(M)
    if M.shape[0] == 0:
        return 0.0
    return op_norm(M - adjoint(M)) / max(1.0, op_norm(M))


def require_hermitian(M: CMatrix, tol: float = HERMITIAN_TOL) -> CMatrix:
    """Validate ``M`` and return its exactly Hermitian part."""
    M = as_cmatrix(M)
    defect = hermitian_defect(M)
    if defect > tol:
        raise NotHermitian(f"‖M − M*‖ = {defect:.3e}·max(1,‖M‖) exceeds {tol:.1e}")
    return hermitian_part(M)


def is_projection(M: CMatrix, tol: float = ATOL) -> bool:
    M = as_cmatrix(M)
    if hermitian_defect(M) > tol:
        return False
    return op_norm(M @ M - M) <= tol


def _fix_phases(frame: CMatrix) -> CMatrix:
    """Make the first non-negligible component of each column real positive."""
    fixed = frame.copy()
    for j in range(fixed.shape[1]):
        column = fixed[:, j]
        nonzero = np.flatnonzero(np.abs(column) > PHASE_TOL)
        if nonzero.size:
            lead = column[nonzero[0]]
            fixed[:, j] = column * (np.conj(lead) / abs(lead))
    return fixed


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (ascending) and a unitary frame of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    frame: CMatrix

    @property
    def n(self) -> int:
        return int(self.eigenvalues.shape[0])

    def reconstruct(self, values: Optional[np.ndarray] = None) -> CMatrix:
        """frame · diag(values) · frame*, defaulting to the eigenvalues."""
        lam = self.eigenvalues if values is None else np.asarray(values)
        return hermitian_part((self.frame * lam) @ adjoint(self.frame))

    def spectral_projection(self, mask: np.ndarray) -> CMatrix:
        """Projection onto the span of the eigenvectors selected by ``mask``."""
        columns = self.frame[:, np.asarray(mask, dtype=bool)]
        return hermitian_part(columns @ adjoint(columns))

    def subspace(self, lo: float, hi: float) -> CMatrix:
        """Orthonormal columns spanning the eigenvectors with lo ≤ λ ≤ hi."""
        mask = (self.eigenvalues >= lo) & (self.eigenvalues <= hi)
        return self.frame[:, mask]


def eig_hermitian(M: CMatrix, tol: float = HERMITIAN_TOL) -> EigenSystem:
    """
    Eigendecomposition of a Hermitian matrix.

    Eigenvalues come out ascending; each eigenvector's first non-negligible
    component is real positive, so the output is reproducible for a fixed
    input. Within a degenerate cluster the basis is arbitrary: downstream code
    uses spectral projections only.
    """
    H = require_hermitian(M, tol)
    if H.shape[0] == 0:
        return EigenSystem(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    eigenvalues, frame = np.linalg.eigh(H)
    return EigenSystem(eigenvalues.astype(np.float64), _fix_phases(frame))


def positivity_margin(M: CMatrix, tol: float = HERMITIAN_TOL) -> float:
    """Smallest eigenvalue; ``M`` counts as positive when this is ≥ −tol."""
    H = require_hermitian(M, tol)
    if H.shape[0] == 0:
        return 0.0
    return float(np.linalg.eigvalsh(H)[0])


class ScalarFunction:
    """A closed-form real function with a declared domain."""

    def __init__(self, name: str, fn: Callable[[np.ndarray], np.ndarray],
                 domain: Optional[Interval] = None):
        self.name = name
        self.fn = fn
        self.domain = domain

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return self.fn(np.asarray(t, dtype=np.float64))

    def __repr__(self) -> str:
        return f"ScalarFunction({self.name!r})"


class SampledFunction:
    """Piecewise-linear function through the points (xs, ys); domain [xs[0], xs[-1]]."""

    def __init__(self, xs: Sequence[float], ys: Sequence[float]):
        xs_arr = np.asarray(xs, dtype=np.float64)
        ys_arr = np.asarray(ys, dtype=np.float64)
        if xs_arr.ndim != 1 or xs_arr.shape != ys_arr.shape or xs_arr.size < 2:
            raise InvalidInput("sampled function needs two equal-length 1-d arrays of length ≥ 2")
        if not np.all(np.diff(xs_arr) > 0):
            raise InvalidInput("sample abscissae must be strictly increasing")
        if not (np.all(np.isfinite(xs_arr)) and np.all(np.isfinite(ys_arr))):
            raise InvalidInput("sampled function has non-finite values")
        self.xs = xs_arr
        self.ys = ys_arr
        self.domain: Interval = (float(xs_arr[0]), float(xs_arr[-1]))
        self.name = f"sampled[{xs_arr.size}]"

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(t, dtype=np.float64), self.xs, self.ys)


RealFunction = Union[ScalarFunction, SampledFunction, Callable[[np.ndarray], np.ndarray]]

UNIT: Interval = (0.0, 1.0)

identity = ScalarFunction("identity", lambda t: t)
gap = ScalarFunction("gap", lambda t: t - t * t)
gap_cubic = ScalarFunction("gap_cubic", lambda t: t * (t - t * t))
gap_root = ScalarFunction("gap_root", lambda t: np.sqrt(np.clip(t - t * t, 0.0, None)), UNIT)
square = ScalarFunction("square", lambda t: t * t)
cube = ScalarFunction("cube", lambda t: t * t * t)
smoothstep = ScalarFunction("smoothstep", lambda t: 3.0 * t * t - 2.0 * t * t * t)

# Reparametrizations of [0,1] fixing both endpoints, selectable by name.
REPARAMETRIZATIONS = {f.name: f for f in (identity, square, cube, smoothstep)}


def apply_function(M: CMatrix, f: RealFunction, domain: Optional[Interval] = None,
                   atol: float = ATOL, snap: float = 0.0) -> CMatrix:
    """
    Continuous functional calculus f(M) = frame · diag(f(λ)) · frame*.

    Eigenvalues up to ``atol`` outside the domain are clipped onto it; farther
    out raises DomainError. Eigenvalues within ``snap`` of a domain endpoint
    are moved onto that endpoint.
    """
    system = eig_hermitian(M)
    lam = system.eigenvalues.copy()
    if domain is None:
        domain = getattr(f, "domain", None)
    if domain is not None:
        lo, hi = domain
        if lam.size and (lam[0] < lo - atol or lam[-1] > hi + atol):
            raise DomainError(
                f"spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] leaves the domain [{lo}, {hi}]"
            )
        lam = np.clip(lam, lo, hi)
        if snap > 0.0:
            lam[np.abs(lam - lo) <= snap] = lo
            lam[np.abs(lam - hi) <= snap] = hi
    values = np.asarray(f(lam), dtype=np.float64)
    if values.shape != lam.shape or not np.all(np.isfinite(values)):
        raise DomainError("function returned non-finite values on the spectrum")
    return system.reconstruct(values)


def direct_sum(*blocks: CMatrix) -> CMatrix:
    """Block-diagonal matrix M₁ ⊕ M₂ ⊕ …"""
    return np.asarray(block_diag(*[as_cmatrix(B) for B in blocks]), dtype=np.complex128)


def conjugate(M: CMatrix, U: CMatrix) -> CMatrix:
    """U · M · U*, returned exactly Hermitian when M is."""
    out = U @ M @ adjoint(U)
    return hermitian_part(out) if hermitian_defect(M) <= HERMITIAN_TOL else out


def seeded_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator; distinct streams of one seed never overlap."""
    if seed < 0 or stream < 0:
        raise InvalidInput(f"seed and stream must be non-negative, got seed={seed}, stream={stream}")
    bit_generator = np.random.Philox(seed)
    if stream:
        bit_generator = bit_generator.jumped(stream)
    return np.random.Generator(bit_generator)


def random_unitary(n: int, rng: np.random.Generator) -> CMatrix:
    """Haar unitary from the QR factorization of a complex Gaussian matrix."""
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = qr(z)
    d = np.diag(r)
    phases = d / np.abs(d)
    return np.asarray(q * phases, dtype=np.complex128)


def random_projection(n: int, rank: int, rng: np.random.Generator) -> CMatrix:
    if not 0 <= rank <= n:
        raise ShapeError(f"rank {rank} outside [0, {n}]")
    diagonal = np.zeros(n)
    diagonal[:rank] = 1.0
    U = random_unitary(n, rng)
    return hermitian_part((U * diagonal) @ adjoint(U))
