"""
Reduction of a valid pair over ℂ to a common part plus a pair of projections,
and the integer class tr(a − b).

With L the span of the eigenvectors of a whose eigenvalues lie strictly
inside (0, 1), b agrees with a on L and both are projections on L⊥:

    a = c ⊕ p,    b = c ⊕ q,    tr(a − b) = rank p − rank q.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import NotNearInteger, NotReducible
from .matrix import ATOL, CMatrix, adjoint, direct_sum, eig_hermitian, hermitian_part, op_norm
from .pairs import SoftPair, require_valid

logger = logging.getLogger(__name__)

CLUSTER_TOL = 1e-6
AGREEMENT_TOL = 1e-8
RESIDUAL_TOL = 1e-8
CLASS_TOL = 1e-8
NOISE_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class Reduction:
    """a = frame·(c ⊕ p)·frame*, b = frame·(c ⊕ q)·frame*."""

    frame: CMatrix
    k: int
    c: CMatrix
    p: CMatrix
    q: CMatrix
    k0_class: int
    residual_a: float
    residual_b: float

    @property
    def rank_p(self) -> int:
        return int(round(float(np.trace(self.p).real)))

    @property
    def rank_q(self) -> int:
        return int(round(float(np.trace(self.q).real)))

    def reassemble(self) -> Tuple[CMatrix, CMatrix]:
        U = self.frame
        a = hermitian_part(U @ direct_sum(self.c, self.p) @ adjoint(U))
        b = hermitian_part(U @ direct_sum(self.c, self.q) @ adjoint(U))
        return a, b


def _round_projection(M: CMatrix, cluster_tol: float, label: str) -> CMatrix:
    """Round the eigenvalues of a near-projection to {0, 1}."""
    if M.shape[0] == 0:
        return M
    defect = op_norm(M @ M - M)
    if defect > 10.0 * cluster_tol:
        raise NotReducible(f"{label} is not a projection on L⊥: ‖{label}² − {label}‖ = {defect:.3e}")
    system = eig_hermitian(M)
    return system.reconstruct(np.where(system.eigenvalues > 0.5, 1.0, 0.0))


def reduce_to_projections(pair: SoftPair, cluster_tol: float = CLUSTER_TOL,
                          tol: float = ATOL) -> Reduction:
    require_valid(pair, tol)
    a, b = pair.a, pair.b
    system = eig_hermitian(a)
    lam = system.eigenvalues
    interior = (lam >= cluster_tol) & (lam <= 1.0 - cluster_tol)
    dead = ((lam > NOISE_FLOOR) & (lam < cluster_tol)) | (
        (lam > 1.0 - cluster_tol) & (lam < 1.0 - NOISE_FLOOR)
    )
    if dead.any():
        logger.warning(f"{int(dead.sum())} eigenvalue(s) of a in the dead zone rounded to 0 or 1")

    V = system.frame[:, interior]
    W = system.frame[:, ~interior]
    disagreement = op_norm((b - a) @ V) if V.shape[1] else 0.0
    if disagreement > AGREEMENT_TOL:
        raise NotReducible(f"b differs from a on the interior subspace by {disagreement:.3e}")

    c = hermitian_part(adjoint(V) @ a @ V)
    p = _round_projection(hermitian_part(adjoint(W) @ a @ W), cluster_tol, "p")
    q = _round_projection(hermitian_part(adjoint(W) @ b @ W), cluster_tol, "q")
    frame = np.hstack([V, W])
    residual_a = op_norm(adjoint(frame) @ a @ frame - direct_sum(c, p))
    residual_b = op_norm(adjoint(frame) @ b @ frame - direct_sum(c, q))
    # dead-zone rounding moves eigenvalues by up to cluster_tol
    allowed = 10.0 * cluster_tol if dead.any() else RESIDUAL_TOL
    if max(residual_a, residual_b) > allowed:
        raise NotReducible(
            f"reduction does not reassemble the pair: residuals {residual_a:.3e}, {residual_b:.3e} > {allowed:.1e}"
        )
    rank_p = int(round(float(np.trace(p).real)))
    rank_q = int(round(float(np.trace(q).real)))
    logger.info(f"Reduced n={pair.n}: k={V.shape[1]}, rank p={rank_p}, rank q={rank_q}")
    return Reduction(
        frame=frame,
        k=int(V.shape[1]),
        c=c,
        p=p,
        q=q,
        k0_class=rank_p - rank_q,
        residual_a=residual_a,
        residual_b=residual_b,
    )


def trace_class(pair: SoftPair, tol: float = CLASS_TOL) -> int:
    """round(tr(a − b)), refusing values farther than ``tol`` from an integer."""
    tau = float(np.trace(pair.a - pair.b).real)
    nearest = round(tau)
    if abs(tau - nearest) > tol:
        raise NotNearInteger(f"tr(a − b) = {tau:.12g} is not within {tol:.1e} of an integer")
    return int(nearest)


def class_of_pair(pair: SoftPair, tol: float = CLASS_TOL, relation_tol: float = ATOL) -> int:
    require_valid(pair, relation_tol)
    return trace_class(pair, tol)
