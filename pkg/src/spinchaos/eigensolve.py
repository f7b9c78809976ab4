"""Full eigendecomposition of dense Hermitian matrices.

This is the single computational hot spot.  The backend is LAPACK's
divide-and-conquer driver via scipy, dispatched on dtype: real
symmetric input takes the (roughly twice faster) real path.  Callers
that know a complex matrix is real up to a diagonal phase gauge should
rotate it first; see :func:`spinchaos.basis.parity_phases`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import SolverError, ValidationError
from .hamiltonian import hermiticity_defect

INPUT_HERMITICITY_RTOL = 1e-10
RESIDUAL_RTOL = 1e-10
ORTHONORMALITY_ATOL = 1e-10
TRACE_RTOL = 1e-8


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with the matching orthonormal eigenvectors.

    Column ``k`` of ``vectors`` belongs to ``values[k]``.  Ties are kept
    in ascending order; the basis inside a degenerate subspace is
    whatever the backend returns (orthonormal, otherwise arbitrary).
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.values.size


def eig_hermitian(H: np.ndarray, validate: bool = False) -> EigenSystem:
    """Diagonalize a Hermitian matrix, validating the input.

    ``validate=True`` additionally checks the eigenpair residuals,
    orthonormality and the trace identity (an O(N^3) matmul, so tests
    use it and sweeps do not).
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    defect = hermiticity_defect(H)
    if defect > INPUT_HERMITICITY_RTOL:
        raise ValidationError(f"input not Hermitian: relative defect {defect:.3e}")
    if not np.iscomplexobj(H):
        H = np.asarray(H, dtype=np.float64)
    try:
        values, vectors = sla.eigh(H, driver="evd", check_finite=False)
    except sla.LinAlgError as exc:
        raise SolverError(f"eigh failed on a {H.shape[0]}x{H.shape[0]} matrix: {exc}") from exc
    es = EigenSystem(values, vectors)
    if validate:
        validate_eigensystem(H, es)
    return es


def validate_eigensystem(H: np.ndarray, es: EigenSystem) -> None:
    """Assert the decomposition invariants; raise ValidationError if broken."""
    values, vectors = es.values, es.vectors
    if np.any(np.diff(values) < 0):
        raise ValidationError("eigenvalues are not ascending")
    norm = np.abs(values).max() if values.size else 0.0
    residual = np.linalg.norm(H @ vectors - vectors * values, axis=0).max()
    if residual > RESIDUAL_RTOL * max(norm, 1e-300):
        raise ValidationError(f"eigenpair residual {residual:.3e} exceeds tolerance")
    gram_defect = np.abs(vectors.conj().T @ vectors - np.eye(es.dim)).max()
    if gram_defect > ORTHONORMALITY_ATOL:
        raise ValidationError(f"eigenvectors not orthonormal: defect {gram_defect:.3e}")
    trace_gap = abs(values.sum() - np.trace(H).real)
    scale = max(np.abs(H).max(), 1e-300)
    if trace_gap > TRACE_RTOL * es.dim * scale:
        raise ValidationError(f"trace mismatch {trace_gap:.3e}")
