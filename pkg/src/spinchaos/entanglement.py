"""Partial traces, block entropies, concurrence and friends.

All reductions start from a pure state of L qubits given in the
computational basis (bit k of the index = qubit k, see
:mod:`spinchaos.basis`).  Partial traces are computed by bit-index
gathering: the amplitudes are regrouped into a (kept x traced) table
using precomputed index arrays, so the same machinery serves single
states and whole batches of eigenvectors.

Local bases keep the global ordering: in a reduced density matrix the
lower local bit is the lower kept qubit index, and the spin-flip
conjugation of the concurrence is taken in that fixed product basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

TRACE_ATOL = 1e-10
HERMITICITY_ATOL = 1e-12
EIGENVALUE_CLIP = 1e-10
CLAMBDA_IMAG_TOL = 1e-7

# sigma_y (x) sigma_y in the computational product basis {00, 01, 10, 11}
SPIN_FLIP = np.array(
    [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ]
)


@lru_cache(maxsize=None)
def _gather_table(L: int, keep: tuple[int, ...]) -> np.ndarray:
    """(2^m, 2^(L-m)) global indices for kept pattern x traced pattern."""
    traced = tuple(q for q in range(L) if q not in keep)
    kept_patterns = np.arange(1 << len(keep), dtype=np.int64)
    traced_patterns = np.arange(1 << len(traced), dtype=np.int64)
    kept_part = np.zeros_like(kept_patterns)
    for t, q in enumerate(keep):
        kept_part |= ((kept_patterns >> t) & 1) << q
    traced_part = np.zeros_like(traced_patterns)
    for t, q in enumerate(traced):
        traced_part |= ((traced_patterns >> t) & 1) << q
    return kept_part[:, None] | traced_part[None, :]


def _normalize_keep(L: int, keep) -> tuple[int, ...]:
    keep = tuple(sorted(set(int(q) for q in keep)))
    if not keep or len(keep) >= L:
        raise ValueError("keep must be a nonempty proper subset of the qubits")
    if keep[0] < 0 or keep[-1] >= L:
        raise ValueError(f"kept qubits {keep} outside [0, {L})")
    return keep


def partial_trace(state: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix of the kept qubits for a pure state."""
    state = np.asarray(state)
    L = state.size.bit_length() - 1
    if 1 << L != state.size:
        raise ValueError("state length must be a power of two")
    keep = _normalize_keep(L, keep)
    table = _gather_table(L, keep)
    grouped = state[table]
    return grouped @ grouped.conj().T


def reduced_density_batch(vectors: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrices of every column of an (N, M) state block."""
    L = vectors.shape[0].bit_length() - 1
    keep = _normalize_keep(L, keep)
    grouped = vectors[_gather_table(L, keep)]  # (2^m, 2^(L-m), M)
    return np.einsum("abm,cbm->mac", grouped, grouped.conj(), optimize=True)


def _check_density(rho: np.ndarray) -> None:
    diag = np.diagonal(rho, axis1=-2, axis2=-1)
    trace_defect = np.abs(diag.sum(axis=-1) - 1.0).max()
    if trace_defect > TRACE_ATOL:
        raise ValidationError(f"density matrix trace off by {trace_defect:.3e}")
    herm_defect = np.abs(rho - np.swapaxes(rho, -2, -1).conj()).max()
    if herm_defect > HERMITICITY_ATOL:
        raise ValidationError(f"density matrix not Hermitian: {herm_defect:.3e}")


def _clip_spectrum(p: np.ndarray) -> np.ndarray:
    if p.min() < -EIGENVALUE_CLIP:
        raise ValidationError(f"density matrix has eigenvalue {p.min():.3e} < -{EIGENVALUE_CLIP}")
    return np.clip(p, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy -tr(rho log2 rho) in bits; 0 log 0 reads as 0."""
    return float(entropy_batch(np.asarray(rho)[None, :, :])[0])


def entropy_batch(rhos: np.ndarray) -> np.ndarray:
    """Von Neumann entropies (bits) of a (M, d, d) stack."""
    _check_density(rhos)
    p = _clip_spectrum(np.linalg.eigvalsh(rhos))
    plogp = np.where(p > 0.0, p * np.log2(p, where=p > 0.0), 0.0)
    return -plogp.sum(axis=-1)


def c_lambda(rho: np.ndarray) -> float:
    """Unclipped concurrence precursor lambda1 - lambda2 - lambda3 - lambda4.

    The lambdas are the decreasingly sorted square roots of the
    eigenvalues of rho (sy x sy) rho* (sy x sy), conjugation in the
    computational basis.  Lies in [-1/2, 1] for physical inputs.
    """
    return float(c_lambda_batch(np.asarray(rho)[None, :, :])[0])


def c_lambda_batch(rhos: np.ndarray) -> np.ndarray:
    """c_lambda of a (M, 4, 4) stack of two-qubit density matrices."""
    rhos = np.asarray(rhos)
    if rhos.shape[-2:] != (4, 4):
        raise ValueError("concurrence needs 4x4 two-qubit density matrices")
    _check_density(rhos)
    flipped = SPIN_FLIP @ rhos.conj() @ SPIN_FLIP
    eigs = np.linalg.eigvals(rhos @ flipped)
    # Real and nonnegative in exact arithmetic; numerical dust is clipped.
    worst_imag = np.abs(eigs.imag).max()
    if worst_imag > CLAMBDA_IMAG_TOL:
        raise ValidationError(f"spin-flip spectrum has imaginary part {worst_imag:.3e}")
    lam = np.sqrt(np.clip(eigs.real, 0.0, None))
    lam.sort(axis=-1)
    return lam[..., 3] - lam[..., 2] - lam[..., 1] - lam[..., 0]


def concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence max{0, c_lambda}."""
    return max(0.0, c_lambda(rho))


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy argument {x} outside [0, 1]")
    total = 0.0
    for p in (x, 1.0 - x):
        if p > 0.0:
            total -= p * np.log2(p)
    return total


def entanglement_of_formation(rho: np.ndarray) -> float:
    """Two-qubit entanglement of formation via the concurrence."""
    C = min(concurrence(rho), 1.0)
    return binary_entropy(0.5 * (1.0 + np.sqrt(1.0 - C * C)))


def negativity(rho: np.ndarray) -> float:
    """Absolute sum of negative partial-transpose eigenvalues.

    The transpose acts on the second (higher local bit) qubit; the
    value is independent of which qubit is transposed.
    """
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("negativity needs a 4x4 two-qubit density matrix")
    _check_density(rho)
    pt = rho.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    eigs = np.linalg.eigvalsh(pt)
    return float(abs(eigs[eigs < 0].sum()))


@dataclass(frozen=True)
class ClambdaSample:
    """Normalized histogram and first moment of c_lambda draws."""

    moment: float
    bin_edges: np.ndarray
    density: np.ndarray
    count: int


def clambda_statistics(values: np.ndarray, bin_width: float = 0.025) -> ClambdaSample:
    """Histogram (unit integral) and mean of an ensemble of c_lambda values."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty c_lambda sample")
    if values.min() < -0.5 - 1e-8 or values.max() > 1.0 + 1e-8:
        raise ValidationError("c_lambda values outside [-1/2, 1]")
    edges = clambda_bin_edges(bin_width)
    counts, _ = np.histogram(np.clip(values, -0.5, 1.0), bins=edges)
    density = counts / (values.size * bin_width)
    return ClambdaSample(float(values.mean()), edges, density, values.size)


def clambda_bin_edges(bin_width: float = 0.025) -> np.ndarray:
    n_bins = int(round(1.5 / bin_width))
    return np.linspace(-0.5, 1.0, n_bins + 1)
