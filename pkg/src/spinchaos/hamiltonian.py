"""Dense Hamiltonian assembly for the two disordered spin models.

Two families are implemented:

* a 2D square-torus model: transverse random splittings plus random
  Ising couplings between lattice bonds,

      H = sum_i Gamma_i sigma^z_i + sum_<i<j> J_ij sigma^x_i sigma^x_j,

  with Gamma_i uniform in [delta0 - delta/2, delta0 + delta/2] and
  J_ij uniform in [-J, J];

* a 1D open chain in the effective-field representation: a diagonal
  one-body part

      H0 = 1/2 sum_k sqrt(delta_k^2 + omega^2) sigma^z_k,

  with delta_k = a*k a static field gradient (k = 1..L), plus a
  three-part interaction V = V_diag + V_band + V_off over pairs (j, k)
  with k - j <= l_c and random couplings J_jk = J * xi, xi uniform in
  [-1, 1].  V_diag is diagonal, V_band flips two spins (real matrix
  elements), V_off flips one spin (purely imaginary matrix elements).

Disorder realizations store *unit-scale* draws so that rebuilding at a
different coupling J reuses the same randomness: the assembled matrix
is linear in J for a fixed realization.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .basis import Geometry, MAX_QUBITS, all_pairs, pairs_at_distance, sigma_z_table, torus
from .errors import CapacityError, ValidationError

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class ModelSpec2D:
    """Square-torus random-Ising model parameters (dimensionless energies)."""

    geometry: Geometry = field(default_factory=lambda: torus(3, 3))
    delta0: float = 1.0
    delta: float = 0.09
    J: float = 0.0

    def __post_init__(self):
        if self.geometry.kind != "torus2d":
            raise ValueError("ModelSpec2D needs a torus2d geometry")
        if self.delta < 0 or self.J < 0:
            raise ValueError("delta and J must be >= 0")

    @property
    def kind(self) -> str:
        return "2d"

    @property
    def num_qubits(self) -> int:
        return self.geometry.num_sites

    @property
    def coupling_unit(self) -> float:
        """J corresponding to one unit of J*L/delta."""
        return self.delta / self.num_qubits

    @cached_property
    def bonds(self) -> list[tuple[int, int]]:
        return pairs_at_distance(self.geometry, 1)


@dataclass(frozen=True)
class ModelSpec1D:
    """Effective-field chain parameters.

    ``l_c = 1`` is the nearest-neighbor (NN) model, ``l_c = L - 1`` the
    all-to-all (AA) model.  The rotating-field phase is fixed upstream,
    so only the gradient ``a``, Rabi frequency ``omega`` and coupling
    scale ``J`` enter.
    """

    L: int = 12
    a: float = 1.0
    omega: float = 100.0
    J: float = 0.0
    l_c: int = 11

    def __post_init__(self):
        if not 1 <= self.L <= MAX_QUBITS:
            raise CapacityError(f"L={self.L} outside [1, {MAX_QUBITS}]")
        if self.L == 1:
            if self.l_c != 0:  # a single spin has no pairs to couple
                raise ValueError("L=1 needs l_c=0")
        elif not 1 <= self.l_c <= self.L - 1:
            raise ValueError(f"l_c={self.l_c} outside [1, L-1]")
        if self.omega <= 0 or self.a < 0 or self.J < 0:
            raise ValueError("omega must be > 0 and a, J >= 0")
        if self.omega < 2 * self.a * self.L:
            raise ValueError(
                f"omega={self.omega} too small: the effective-field form needs "
                f"omega well above the largest detuning a*L={self.a * self.L}"
            )

    @property
    def kind(self) -> str:
        return "1d"

    @property
    def num_qubits(self) -> int:
        return self.L

    @property
    def coupling_unit(self) -> float:
        """The delocalization-border coupling J_c = 4 a^2 / omega."""
        return 4.0 * self.a**2 / self.omega

    @cached_property
    def detunings(self) -> np.ndarray:
        """delta_k = a*k for sites k = 1..L (0-based array)."""
        return self.a * np.arange(1, self.L + 1, dtype=np.float64)

    @cached_property
    def level_splittings(self) -> np.ndarray:
        """Effective one-body splittings sqrt(delta_k^2 + omega^2)."""
        return np.hypot(self.detunings, self.omega)

    @cached_property
    def mixing_cos(self) -> np.ndarray:
        """a_k = omega / sqrt(delta_k^2 + omega^2)."""
        return self.omega / self.level_splittings

    @cached_property
    def mixing_sin(self) -> np.ndarray:
        """b_k = -delta_k / sqrt(delta_k^2 + omega^2)."""
        return -self.detunings / self.level_splittings

    @cached_property
    def coupled_pairs(self) -> list[tuple[int, int]]:
        return [(j, k) for j, k in all_pairs(self.L) if k - j <= self.l_c]


ModelSpec = ModelSpec2D | ModelSpec1D


def with_coupling(spec: ModelSpec, J: float) -> ModelSpec:
    return replace(spec, J=J)


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of the random model parameters, at unit coupling scale.

    ``site_fields`` holds the absolute splittings Gamma_i (2D) or is
    empty (1D, where the one-body part is deterministic).
    ``pair_xi`` holds the dimensionless couplings xi in [-1, 1], one per
    canonical pair; the builders multiply by the spec's J.
    """

    seed: int
    site_fields: np.ndarray
    pair_xi: np.ndarray


def realization_seed(base_seed: int, index: int) -> int:
    """Derived 64-bit seed for realization ``index`` of a run.

    Uses numpy's SeedSequence so every realization gets an independent,
    scheduling-order-free stream from ``(base_seed, index)``.
    """
    return int(np.random.SeedSequence((base_seed, index)).generate_state(1, np.uint64)[0])


def sample_realization(spec: ModelSpec, seed: int) -> DisorderRealization:
    """Draw the disorder for one realization; same seed, same draws.

    Draw order is fixed: site fields first (site order), then pair
    couplings (canonical pair order).  The 1D pair couplings cover all
    chain pairs regardless of l_c, so realizations are comparable
    across interaction ranges.
    """
    rng = np.random.default_rng(seed)
    if spec.kind == "2d":
        L = spec.num_qubits
        gammas = rng.uniform(spec.delta0 - spec.delta / 2, spec.delta0 + spec.delta / 2, size=L)
        xi = rng.uniform(-1.0, 1.0, size=len(spec.bonds))
        return DisorderRealization(seed, gammas, xi)
    xi = rng.uniform(-1.0, 1.0, size=len(all_pairs(spec.L)))
    return DisorderRealization(seed, np.zeros(0), xi)


def h0_diagonal(spec: ModelSpec, real: DisorderRealization | None = None) -> np.ndarray:
    """Unperturbed (J = 0) energies of every basis state.

    Both models are diagonal in the computational basis at J = 0, so
    this vector also defines the reference basis for delocalization
    measures and the band centers.
    """
    z = sigma_z_table(spec.num_qubits)
    if spec.kind == "2d":
        if real is None:
            raise ValueError("the 2D unperturbed energies depend on the realization")
        return z @ real.site_fields
    return 0.5 * (z @ spec.level_splittings)


def build_h_2d(spec: ModelSpec2D, real: DisorderRealization) -> np.ndarray:
    """Assemble the 2D Hamiltonian: real symmetric, dimension 2**L."""
    L = spec.num_qubits
    dim = 1 << L
    states = np.arange(dim)
    H = np.zeros((dim, dim), dtype=np.float64)
    H[states, states] = h0_diagonal(spec, real)
    for b, (i, j) in enumerate(spec.bonds):
        flipped = states ^ ((1 << i) | (1 << j))
        H[flipped, states] += spec.J * real.pair_xi[b]
    return H


def build_h0_1d(spec: ModelSpec1D) -> np.ndarray:
    """Dense diagonal matrix of the effective-field one-body part."""
    return np.diag(h0_diagonal(spec))


def build_v_1d(spec: ModelSpec1D, real: DisorderRealization) -> np.ndarray:
    """Assemble V = V_diag + V_band + V_off as a complex Hermitian matrix.

    For each coupled pair (j, k), with c_j the band mixing cosines
    (``mixing_cos``) and s_j the sines (``mixing_sin``):

    * V_diag adds -J_jk/2 * s_j s_k * z_j z_k to the diagonal,
    * V_band couples states differing in both bits j and k with real
      element  J_jk/2 * c_j c_k * z_j z_k,
    * V_off couples states differing in bit q only, with purely
      imaginary element  i z_q / 2 * sum over partners p of
      J_qp * c_q s_p * z_p.
    """
    L = spec.L
    dim = 1 << L
    states = np.arange(dim)
    z = sigma_z_table(L)
    c, s = spec.mixing_cos, spec.mixing_sin
    pair_index = {pair: b for b, pair in enumerate(all_pairs(L))}

    V = np.zeros((dim, dim), dtype=np.complex128)
    diag = np.zeros(dim)
    flip_amp = np.zeros((dim, L))
    for j, k in spec.coupled_pairs:
        J_jk = spec.J * real.pair_xi[pair_index[(j, k)]]
        zz = z[:, j] * z[:, k]
        diag += (-0.5 * J_jk * s[j] * s[k]) * zz
        flipped = states ^ ((1 << j) | (1 << k))
        V[flipped, states] += (0.5 * J_jk * c[j] * c[k]) * zz
        flip_amp[:, j] += (0.5 * J_jk * c[j] * s[k]) * z[:, k]
        flip_amp[:, k] += (0.5 * J_jk * c[k] * s[j]) * z[:, j]
    V[states, states] = diag
    for q in range(L):
        V[states ^ (1 << q), states] += 1j * z[:, q] * flip_amp[:, q]
    return V


def build_hamiltonian(spec: ModelSpec, real: DisorderRealization) -> np.ndarray:
    """Full H for either model; real symmetric (2D) or complex Hermitian (1D)."""
    if spec.kind == "2d":
        return build_h_2d(spec, real)
    H = build_v_1d(spec, real)
    states = np.arange(H.shape[0])
    H[states, states] += h0_diagonal(spec)
    return H


def hermiticity_defect(H: np.ndarray) -> float:
    """max |H - H^dagger| relative to max |H|."""
    scale = np.abs(H).max()
    if scale == 0.0:
        return 0.0
    return float(np.abs(H - H.conj().T).max() / scale)


def check_hermitian(H: np.ndarray, rtol: float = HERMITICITY_RTOL) -> None:
    defect = hermiticity_defect(H)
    if defect > rtol:
        raise ValidationError(f"matrix is not Hermitian: relative defect {defect:.3e} > {rtol:.1e}")
