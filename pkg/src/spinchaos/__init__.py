"""spinchaos: exact-diagonalization laboratory for disordered spin lattices.

Builds dense Hamiltonians for a 2D random-Ising torus and a family of
1D effective-field chains, diagonalizes them over disorder ensembles,
and measures level statistics, eigenfunction delocalization and
entanglement across the transition to quantum chaos.
"""

from .basis import Geometry, all_pairs, chain, enumerate_sector, pairs_at_distance, torus
from .eigensolve import EigenSystem, eig_hermitian
from .ensemble import (
    MeasureSpec,
    ResultTable,
    SweepPlan,
    measure_from_token,
    per_eigenstate_map,
    run_sweep,
)
from .entanglement import (
    ClambdaSample,
    c_lambda,
    clambda_statistics,
    concurrence,
    entanglement_of_formation,
    negativity,
    partial_trace,
    von_neumann_entropy,
)
from .config import ExperimentConfig, parse_config, serialize_config
from .hamiltonian import (
    DisorderRealization,
    ModelSpec1D,
    ModelSpec2D,
    build_h0_1d,
    build_h_2d,
    build_hamiltonian,
    build_v_1d,
    h0_diagonal,
    realization_seed,
    sample_realization,
)
from .presets import PRESET_NAMES, preset
from .spectral import (
    BandSelection,
    GammaValue,
    S0,
    SpacingSample,
    band_center,
    gamma_from_spacings,
    participation_number,
    select_band,
    unfolded_spacings,
)

__version__ = "0.1.0"
