"""Disorder-sweep orchestration.

A sweep walks a coupling grid; for every grid point and disorder
realization it builds the Hamiltonian, diagonalizes it, selects the
band under study and evaluates the requested measures, then aggregates
realization-level means into a tidy result table.

Reproducibility contract: the table produced by :func:`run_sweep` is a
deterministic function of the plan (including its base seed), no matter
how the work is scheduled.  Realization ``r`` always draws from
``realization_seed(base_seed, r)``, and per-realization results are
merged in index order.
"""

from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import entanglement as ent
from .basis import all_pairs, chain, pairs_at_distance, parity_phases
from .eigensolve import EigenSystem, eig_hermitian
from .errors import SolverError, ValidationError
from .hamiltonian import (
    DisorderRealization,
    ModelSpec,
    ModelSpec1D,
    ModelSpec2D,
    build_hamiltonian,
    h0_diagonal,
    realization_seed,
    sample_realization,
    with_coupling,
)
from .spectral import (
    BandSelection,
    band_center,
    gamma_from_spacings,
    participation_numbers,
    select_band,
    spacing_histogram,
    unfolded_spacings,
)

log = logging.getLogger(__name__)

UNITS = ("native", "JL_over_delta", "J_over_Jc")
SCOPES = ("band", "central", "central_third")
CLAMBDA_RANGE_TOL = 1e-8
MAX_FAILURE_FRACTION = 0.10


@dataclass(frozen=True)
class MeasureSpec:
    """One requested measure plus its eigenstate averaging scope.

    kinds: gamma | pds | pn | c<n> | ca | s1 | sn<n> | shalf | clambda | cmap
    scopes: band (every band eigenstate), central (the single central
    eigenfunction of the band), central_third (middle third).
    """

    kind: str
    n: int | None = None
    scope: str = "band"

    def __post_init__(self):
        if self.kind not in ("gamma", "pds", "pn", "c", "ca", "s1", "sn", "shalf", "clambda", "cmap"):
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.kind in ("c", "sn") and (self.n is None or self.n < 1):
            raise ValueError(f"measure {self.kind!r} needs a positive index")
        if self.scope not in SCOPES:
            raise ValueError(f"unknown scope {self.scope!r}")

    @property
    def key(self) -> str:
        return self.kind if self.n is None else f"{self.kind}{self.n}"

    @property
    def token(self) -> str:
        return f"{self.key}:{self.scope}" if self.scope != "band" else self.key


def measure_from_token(token: str) -> MeasureSpec:
    """Parse tokens like ``c3``, ``pn:central``, ``sn2``, ``clambda``."""
    name, _, scope = token.strip().partition(":")
    scope = scope or "band"
    if name in ("gamma", "pds", "pn", "ca", "s1", "shalf", "clambda", "cmap"):
        return MeasureSpec(name, None, scope)
    for prefix in ("sn", "c"):
        if name.startswith(prefix) and name[len(prefix) :].isdigit():
            return MeasureSpec(prefix, int(name[len(prefix) :]), scope)
    raise ValueError(f"unknown measure token {token!r}")


@dataclass(frozen=True)
class SweepPlan:
    """Everything needed to reproduce one ensemble sweep."""

    variants: tuple[ModelSpec, ...]
    j_grid: tuple[float, ...]  # in `units`
    units: str = "native"
    realizations: int = 1
    base_seed: int = 1234
    measures: tuple[MeasureSpec, ...] = ()
    band_n_up: int | None = None  # None: model default
    band_rule: str = "count"
    unfold_window: int | None = 16  # local-mean unfolding half-width; None: global
    s_bin_width: float = 0.1
    clambda_bin_width: float = 0.025
    workers: int = 1

    def __post_init__(self):
        if not self.variants:
            raise ValueError("plan needs at least one model variant")
        if not self.j_grid:
            raise ValueError("plan needs a nonempty coupling grid")
        if self.realizations < 1:
            raise ValueError("plan needs at least one realization")
        if not self.measures:
            raise ValueError("plan needs at least one measure")
        if self.units not in UNITS:
            raise ValueError(f"unknown units {self.units!r}")
        for spec in self.variants:
            if self.units == "JL_over_delta" and spec.kind != "2d":
                raise ValueError("JL_over_delta units apply to the 2D model only")
            if self.units == "J_over_Jc" and spec.kind != "1d":
                raise ValueError("J_over_Jc units apply to the 1D model only")

    def native_j(self, spec: ModelSpec, j_display: float) -> float:
        if self.units == "native":
            return j_display
        return j_display * spec.coupling_unit


def default_band_n_up(spec: ModelSpec) -> int:
    """Band with the highest density of states (center -delta0 for odd L)."""
    L = spec.num_qubits
    return (L - 1) // 2 if L % 2 else L // 2


def log_grid(lo: float, hi: float, points: int) -> tuple[float, ...]:
    return tuple(float(x) for x in np.geomspace(lo, hi, points))


@dataclass(frozen=True)
class ResultRow:
    measure: str
    j: float  # in the plan's units
    j_units: str
    value: float
    stderr: float
    n_samples: int
    L: int
    model: str
    l_c: int | None
    seed: int


@dataclass(frozen=True)
class HistogramResult:
    measure: str  # "pds" | "clambda"
    j: float
    L: int
    l_c: int | None
    bin_edges: np.ndarray
    density: np.ndarray
    count: int


@dataclass(frozen=True)
class StateMap:
    """Realization-averaged per-eigenstate values on the coupling grid."""

    measure: str
    L: int
    l_c: int | None
    j_grid: tuple[float, ...]
    values: np.ndarray  # (2**L, len(j_grid))


@dataclass
class ResultTable:
    """Tidy sweep output: scalar rows plus histogram/map side channels."""

    rows: list[ResultRow] = field(default_factory=list)
    histograms: list[HistogramResult] = field(default_factory=list)
    state_maps: list[StateMap] = field(default_factory=list)
    spectra: list[tuple[dict, np.ndarray]] = field(default_factory=list)
    plan: SweepPlan | None = None
    runtime_seconds: float = 0.0

    def value(self, measure: str, j: float, L: int | None = None, l_c: int | None = None) -> float:
        """Look up one aggregated value (measure key, grid point, variant)."""
        for row in self.rows:
            if row.measure != measure or not math.isclose(row.j, j, rel_tol=1e-12):
                continue
            if L is not None and row.L != L:
                continue
            if l_c is not None and row.l_c != l_c:
                continue
            return row.value
        raise KeyError(f"no row for measure={measure} j={j} L={L} l_c={l_c}")

    def curve(self, measure: str, L: int | None = None, l_c: int | None = None):
        """(j_grid, values) for one measure/variant, in grid order."""
        rows = [
            row
            for row in self.rows
            if row.measure == measure
            and (L is None or row.L == L)
            and (l_c is None or row.l_c == l_c)
        ]
        rows.sort(key=lambda row: row.j)
        return np.array([row.j for row in rows]), np.array([row.value for row in rows])


@dataclass
class _TaskOutput:
    scalars: dict[str, float]
    hist_counts: dict[str, np.ndarray]
    hist_n: dict[str, int]
    maps: dict[str, np.ndarray]
    spectrum: np.ndarray | None = None


def _variant_lc(spec: ModelSpec) -> int | None:
    return spec.l_c if isinstance(spec, ModelSpec1D) else None


def _solve(spec: ModelSpec, H: np.ndarray) -> EigenSystem:
    """Diagonalize on the fast real path, gauging the 1D model if needed.

    The 1D Hamiltonian becomes exactly real symmetric under conjugation
    by the parity phases diag(i**popcount), which factorize into the
    single-qubit gates diag(1, -i) on every site.  All measures taken
    downstream (participation numbers, block entropies, concurrences)
    are invariant under such local phase gates, so the eigenvectors are
    kept in the gauged frame: they stay real and the measure kernels
    run on floats.  Consumes H (rotated in place).
    """
    if spec.kind == "1d":
        phases = parity_phases(spec.num_qubits)
        H *= phases[:, None]
        H *= phases.conj()[None, :]
        gauged = np.ascontiguousarray(H.real)
        del H
        return eig_hermitian(gauged)
    return eig_hermitian(H)


def _scope_vectors(band: BandSelection, es: EigenSystem, scope: str) -> np.ndarray:
    if scope == "band":
        return band.vectors(es)
    if scope == "central":
        return es.vectors[:, [band.start + band.size // 2]]
    third = max(band.size // 3, 1)
    lo = band.start + (band.size - third) // 2
    return es.vectors[:, lo : lo + third]


def _pair_concurrences(vectors: np.ndarray, pairs) -> np.ndarray:
    """c_lambda for every (eigenstate, pair); shape (n_pairs, n_states)."""
    out = np.empty((len(pairs), vectors.shape[1]))
    for p, pair in enumerate(pairs):
        rho = ent.reduced_density_batch(vectors, pair)
        out[p] = ent.c_lambda_batch(rho)
    if out.min() < -0.5 - CLAMBDA_RANGE_TOL or out.max() > 1.0 + CLAMBDA_RANGE_TOL:
        raise ValidationError("c_lambda left [-1/2, 1] on an ensemble state")
    return out


def _pair_classes(spec: ModelSpec, n: int):
    geometry = spec.geometry if spec.kind == "2d" else chain(spec.L)
    return pairs_at_distance(geometry, n)


def evaluate_measure(
    measure: MeasureSpec,
    spec: ModelSpec,
    es: EigenSystem,
    band: BandSelection,
    plan: SweepPlan,
) -> dict:
    """One measure on one realization, averaged over its prescribed scope.

    Returns {"scalar": float} plus, for distribution measures, the
    histogram counts on the plan's fixed bins under "counts"/"n", or
    {"map": vector} for per-eigenstate maps.
    """
    L = spec.num_qubits
    kind = measure.kind
    if kind == "gamma":
        sample = unfolded_spacings(band.values(es), plan.unfold_window)
        return {"scalar": gamma_from_spacings(sample.spacings).gamma}
    if kind == "pds":
        sample = unfolded_spacings(band.values(es), plan.unfold_window)
        edges = np.arange(0.0, 4.0 + plan.s_bin_width / 2, plan.s_bin_width)
        counts, _ = np.histogram(sample.spacings, bins=edges)
        return {"scalar": float(sample.spacings.mean()), "counts": counts, "n": sample.spacings.size}
    if kind == "pn":
        vectors = _scope_vectors(band, es, measure.scope)
        return {"scalar": float(participation_numbers(vectors).mean())}
    if kind in ("c", "ca"):
        pairs = _pair_classes(spec, measure.n) if kind == "c" else all_pairs(L)
        vectors = _scope_vectors(band, es, measure.scope)
        clam = _pair_concurrences(vectors, pairs)
        return {"scalar": float(np.maximum(clam, 0.0).mean())}
    if kind == "clambda":
        vectors = _scope_vectors(band, es, measure.scope)
        clam = _pair_concurrences(vectors, all_pairs(L)).ravel()
        edges = ent.clambda_bin_edges(plan.clambda_bin_width)
        counts, _ = np.histogram(np.clip(clam, -0.5, 1.0), bins=edges)
        return {"scalar": float(clam.mean()), "counts": counts, "n": clam.size}
    if kind == "s1":
        vectors = _scope_vectors(band, es, measure.scope)
        entropies = [
            ent.entropy_batch(ent.reduced_density_batch(vectors, [q])).mean() for q in range(L)
        ]
        return {"scalar": float(np.mean(entropies))}
    if kind in ("sn", "shalf"):
        size = measure.n if kind == "sn" else L // 2
        if not 1 <= size < L:
            raise ValueError(f"block size {size} invalid for L={L}")
        vectors = _scope_vectors(band, es, measure.scope)
        rho = ent.reduced_density_batch(vectors, range(size))
        return {"scalar": float(ent.entropy_batch(rho).mean())}
    if kind == "cmap":
        pairs = _pair_classes(spec, 1)
        clam = _pair_concurrences(es.vectors, pairs)
        return {"map": np.maximum(clam, 0.0).mean(axis=0)}
    raise ValueError(f"unknown measure kind {kind!r}")


def _run_task(plan: SweepPlan, variant_idx: int, j_idx: int, r: int, keep_spectrum: bool) -> _TaskOutput:
    template = plan.variants[variant_idx]
    spec = with_coupling(template, plan.native_j(template, plan.j_grid[j_idx]))
    real = sample_realization(spec, realization_seed(plan.base_seed, r))
    H = build_hamiltonian(spec, real)
    es = _solve(spec, H)
    h0 = h0_diagonal(spec, real)
    n_up = plan.band_n_up if plan.band_n_up is not None else default_band_n_up(spec)
    center = band_center(h0, spec.num_qubits, n_up)
    half_width = _band_domain_half_width(h0, spec, n_up) if plan.band_rule == "window" else None
    band = select_band(es, spec.num_qubits, n_up, center, rule=plan.band_rule, half_width=half_width)

    out = _TaskOutput({}, {}, {}, {})
    for measure in plan.measures:
        result = evaluate_measure(measure, spec, es, band, plan)
        if "map" in result:
            out.maps[measure.key] = result["map"]
        else:
            out.scalars[measure.key] = result["scalar"]
            if "counts" in result:
                out.hist_counts[measure.key] = result["counts"]
                out.hist_n[measure.key] = result["n"]
    if keep_spectrum:
        out.spectrum = es.values.copy()
    return out


def _band_domain_half_width(h0: np.ndarray, spec: ModelSpec, n_up: int) -> float:
    """Half the unperturbed sector's energy span (the J -> 0 band domain).

    The fixed-window rule keeps this domain at every coupling, so once
    the interaction spreads the band only its core states stay selected.
    """
    from .basis import enumerate_sector

    sector_energies = h0[enumerate_sector(spec.num_qubits, n_up)]
    return float(sector_energies.max() - sector_energies.min()) / 2.0


def run_sweep(plan: SweepPlan, keep_spectra: bool = False) -> ResultTable:
    """Execute the sweep and aggregate realization-level means.

    A solver failure skips that realization (logged, n_samples reduced);
    more than 10% failed tasks abort the run.
    """
    t0 = time.time()
    tasks = [
        (vi, ji, r)
        for vi in range(len(plan.variants))
        for ji in range(len(plan.j_grid))
        for r in range(plan.realizations)
    ]
    outputs: dict[tuple[int, int, int], _TaskOutput | None] = {}
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            futures = {
                key: pool.submit(_run_task, plan, *key, keep_spectra) for key in tasks
            }
            for key, future in futures.items():
                outputs[key] = _collect(future.result, key)
    else:
        for key in tasks:
            outputs[key] = _collect(lambda: _run_task(plan, *key, keep_spectra), key)

    failures = sum(1 for v in outputs.values() if v is None)
    if failures > MAX_FAILURE_FRACTION * len(tasks):
        raise SolverError(f"{failures}/{len(tasks)} realizations failed; aborting sweep")

    table = ResultTable(plan=plan)
    for vi, spec in enumerate(plan.variants):
        lc = _variant_lc(spec)
        for ji, j in enumerate(plan.j_grid):
            good = [outputs[(vi, ji, r)] for r in range(plan.realizations)]
            good = [g for g in good if g is not None]
            if not good:
                continue
            for measure in plan.measures:
                key = measure.key
                if key in good[0].maps:
                    continue
                values = np.array([g.scalars[key] for g in good])
                stderr = float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0
                table.rows.append(
                    ResultRow(
                        key, j, plan.units, float(values.mean()), stderr,
                        values.size, spec.num_qubits, spec.kind, lc, plan.base_seed,
                    )
                )
                if key in good[0].hist_counts:
                    counts = np.sum([g.hist_counts[key] for g in good], axis=0)
                    total = sum(g.hist_n[key] for g in good)
                    width = plan.s_bin_width if measure.kind == "pds" else plan.clambda_bin_width
                    edges = (
                        np.arange(0.0, 4.0 + width / 2, width)
                        if measure.kind == "pds"
                        else ent.clambda_bin_edges(width)
                    )
                    table.histograms.append(
                        HistogramResult(
                            key, j, spec.num_qubits, lc, edges,
                            counts / (total * width), total,
                        )
                    )
            if keep_spectra:
                for r in range(plan.realizations):
                    out = outputs[(vi, ji, r)]
                    if out is not None and out.spectrum is not None:
                        meta = {"L": spec.num_qubits, "model": spec.kind, "l_c": lc, "j": j, "realization": r}
                        table.spectra.append((meta, out.spectrum))
        for measure in plan.measures:
            if measure.kind != "cmap":
                continue
            per_j = []
            for ji in range(len(plan.j_grid)):
                maps = [
                    outputs[(vi, ji, r)].maps[measure.key]
                    for r in range(plan.realizations)
                    if outputs[(vi, ji, r)] is not None
                ]
                per_j.append(np.mean(maps, axis=0))
            table.state_maps.append(
                StateMap(measure.key, spec.num_qubits, lc, plan.j_grid, np.column_stack(per_j))
            )
    table.runtime_seconds = time.time() - t0
    return table


def _collect(call, key):
    try:
        return call()
    except SolverError as exc:
        log.warning("task %s skipped: %s", key, exc)
        return None


def per_eigenstate_map(plan: SweepPlan) -> StateMap:
    """Realization-averaged nearest-neighbor concurrence of every eigenstate.

    The plan must hold a single model variant; the returned grid has one
    row per sorted eigenstate and one column per coupling grid point.
    """
    if len(plan.variants) != 1:
        raise ValueError("per-eigenstate maps need a single-variant plan")
    if not any(m.kind == "cmap" for m in plan.measures):
        plan = replace(plan, measures=plan.measures + (MeasureSpec("cmap"),))
    return run_sweep(plan).state_maps[0]
