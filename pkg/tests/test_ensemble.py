import numpy as np
import pytest

from spinchaos.eigensolve import eig_hermitian
from spinchaos.ensemble import (
    MeasureSpec,
    SweepPlan,
    default_band_n_up,
    evaluate_measure,
    measure_from_token,
    per_eigenstate_map,
    run_sweep,
)
from spinchaos.hamiltonian import (
    ModelSpec1D,
    ModelSpec2D,
    build_hamiltonian,
    h0_diagonal,
    realization_seed,
    sample_realization,
)
from spinchaos.spectral import band_center, select_band


def measures(*tokens):
    return tuple(measure_from_token(t) for t in tokens)


def small_1d_plan(**overrides):
    settings = dict(
        variants=(ModelSpec1D(L=6, l_c=5, omega=30.0),),
        j_grid=(0.0, 1.0, 10.0),
        units="J_over_Jc",
        realizations=3,
        base_seed=99,
        measures=measures("gamma", "pn", "c1", "ca", "s1", "shalf"),
    )
    settings.update(overrides)
    return SweepPlan(**settings)


# ---------------------------------------------------------------- tokens and plans


def test_measure_tokens_round_trip():
    for token in ("gamma", "pds", "pn:central", "c3", "ca", "s1", "sn2", "shalf", "clambda", "cmap"):
        m = measure_from_token(token)
        assert m.token == token
    assert measure_from_token("c12").n == 12
    with pytest.raises(ValueError):
        measure_from_token("c")
    with pytest.raises(ValueError):
        measure_from_token("pn:middle")
    with pytest.raises(ValueError):
        measure_from_token("entropy")


def test_plan_validation():
    with pytest.raises(ValueError):
        small_1d_plan(j_grid=())
    with pytest.raises(ValueError):
        small_1d_plan(realizations=0)
    with pytest.raises(ValueError):
        small_1d_plan(measures=())
    with pytest.raises(ValueError):
        small_1d_plan(units="JL_over_delta")  # 2D units on a 1D model


def test_native_j_conversion():
    plan = small_1d_plan()
    spec = plan.variants[0]
    assert plan.native_j(spec, 10.0) == pytest.approx(10.0 * 4 / 30.0)
    plan2d = SweepPlan(
        variants=(ModelSpec2D(),), j_grid=(9.0,), units="JL_over_delta",
        realizations=1, measures=measures("gamma"),
    )
    assert plan2d.native_j(plan2d.variants[0], 9.0) == pytest.approx(0.09)


def test_default_band():
    assert default_band_n_up(ModelSpec2D()) == 4
    assert default_band_n_up(ModelSpec1D(L=12, l_c=1)) == 6


# ---------------------------------------------------------------- determinism


def test_sweep_is_deterministic():
    t1 = run_sweep(small_1d_plan())
    t2 = run_sweep(small_1d_plan())
    assert len(t1.rows) == len(t2.rows)
    for a, b in zip(t1.rows, t2.rows):
        assert a == b


def test_sweep_worker_count_does_not_change_results():
    serial = run_sweep(small_1d_plan(realizations=2, j_grid=(1.0,)))
    parallel = run_sweep(small_1d_plan(realizations=2, j_grid=(1.0,), workers=2))
    for a, b in zip(serial.rows, parallel.rows):
        assert a == b


def test_realization_reused_across_grid_points():
    # the same realization index draws the same disorder at every J
    spec = ModelSpec1D(L=6, l_c=5, omega=30.0, J=0.1)
    seed = realization_seed(99, 0)
    xi_a = sample_realization(spec, seed).pair_xi
    xi_b = sample_realization(ModelSpec1D(L=6, l_c=5, omega=30.0, J=0.9), seed).pair_xi
    assert np.array_equal(xi_a, xi_b)


# ---------------------------------------------------------------- physics sanity


def test_zero_coupling_measures_vanish():
    table = run_sweep(small_1d_plan())
    for key in ("c1", "ca", "s1", "shalf"):
        assert table.value(key, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert table.value("pn", 0.0) == pytest.approx(1.0, abs=1e-9)


def test_stderr_over_realizations():
    table = run_sweep(small_1d_plan())
    row = next(r for r in table.rows if r.measure == "ca" and r.j == 1.0)
    assert row.n_samples == 3
    assert row.stderr > 0.0


def test_concurrence_peak_shape():
    # C_a small at both extremes, larger in the crossover region; needs
    # L >= 10 since smaller chains keep a finite chaotic-side concurrence
    plan = small_1d_plan(
        variants=(ModelSpec1D(L=10, l_c=9, omega=50.0),),
        j_grid=(0.01, 1.0, 30.0),
        realizations=2,
    )
    table = run_sweep(plan)
    j, c = table.curve("ca")
    assert c[1] > 3 * c[0]
    assert c[1] > 3 * c[2]


def test_multi_variant_sweep_labels_rows():
    plan = SweepPlan(
        variants=(ModelSpec1D(L=6, l_c=1, omega=30.0), ModelSpec1D(L=6, l_c=5, omega=30.0)),
        j_grid=(1.0,),
        units="J_over_Jc",
        realizations=2,
        base_seed=5,
        measures=measures("c1"),
    )
    table = run_sweep(plan)
    assert {row.l_c for row in table.rows} == {1, 5}
    assert table.value("c1", 1.0, l_c=1) != table.value("c1", 1.0, l_c=5)


# ---------------------------------------------------------------- scopes


def prepare_band(J=0.5, seed=7):
    spec = ModelSpec1D(L=6, l_c=5, omega=30.0, J=J * 4 / 30.0)
    real = sample_realization(spec, realization_seed(1, seed))
    es = eig_hermitian(build_hamiltonian(spec, real))
    h0 = h0_diagonal(spec, real)
    band = select_band(es, 6, 3, band_center(h0, 6, 3))
    return spec, es, band


def test_scope_sizes():
    plan = small_1d_plan()
    spec, es, band = prepare_band()
    from spinchaos.ensemble import _scope_vectors

    assert _scope_vectors(band, es, "band").shape[1] == band.size
    assert _scope_vectors(band, es, "central").shape[1] == 1
    assert _scope_vectors(band, es, "central_third").shape[1] == band.size // 3


def test_evaluate_measure_single_state_band():
    # a band of one state over one pair reduces to that single concurrence
    from spinchaos.entanglement import concurrence, partial_trace
    from spinchaos.spectral import BandSelection

    plan = small_1d_plan(measures=measures("c5"))
    spec, es, band = prepare_band()
    single = BandSelection(band.n_up, band.start + 3, 1, band.center)
    result = evaluate_measure(MeasureSpec("c", 5), spec, es, single, plan)
    state = es.vectors[:, band.start + 3]
    expected = concurrence(partial_trace(state, (0, 5)))
    assert result["scalar"] == pytest.approx(expected, abs=1e-12)


def test_gamma_equals_direct_computation():
    from spinchaos.spectral import gamma_from_spacings, unfolded_spacings

    plan = small_1d_plan(measures=measures("gamma"))
    spec, es, band = prepare_band()
    result = evaluate_measure(MeasureSpec("gamma"), spec, es, band, plan)
    expected = gamma_from_spacings(unfolded_spacings(band.values(es), plan.unfold_window).spacings)
    assert result["scalar"] == pytest.approx(expected.gamma, abs=1e-14)


# ---------------------------------------------------------------- histograms and maps


def test_pds_histogram_pools_realizations():
    plan = small_1d_plan(measures=measures("pds"), j_grid=(1.0,), realizations=2)
    table = run_sweep(plan)
    hist = table.histograms[0]
    assert hist.count == 2 * (20 - 1)  # C(6,3)=20 band states per realization
    width = hist.bin_edges[1] - hist.bin_edges[0]
    assert hist.density.sum() * width <= 1.0 + 1e-9


def test_clambda_moment_and_histogram():
    plan = small_1d_plan(measures=measures("clambda"), j_grid=(10.0,), realizations=2)
    table = run_sweep(plan)
    hist = table.histograms[0]
    assert hist.count == 2 * 20 * 15  # states x pairs x realizations
    width = hist.bin_edges[1] - hist.bin_edges[0]
    assert hist.density.sum() * width == pytest.approx(1.0, abs=1e-9)
    moment = table.value("clambda", 10.0)
    assert -0.5 <= moment <= 1.0


def test_state_map_shape_and_zero_column():
    plan = SweepPlan(
        variants=(ModelSpec2D(),),
        j_grid=(0.0, 1.0),
        units="JL_over_delta",
        realizations=2,
        base_seed=12,
        measures=measures("cmap"),
    )
    smap = per_eigenstate_map(plan)
    assert smap.values.shape == (2**9, 2)
    assert np.abs(smap.values[:, 0]).max() == pytest.approx(0.0, abs=1e-12)
    assert smap.values[:, 1].max() > 0.0


def test_ground_state_row_grows_roughly_linearly():
    plan = SweepPlan(
        variants=(ModelSpec2D(),),
        j_grid=(0.2, 0.4),
        units="JL_over_delta",
        realizations=20,
        base_seed=3,
        measures=measures("cmap"),
    )
    smap = per_eigenstate_map(plan)
    ratio = smap.values[0, 1] / smap.values[0, 0]
    assert 1.4 < ratio < 2.6  # doubling J about doubles the ground-state C1


def test_spectra_dump():
    plan = small_1d_plan(j_grid=(1.0,), realizations=2, measures=measures("gamma"))
    table = run_sweep(plan, keep_spectra=True)
    assert len(table.spectra) == 2
    meta, values = table.spectra[0]
    assert values.shape == (2**6,)
    assert meta["L"] == 6


def test_map_band_rows_peak_near_crossover():
    # averaged over one band's rows, the map peaks near JL/delta = 1
    plan = SweepPlan(
        variants=(ModelSpec2D(),),
        j_grid=(0.1, 1.0, 10.0),
        units="JL_over_delta",
        realizations=20,
        base_seed=8,
        measures=measures("cmap"),
    )
    smap = per_eigenstate_map(plan)
    sector = np.arange(130, 256)  # interior of the band centered at -delta0
    band_rows = smap.values[sector].mean(axis=0)
    assert np.argmax(band_rows) == 1


# ---------------------------------------------------------------- failure handling


def test_solver_failures_reduce_n_samples(monkeypatch):
    import spinchaos.ensemble as ens
    from spinchaos.errors import SolverError

    real_solve = ens._solve
    calls = {"n": 0}

    def flaky(spec, H):
        calls["n"] += 1
        if calls["n"] == 1:
            raise SolverError("synthetic convergence failure")
        return real_solve(spec, H)

    monkeypatch.setattr(ens, "_solve", flaky)
    plan = small_1d_plan(j_grid=(1.0,), realizations=12, measures=measures("pn"))
    table = run_sweep(plan)
    row = table.rows[0]
    assert row.n_samples == 11


def test_sweep_aborts_when_most_tasks_fail(monkeypatch):
    import spinchaos.ensemble as ens
    from spinchaos.errors import SolverError

    def broken(spec, H):
        raise SolverError("synthetic failure")

    monkeypatch.setattr(ens, "_solve", broken)
    with pytest.raises(SolverError):
        run_sweep(small_1d_plan(j_grid=(1.0,), realizations=4, measures=measures("pn")))
