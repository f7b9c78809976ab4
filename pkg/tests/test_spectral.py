import math

import numpy as np
import pytest
from scipy import stats

from spinchaos.basis import enumerate_sector
from spinchaos.eigensolve import eig_hermitian
from spinchaos.errors import ValidationError
from spinchaos.hamiltonian import ModelSpec2D, build_h_2d, h0_diagonal, sample_realization
from spinchaos.spectral import (
    S0,
    band_center,
    gamma_from_spacings,
    participation_number,
    participation_numbers,
    poisson_cdf,
    select_band,
    spacing_histogram,
    unfolded_spacings,
    wigner_cdf,
    wigner_pdf,
    poisson_pdf,
)


def sample_wigner(rng, n):
    return np.sqrt(-4.0 * np.log1p(-rng.uniform(size=n)) / np.pi)


# ---------------------------------------------------------------- s0 and integrals


def test_crossing_point_location():
    assert abs(S0 - 0.4729) < 1e-3
    assert abs(wigner_pdf(S0) - poisson_pdf(S0)) < 1e-12


def test_reference_cdfs_at_s0():
    assert poisson_cdf(S0) == pytest.approx(1 - math.exp(-S0), abs=1e-15)
    assert poisson_cdf(S0) == pytest.approx(0.3768, abs=1e-3)
    assert wigner_cdf(S0) == pytest.approx(0.1612, abs=1e-3)


# ---------------------------------------------------------------- band selection


def make_2d_eigensystem(J, seed):
    spec = ModelSpec2D(J=J)
    real = sample_realization(spec, seed)
    es = eig_hermitian(build_h_2d(spec, real))
    h0 = h0_diagonal(spec, real)
    return spec, real, es, h0


def test_band_at_zero_coupling_is_exactly_the_sector():
    spec, real, es, h0 = make_2d_eigensystem(0.0, 31)
    center = band_center(h0, 9, 4)
    band = select_band(es, 9, 4, center)
    assert band.size == 126
    expected = np.sort(h0[enumerate_sector(9, 4)])
    assert np.allclose(band.values(es), expected, atol=1e-12)
    # inside the unperturbed band width around -delta0
    width = spec.delta * 9 / 2
    assert np.all(np.abs(band.values(es) - center) <= width)


def test_band_center_near_minus_delta0():
    spec, real, es, h0 = make_2d_eigensystem(0.0, 32)
    center = band_center(h0, 9, 4)
    assert abs(center + spec.delta0) < spec.delta


def test_band_members_contiguous_and_counted():
    _, _, es, h0 = make_2d_eigensystem(0.02, 33)
    band = select_band(es, 9, 4, band_center(h0, 9, 4))
    assert band.size == 126
    assert np.array_equal(band.indices, np.arange(band.start, band.start + 126))


def test_window_rule_recovers_band_when_separated():
    _, _, es, h0 = make_2d_eigensystem(0.001, 34)
    center = band_center(h0, 9, 4)
    band = select_band(es, 9, 4, center, rule="window", half_width=1.0)
    assert band.size == 126


def test_central_band_size_at_l12():
    assert len(enumerate_sector(12, 6)) == 924


# ---------------------------------------------------------------- unfolding


def test_equally_spaced_levels_unfold_to_unit():
    sample = unfolded_spacings(np.arange(30.0))
    assert np.allclose(sample.spacings, 1.0, atol=1e-14)


def test_three_level_example():
    sample = unfolded_spacings(np.array([0.0, 1.0, 3.0]), window=None)
    assert sample.mean_raw_spacing == pytest.approx(1.5)
    assert np.allclose(sample.spacings, [2 / 3, 4 / 3], atol=1e-15)


def test_unfolded_mean_is_one():
    rng = np.random.default_rng(0)
    levels = np.cumsum(rng.exponential(size=500))
    for window in (None, 8, 16):
        assert unfolded_spacings(levels, window).spacings.mean() == pytest.approx(1.0, abs=1e-13)


def test_unfolding_needs_two_levels():
    with pytest.raises(ValueError):
        unfolded_spacings(np.array([1.0]))


def test_poisson_spectrum_cdf_matches_exponential():
    rng = np.random.default_rng(7)
    levels = np.cumsum(rng.exponential(size=100001))
    global_s = unfolded_spacings(levels, window=None).spacings
    ks = stats.kstest(global_s, stats.expon.cdf).statistic
    assert ks < 0.01
    local_s = unfolded_spacings(levels).spacings
    assert stats.kstest(local_s, stats.expon.cdf).statistic < 0.02


# ---------------------------------------------------------------- gamma


def test_gamma_poisson_limit():
    rng = np.random.default_rng(11)
    spacings = rng.exponential(size=100000)
    assert gamma_from_spacings(spacings / spacings.mean()).gamma == pytest.approx(1.0, abs=0.02)


def test_gamma_wigner_limit():
    rng = np.random.default_rng(12)
    spacings = sample_wigner(rng, 100000)
    assert gamma_from_spacings(spacings / spacings.mean()).gamma == pytest.approx(0.0, abs=0.02)


def test_gamma_scale_invariance():
    rng = np.random.default_rng(13)
    levels = np.cumsum(rng.exponential(size=2000))
    g1 = gamma_from_spacings(unfolded_spacings(levels).spacings).gamma
    g2 = gamma_from_spacings(unfolded_spacings(1e6 * levels).spacings).gamma
    assert g1 == pytest.approx(g2, abs=1e-12)


def test_gamma_rejects_empty():
    with pytest.raises(ValueError):
        gamma_from_spacings(np.array([]))


# ---------------------------------------------------------------- histogram


def test_spacing_histogram_density():
    rng = np.random.default_rng(3)
    s = rng.exponential(size=20000)
    edges, density = spacing_histogram(s, bin_width=0.1)
    assert len(edges) == 41
    retained = np.mean(s <= 4.0)
    assert density.sum() * 0.1 == pytest.approx(retained, abs=1e-12)


# ---------------------------------------------------------------- participation number


def test_pn_basis_state():
    v = np.zeros(16)
    v[3] = 1.0
    assert participation_number(v) == pytest.approx(1.0, abs=1e-12)


def test_pn_uniform_superposition():
    n = 64
    v = np.full(n, 1 / math.sqrt(n))
    assert participation_number(v) == pytest.approx(n, rel=1e-12)


def test_pn_gaussian_vector_near_third_of_dimension():
    rng = np.random.default_rng(21)
    n = 4096
    values = []
    for _ in range(12):
        v = rng.normal(size=n)
        v /= np.linalg.norm(v)
        values.append(participation_number(v))
    assert np.mean(values) == pytest.approx(n / 3, rel=0.05)


def test_pn_invariances():
    rng = np.random.default_rng(22)
    v = rng.normal(size=256) + 1j * rng.normal(size=256)
    v /= np.linalg.norm(v)
    xi = participation_number(v)
    assert 1.0 <= xi <= 256.0
    assert participation_number(np.exp(1j * 0.7) * v) == pytest.approx(xi, rel=1e-12)
    assert participation_number(rng.permutation(v)) == pytest.approx(xi, rel=1e-12)


def test_pn_rejects_unnormalized():
    with pytest.raises(ValidationError):
        participation_number(np.ones(4))
    with pytest.raises(ValidationError):
        participation_numbers(np.ones((4, 2)))
