"""Quantum-chaos diagnostics: band selection, spacing statistics, gamma, PN.

The nearest-neighbor spacing distribution interpolates between Poisson
(integrable) and the Wigner surmise (chaotic, GOE).  The crossover is
summarized by a single parameter computed from the cumulative fraction
of spacings below the first crossing point s0 of the two reference
densities, so no histogram binning enters the estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .basis import enumerate_sector, sector_size
from .eigensolve import EigenSystem
from .errors import ValidationError

PN_NORMALIZATION_ATOL = 1e-10


def poisson_pdf(s):
    """Spacing density of an integrable spectrum, exp(-s)."""
    return np.exp(-s)


def wigner_pdf(s):
    """Wigner surmise for the GOE, (pi s / 2) exp(-pi s^2 / 4)."""
    return (np.pi * s / 2.0) * np.exp(-np.pi * s**2 / 4.0)


def poisson_cdf(s):
    return 1.0 - np.exp(-s)


def wigner_cdf(s):
    return 1.0 - np.exp(-np.pi * np.square(s) / 4.0)


def _crossing_point() -> float:
    """Lowest s > 0 where the Poisson and Wigner densities cross."""
    root = brentq(lambda s: wigner_pdf(s) - poisson_pdf(s), 0.1, 1.0, xtol=1e-14)
    if abs(root - 0.4729) > 1e-3:
        raise AssertionError(f"unexpected Poisson/Wigner crossing at {root}")
    return root


S0 = _crossing_point()


@dataclass(frozen=True)
class BandSelection:
    """Eigenpairs identified with one unperturbed magnetization band."""

    n_up: int
    start: int  # first index into the sorted spectrum
    size: int
    center: float  # unperturbed band center energy

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.start, self.start + self.size)

    def values(self, es: EigenSystem) -> np.ndarray:
        return es.values[self.start : self.start + self.size]

    def vectors(self, es: EigenSystem) -> np.ndarray:
        return es.vectors[:, self.start : self.start + self.size]


def band_center(h0_diag: np.ndarray, L: int, n_up: int) -> float:
    """Mean unperturbed energy of the magnetization sector."""
    return float(h0_diag[enumerate_sector(L, n_up)].mean())


def select_band(
    es: EigenSystem,
    L: int,
    n_up: int,
    center: float,
    rule: str = "count",
    half_width: float | None = None,
) -> BandSelection:
    """Pick the eigenpairs belonging to one unperturbed band.

    The default count-based rule keeps the window size pinned to the
    sector dimension C(L, n_up): among all windows of that many
    consecutive sorted levels it returns the one whose mean energy is
    closest to the band center.  While bands are well separated this is
    exactly the unperturbed domain; when they blur it degrades
    gracefully instead of losing states.

    ``rule="window"`` instead keeps every level within ``half_width``
    of the center (a fixed energy window, for sensitivity checks); the
    member count is then not guaranteed.
    """
    if rule == "count":
        size = sector_size(L, n_up)
        if size > es.dim:
            raise ValueError("band larger than the spectrum")
        window_means = np.convolve(es.values, np.ones(size) / size, mode="valid")
        start = int(np.argmin(np.abs(window_means - center)))
        return BandSelection(n_up, start, size, center)
    if rule == "window":
        if half_width is None or half_width <= 0:
            raise ValueError("window rule needs a positive half_width")
        inside = np.flatnonzero(np.abs(es.values - center) <= half_width)
        if inside.size == 0:
            raise ValueError("no levels inside the band window")
        return BandSelection(n_up, int(inside[0]), int(inside.size), center)
    raise ValueError(f"unknown band selection rule {rule!r}")


DEFAULT_UNFOLD_HALF_WIDTH = 16


@dataclass(frozen=True)
class SpacingSample:
    """Spacings of one band in units of the (local) mean spacing."""

    spacings: np.ndarray
    mean_raw_spacing: float

    def __post_init__(self):
        if self.spacings.size and abs(self.spacings.mean() - 1.0) > 1e-12:
            raise ValidationError("unfolded spacings must average to 1")


def unfolded_spacings(
    band_values: np.ndarray, window: int | None = DEFAULT_UNFOLD_HALF_WIDTH
) -> SpacingSample:
    """Consecutive level spacings in units of the mean spacing.

    With ``window=None`` the band is unfolded by its single global mean
    spacing.  That is only faithful while the density of states is flat
    across the band; once the interaction spreads the band, its profile
    becomes strongly peaked and a global mean masks level repulsion
    (edge spacings several times the core ones).  The default therefore
    divides each spacing by the running mean over ``window`` neighbors
    on each side, which reduces to the global rule on flat spectra, and
    rescales to exact unit mean.
    """
    band_values = np.asarray(band_values, dtype=np.float64)
    if band_values.size < 2:
        raise ValueError("need at least two levels to form spacings")
    raw = np.diff(band_values)
    mean = raw.mean()
    if mean <= 0:
        raise ValidationError("band levels must be strictly increasing on average")
    if window is None or raw.size <= 2 * window:
        return SpacingSample(raw / mean, float(mean))
    steps = np.concatenate([[0.0], np.cumsum(raw)])
    positions = np.arange(raw.size)
    lo = np.maximum(positions - window, 0)
    hi = np.minimum(positions + window + 1, raw.size)
    local_mean = (steps[hi] - steps[lo]) / (hi - lo)
    spacings = raw / local_mean
    return SpacingSample(spacings / spacings.mean(), float(mean))


@dataclass(frozen=True)
class GammaValue:
    """Poisson/Wigner interpolation parameter: 1 Poisson, 0 Wigner."""

    gamma: float
    s0: float = S0


def gamma_from_spacings(spacings: np.ndarray) -> GammaValue:
    """Spectral statistics parameter from unfolded spacings.

    Computed from the empirical cumulative fraction below s0, against
    the closed-form Poisson and Wigner cumulatives, so it is free of
    histogram binning.  Values may slightly leave [0, 1] by sampling
    noise; they are not clipped.
    """
    spacings = np.asarray(spacings)
    if spacings.size == 0:
        raise ValueError("empty spacing sample")
    empirical = np.count_nonzero(spacings <= S0) / spacings.size
    numerator = empirical - wigner_cdf(S0)
    denominator = poisson_cdf(S0) - wigner_cdf(S0)
    return GammaValue(float(numerator / denominator))


def spacing_histogram(spacings: np.ndarray, bin_width: float = 0.1, s_max: float = 4.0):
    """Density histogram of P(s) on [0, s_max] for plotting.

    Returns (bin_edges, density); spacings beyond s_max are dropped
    from the bins but still counted in the normalization so the
    densities integrate to the retained fraction.
    """
    edges = np.arange(0.0, s_max + bin_width / 2, bin_width)
    counts, _ = np.histogram(spacings, bins=edges)
    density = counts / (spacings.size * bin_width)
    return edges, density


def participation_number(amplitudes: np.ndarray) -> float:
    """Effective number of basis states mixed into one normalized vector."""
    return float(participation_numbers(np.asarray(amplitudes)[:, None])[0])


def participation_numbers(columns: np.ndarray) -> np.ndarray:
    """PN of each column of an (N, M) amplitude matrix.

    xi = 1 / sum_i |c_i|^4, so xi = 1 for a basis state and xi = N for
    a flat superposition; random real GOE-like vectors average N/3.
    """
    probs = np.abs(columns) ** 2
    norms = probs.sum(axis=0)
    if np.abs(norms - 1.0).max() > PN_NORMALIZATION_ATOL:
        raise ValidationError("participation number needs normalized vectors")
    return 1.0 / np.square(probs).sum(axis=0)
