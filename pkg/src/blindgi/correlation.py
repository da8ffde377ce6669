"""Pattern-bucket correlation, its Fourier magnitude, and the transfer-
function model used to read (or compensate) the object spectrum out of it.

The correlation is the mean-removed estimator

    C(p) = (1/J) sum_j (B_j - mean B) (M_j(p) - mean_j M(p)),

streamed over regenerated patterns in bounded memory.  Mean removal is what
turns a 0/1 ensemble into the delta-correlated ensemble the factorization
|C~| = |O~| * F assumes, and it also suppresses the constant illumination
background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UsageError
from .forward import MeasurementSet, OpticalConfig, pupil_mask
from .grid import Grid2D, MagnitudeSpectrum, indicator_autocorrelation
from .patterns import STREAM_CHUNK, pattern_batch


@dataclass(frozen=True)
class CorrelationImage:
    """Mean-removed pattern-bucket correlation on the object grid."""

    grid: Grid2D
    values: np.ndarray
    count_used: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ConfigError("correlation shape does not match grid")
        if not np.all(np.isfinite(vals)):
            raise ConfigError("correlation contains non-finite values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def correlate(measurements: MeasurementSet, workers: int = 1) -> CorrelationImage:
    """Correlation image from a measurement set, regenerating patterns on the fly.

    Uses the streaming identity C = (1/J) sum B_j M_j - (mean B)(mean M),
    accumulated in fixed chunk order so the result is independent of the
    worker count.
    """
    spec = measurements.ensemble
    if spec.count < 2:
        raise UsageError("correlation needs at least 2 measurements")
    buckets = measurements.buckets
    shape = spec.grid.shape

    chunks = [(lo, min(lo + STREAM_CHUNK, spec.count)) for lo in range(0, spec.count, STREAM_CHUNK)]

    def partial(bounds):
        lo, hi = bounds
        batch = pattern_batch(spec, lo, hi).reshape(hi - lo, -1)
        return buckets[lo:hi] @ batch, batch.sum(axis=0)

    if workers > 1 and len(chunks) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(partial, chunks))
    else:
        parts = [partial(c) for c in chunks]

    acc_bm = np.zeros(spec.grid.npixels)
    acc_m = np.zeros(spec.grid.npixels)
    for bm, m in parts:  # merge in chunk order: float result independent of workers
        acc_bm += bm
        acc_m += m
    j = spec.count
    c = acc_bm / j - (buckets.mean()) * (acc_m / j)
    return CorrelationImage(spec.grid, c.reshape(shape), j)


def magnitude_spectrum(c: CorrelationImage) -> MagnitudeSpectrum:
    """Centered Fourier magnitude of the correlation image (unitary transform)."""
    mag = np.abs(np.fft.fftshift(np.fft.fft2(c.values, norm="ortho")))
    return MagnitudeSpectrum(c.grid, mag, centered=True)


@dataclass(frozen=True)
class FilterModel:
    """The predictable spectral filter: lens MTF x speckle-MTF model x source-pixel MTF.

    All components are centered, normalized to 1 at zero frequency; ``mtf``
    is their pointwise product.
    """

    mtf: MagnitudeSpectrum
    lens_mtf: MagnitudeSpectrum
    speckle_mtf: MagnitudeSpectrum
    source_pixel_mtf: MagnitudeSpectrum


def _source_pixel_mtf(config: OpticalConfig) -> np.ndarray:
    """Magnitude spectrum of one source-pixel footprint on the object grid.

    The footprint is the source cell rasterized to whole grid pixels; for a
    footprint of one pixel the spectrum is flat.  Larger footprints give the
    sinc-like Dirichlet falloff.
    """
    grid = config.object_grid
    span = max(1, round(config.dmd_pitch / grid.pitch))
    block = np.zeros(grid.shape)
    block[:span, :span] = 1.0
    mag = np.abs(np.fft.fftshift(np.fft.fft2(block)))
    return mag / mag[grid.ny // 2, grid.nx // 2]


def filter_model(config: OpticalConfig) -> FilterModel:
    """Model of the overall spatial filter for the configured optical path.

    lens-only: lens MTF = normalized pupil autocorrelation, speckle term unity.
    scattering: speckle MTF = sqrt of the pupil autocorrelation (the lens
    passband exceeds the aperture cutoff, so its term is unity).
    delta: both unity; only the source-pixel footprint remains.
    """
    grid = config.object_grid
    ones = np.ones(grid.shape)
    lens = speckle = ones
    if config.case == "lens-only":
        lens = indicator_autocorrelation(grid, pupil_mask(config))
    elif config.case == "scattering":
        speckle = np.sqrt(indicator_autocorrelation(grid, pupil_mask(config)))
    pixel = _source_pixel_mtf(config)
    product = lens * speckle * pixel
    return FilterModel(
        mtf=MagnitudeSpectrum(grid, product, centered=True),
        lens_mtf=MagnitudeSpectrum(grid, lens, centered=True),
        speckle_mtf=MagnitudeSpectrum(grid, speckle, centered=True),
        source_pixel_mtf=MagnitudeSpectrum(grid, pixel, centered=True),
    )


def compensate(
    spectrum: MagnitudeSpectrum, filt: FilterModel, epsilon: float
) -> MagnitudeSpectrum:
    """Regularized inverse filtering of a magnitude spectrum.

    |O|_est = |C| * F / (F^2 + epsilon^2); bins where F = 0 stay 0, and the
    zero-frequency bin is zeroed (it carries the illumination background, not
    object information).
    """
    if not epsilon > 0:
        raise UsageError(f"epsilon must be positive, got {epsilon}")
    grid = spectrum.grid
    f = filt.mtf.as_centered()
    est = spectrum.as_centered() * f / (f**2 + epsilon**2)
    est[grid.ny // 2, grid.nx // 2] = 0.0
    out = np.maximum(est, 0.0)
    if not spectrum.centered:
        out = np.fft.ifftshift(out)
    return MagnitudeSpectrum(grid, out, centered=spectrum.centered)


def default_epsilon(filt: FilterModel, fraction: float = 1e-2) -> float:
    return fraction * float(filt.mtf.values.max())
