"""Object recovery from a Fourier-magnitude target with support and
nonnegativity constraints: error-reduction and hybrid input-output steps,
block schedules, and seeded random restarts.

Iterates live in the object domain as real arrays in uncentered layout.
Magnitude targets may be centered or not; they are converted once.  Bins
within ``free_dc_radius`` of zero frequency are left unconstrained, because
the correlation estimator's zero-frequency content carries the illumination
background rather than object information.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, NumericalError, UsageError
from .grid import Grid2D, MagnitudeSpectrum, RealImage
from .patterns import _philox

_STREAM_RESTART = 0x5245_5354


@dataclass(frozen=True)
class SupportMask:
    """Boolean object-domain support, restricted to the central half of the grid."""

    grid: Grid2D
    mask: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        if m.shape != self.grid.shape:
            raise ConfigError("support mask shape does not match grid")
        if not m.any():
            raise ConfigError("support mask has no pixels")
        ny, nx = self.grid.shape
        ys, xs = np.nonzero(m)
        if (
            ys.min() < ny // 4
            or ys.max() >= ny // 4 + ny // 2
            or xs.min() < nx // 4
            or xs.max() >= nx // 4 + nx // 2
        ):
            raise ConfigError("support mask extends beyond the central half of the grid")
        m.setflags(write=False)
        object.__setattr__(self, "mask", m)


def centered_box_mask(grid: Grid2D, height: int, width: int) -> SupportMask:
    """Centered rectangular support of the given size (clipped to the central half)."""
    ny, nx = grid.shape
    h = int(min(max(height, 1), ny // 2))
    w = int(min(max(width, 1), nx // 2))
    mask = np.zeros(grid.shape, dtype=bool)
    y0 = ny // 2 - h // 2
    x0 = nx // 2 - w // 2
    mask[y0 : y0 + h, x0 : x0 + w] = True
    return SupportMask(grid, mask)


@dataclass(frozen=True)
class ScheduleBlock:
    algorithm: str  # "ER" or "HIO"
    iterations: int
    beta: float = 0.9

    def __post_init__(self):
        if self.algorithm not in ("ER", "HIO"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.iterations < 1:
            raise ConfigError("block iterations must be >= 1")
        if not 0 < self.beta <= 1:
            raise ConfigError(f"beta must be in (0, 1], got {self.beta}")


@dataclass(frozen=True)
class RetrievalSchedule:
    """Ordered ER/HIO blocks, restart count, seed, and the free low-frequency radius."""

    blocks: tuple[ScheduleBlock, ...]
    restarts: int = 16
    seed: int = 0
    free_dc_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if not self.blocks:
            raise ConfigError("schedule needs at least one block")
        if self.restarts < 1:
            raise ConfigError("restarts must be >= 1")
        if self.free_dc_radius < 0:
            raise ConfigError("free_dc_radius must be >= 0")

    @property
    def total_iterations(self) -> int:
        return sum(b.iterations for b in self.blocks)


def default_schedule(seed: int = 0, restarts: int = 16, free_dc_radius: float = 1.0,
                     cycles: int = 20, hio_iterations: int = 40, er_iterations: int = 10,
                     beta: float = 0.9, final_er: int = 100) -> RetrievalSchedule:
    """The standard alternation: (HIO, ER) cycles followed by a long ER tail."""
    blocks = []
    for _ in range(cycles):
        blocks.append(ScheduleBlock("HIO", hio_iterations, beta))
        blocks.append(ScheduleBlock("ER", er_iterations, beta))
    blocks.append(ScheduleBlock("ER", final_er, beta))
    return RetrievalSchedule(tuple(blocks), restarts=restarts, seed=seed,
                             free_dc_radius=free_dc_radius)


@dataclass(frozen=True)
class Reconstruction:
    """Best-restart retrieval result."""

    image: RealImage
    fourier_error: float
    restart_id: int
    iterations_run: int
    ef_trace: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.fourier_error < 0:
            raise DataError("fourier_error must be nonnegative")
        if self.ef_trace is not None:
            t = np.asarray(self.ef_trace, dtype=np.float64)
            t.setflags(write=False)
            object.__setattr__(self, "ef_trace", t)


def _free_bin_mask(grid: Grid2D, free_dc_radius: float) -> np.ndarray:
    """Uncentered mask of unconstrained bins: distance from DC < radius."""
    return np.fft.ifftshift(grid.pixel_radius() < free_dc_radius)


def _target_uncentered(target: MagnitudeSpectrum) -> np.ndarray:
    vals = target.as_uncentered()
    if np.any(vals < 0):
        raise DataError("magnitude target must be nonnegative")
    return vals


def project_magnitude(
    iterate: np.ndarray, target: MagnitudeSpectrum, free_dc_radius: float = 0.0
) -> np.ndarray:
    """Replace Fourier magnitudes with the target, keeping the current phase.

    Bins within ``free_dc_radius`` of zero frequency keep their current
    complex value.  Bins with zero current magnitude take the target value at
    zero phase.  Returns the complex object-domain field.
    """
    grid = target.grid
    if iterate.shape != grid.shape:
        raise ConfigError("iterate shape does not match target grid")
    t = _target_uncentered(target)
    g_hat = np.fft.fft2(iterate, norm="ortho")
    mag = np.abs(g_hat)
    phase = np.where(mag > 0, g_hat / np.where(mag > 0, mag, 1.0), 1.0 + 0.0j)
    constrained = t * phase
    if free_dc_radius > 0:
        free = _free_bin_mask(grid, free_dc_radius)
        constrained = np.where(free, g_hat, constrained)
    return np.fft.ifft2(constrained, norm="ortho")


def fourier_error(
    iterate: np.ndarray, target: MagnitudeSpectrum, free_dc_radius: float = 0.0
) -> float:
    """Normalized RMS magnitude mismatch over the constrained bins."""
    t = _target_uncentered(target)
    mag = np.abs(np.fft.fft2(iterate, norm="ortho"))
    keep = ~_free_bin_mask(target.grid, free_dc_radius) if free_dc_radius > 0 else np.ones(t.shape, bool)
    denom = float(np.sum(t[keep] ** 2))
    if denom <= 0:
        raise NumericalError("magnitude target is zero on all constrained bins")
    return float(np.sqrt(np.sum((mag[keep] - t[keep]) ** 2) / denom))


def er_step(
    iterate: np.ndarray,
    target: MagnitudeSpectrum,
    support: SupportMask,
    free_dc_radius: float = 0.0,
    nonneg: bool = True,
) -> np.ndarray:
    """Error reduction: magnitude projection, then clamp to the object constraints."""
    gp = project_magnitude(iterate, target, free_dc_radius).real
    if nonneg:
        gp = np.maximum(gp, 0.0)
    return np.where(support.mask, gp, 0.0)


def hio_step(
    iterate: np.ndarray,
    target: MagnitudeSpectrum,
    support: SupportMask,
    beta: float,
    free_dc_radius: float = 0.0,
) -> np.ndarray:
    """Hybrid input-output: keep feasible pixels, push back on violators."""
    if not 0 <= beta <= 1:
        raise UsageError(f"beta must be in [0, 1], got {beta}")
    gp = project_magnitude(iterate, target, free_dc_radius).real
    feasible = support.mask & (gp >= 0)
    return np.where(feasible, gp, iterate - beta * gp)


def estimate_support(
    spectrum: MagnitudeSpectrum, threshold_fraction: float, margin_px: int = 2
) -> SupportMask:
    """Box support from the autocorrelation support theorem.

    The inverse transform of the squared magnitude is the image
    autocorrelation, whose support is twice the object support per axis:
    threshold it, take the bounding box, halve each dimension, dilate by
    ``margin_px`` per side, and return a centered box (clipped to the
    central half of the grid).
    """
    if not 0 < threshold_fraction < 1:
        raise UsageError(f"threshold_fraction must be in (0,1), got {threshold_fraction}")
    grid = spectrum.grid
    ny, nx = grid.shape
    ac = np.fft.fftshift(np.fft.ifft2(spectrum.as_uncentered() ** 2).real)
    peak = ac[ny // 2, nx // 2]
    if peak <= 0:
        raise NumericalError("autocorrelation peak is not positive; cannot estimate support")
    above = ac >= threshold_fraction * peak
    ys, xs = np.nonzero(above)
    if ys.size == 0:
        raise NumericalError("no autocorrelation pixels above threshold")
    box_h = (ys.max() - ys.min() + 1 + 1) // 2 + 2 * margin_px
    box_w = (xs.max() - xs.min() + 1 + 1) // 2 + 2 * margin_px
    return centered_box_mask(grid, box_h, box_w)


def _initial_iterate(target_u: np.ndarray, seed: int, restart_id: int) -> np.ndarray:
    rng = _philox(seed ^ _STREAM_RESTART, restart_id)
    phases = rng.random(target_u.shape) * (2.0 * np.pi)
    return np.fft.ifft2(target_u * np.exp(1j * phases), norm="ortho").real


def _run_one_restart(
    target: MagnitudeSpectrum,
    schedule: RetrievalSchedule,
    support: SupportMask,
    restart_id: int,
) -> tuple[float, np.ndarray, np.ndarray]:
    target_u = _target_uncentered(target)
    x = _initial_iterate(target_u, schedule.seed, restart_id)
    trace = np.empty(schedule.total_iterations)
    k = 0
    for block in schedule.blocks:
        for _ in range(block.iterations):
            if block.algorithm == "ER":
                x = er_step(x, target, support, schedule.free_dc_radius)
            else:
                x = hio_step(x, target, support, block.beta, schedule.free_dc_radius)
            trace[k] = fourier_error(x, target, schedule.free_dc_radius)
            k += 1
    # Land on the object constraints whatever the last block was; a no-op
    # after ER.
    x = np.where(support.mask, np.maximum(x, 0.0), 0.0)
    return fourier_error(x, target, schedule.free_dc_radius), x, trace


def run(
    target: MagnitudeSpectrum,
    schedule: RetrievalSchedule,
    support: SupportMask,
    workers: int = 1,
) -> Reconstruction:
    """Run the block schedule from ``restarts`` independent random starts.

    Returns the restart with the lowest final Fourier error (ties broken by
    restart id).  Deterministic for a fixed schedule seed, independent of the
    worker count.
    """
    if target.grid != support.grid:
        raise ConfigError("target and support grids differ")
    ids = range(schedule.restarts)

    def one(rid):
        return (*_run_one_restart(target, schedule, support, rid), rid)

    if workers > 1 and schedule.restarts > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, ids))
    else:
        results = [one(rid) for rid in ids]

    err, image, trace, rid = min(results, key=lambda r: (r[0], r[3]))
    return Reconstruction(
        image=RealImage(target.grid, image),
        fourier_error=err,
        restart_id=rid,
        iterations_run=schedule.total_iterations,
        ef_trace=trace,
    )
