"""Scoring reconstructions against ground truth, modulo the ambiguities a
Fourier magnitude cannot see (circular translation and point reflection),
plus the two-point resolution probe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericalError, UsageError
from .grid import RealImage, point_reflect


@dataclass(frozen=True)
class AlignmentResult:
    """Best match over circular shifts x {identity, point reflection}.

    ``shift`` is the (dy, dx) circular displacement of the (possibly
    reflected) reconstruction relative to the truth: rolling the transformed
    reconstruction by the negated shift aligns it with the truth.
    """

    shift: tuple[int, int]
    flipped: bool
    pearson: float


def _pearson_maps(recon: np.ndarray, truth: np.ndarray) -> list[np.ndarray]:
    """Pearson correlation as a function of shift, for each flip state."""
    npix = truth.size
    t = truth - truth.mean()
    t_std = truth.std()
    f_t_conj = np.conj(np.fft.fft2(t))
    maps = []
    for flipped in (False, True):
        x = point_reflect(recon) if flipped else recon
        x_std = x.std()
        # cross[s] = sum_r t(r) x(r + s): peaks at the displacement of x
        cross = np.fft.ifft2(f_t_conj * np.fft.fft2(x - x.mean())).real
        maps.append(cross / (npix * t_std * x_std))
    return maps


def align_and_score(recon: RealImage, truth: RealImage) -> AlignmentResult:
    """Maximize Pearson correlation over all circular shifts and point reflection.

    Ties break toward unflipped and then the lexicographically smallest
    (dy, dx) shift.
    """
    if recon.grid != truth.grid:
        raise ConfigError("reconstruction and truth grids differ")
    if recon.values.std() == 0 or truth.values.std() == 0:
        raise NumericalError("Pearson correlation undefined for zero-variance input")
    maps = _pearson_maps(recon.values, truth.values)
    best = max(m.max() for m in maps)
    for flipped, m in zip((False, True), maps):
        hits = np.argwhere(m == best)
        if hits.size:
            dy, dx = map(int, hits[0])
            return AlignmentResult(shift=(dy, dx), flipped=flipped, pearson=float(best))
    raise NumericalError("alignment search failed")  # pragma: no cover


def apply_alignment(recon: RealImage, result: AlignmentResult) -> RealImage:
    """Transform the reconstruction onto the truth's frame."""
    vals = point_reflect(recon.values) if result.flipped else recon.values
    return RealImage(recon.grid, np.roll(vals, (-result.shift[0], -result.shift[1]), axis=(0, 1)))


def two_point_contrast(
    aligned: RealImage, y: int, x_left: int, x_right: int
) -> float:
    """Rayleigh-style dip contrast along the row through two point sources.

    contrast = (peak - midpoint dip) / peak with peak the mean of the values
    at the two point positions; negative when the profile humps in between.
    """
    if x_right <= x_left:
        raise UsageError("x_right must exceed x_left")
    profile = aligned.values[y]
    peak = 0.5 * (profile[x_left] + profile[x_right])
    if peak <= 0:
        return 0.0
    mid = x_left + (x_right - x_left) / 2.0
    lo, hi = int(np.floor(mid)), int(np.ceil(mid))
    dip = min(profile[lo], profile[hi])
    return float((peak - dip) / peak)


def is_resolved(contrast: float, dip_threshold: float = 0.2) -> bool:
    return contrast >= dip_threshold
