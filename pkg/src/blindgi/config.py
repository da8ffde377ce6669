"""Run configuration: dataclasses, defaults, and the flat key = value codec.

Every field maps to a dotted key (``optical.z_o``, ``ensemble.count``, ...).
CLI flags use the same keys with dashes (``--optical.z-o``); flags override
file values which override defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConfigError
from .forward import NoiseModel, OpticalConfig
from .grid import Grid2D
from .patterns import EnsembleSpec
from .retrieval import RetrievalSchedule, default_schedule

COMPENSATION_MODES = ("direct", "compensated")


@dataclass(frozen=True)
class SupportPolicy:
    """How the reconstruction support box is chosen."""

    threshold_fraction: float = 0.04
    margin_px: int = 2
    box: str = "estimate"  # "estimate", "half", or "HxW" fixed box

    def __post_init__(self):
        if not 0 < self.threshold_fraction < 1:
            raise ConfigError("support.threshold_fraction must be in (0,1)")
        if self.margin_px < 0:
            raise ConfigError("support.margin_px must be >= 0")
        if self.box not in ("estimate", "half") and "x" not in self.box:
            raise ConfigError(f"support.box must be 'estimate', 'half' or 'HxW', got {self.box!r}")


@dataclass(frozen=True)
class ScheduleConfig:
    """Parametric form of the standard (HIO, ER) alternation schedule."""

    cycles: int = 20
    hio_iterations: int = 40
    er_iterations: int = 10
    beta: float = 0.9
    final_er: int = 100
    restarts: int = 16
    seed: int = 2024
    free_dc_radius: float = 1.0

    def build(self) -> RetrievalSchedule:
        return default_schedule(
            seed=self.seed,
            restarts=self.restarts,
            free_dc_radius=self.free_dc_radius,
            cycles=self.cycles,
            hio_iterations=self.hio_iterations,
            er_iterations=self.er_iterations,
            beta=self.beta,
            final_er=self.final_er,
        )


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run needs, serializable to flat text."""

    grid_nx: int = 64
    grid_ny: int = 64
    grid_pitch: float = 12.5e-6

    wavelength: float = 532e-9
    z_m: float = 0.07
    z_l: float = 0.25
    z_o: float = 0.3
    focal_length: float = 0.025
    aperture_diameter: float = 6e-3
    dmd_pitch: float = 7.4e-6
    case: str = "scattering"

    ensemble_kind: str = "random-binary"
    ensemble_count: int = 2**14
    ensemble_fill: float = 0.5
    ensemble_seed: int = 101

    noise_kind: str = "none"
    noise_snr_db: float = 20.0
    noise_photons: float = 1e6

    psf_seed: int = 7

    object_source: str = "letter"

    compensation_mode: str = "direct"
    epsilon_fraction: float = 1e-2

    support: SupportPolicy = field(default_factory=SupportPolicy)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)

    def __post_init__(self):
        if self.compensation_mode not in COMPENSATION_MODES:
            raise ConfigError(
                f"compensation.mode must be one of {COMPENSATION_MODES}, got {self.compensation_mode!r}"
            )

    def grid(self) -> Grid2D:
        return Grid2D(nx=self.grid_nx, ny=self.grid_ny, pitch=self.grid_pitch)

    def optical(self) -> OpticalConfig:
        return OpticalConfig(
            wavelength=self.wavelength,
            z_m=self.z_m,
            z_l=self.z_l,
            z_o=self.z_o,
            focal_length=self.focal_length,
            aperture_diameter=self.aperture_diameter,
            dmd_pitch=self.dmd_pitch,
            object_grid=self.grid(),
            case=self.case,
        )

    def ensemble(self) -> EnsembleSpec:
        return EnsembleSpec(
            kind=self.ensemble_kind,
            grid=self.grid(),
            count=self.ensemble_count,
            fill_fraction=self.ensemble_fill,
            seed=self.ensemble_seed,
        )

    def noise(self) -> NoiseModel:
        return NoiseModel(
            kind=self.noise_kind, snr_db=self.noise_snr_db, photons=self.noise_photons
        )


# dotted key -> (attribute path, parser)
_BOOL = {"true": True, "false": False, "1": True, "0": False}


def _parse_bool(s: str) -> bool:
    try:
        return _BOOL[s.strip().lower()]
    except KeyError:
        raise ConfigError(f"expected a boolean, got {s!r}") from None


KEYMAP: dict[str, tuple[str, type | object]] = {
    "grid.nx": ("grid_nx", int),
    "grid.ny": ("grid_ny", int),
    "grid.pitch": ("grid_pitch", float),
    "optical.wavelength": ("wavelength", float),
    "optical.z_m": ("z_m", float),
    "optical.z_l": ("z_l", float),
    "optical.z_o": ("z_o", float),
    "optical.focal_length": ("focal_length", float),
    "optical.aperture_diameter": ("aperture_diameter", float),
    "optical.dmd_pitch": ("dmd_pitch", float),
    "optical.case": ("case", str),
    "ensemble.kind": ("ensemble_kind", str),
    "ensemble.count": ("ensemble_count", int),
    "ensemble.fill_fraction": ("ensemble_fill", float),
    "ensemble.seed": ("ensemble_seed", int),
    "noise.kind": ("noise_kind", str),
    "noise.snr_db": ("noise_snr_db", float),
    "noise.photons": ("noise_photons", float),
    "psf_seed": ("psf_seed", int),
    "object": ("object_source", str),
    "compensation.mode": ("compensation_mode", str),
    "compensation.epsilon_fraction": ("epsilon_fraction", float),
    "support.threshold_fraction": ("support.threshold_fraction", float),
    "support.margin_px": ("support.margin_px", int),
    "support.box": ("support.box", str),
    "schedule.cycles": ("schedule.cycles", int),
    "schedule.hio_iterations": ("schedule.hio_iterations", int),
    "schedule.er_iterations": ("schedule.er_iterations", int),
    "schedule.beta": ("schedule.beta", float),
    "schedule.final_er": ("schedule.final_er", int),
    "schedule.restarts": ("schedule.restarts", int),
    "schedule.seed": ("schedule.seed", int),
    "schedule.free_dc_radius": ("schedule.free_dc_radius", float),
}


def config_to_entries(cfg: RunConfig) -> dict[str, str]:
    """Flatten a RunConfig to dotted-key strings (repr-formatted floats)."""
    entries = {}
    for key, (path, _) in KEYMAP.items():
        obj = cfg
        *heads, leaf = path.split(".")
        for head in heads:
            obj = getattr(obj, head)
        value = getattr(obj, leaf)
        entries[key] = repr(value) if isinstance(value, float) else str(value)
    return entries


def config_from_entries(entries: dict[str, str], base: RunConfig | None = None) -> RunConfig:
    """Build a RunConfig from dotted-key strings, over defaults or a base config."""
    base = base or RunConfig()
    top: dict[str, object] = {}
    support: dict[str, object] = {}
    schedule: dict[str, object] = {}
    for key, raw in entries.items():
        if key not in KEYMAP:
            raise ConfigError(f"unknown config key {key!r}")
        path, parser = KEYMAP[key]
        if parser is bool:
            parser = _parse_bool
        try:
            value = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        if path.startswith("support."):
            support[path.split(".", 1)[1]] = value
        elif path.startswith("schedule."):
            schedule[path.split(".", 1)[1]] = value
        else:
            top[path] = value

    from dataclasses import replace

    new_support = replace(base.support, **support) if support else base.support
    new_schedule = replace(base.schedule, **schedule) if schedule else base.schedule
    return replace(base, support=new_support, schedule=new_schedule, **top)
