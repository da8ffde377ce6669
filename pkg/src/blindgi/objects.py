"""Built-in binary test objects.

All builders center the object on the grid and keep it inside the central
half, which the forward model requires.  ``from_spec`` parses the compact
"name(args)" strings used in config files, e.g. ``two-points(9)`` or
``rectangle(20,12)``.
"""

from __future__ import annotations

import re

import numpy as np

from .errors import ConfigError
from .grid import Grid2D, RealImage


def _blank(grid: Grid2D) -> np.ndarray:
    return np.zeros(grid.shape)


def _check_fits(grid: Grid2D, height: int, width: int, what: str):
    if height > grid.ny // 2 or width > grid.nx // 2:
        raise ConfigError(
            f"{what} of {height}x{width} px does not fit the central half "
            f"of a {grid.ny}x{grid.nx} grid"
        )


def letter(grid: Grid2D, height: int | None = None, stroke: int | None = None) -> RealImage:
    """A blocky hollow digit-two glyph built from five bar segments."""
    h = height if height is not None else max(8, (grid.ny * 7) // 16)
    t = stroke if stroke is not None else max(2, h // 7)
    w = max(t + 2, (h * 2) // 3)
    _check_fits(grid, h, w, "letter glyph")
    img = _blank(grid)
    y0 = grid.ny // 2 - h // 2
    x0 = grid.nx // 2 - w // 2
    img[y0 : y0 + t, x0 : x0 + w] = 1  # top bar
    img[y0 : y0 + h // 2, x0 + w - t : x0 + w] = 1  # upper-right stem
    ym = y0 + h // 2 - t // 2
    img[ym : ym + t, x0 : x0 + w] = 1  # middle bar
    img[y0 + h // 2 : y0 + h, x0 : x0 + t] = 1  # lower-left stem
    img[y0 + h - t : y0 + h, x0 : x0 + w] = 1  # bottom bar
    return RealImage(grid, img)


def two_points(grid: Grid2D, separation_px: int) -> RealImage:
    """Two unit pixels on the center row, separated along x."""
    if separation_px < 1:
        raise ConfigError(f"separation must be >= 1 px, got {separation_px}")
    _check_fits(grid, 1, separation_px + 1, "two-point pair")
    img = _blank(grid)
    cy = grid.ny // 2
    x_left = grid.nx // 2 - separation_px // 2
    img[cy, x_left] = 1
    img[cy, x_left + separation_px] = 1
    return RealImage(grid, img)


def two_point_columns(grid: Grid2D, separation_px: int) -> tuple[int, int, int]:
    """Row and column indices (y, x_left, x_right) used by :func:`two_points`."""
    x_left = grid.nx // 2 - separation_px // 2
    return grid.ny // 2, x_left, x_left + separation_px


def rectangle(grid: Grid2D, width: int, height: int) -> RealImage:
    """A filled centered rectangle."""
    if width < 1 or height < 1:
        raise ConfigError("rectangle needs positive width and height")
    _check_fits(grid, height, width, "rectangle")
    img = _blank(grid)
    y0 = grid.ny // 2 - height // 2
    x0 = grid.nx // 2 - width // 2
    img[y0 : y0 + height, x0 : x0 + width] = 1
    return RealImage(grid, img)


def double_slit(
    grid: Grid2D, slit_width: int = 2, slit_height: int | None = None, gap: int = 6
) -> RealImage:
    """Two parallel vertical slits separated by a gap."""
    h = slit_height if slit_height is not None else max(8, grid.ny // 4)
    total_w = 2 * slit_width + gap
    _check_fits(grid, h, total_w, "double slit")
    img = _blank(grid)
    y0 = grid.ny // 2 - h // 2
    x0 = grid.nx // 2 - total_w // 2
    img[y0 : y0 + h, x0 : x0 + slit_width] = 1
    img[y0 : y0 + h, x0 + slit_width + gap : x0 + total_w] = 1
    return RealImage(grid, img)


_SPEC_RE = re.compile(r"^\s*([a-z][a-z0-9-]*)\s*(?:\(([^)]*)\))?\s*$")

BUILTIN_NAMES = ("letter", "two-points", "rectangle", "double-slit")


def from_spec(grid: Grid2D, spec: str) -> RealImage:
    """Build an object from a "name" or "name(arg, ...)" string."""
    m = _SPEC_RE.match(spec)
    if not m:
        raise ConfigError(f"cannot parse object spec {spec!r}")
    name, argstr = m.group(1), m.group(2)
    args = [int(a) for a in argstr.split(",")] if argstr else []
    try:
        if name == "letter":
            return letter(grid, *args)
        if name == "two-points":
            if not args:
                raise ConfigError("two-points needs a separation, e.g. two-points(9)")
            return two_points(grid, *args)
        if name == "rectangle":
            if len(args) != 2:
                raise ConfigError("rectangle needs width and height, e.g. rectangle(20,12)")
            return rectangle(grid, args[0], args[1])
        if name == "double-slit":
            return double_slit(grid, *args)
    except TypeError as exc:
        raise ConfigError(f"bad arguments for object {name!r}: {argstr!r}") from exc
    raise ConfigError(f"unknown object {name!r}; built-ins are {BUILTIN_NAMES}")
