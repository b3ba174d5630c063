"""Edge strength/direction maps and the column-wise decay filter.

An edge map stores, per pixel, a strength rho in [0, 1] and a direction
theta in [0, 2*pi) giving the edge *tangent* (edge-parallel) angle.  The
matcher consumes nothing else, so any detector producing this pair works;
here a Gaussian-smoothed multi-channel gradient is reduced through the
color structure tensor.

Rasters are numpy arrays of shape (H, W, 3), dtype uint8, RGB order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Union

import numpy as np
from PIL import Image
from scipy import ndimage

from .errors import EmptyImage

RasterImage = np.ndarray  # (H, W, 3) uint8


@dataclass
class EdgeMap:
    """Per-pixel edge strength (rho) and tangent direction (theta).

    rho is in [0, 1]; theta is in [0, 2*pi) and is stored as 0 wherever
    rho == 0 (direction is meaningless without an edge).
    """

    strength: np.ndarray
    direction: np.ndarray

    def __post_init__(self) -> None:
        self.strength = np.asarray(self.strength, dtype=np.float64)
        self.direction = np.asarray(self.direction, dtype=np.float64)
        if self.strength.ndim != 2 or self.strength.shape != self.direction.shape:
            raise ValueError(
                f"strength {self.strength.shape} and direction "
                f"{self.direction.shape} must be equal 2-D shapes"
            )

    @property
    def height(self) -> int:
        return self.strength.shape[0]

    @property
    def width(self) -> int:
        return self.strength.shape[1]

    @classmethod
    def zeros(cls, height: int, width: int) -> "EdgeMap":
        return cls(np.zeros((height, width)), np.zeros((height, width)))

    def copy(self) -> "EdgeMap":
        return EdgeMap(self.strength.copy(), self.direction.copy())


@dataclass
class EdgeDetectConfig:
    """Detector parameters: Gaussian sigma and the minimum-strength cut."""

    gaussian_sigma: float = 1.0
    strength_threshold: float = 0.3

    def __post_init__(self) -> None:
        if self.gaussian_sigma <= 0:
            raise ValueError("gaussian_sigma must be > 0")
        if not 0.0 <= self.strength_threshold <= 1.0:
            raise ValueError("strength_threshold must be in [0, 1]")


@dataclass
class FilterConfig:
    """Column-decay parameters: base b in (0, 1] and segment length n >= 1.

    ``restart_per_run`` switches the decay index to restart at every
    zero-separated run instead of counting cumulatively down the column.
    """

    base: float = 0.7
    max_segment_length: int = 2
    restart_per_run: bool = False

    def __post_init__(self) -> None:
        if not 0.0 < self.base <= 1.0:
            raise ValueError("base must be in (0, 1]")
        if self.max_segment_length < 1:
            raise ValueError("max_segment_length must be >= 1")


@lru_cache(maxsize=8)
def _peak_gradient_response(sigma: float) -> float:
    """Largest per-channel gradient magnitude a [0, 1] image can produce.

    Equals the positive-coefficient sum of the sampled derivative-of-Gaussian
    kernel (attained by a full-contrast axis-aligned step), so dividing by it
    makes edge strengths comparable across images.
    """
    radius = int(4.0 * sigma + 0.5) + 1
    size = 2 * radius + 1
    delta = np.zeros((size, size))
    delta[radius, radius] = 1.0
    kernel = ndimage.gaussian_filter(delta, sigma, order=(0, 1), mode="constant")
    return float(kernel[kernel > 0].sum())


def detect_edges(image: np.ndarray, config: EdgeDetectConfig) -> EdgeMap:
    """Detect edges in an RGB raster using all three color channels.

    Per channel, the image is differentiated with derivative-of-Gaussian
    filters; the channel gradients are combined through the 2x2 color
    structure tensor whose principal eigenvalue and axis give the edge
    strength and the gradient orientation.  Strength is normalized so a
    full black/white step peaks at 1.0 regardless of the input image, then
    pixels below ``strength_threshold`` are zeroed.
    """
    arr = np.asarray(image)
    if arr.size == 0:
        raise EmptyImage("cannot detect edges in an empty image")
    if arr.ndim == 2:
        arr = arr[:, :, None].repeat(3, axis=2)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) raster, got shape {arr.shape}")
    if np.issubdtype(arr.dtype, np.integer):
        channels = arr.astype(np.float64) / 255.0
    else:
        channels = arr.astype(np.float64)

    sigma = config.gaussian_sigma
    jxx = np.zeros(arr.shape[:2])
    jyy = np.zeros(arr.shape[:2])
    jxy = np.zeros(arr.shape[:2])
    for c in range(3):
        gx = ndimage.gaussian_filter(channels[:, :, c], sigma, order=(0, 1), mode="nearest")
        gy = ndimage.gaussian_filter(channels[:, :, c], sigma, order=(1, 0), mode="nearest")
        jxx += gx * gx
        jyy += gy * gy
        jxy += gx * gy

    # Principal eigenvalue/axis of the structure tensor.
    diff = jxx - jyy
    lam = 0.5 * (jxx + jyy + np.sqrt(diff * diff + 4.0 * jxy * jxy))
    norm = np.sqrt(3.0) * _peak_gradient_response(sigma)
    strength = np.clip(np.sqrt(np.maximum(lam, 0.0)) / norm, 0.0, 1.0)

    grad_angle = 0.5 * np.arctan2(2.0 * jxy, diff)
    direction = np.mod(grad_angle + 0.5 * np.pi, 2.0 * np.pi)

    strength[strength < config.strength_threshold] = 0.0
    direction[strength == 0.0] = 0.0
    return EdgeMap(strength, direction)


def filter_edges(edges: EdgeMap, config: FilterConfig) -> EdgeMap:
    """Attenuate lower edges: column by column, nonzero runs are chopped
    into segments of at most ``max_segment_length`` pixels and the i-th
    segment from the top is multiplied by base**(i-1).

    The segment index counts cumulatively down the whole column across
    zero-separated runs (so clutter under a mountain boundary decays even
    when separated from it), unless ``restart_per_run`` is set.  Zero
    pixels and all directions are preserved exactly.
    """
    if config.base == 1.0:
        return edges.copy()
    strength = edges.strength.copy()
    n = config.max_segment_length
    height = strength.shape[0]
    for col in range(strength.shape[1]):
        column = strength[:, col]
        nz = column > 0
        if not nz.any():
            continue
        segment = 0
        row = 0
        while row < height:
            if not nz[row]:
                row += 1
                continue
            end = row
            while end < height and nz[end]:
                end += 1
            if config.restart_per_run:
                segment = 0
            for start in range(row, end, n):
                column[start : min(start + n, end)] *= config.base**segment
                segment += 1
            row = end
    return EdgeMap(strength, edges.direction.copy())


# -- raster and edge-map IO ----------------------------------------------------

def load_raster(path: Union[str, Path]) -> RasterImage:
    """Load a PNG or JPEG file as an (H, W, 3) uint8 RGB array."""
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def save_raster(image: RasterImage, path: Union[str, Path]) -> None:
    Image.fromarray(np.asarray(image, dtype=np.uint8)).save(path)


def resize_raster(image: RasterImage, scale: float) -> RasterImage:
    """Uniformly rescale a raster (bilinear); identity when dims are unchanged."""
    height, width = image.shape[:2]
    new_w = max(1, int(round(width * scale)))
    new_h = max(1, int(round(height * scale)))
    if (new_w, new_h) == (width, height):
        return image
    resized = Image.fromarray(np.asarray(image, dtype=np.uint8)).resize(
        (new_w, new_h), Image.BILINEAR
    )
    return np.asarray(resized)


def save_strength_png(edges: EdgeMap, path: Union[str, Path]) -> None:
    """Dump an edge map's strength channel as an 8-bit grayscale PNG."""
    gray = np.round(np.clip(edges.strength, 0.0, 1.0) * 255.0).astype(np.uint8)
    Image.fromarray(gray, mode="L").save(path)
