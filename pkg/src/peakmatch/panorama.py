"""Panorama loading and fully synthetic panorama/photo pairs.

A panorama is a 360-degree cylindrical raster at ``q`` pixels/degree (width
= round(360*q)) plus a list of named peak coordinates.  Real renders are
consumed from files; for testing, ``gen_synthetic_case`` builds seeded
ridgeline terrain with known ground truth: wrap-around midpoint-displacement
skylines rendered as flat silhouettes (edge-poor, like real mountains),
a photo cropped at a random azimuth, optional recoloring and clutter noise,
and peaks placed on skyline local maxima.

Case directories hold {panorama.png, photo.png, peaks.json, truth.json}.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .edges import RasterImage, load_raster, save_raster
from .errors import MalformedPeaks, WidthMismatch
from .evaluation import GroundTruth
from .matching import Alignment, offset_to_azimuth
from .peaks import Peak


@dataclass
class Panorama:
    """Cylindrical render raster, its angular resolution, and named peaks."""

    raster: RasterImage
    q: float  # pixels per degree
    peaks: list[Peak] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise ValueError("q must be > 0")
        expected = round(360.0 * self.q)
        if self.raster.shape[1] != expected:
            raise WidthMismatch(
                f"panorama is {self.raster.shape[1]} px wide; q={self.q} "
                f"pixels/degree requires {expected}"
            )

    @property
    def width(self) -> int:
        return self.raster.shape[1]

    @property
    def height(self) -> int:
        return self.raster.shape[0]


@dataclass
class SynthConfig:
    """Knobs of the synthetic case generator (deterministic in ``seed``)."""

    seed: int
    q: float = 20.0
    layers: int = 3
    photo_fov: float = 40.0  # degrees
    noise_density: float = 0.0
    peak_count: int = 5
    pano_height: int = 260
    recolor: bool = False

    def __post_init__(self) -> None:
        if self.layers < 1:
            raise ValueError("layers must be >= 1")
        if not 0.0 < self.photo_fov <= 360.0:
            raise ValueError("photo_fov must be in (0, 360]")
        if not 0.0 <= self.noise_density <= 1.0:
            raise ValueError("noise_density must be in [0, 1]")


@dataclass
class SynthCase:
    """A generated panorama/photo pair with its ground truth."""

    panorama: Panorama
    photo: RasterImage
    truth_alignment: Alignment
    truth_pairs: list[tuple[tuple[float, float], tuple[float, float]]]
    fov_deg: float
    noise_density: float = 0.0
    degenerate: bool = False  # 360-degree photo: dx defined only mod the cylinder


@dataclass
class CaseData:
    """Contents of one on-disk case directory."""

    photo: RasterImage
    panorama: Panorama
    truth: GroundTruth
    fov_deg: float
    q: float
    truth_alignment: Alignment | None = None


def load_peaks(path: Union[str, Path]) -> list[Peak]:
    """Parse a JSON array of {name, x, y} peak records (empty file = none)."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return []
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedPeaks(f"{path}: not valid JSON: {exc}") from None
    if not isinstance(raw, list):
        raise MalformedPeaks(f"{path}: expected a JSON array of peaks")
    peaks = []
    for i, item in enumerate(raw):
        try:
            peaks.append(Peak(str(item["name"]), int(item["x"]), int(item["y"])))
        except (TypeError, KeyError, ValueError):
            raise MalformedPeaks(
                f"{path}: entry {i} is not a {{name, x, y}} record: {item!r}"
            ) from None
    return peaks


def load_panorama(
    image_path: Union[str, Path], peaks_path: Union[str, Path], q: float
) -> Panorama:
    """Load a pre-rendered panorama image and its peak list.

    The image width must equal round(360*q); peaks must lie inside the
    raster.
    """
    raster = load_raster(image_path)
    peaks = load_peaks(peaks_path)
    pano = Panorama(raster, q, peaks)
    for peak in peaks:
        if not (0 <= peak.pano_x < pano.width and 0 <= peak.pano_y < pano.height):
            raise MalformedPeaks(
                f"{peaks_path}: peak {peak.name!r} at ({peak.pano_x}, "
                f"{peak.pano_y}) is outside the {pano.width}x{pano.height} render"
            )
    return pano


# -- synthetic terrain ----------------------------------------------------------

# Layer palettes, index 0 = sky.  Luminance descends toward the viewer
# (farther = lighter) while hues spread so that EVERY pair of tones keeps a
# near-equal multi-channel contrast: if some boundary were much stronger
# than the rest, a wrong offset landing edges on it would outscore an exact
# match on a weaker one.
_PANO_PALETTE = [
    (242, 244, 223),  # sky
    (64, 202, 244),
    (156, 41, 230),
    (105, 170, 67),
    (212, 70, 76),
    (60, 90, 120),
]
_PHOTO_PALETTE = [
    (220, 217, 235),  # sky
    (187, 246, 53),
    (33, 205, 176),
    (142, 64, 130),
    (130, 150, 60),
    (90, 60, 50),
]
# Foreground clutter tones (alternating stripes, both far from the layer
# palette so every clutter boundary is a strong edge).
_CLUTTER_DARK = (18, 22, 14)
_CLUTTER_LIGHT = (238, 240, 228)


def _circular_ridgeline(rng: np.random.Generator, width: int) -> np.ndarray:
    """Midpoint-displacement heights on a circular domain, scaled to [-1, 1].

    Neighboring columns (including the wrap pair W-1 / 0) differ by at most
    the final displacement step, so the line is cylinder-continuous.
    """
    n = 256
    while n < width:
        n *= 2
    heights = np.zeros(n)
    step = n
    amp = 1.0
    while step > 1:
        half = step // 2
        starts = np.arange(0, n, step)
        mids = starts + half
        wrapped_ends = (starts + step) % n
        heights[mids] = 0.5 * (
            heights[starts] + heights[wrapped_ends]
        ) + rng.uniform(-amp, amp, size=mids.size)
        amp *= 0.55
        step = half
    # Linear resample onto the panorama width, keeping the wrap continuous.
    xs = np.arange(width) * (n / width)
    i0 = np.floor(xs).astype(int) % n
    frac = xs - np.floor(xs)
    line = heights[i0] * (1.0 - frac) + heights[(i0 + 1) % n] * frac
    peak = np.max(np.abs(line))
    return line / peak if peak > 0 else line


def _render_silhouettes(
    ridges: list[np.ndarray], height: int, palette: list[tuple[int, int, int]]
) -> RasterImage:
    """Paint layers far to near over the sky color (painter's order)."""
    width = ridges[0].size
    img = np.empty((height, width, 3), dtype=np.uint8)
    img[:] = palette[0]
    rows = np.arange(height)[:, None]
    for i, ridge in enumerate(ridges):
        mask = rows >= np.round(ridge)[None, :]
        img[mask] = palette[1 + i % (len(palette) - 1)]
    return img


def _skyline_peaks(
    ridges: list[np.ndarray], count: int, width: int
) -> list[Peak]:
    """Pick up to ``count`` visible ridgeline local maxima, most prominent first."""
    window = max(5, width // 100)
    neighborhood = (np.arange(width)[:, None] + np.arange(-window, window + 1)) % width
    candidates: list[tuple[float, int, int]] = []  # (prominence, x, layer)
    for i, ridge in enumerate(ridges):
        around = ridge[neighborhood]  # (W, 2*window+1), circular
        is_top = ridge <= around.min(axis=1) + 1e-9  # smaller y = higher terrain
        prominence = around.max(axis=1) - ridge
        occluded = np.zeros(width, dtype=bool)
        for near in ridges[i + 1 :]:
            occluded |= near <= ridge
        for x in np.flatnonzero(is_top & ~occluded & (prominence > 1.0)):
            candidates.append((float(prominence[x]), int(x), i))
    candidates.sort(key=lambda c: (-c[0], c[1]))
    chosen: list[tuple[int, int]] = []  # (x, y)
    min_sep = 2 * window
    for _, x, layer in candidates:
        if len(chosen) >= count:
            break
        too_close = any(
            min(abs(x - cx), width - abs(x - cx)) < min_sep for cx, _ in chosen
        )
        if not too_close:
            chosen.append((x, int(round(ridges[layer][x]))))
    chosen.sort()
    return [Peak(f"peak-{i + 1:02d}", x, y) for i, (x, y) in enumerate(chosen)]


def _recolor(photo: RasterImage) -> RasterImage:
    """Swap the panorama palette for the photo palette (exact lookup)."""
    out = photo.copy()
    for src, dst in zip(_PANO_PALETTE, _PHOTO_PALETTE):
        mask = np.all(photo == np.array(src, dtype=np.uint8), axis=2)
        out[mask] = dst
    return out


def _add_noise(
    photo: RasterImage, density: float, rng: np.random.Generator
) -> None:
    """Clutter the lower third: stacked foreground silhouettes plus blobs.

    The silhouettes are nested false ridgelines in alternating contrasting
    tones, imitating edge-rich foreground objects (treelines, terraces,
    roofs): shaped like mountain contours but absent from the render, they
    attract a wrong match when left unfiltered, while their vertical
    stacking makes them decay fast under column filtering.
    """
    height, width = photo.shape[:2]
    floor = 2 * height // 3 + 2
    rows = np.arange(height)[:, None]
    cols = np.arange(width)[None, :]

    # Foreground silhouette filled with dense stripes parallel to its crest:
    # a stack of strong false ridge edges a few pixels apart.
    crest = height * 0.72 + height * 0.05 * _circular_ridgeline(rng, width)
    crest = np.clip(crest, floor, height - 1)
    period = max(2, int(round(6.0 - 4.0 * density)))
    depth = rows - np.round(crest)[None, :]
    inside = depth >= 0
    stripe = (depth // period) % 2 == 0
    photo[inside & stripe] = _CLUTTER_DARK
    photo[inside & ~stripe] = _CLUTTER_LIGHT

    count = int(round(density * width * 0.35))
    for _ in range(count):
        cx = int(rng.integers(0, width))
        cy = int(rng.integers(floor, height))
        dark = rng.random() < 0.5
        color = rng.integers(0, 60, size=3) if dark else rng.integers(200, 256, size=3)
        if rng.random() < 0.3:  # vertical stroke
            h = int(rng.integers(8, 22))
            w = int(rng.integers(2, 5))
            top = max(floor, cy - h)
            photo[top : cy + 1, max(0, cx - w // 2) : cx + w // 2 + 1] = color
        else:  # ellipse
            rx = int(rng.integers(2, 8))
            ry = int(rng.integers(2, 8))
            mask = ((cols - cx) / rx) ** 2 + ((rows - cy) / ry) ** 2 <= 1.0
            mask[:floor] = False
            photo[mask] = color


def gen_synthetic_case(cfg: SynthConfig) -> SynthCase:
    """Build one seeded panorama/photo pair with exact ground truth.

    Farther ridge layers sit higher on the image and lighter in tone; the
    photo is a crop at a random azimuth (and a small random vertical
    offset), optionally recolored to a distinct palette and cluttered with
    noise blobs in its lower third.
    """
    rng = np.random.default_rng(cfg.seed)
    width = round(360.0 * cfg.q)
    height = cfg.pano_height

    # A slowly varying circular envelope (staggered per layer) concentrates
    # each layer's relief into distinct massifs, so different azimuths show
    # genuinely different skylines instead of statistically identical noise.
    phase0 = rng.uniform(0.0, 2.0 * np.pi)
    angles = 2.0 * np.pi * np.arange(width) / width
    ridges = []
    for i in range(cfg.layers):
        frac = i / max(1, cfg.layers - 1) if cfg.layers > 1 else 0.5
        base = height * (0.30 + 0.28 * frac)  # nearer layers sit lower
        amplitude = height * 0.18
        envelope = 0.5 + 0.5 * (
            0.5 + 0.5 * np.cos(angles - phase0 - 2.0 * np.pi * i / cfg.layers)
        )
        line = base + amplitude * envelope * _circular_ridgeline(rng, width)
        ridges.append(np.clip(line, 2, height - 3))

    pano_raster = _render_silhouettes(ridges, height, _PANO_PALETTE)
    peaks = _skyline_peaks(ridges, cfg.peak_count, width)
    panorama = Panorama(pano_raster, cfg.q, peaks)

    photo_w = round(cfg.photo_fov * cfg.q)
    photo_h = int(round(height * 0.8))
    x0 = int(rng.integers(0, width))
    y0 = int(rng.integers(0, max(1, int(height * 0.1) + 1)))
    cols = (x0 + np.arange(photo_w)) % width
    photo = pano_raster[y0 : y0 + photo_h, cols].copy()
    if cfg.recolor:
        photo = _recolor(photo)
    if cfg.noise_density > 0:
        _add_noise(photo, cfg.noise_density, rng)

    truth_alignment = Alignment(
        dx=x0,
        dy=y0,
        scale=1.0,
        score=0.0,
        azimuth_deg=offset_to_azimuth(x0, photo_w, cfg.q),
    )

    skyline = np.min(np.stack(ridges), axis=0)  # visible top edge per column
    pairs: list[tuple[tuple[float, float], tuple[float, float]]] = []
    for peak in peaks:
        px = (peak.pano_x - x0) % width
        py = peak.pano_y - y0
        if px < photo_w and 0 <= py < photo_h:
            pairs.append(((float(px), float(py)), (float(peak.pano_x), float(peak.pano_y))))
    for frac in (1 / 6, 1 / 2, 5 / 6):  # guaranteed skyline samples
        px = int(photo_w * frac)
        rx = (x0 + px) % width
        ry = float(np.round(skyline[rx]))
        pairs.append(((float(px), ry - y0), (float(rx), ry)))

    return SynthCase(
        panorama=panorama,
        photo=photo,
        truth_alignment=truth_alignment,
        truth_pairs=pairs,
        fov_deg=cfg.photo_fov,
        noise_density=cfg.noise_density,
        degenerate=cfg.photo_fov >= 360.0,
    )


# -- case directories ------------------------------------------------------------

def write_case(case: SynthCase, out_dir: Union[str, Path]) -> Path:
    """Write {panorama.png, photo.png, peaks.json, truth.json} into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_raster(case.panorama.raster, out / "panorama.png")
    save_raster(case.photo, out / "photo.png")
    peaks_json = [
        {"name": p.name, "x": p.pano_x, "y": p.pano_y} for p in case.panorama.peaks
    ]
    (out / "peaks.json").write_text(
        json.dumps(peaks_json, indent=2, sort_keys=True), encoding="utf-8"
    )
    truth = {
        "q": case.panorama.q,
        "fov_deg": case.fov_deg,
        "degenerate": case.degenerate,
        "alignment": case.truth_alignment.to_json_dict(),
        "pairs": [
            {"photo": list(photo_pt), "pano": list(pano_pt)}
            for photo_pt, pano_pt in case.truth_pairs
        ],
        "categories": {
            "source": "synthetic",
            "cloud presence": "none",
            "skyline composition": (
                "foreign objects" if case.noise_density > 0 else "mountains and terrain only"
            ),
        },
    }
    (out / "truth.json").write_text(
        json.dumps(truth, indent=2, sort_keys=True), encoding="utf-8"
    )
    return out


def load_case(case_dir: Union[str, Path]) -> CaseData:
    """Read one case directory written by ``write_case`` (or hand-prepared)."""
    case_dir = Path(case_dir)
    truth_raw = json.loads((case_dir / "truth.json").read_text(encoding="utf-8"))
    q = float(truth_raw["q"])
    panorama = load_panorama(case_dir / "panorama.png", case_dir / "peaks.json", q)
    photo = load_raster(case_dir / "photo.png")
    pairs = [
        (tuple(map(float, item["photo"])), tuple(map(float, item["pano"])))
        for item in truth_raw.get("pairs", [])
    ]
    truth = GroundTruth(pairs=pairs, categories=dict(truth_raw.get("categories", {})))
    alignment = None
    if "alignment" in truth_raw:
        alignment = Alignment.from_json_dict(truth_raw["alignment"])
    return CaseData(
        photo=photo,
        panorama=panorama,
        truth=truth,
        fov_deg=float(truth_raw["fov_deg"]),
        q=q,
        truth_alignment=alignment,
    )
