"""Camera metadata, sensor lookup, and field-of-view / scale estimation.

The horizontal field of view of a photo follows from the focal length
(EXIF tag 37386) and the physical sensor width::

    fov = 2 * atan(sensor_width / (2 * focal_length))

Sensor widths come from a CSV database keyed by camera make/model; EXIF
names rarely match the database names verbatim, so rows are resolved by a
fuzzy text similarity after a small normalization pass.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO, Iterable, Union

from PIL import Image

from .errors import (
    LowConfidence,
    MissingExif,
    MissingFocalLength,
    NonPositiveInput,
    SensorDbError,
)

EXIF_TAG_MAKE = 271
EXIF_TAG_MODEL = 272
EXIF_TAG_FOCAL_LENGTH = 37386
EXIF_IFD_POINTER = 0x8769

# Best database match below this similarity is rejected: assigning an
# arbitrary sensor width to an unknown camera is worse than failing.
MIN_MATCH_SIMILARITY = 0.5

SENSOR_DB_HEADER = ("make", "model", "sensor_width_mm")


@dataclass(frozen=True)
class PhotoMeta:
    """Camera metadata extracted from a photo file."""

    focal_length: float  # millimeters
    make: str
    model: str
    width_px: int
    height_px: int


@dataclass(frozen=True)
class CameraSpec:
    """One sensor-database row."""

    make: str
    model: str
    sensor_width: float  # millimeters


@dataclass(frozen=True)
class CameraMatch:
    """A resolved database row with its name similarity in [0, 1]."""

    spec: CameraSpec
    similarity: float


@dataclass(frozen=True)
class FovScale:
    """Field of view (radians) and the photo-to-panorama scale factor."""

    fov: float
    scale_factor: float


def parse_photo_meta(source: Union[str, Path, BinaryIO]) -> PhotoMeta:
    """Extract focal length, make, model and pixel dimensions from an image.

    Raises MissingExif when the file has no EXIF block at all, and
    MissingFocalLength when EXIF exists but tag 37386 is absent.  Either
    error means the FOV cannot be estimated and must be supplied by the
    caller.
    """
    with Image.open(source) as img:
        width, height = img.size
        exif = img.getexif()
        if len(exif) == 0:
            raise MissingExif("image has no EXIF block")
        focal = exif.get_ifd(EXIF_IFD_POINTER).get(EXIF_TAG_FOCAL_LENGTH)
        if focal is None:
            focal = exif.get(EXIF_TAG_FOCAL_LENGTH)
        if focal is None:
            raise MissingFocalLength("EXIF block has no FocalLength (37386) tag")
        make = str(exif.get(EXIF_TAG_MAKE, "") or "")
        model = str(exif.get(EXIF_TAG_MODEL, "") or "")
    focal_mm = float(focal)
    if focal_mm <= 0:
        raise NonPositiveInput(f"EXIF focal length must be > 0, got {focal_mm}")
    return PhotoMeta(focal_mm, make.strip(), model.strip(), width, height)


def normalize_camera_name(make: str, model: str) -> str:
    """Canonical lowercase "make model" string used for fuzzy matching.

    Make names containing "nikon" or "olympus" collapse to the brand word,
    and a model that repeats the make has the make stripped from it.
    """
    make = " ".join(make.lower().split())
    model = " ".join(model.lower().split())
    if "nikon" in make:
        make = "nikon"
    elif "olympus" in make:
        make = "olympus"
    if make and make in model:
        model = " ".join(model.replace(make, " ").split())
    return " ".join(part for part in (make, model) if part)


def _longest_common_run(a: str, b: str) -> tuple[int, int, int]:
    """(length, start_a, start_b) of the longest common substring."""
    best_len = best_a = best_b = 0
    len_a, len_b = len(a), len(b)
    for i in range(len_a):
        if len_a - i <= best_len:
            break
        for j in range(len_b):
            k = 0
            while i + k < len_a and j + k < len_b and a[i + k] == b[j + k]:
                k += 1
            if k > best_len:
                best_len, best_a, best_b = k, i, j
    return best_len, best_a, best_b


def _common_chars(a: str, b: str) -> int:
    if not a or not b:
        return 0
    run, i, j = _longest_common_run(a, b)
    if run == 0:
        return 0
    return (
        run
        + _common_chars(a[:i], b[:j])
        + _common_chars(a[i + run :], b[j + run :])
    )


def text_similarity(a: str, b: str) -> float:
    """Similarity in [0, 1] by recursive longest-common-substring count.

    The longest common substring is located, the procedure recurses on the
    left and right remainders, and the matched character total m yields
    2*m / (len(a) + len(b)).  Two empty strings count as identical.

    Ties between equally long common substrings are broken by scan order,
    which depends on the argument order; the pair is put into a canonical
    order first so the score is symmetric.
    """
    if not a and not b:
        return 1.0
    if b < a:
        a, b = b, a
    return 2.0 * _common_chars(a, b) / (len(a) + len(b))


def match_camera(meta: PhotoMeta, db: Iterable[CameraSpec]) -> CameraMatch:
    """Pick the database row whose normalized name is most similar.

    Ties keep the first row in database order.  Raises LowConfidence when
    the best similarity is below MIN_MATCH_SIMILARITY.
    """
    rows = list(db)
    if not rows:
        raise ValueError("camera database is empty")
    wanted = normalize_camera_name(meta.make, meta.model)
    best_row = rows[0]
    best_sim = -1.0
    for row in rows:
        sim = text_similarity(wanted, normalize_camera_name(row.make, row.model))
        if sim > best_sim:
            best_row, best_sim = row, sim
    if best_sim < MIN_MATCH_SIMILARITY:
        raise LowConfidence(
            f"best sensor-database match for {wanted!r} is "
            f"{best_row.make} {best_row.model} at similarity {best_sim:.3f} "
            f"(< {MIN_MATCH_SIMILARITY}); supply the FOV explicitly"
        )
    return CameraMatch(best_row, best_sim)


def estimate_fov(focal_length: float, sensor_width: float) -> float:
    """Horizontal field of view in radians: 2*atan(s / (2*l))."""
    if focal_length <= 0 or sensor_width <= 0:
        raise NonPositiveInput(
            f"focal length and sensor width must be > 0, got "
            f"l={focal_length}, s={sensor_width}"
        )
    return 2.0 * math.atan(sensor_width / (2.0 * focal_length))


def compute_scale_factor(fov: float, photo_width: int, pano_width: int) -> float:
    """Factor k resizing the photo so one pixel spans the same angle as one
    panorama pixel: k = fov * pano_width / (2*pi * photo_width)."""
    if fov <= 0 or photo_width <= 0 or pano_width <= 0:
        raise NonPositiveInput(
            f"fov, photo width and panorama width must be > 0, got "
            f"fov={fov}, photo={photo_width}, pano={pano_width}"
        )
    return fov * pano_width / (2.0 * math.pi * photo_width)


def load_sensor_db(path: Union[str, Path]) -> list[CameraSpec]:
    """Read the camera sensor database (CSV with header make,model,sensor_width_mm)."""
    specs: list[CameraSpec] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SensorDbError(f"{path}: sensor database is empty") from None
        if tuple(h.strip().lower() for h in header) != SENSOR_DB_HEADER:
            raise SensorDbError(
                f"{path}: expected header {','.join(SENSOR_DB_HEADER)}, "
                f"got {','.join(header)}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != 3:
                raise SensorDbError(f"{path}:{lineno}: expected 3 columns")
            try:
                width = float(row[2])
            except ValueError:
                raise SensorDbError(
                    f"{path}:{lineno}: bad sensor width {row[2]!r}"
                ) from None
            if width <= 0:
                raise SensorDbError(f"{path}:{lineno}: sensor width must be > 0")
            specs.append(CameraSpec(row[0].strip(), row[1].strip(), width))
    return specs
