"""Shared fixtures and small reference helpers for the test suite."""

from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from peakmatch import EdgeMap

DATA_DIR = Path(__file__).parent / "data"

EXIF_TAG_MAKE = 271
EXIF_TAG_MODEL = 272
EXIF_TAG_FOCAL_LENGTH = 37386
EXIF_IFD_POINTER = 0x8769


@pytest.fixture
def sensors_csv() -> Path:
    return DATA_DIR / "sensors.csv"


def write_jpeg(
    path,
    size=(64, 48),
    make=None,
    model=None,
    focal=None,
    with_exif=True,
):
    """Write a JPEG test file, optionally with EXIF make/model/focal length."""
    img = Image.new("RGB", size, (90, 110, 140))
    if not with_exif:
        img.save(path, format="JPEG")
        return path
    exif = Image.Exif()
    if make is not None:
        exif[EXIF_TAG_MAKE] = make
    if model is not None:
        exif[EXIF_TAG_MODEL] = model
    if focal is not None:
        exif.get_ifd(EXIF_IFD_POINTER)[EXIF_TAG_FOCAL_LENGTH] = focal
    if make is None and model is None and focal is None:
        # guarantee a non-empty EXIF block without the interesting tags
        exif[305] = "test"  # Software
    img.save(path, format="JPEG", exif=exif)
    return path


def rand_edge_map(rng, height, width, density=0.4) -> EdgeMap:
    """Random sparse edge map with valid strength/direction ranges."""
    strength = rng.random((height, width))
    strength[strength < 1.0 - density] = 0.0
    direction = rng.random((height, width)) * 2.0 * np.pi
    direction[strength == 0.0] = 0.0
    return EdgeMap(strength, direction)


def naive_vcc_scores(photo: EdgeMap, pano: EdgeMap) -> np.ndarray:
    """Plain-loop correlation of squared complex edge fields.

    The dumbest possible expression of the score definition; keeps the
    vectorized brute-force path honest on tiny inputs.
    """
    h_p, w_p = photo.strength.shape
    h_r, w_r = pano.strength.shape
    zp = (photo.strength * np.exp(1j * photo.direction)) ** 2
    zr = (pano.strength * np.exp(1j * pano.direction)) ** 2
    out = np.zeros((h_p + h_r + 1, w_r))
    for i, dy in enumerate(range(-h_p, h_r + 1)):
        for dx in range(w_r):
            acc = 0.0 + 0.0j
            for y in range(h_p):
                ry = y + dy
                if not 0 <= ry < h_r:
                    continue
                for x in range(w_p):
                    acc += zp[y, x] * np.conj(zr[ry, (x + dx) % w_r])
            out[i, dx] = acc.real
    return out
