"""Estimate a photo's field of view from EXIF and size it for matching.

A camera's horizontal FOV follows from two numbers: the focal length the
lens reported into EXIF, and the physical width of the sensor.  The sensor
width is not in EXIF, so it is resolved from a database by fuzzy name
matching (EXIF names almost never equal the database spelling exactly).
"""

import math
from pathlib import Path

from PIL import Image

from peakmatch import (
    compute_scale_factor,
    estimate_fov,
    load_sensor_db,
    match_camera,
    normalize_camera_name,
    parse_photo_meta,
    text_similarity,
)

OUT = Path(__file__).parent / "demo_output"
OUT.mkdir(exist_ok=True)

# --- build a small demo photo carrying EXIF ---------------------------------
photo_path = OUT / "demo_photo.jpg"
exif = Image.Exif()
exif[271] = "NIKON"  # Make
exif[272] = "E5600"  # Model
exif.get_ifd(0x8769)[37386] = 5.7  # FocalLength, millimeters
Image.new("RGB", (800, 600), (80, 120, 170)).save(photo_path, exif=exif)

meta = parse_photo_meta(photo_path)
print(f"EXIF: make={meta.make!r} model={meta.model!r} "
      f"focal={meta.focal_length} mm, {meta.width_px}x{meta.height_px} px")

# --- resolve the sensor width -------------------------------------------------
db = load_sensor_db(Path(__file__).parent.parent / "tests" / "data" / "sensors.csv")
print(f"\nsensor database: {len(db)} cameras")
print(f"normalized EXIF name: {normalize_camera_name(meta.make, meta.model)!r}")

match = match_camera(meta, db)
print(f"best match: {match.spec.make} {match.spec.model} "
      f"(similarity {match.similarity:.3f}, sensor {match.spec.sensor_width} mm)")

# the similarity metric on a few name pairs, for feel:
for a, b in [
    ("canon powershot sx100 is", "canon powershot sx110 is"),
    ("nikon e5600", "nikon coolpix 5600"),
    ("nikon e5600", "olympus sp 560 uz"),
]:
    print(f"  similarity({a!r}, {b!r}) = {text_similarity(a, b):.3f}")

# --- FOV and the photo-to-panorama scale factor -------------------------------
fov = estimate_fov(meta.focal_length, match.spec.sensor_width)
print(f"\nFOV = 2*atan(s / 2l) = {fov:.4f} rad = {math.degrees(fov):.2f} deg")

pano_width = 7200  # a 360-degree render at 20 px/deg
k = compute_scale_factor(fov, meta.width_px, pano_width)
print(f"scale factor k = FOV * {pano_width} / (2*pi * {meta.width_px}) = {k:.4f}")
print(f"scaled photo width: {meta.width_px * k:.0f} px "
      f"({math.degrees(fov):.2f} deg at 20 px/deg)")
