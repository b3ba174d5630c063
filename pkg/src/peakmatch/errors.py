"""Exception hierarchy shared by all pipeline stages.

Every error carries a stable ``exit_code`` so the CLI can surface stage
failures as distinct process exit statuses (0 = success, 1 = unexpected).
"""


class PeakmatchError(Exception):
    """Base class for all pipeline errors."""

    exit_code = 1


# -- camera metadata / FOV ---------------------------------------------------

class MissingExif(PeakmatchError):
    """The image carries no EXIF block; FOV must be supplied explicitly."""

    exit_code = 10


class MissingFocalLength(PeakmatchError):
    """EXIF present but the FocalLength tag (37386) is absent."""

    exit_code = 11


class LowConfidence(PeakmatchError):
    """No camera in the sensor database matches the EXIF name well enough."""

    exit_code = 12


class NonPositiveInput(PeakmatchError):
    """A physical quantity (focal length, sensor width, ...) must be > 0."""

    exit_code = 13


class SensorDbError(PeakmatchError):
    """Sensor database file is missing the expected header or has bad rows."""

    exit_code = 14


# -- edge maps and matching --------------------------------------------------

class EmptyImage(PeakmatchError):
    """Edge detection received a zero-sized raster."""

    exit_code = 20


class PhotoWiderThanPanorama(PeakmatchError):
    """The (scaled) photo edge map is wider than the panorama cylinder."""

    exit_code = 21


class EmptyGrid(PeakmatchError):
    """A score grid with no entries cannot yield an alignment."""

    exit_code = 22


class NoCandidates(PeakmatchError):
    """Re-scoring requested but the score grid is identically zero."""

    exit_code = 23


# -- panorama / case files ---------------------------------------------------

class WidthMismatch(PeakmatchError):
    """Panorama image width is inconsistent with the declared pixels/degree."""

    exit_code = 30


class MalformedPeaks(PeakmatchError):
    """Peak list file is not a JSON array of {name, x, y} records."""

    exit_code = 31


# -- evaluation ----------------------------------------------------------------

class NoPairs(PeakmatchError):
    """Ground truth for a photo must contain at least one point pair."""

    exit_code = 40


class EmptyDataset(PeakmatchError):
    """Dataset evaluation needs at least one case."""

    exit_code = 41
