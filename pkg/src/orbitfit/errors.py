"""Exception hierarchy shared across the package."""


class OrbitFitError(Exception):
    """Base class for all orbitfit errors."""


class InvalidInputError(OrbitFitError, ValueError):
    """Caller violated an operation contract (bad argument, bad state)."""


class ParseError(OrbitFitError):
    """A file could not be parsed. Carries the path and, when known, the
    byte offset (binary formats) or line number (text formats)."""

    def __init__(self, path, message, byte_offset=None, line=None):
        self.path = str(path)
        self.byte_offset = byte_offset
        self.line = line
        where = ""
        if byte_offset is not None:
            where = f" at byte {byte_offset}"
        elif line is not None:
            where = f" at line {line}"
        super().__init__(f"{self.path}{where}: {message}")


class InsufficientLandmarksError(InvalidInputError):
    """Fewer than three label-matched landmark pairs."""


class DegenerateConfigurationError(OrbitFitError):
    """Point configuration does not determine the requested transform
    (collinear landmarks, coplanar points for an affine solve, ...)."""


class RegistrationFailedError(OrbitFitError):
    """An iterative registration could not proceed (e.g. no surviving
    correspondences within the distance gate)."""


class ReflectionCollapseError(RegistrationFailedError):
    """An affine solve produced a non-positive determinant."""


class NumericFailureError(OrbitFitError):
    """Non-finite values appeared during an iterative solve."""

    def __init__(self, message, iteration=None):
        self.iteration = iteration
        if iteration is not None:
            message = f"{message} (iteration {iteration})"
        super().__init__(message)


class MissingPivotError(InvalidInputError):
    """Pivot rotation requested before posterior-stop alignment."""


class MissingHistoryError(InvalidInputError):
    """Reset requested but no posterior-stop alignment is on record."""


class InvalidPlateError(InvalidInputError):
    """Plate definition violates the plate contract (missing canonical
    curve, missing stop point, ...)."""


class RejectedTransformError(InvalidInputError):
    """A submitted placement transform drifted too far from rigid."""


class SchemaVersionError(OrbitFitError):
    """Persisted data written by a newer schema than this build reads."""

    def __init__(self, found, supported):
        self.found = found
        self.supported = supported
        super().__init__(
            f"file schema version {found} is newer than supported version "
            f"{supported}; upgrade orbitfit to load it"
        )
