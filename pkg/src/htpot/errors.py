"""Exception types shared across the package."""


class StructureError(ValueError):
    """Shapes, counts, or indices are inconsistent with the group layout."""


class DomainError(ValueError):
    """A point or pole violates a domain requirement (outside, on a face, ...)."""


class PoleError(ValueError):
    """Evaluation requested at, or too close to, a singular pole."""


class CalibrationError(RuntimeError):
    """Flux calibration produced a degenerate (near-zero) flux."""


class TruncationError(RuntimeError):
    """A series truncation cannot reach the requested control."""
