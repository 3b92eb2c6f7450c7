"""Exception types raised by spaceform.

Every domain error carries a ``to_dict`` payload so the command line can
report it as structured JSON.
"""


class SpaceFormError(ValueError):
    """Base class for domain errors."""

    kind = "domain_error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.kind, "message": str(self)}
        for key, value in self.details.items():
            out[key] = _jsonable(value)
        return out


class DimensionMismatchError(SpaceFormError):
    kind = "dimension_mismatch"


class OffQuadricError(SpaceFormError):
    kind = "off_quadric"


class DegenerateError(SpaceFormError):
    """Zero tangent vectors, degenerate triangles, coincident points."""

    kind = "degenerate"


class UnsupportedError(SpaceFormError):
    kind = "unsupported"


class GroupNotClosedError(SpaceFormError):
    kind = "not_closed_at_cutoff"


class WindowInsufficientError(SpaceFormError):
    kind = "window_insufficient"


class SpaceFormViolation(SpaceFormError):
    """A group fails the free/discontinuous action test.

    ``reason`` is one of ``"fixed_point"``, ``"displacement"`` or
    ``"orbit_accumulation"``.
    """

    kind = "space_form_violation"

    def __init__(self, message, reason, element=None, point=None, displacement=None):
        super().__init__(message, reason=reason)
        self.reason = reason
        self.element = element
        self.point = point
        self.displacement = displacement

    def to_dict(self):
        out = super().to_dict()
        if self.element is not None:
            out["word"] = list(self.element.word) if self.element.word is not None else None
            out["matrix"] = _jsonable(self.element.matrix)
        if self.point is not None:
            out["point"] = _jsonable(self.point)
        if self.displacement is not None:
            out["displacement"] = float(self.displacement)
        return out


class AmbiguousLiftError(SpaceFormError):
    kind = "ambiguous_lift"


class InfiniteVolumeError(SpaceFormError):
    kind = "infinite_volume"


class NonIntersectingLinesError(SpaceFormError):
    kind = "non_intersecting_lines"


def _jsonable(value):
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value
