"""Exception types shared across the library."""


class ArdecompError(Exception):
    """Base class for all library errors."""


class DomainError(ArdecompError):
    """Malformed geometric input (endpoint outside [0,1], lo > hi, ...)."""


class UndefinedDistanceError(ArdecompError):
    """Distance or Hausdorff query against an empty set."""


class MapValidationError(ArdecompError):
    """Map definition violates the schema or a branch invariant."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class AmbiguousCriticalPointError(ArdecompError):
    """Evaluation landed exactly on a two-sided critical point.

    ``index`` is the orbit position at which the hit occurred (0 for a
    direct evaluation).
    """

    def __init__(self, x: float, index: int = 0):
        super().__init__(
            f"orbit hits the critical point at step {index} (x={x!r}); "
            "pass side='left' or side='right' for a one-sided value"
        )
        self.x = x
        self.index = index


class OnOverlapError(ArdecompError):
    """Potential evaluated on (or too near) the overlap set, where it is undefined.

    ``index`` is the orbit position of the offending point when the error
    arises inside an orbit-based evaluation.
    """

    def __init__(self, x: float, index: int = 0):
        super().__init__(
            f"point x={x!r} lies within the overlap margin at orbit step {index}; "
            "the potential is undefined there"
        )
        self.x = x
        self.index = index


class ResolutionTooCoarseError(ArdecompError):
    """Candidate sets disagree across a cover refinement by more than the allowance."""

    def __init__(self, level: int, gap: float, allowance: float):
        super().__init__(
            f"level {level}: candidate moved by {gap:.6g} across refinement "
            f"(allowance {allowance:.6g}); rerun with more boxes"
        )
        self.level = level
        self.gap = gap
        self.allowance = allowance


class InconsistencyError(ArdecompError):
    """A computed set is structurally impossible (e.g. an empty repelling set)."""


class AmbiguousLevelError(ArdecompError):
    """A series value fits no level band and no open gap between bands."""

    def __init__(self, value: float):
        super().__init__(f"value {value!r} matches no level band and no gap")
        self.value = value


class EmptyPreimageError(ArdecompError):
    """The preimage tree died before the requested depth."""

    def __init__(self, last_depth: int):
        super().__init__(f"preimage tree is empty past generation {last_depth}")
        self.last_depth = last_depth
