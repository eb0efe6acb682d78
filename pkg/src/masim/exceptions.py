"""Exception hierarchy shared by all masim modules."""


class MasimError(Exception):
    """Base class for library errors."""


class DimensionError(MasimError, ValueError):
    """Angle lists, path-response matrices or EPRVs have inconsistent sizes."""


class DomainError(MasimError, ValueError):
    """An argument lies outside the domain of a formula (negative power, t < 0, ...)."""


class ArityError(MasimError, ValueError):
    """A closed form was called with the wrong number of paths."""


class DegenerateGeometryError(MasimError, ValueError):
    """Virtual AoAs coincide or are collinear, so the requested structure does not exist."""


class ResourceError(MasimError, RuntimeError):
    """A requested grid exceeds the configured cell cap."""


class ConfigError(MasimError, ValueError):
    """An experiment configuration is invalid.

    Attributes:
        field: dotted name of the offending configuration key (may be empty).
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
