"""Exception hierarchy shared by all relaycap modules."""


class RelayCapError(Exception):
    """Base class for every error raised by relaycap."""


class InvalidInputError(RelayCapError, ValueError):
    """An argument violates a documented precondition."""


class SingularityError(InvalidInputError):
    """Two nodes coincide, so the path-loss model diverges.

    ``pair`` holds the offending ordered node pair, e.g. ``("r", 0)``.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class UnsupportedTopologyError(InvalidInputError):
    """The requested bound is not defined for this number of destinations."""


class ConfigError(InvalidInputError):
    """A scenario configuration field is invalid.

    ``field`` names the failing field so the CLI can report it.
    """

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
