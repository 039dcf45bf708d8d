"""Exception hierarchy.

Every error raised by the library derives from :class:`CsProbeError`, so
callers (the CLI in particular) can map failures to exit codes without
pattern-matching messages.
"""


class CsProbeError(Exception):
    """Base class for all cs-probe errors."""


class ConfigError(CsProbeError):
    """Invalid or contradictory run configuration."""


class InvalidInputError(CsProbeError):
    """An argument violates a documented precondition."""


class EmptyInputError(InvalidInputError):
    """An input that must be nonempty was empty."""


class GloveParseError(CsProbeError):
    """A line of an embedding file could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class DimensionMismatchError(GloveParseError):
    """A vector's component count disagrees with the expected dimension."""


class DegenerateVectorError(CsProbeError):
    """A cosine kernel was called on a zero-norm vector."""


class OriginalOovError(CsProbeError):
    """The masked word has no embedding, so accuracy is undefined."""


class NoUsableReplacementsError(CsProbeError):
    """Every replacement in the set is out of vocabulary."""


class ZeroMassError(CsProbeError):
    """A probability-weighted quantity has zero total weight."""


class InsufficientPointsError(CsProbeError):
    """Fewer points than mixture components."""


class DegenerateGeometryError(CsProbeError):
    """All answer choices coincide with a cluster center (Z = 0)."""


class UndefinedCorrelationError(CsProbeError):
    """Pearson r is undefined (constant series)."""


class DatasetParseError(CsProbeError):
    """A dataset record could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class FixtureParseError(CsProbeError):
    """A candidate-fixture record could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class MissingFixtureError(CsProbeError):
    """No fixture record exists for the requested id."""


class TransportError(CsProbeError):
    """The LM endpoint was unreachable after all retries."""


class ProtocolError(CsProbeError):
    """The LM endpoint answered with an invalid payload."""


class RemoteError(CsProbeError):
    """The LM endpoint answered with a non-success status."""

    def __init__(self, message: str, status: int):
        super().__init__(message)
        self.status = status


# CLI exit codes for error categories.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_DATA_ERRORS = (
    GloveParseError,
    DatasetParseError,
    FixtureParseError,
    MissingFixtureError,
    TransportError,
    ProtocolError,
    RemoteError,
)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    if isinstance(exc, _DATA_ERRORS) or isinstance(exc, OSError):
        return EXIT_DATA
    return EXIT_INTERNAL
