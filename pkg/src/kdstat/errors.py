"""Exception hierarchy."""


class KdstatError(Exception):
    """Base class for all errors raised by kdstat."""


class IngestionError(KdstatError):
    """A data or configuration file could not be parsed."""


class DimensionError(KdstatError, ValueError):
    """Array shapes do not conform to the group specification."""


class ConfigurationError(KdstatError, ValueError):
    """Invalid or incomplete configuration (group spec, bandwidth, parameters)."""


class DegeneracyError(KdstatError):
    """The data make a statistic undefined.

    The CLI maps this family to exit status 2.
    """


class SampleSizeError(DegeneracyError, ValueError):
    pass


class BandwidthError(DegeneracyError):
    """The median heuristic produced a zero bandwidth."""


class DegenerateSampleError(DegeneracyError):
    pass


class SingularStatisticError(DegeneracyError):
    """|dCor^2| >= 1, so the studentizing transform is undefined."""


class NotPSDError(KdstatError, ValueError):
    pass
