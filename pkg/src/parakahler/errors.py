"""Exception hierarchy shared by all geometry modules."""


class GeometryError(Exception):
    """Base class for numerical-domain failures (CLI exit code 3)."""


class ArgumentBranchError(GeometryError):
    """Para-complex number outside the right wedge ``re > |im|``."""


class TimelikeArgument(ArgumentBranchError):
    pass


class NullArgument(ArgumentBranchError):
    pass


class DegenerateMetric(GeometryError):
    pass


class DegenerateInducedMetric(GeometryError):
    pass


class LeftDomain(GeometryError):
    pass


class NullTangent(GeometryError):
    pass


class NullCurve(GeometryError):
    pass


class SignatureMismatch(GeometryError):
    pass


class NotOnSurface(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class BasePointMismatch(GeometryError):
    pass


class NotImmersion(GeometryError):
    pass


class NotMinimal(GeometryError):
    pass


class NotHMinimal(GeometryError):
    pass


class LorentzianInduced(GeometryError):
    pass


class NotAFrame(GeometryError):
    pass


class ConfigError(Exception):
    """Unparseable configuration or unknown catalogue id (CLI exit code 2)."""
