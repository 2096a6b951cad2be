"""Exception hierarchy shared across the package."""


class SkewsphereError(Exception):
    """Base class for all package-specific errors."""


class ParameterDomainError(SkewsphereError, ValueError):
    """A parameter lies outside its admissible domain (e.g. scale <= 0)."""


class DuplicateSiteError(SkewsphereError, ValueError):
    """Two sites in a site set are closer than the duplicate tolerance."""


class NotPositiveDefiniteError(SkewsphereError):
    """An assembled covariance matrix failed its Cholesky factorization."""


class DegeneratePairError(SkewsphereError):
    """A pair likelihood was requested for a singular latent 2x2 block."""


class InvalidParameterError(SkewsphereError):
    """Parameters produce a non-positive-definite pair block.

    The composite-likelihood objective consumes this condition as a -inf
    sentinel instead of raising, so the optimizer can reject and continue.
    """


class ShapeError(SkewsphereError, ValueError):
    """Data dimensions do not line up with sites, components or pairs."""


class NoValidStartError(SkewsphereError):
    """Every optimizer start landed in the invalid-parameter region."""


class NumericalDegeneracyError(SkewsphereError):
    """A numerical result violated a hard validity bound (e.g. variance <= 0)."""


class ConfigError(SkewsphereError, ValueError):
    """A configuration file or key is missing or malformed."""
