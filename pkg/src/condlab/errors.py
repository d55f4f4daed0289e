"""Exception types shared across the package."""


class CondlabError(Exception):
    """Base class for all condlab-specific failures."""


class EmptyBandError(CondlabError):
    """No sample fell inside the requested band."""


class ZeroEvidenceError(CondlabError):
    """The likelihood vanishes everywhere on the grid; the posterior is undefined."""


class DomainError(CondlabError):
    """A transform was evaluated outside its declared domain."""


class TargetUnreachableError(CondlabError):
    """Root-finding could not reach the requested evidence ratio within the family bounds."""


class UndefinedBayesFactorError(CondlabError):
    """Bayes factor requested with zero denominator evidence."""


class ConfigError(CondlabError):
    """Invalid, missing, or unknown experiment configuration entry."""
