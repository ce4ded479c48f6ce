"""Semantic exception hierarchy shared across all solver modules."""


class NpgameError(Exception):
    """Base class for all library errors."""


class AllZeroError(NpgameError):
    """Raised when a mass vector to be normalized is identically zero."""


class NegativeMassError(NpgameError):
    """Raised when a mass vector contains a negative entry."""


class SupportViolationError(NpgameError):
    """Raised when KL(p || q) is requested with supp(p) not contained in supp(q)."""


class SupportMismatchError(NpgameError):
    """Raised when two hypothesis densities do not share the same support."""


class InvalidAlphaError(NpgameError):
    """Raised when a false-alarm level lies outside its admissible range."""


class InvalidPriorError(NpgameError):
    """Raised when prior probabilities are nonpositive or do not sum to one."""


class NoRootError(NpgameError):
    """Raised when the threshold-balance equation has no root inside its bracket."""


class CapExceededError(NpgameError):
    """Raised when exact enumeration would exceed the configured node cap."""


class SpaceTooLargeError(NpgameError):
    """Raised when brute-force grid certification is requested on too many messages."""


class ConfigError(NpgameError):
    """Raised when a scenario configuration file fails validation."""
