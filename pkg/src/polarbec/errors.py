"""Exception types shared across the toolkit."""


class PolarBECError(Exception):
    """Base class for toolkit-specific failures."""


class LevelTooLargeError(PolarBECError):
    """A level enumeration or materialization exceeded the configured budget."""


class InvalidCandidateError(PolarBECError):
    """A candidate decay function violates its endpoint/positivity contract."""


class DegenerateFitError(PolarBECError):
    """Too few usable decay samples to fit an exponent."""


class InfeasibleTargetError(PolarBECError):
    """No channel selection can satisfy the requested target."""


class EmptyCodeError(PolarBECError):
    """A construction produced no surviving channels."""


class DecodingInconsistencyError(PolarBECError):
    """A resolved message contradicts a known value; indicates a harness bug."""
