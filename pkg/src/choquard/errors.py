"""Exception hierarchy for the choquard package."""


class ChoquardError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(ChoquardError, ValueError):
    """An argument violates a documented precondition."""


class DomainError(ChoquardError, ValueError):
    """Operation not defined for the given values (e.g. fractional power of a negative sample)."""


class DegenerateInputError(ChoquardError, ValueError):
    """Zero or otherwise degenerate profile where a nonzero one is required."""


class RegimeError(ChoquardError, ValueError):
    """Requested quantity does not exist in the given exponent regime."""


class NonexistenceError(ChoquardError, ValueError):
    """Parameters outside the existence range: the only solution is u = 0."""


class StagnationError(ChoquardError, RuntimeError):
    """The minimization monitor detected a persistent increase of the quotient."""


class UnreliableTailError(ChoquardError, RuntimeError):
    """Tail window too contaminated to extract a decay plateau; enlarge the domain."""


class PairingError(ChoquardError, ValueError):
    """Point set is not invariant under the requested reflection."""


class InputError(ChoquardError, ValueError):
    """Malformed external input (CSV profile, config file)."""
