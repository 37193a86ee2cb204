"""Shared error types.

Every operational failure in the package raises a subclass of DomainError so
the HTTP layer can map exceptions to status codes from a single table.
"""


class DomainError(Exception):
    """Base class for all expected operational failures."""


class ValidationError(DomainError):
    """Input violates a documented precondition or field invariant."""


class WeakPassword(ValidationError):
    pass


class NotFound(DomainError):
    pass


class DuplicateId(DomainError):
    pass


class DuplicateKey(DuplicateId):
    pass


class DuplicateUsername(DuplicateId):
    pass


class Unauthorized(DomainError):
    pass


class InvalidCredentials(Unauthorized):
    pass


class Forbidden(DomainError):
    pass


class NoAvailability(DomainError):
    pass


class CapacityConflict(DomainError):
    pass


class InvalidState(DomainError):
    pass


class HoldExpired(DomainError):
    pass


class Unreachable(DomainError):
    pass


class DanglingEdge(DomainError):
    pass


class EmptyGraph(DomainError):
    pass


class FormatError(DomainError):
    """File header or row cannot be parsed at all."""


class IoError(DomainError):
    """Filesystem trouble, wrapping the underlying OSError message."""


class ConfigError(DomainError):
    pass


class CorruptSnapshot(DomainError):
    pass


class AddressInUse(DomainError):
    pass
