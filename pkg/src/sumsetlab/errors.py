"""Exception types shared across the package."""


class CapExceeded(RuntimeError):
    """A configured work or universe cap would be exceeded; nothing partial is returned."""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""
