"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: precondition violations
exit 3, resource refusals exit 4.
"""


class PreconditionError(ValueError):
    """An operation was called outside its documented domain."""


class ResourceLimitError(RuntimeError):
    """An exact computation was refused because the input is too large."""


class InconsistencyError(RuntimeError):
    """A computed quantity contradicts something known to be true."""
