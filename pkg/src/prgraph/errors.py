"""Exception types shared across the package."""


class PRGraphError(Exception):
    """Base class for errors raised by prgraph."""


class GroupSpecError(PRGraphError, ValueError):
    """A group spec string or table file could not be parsed."""


class GroupError(PRGraphError, ValueError):
    """Invalid element, subgroup or unsupported group operation."""


class GroupOverflowError(PRGraphError, OverflowError):
    """A coordinate left the signed 64-bit range."""


class NotGeneratingError(PRGraphError, ValueError):
    """A tuple was used as a vertex but does not generate the group."""


class GraphError(PRGraphError, ValueError):
    """A graph does not satisfy the precondition of a metric."""


class CapExceededError(PRGraphError, RuntimeError):
    """An exploration needed more vertices than the configured cap."""
