"""Exception hierarchy shared by all modules."""


class GraphError(ValueError):
    """Invalid graph input (self-loops, bad weights, bad indices, ...)."""


class DisconnectedGraphError(GraphError):
    """An operation that needs a connected (sub)graph received a disconnected one."""

    def __init__(self, message, components=None):
        super().__init__(message)
        self.components = components or []


class ConvergenceError(RuntimeError):
    """The eigensolver did not converge within its sweep budget."""


class InvariantError(AssertionError):
    """A structural guarantee (orthonormality, partition validity, ...) was violated."""
