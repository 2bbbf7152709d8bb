"""Exception hierarchy shared by every module of the package."""


class AbsOrderError(Exception):
    """Base class for all package errors."""


class ParameterError(AbsOrderError, ValueError):
    """Invalid group parameters or mismatched operands."""


class ResourceError(AbsOrderError):
    """An element, pairwise or time budget would be exceeded."""


class StructuralError(AbsOrderError, ValueError):
    """Cover data that cannot describe a poset (e.g. a directed cycle)."""


class StateError(AbsOrderError):
    """Operation requires a property the object does not have (e.g. ranked)."""


class DomainError(AbsOrderError, ValueError):
    """Input outside the operation's domain (e.g. a set not closed under conjugation)."""


class ShapeError(AbsOrderError):
    """Poset shape not supported by the operation (e.g. several minimal elements)."""


class AutomorphismError(AbsOrderError):
    """A partition is not induced by a group of poset automorphisms."""


class NotSupportedError(AbsOrderError):
    """Group type outside what can be enumerated at desk scale."""


class ConsistencyError(AbsOrderError):
    """Internal verification failed; indicates a bug, never expected to fire."""


class SchemaError(AbsOrderError, ValueError):
    """Malformed poset, weight or certificate document."""
