"""Exception hierarchy shared by all modules.

Each class carries an ``exit_code`` used by the command line front end.
"""


class NPSError(Exception):
    exit_code = 10


class ParameterError(NPSError, ValueError):
    exit_code = 3


class GeometryError(NPSError):
    exit_code = 4


class PositivityError(NPSError):
    exit_code = 5


class SymmetrizabilityError(NPSError):
    exit_code = 6


class DomainError(NPSError, ValueError):
    exit_code = 7


class SingularityError(DomainError):
    exit_code = 8


class BranchError(DomainError):
    exit_code = 9


class PairingError(NPSError):
    exit_code = 11


class NumericError(NPSError, ArithmeticError):
    exit_code = 12


class PlacementError(DomainError):
    exit_code = 13


class RankError(NPSError):
    exit_code = 14


class ConsistencyError(NPSError):
    exit_code = 15


class TruncationError(NPSError):
    exit_code = 16


class PoleError(DomainError):
    """Evaluation at a pole. ``residue`` holds the known residue when available."""

    exit_code = 17

    def __init__(self, msg, residue=None):
        super().__init__(msg)
        self.residue = residue
