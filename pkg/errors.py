class QcWeylError(Exception):
    """
    Base class of all errors raised by the qcweyl library
    """
    pass


class ConfigurationError(QcWeylError):
    """
    Invalid configuration file or command line flags
    """
    pass


class InvalidInputError(QcWeylError):
    """
    Malformed input document or input values
    """
    pass


class InvalidQCDataError(InvalidInputError):
    """
    QC data violating one of its invariants
    """

    def __init__(self, invariant: str, message: str):
        """
        Create a new error for a violated invariant
        :param invariant: Short name of the violated invariant (e.g. "T0-symmetric")
        :param message: Human readable description
        """
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class MalformedEndomorphismError(InvalidInputError):
    pass


class DegreeError(QcWeylError):
    """
    Degree or homogeneity out of the admissible range
    """
    pass


class DimensionMismatchError(QcWeylError):
    pass


class SingularSystemError(QcWeylError):
    """
    Linear system without a unique solution
    """
    pass


class InconsistentSystemError(QcWeylError):
    """
    Linear system without any solution
    """
    pass


class BiquardSolveError(InvalidInputError):
    """
    Structure constants that do not admit a unique Biquard connection
    """
    pass
