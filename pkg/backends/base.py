from abc import ABC, abstractmethod
from fractions import Fraction

import numpy as np


class ArithmeticBackend(ABC):
    """
    Abstract base class for the two arithmetic modes.
    A backend owns the scalar type used throughout one computation and the
    linear algebra (rank, nullspace, solves) on sparse matrices given as
    {row: {column: value}} dictionaries together with their shape.
    """
    mode = None

    def __init__(self, tolerance: float = 1e-9):
        super().__init__()
        self.tolerance = tolerance

    @abstractmethod
    def scalar(self, value):
        """
        Convert an int, Fraction, float or "p/q" string into the scalar type of the backend
        """
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def is_zero(self, value) -> bool:
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def encode(self, value):
        """
        Encode a scalar as a JSON value
        """
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def rank(self, matrix: dict, shape: tuple[int, int]) -> int:
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def nullspace(self, matrix: dict, shape: tuple[int, int]) -> list[list]:
        """
        Compute a basis of the kernel of a sparse matrix
        :param matrix: Sparse matrix as {row: {column: value}}
        :param shape: (rows, columns)
        :return: List of kernel vectors, each a list of length shape[1]
        """
        raise NotImplementedError("Subclasses must implement this method")

    @abstractmethod
    def solve_particular(self, matrix: dict, shape: tuple[int, int], rhs: list) -> tuple[list, int]:
        """
        Find one solution of a consistent, possibly underdetermined system
        :return: (solution, rank of the matrix)
        :raises InconsistentSystemError: if the system has no solution
        """
        raise NotImplementedError("Subclasses must implement this method")

    def solve(self, matrix: dict, shape: tuple[int, int], rhs: list) -> list:
        """
        Solve a linear system that must have exactly one solution
        :raises SingularSystemError: if the matrix has a nontrivial kernel
        :raises InconsistentSystemError: if there is no solution
        """
        from errors import SingularSystemError

        solution, rank = self.solve_particular(matrix, shape, rhs)
        if rank < shape[1]:
            raise SingularSystemError(f"System of shape {shape} has rank {rank}, the solution is not unique")
        return solution

    @property
    def zero(self):
        return self.scalar(0)

    @property
    def one(self):
        return self.scalar(1)

    def random_scalar(self, rng: np.random.Generator):
        """
        Draw a small random rational; both backends draw the same values for the same generator state
        """
        numerator = int(rng.integers(-6, 7))
        denominator = int(rng.integers(1, 4))
        return self.scalar(Fraction(numerator, denominator))

    def zeros(self, shape) -> np.ndarray:
        return np.full(shape, self.zero, dtype=self.dtype)

    def identity(self, size: int) -> np.ndarray:
        result = self.zeros((size, size))
        for i in range(size):
            result[i, i] = self.one
        return result

    def array(self, values) -> np.ndarray:
        converted = np.array(values, dtype=object)
        result = self.zeros(converted.shape)
        for index, value in np.ndenumerate(converted):
            result[index] = self.scalar(value)
        return result

    def max_abs(self, values) -> float:
        values = np.asarray(values, dtype=object)
        if values.size == 0:
            return 0.0
        return max(float(abs(v)) for v in values.flat)

    def all_zero(self, values) -> bool:
        return all(self.is_zero(v) for v in np.asarray(values, dtype=object).flat)

    def allclose(self, a, b) -> bool:
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape != b.shape:
            return False
        return self.all_zero(a - b)

    def encode_array(self, values):
        values = np.asarray(values, dtype=object)
        if values.ndim == 0:
            return self.encode(values.item())
        return [self.encode_array(v) for v in values]

    def decode_array(self, values) -> np.ndarray:
        return self.array(values)
