from fractions import Fraction

import numpy as np

from errors import InconsistentSystemError
from .base import ArithmeticBackend


class FloatBackend(ArithmeticBackend):
    """
    64-bit floating point arithmetic with SVD based rank and nullspace decisions.
    Singular values below tolerance times the largest one count as zero.
    """
    mode = "float"
    dtype = float

    def scalar(self, value):
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)

    def is_zero(self, value) -> bool:
        return abs(value) <= self.tolerance

    def encode(self, value):
        return float(value)

    @staticmethod
    def _dense(matrix: dict, shape: tuple[int, int]) -> np.ndarray:
        dense = np.zeros(shape, dtype=float)
        for i, row in matrix.items():
            for j, value in row.items():
                dense[i, j] = float(value)
        return dense

    def _threshold(self, singular_values: np.ndarray) -> float:
        if singular_values.size == 0:
            return 0.0
        return self.tolerance * max(float(singular_values.max()), 1.0)

    def rank(self, matrix: dict, shape: tuple[int, int]) -> int:
        if 0 in shape:
            return 0
        singular_values = np.linalg.svd(self._dense(matrix, shape), compute_uv=False)
        return int(np.sum(singular_values > self._threshold(singular_values)))

    def nullspace(self, matrix: dict, shape: tuple[int, int]) -> list[list]:
        if shape[1] == 0:
            return []
        if shape[0] == 0:
            return [list(v) for v in np.eye(shape[1])]
        _, singular_values, vh = np.linalg.svd(self._dense(matrix, shape))
        rank = int(np.sum(singular_values > self._threshold(singular_values)))
        return [list(v) for v in vh[rank:]]

    def solve_particular(self, matrix: dict, shape: tuple[int, int], rhs: list) -> tuple[list, int]:
        dense = self._dense(matrix, shape)
        b = np.array([float(v) for v in rhs])
        solution, _, rank, singular_values = np.linalg.lstsq(dense, b, rcond=None)
        rank = int(np.sum(singular_values > self._threshold(singular_values)))
        residual = float(np.max(np.abs(dense @ solution - b))) if b.size else 0.0
        scale = max(1.0, float(np.max(np.abs(b))) if b.size else 1.0)
        if residual > self.tolerance * scale * 1e3:
            raise InconsistentSystemError(f"System of shape {shape} has no solution (residual {residual:.3e})")
        return list(solution), rank
