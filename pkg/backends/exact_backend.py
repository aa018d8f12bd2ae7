from fractions import Fraction

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from errors import InconsistentSystemError
from .base import ArithmeticBackend


def _to_qq(value):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_qq(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


class ExactBackend(ArithmeticBackend):
    """
    Exact rational arithmetic. Scalars are fractions.Fraction, linear algebra runs
    on sparse DomainMatrix objects over QQ.
    """
    mode = "exact"
    dtype = object

    def scalar(self, value):
        if isinstance(value, Fraction):
            return value
        if isinstance(value, np.integer):
            return Fraction(int(value))
        if isinstance(value, (float, np.floating)):
            return Fraction(str(float(value)))
        return Fraction(value)

    def is_zero(self, value) -> bool:
        return value == 0

    def encode(self, value):
        value = Fraction(value)
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"

    def _rref(self, matrix: dict, shape: tuple[int, int]):
        rows = {}
        for i, row in matrix.items():
            entries = {j: _to_qq(v) for j, v in row.items() if v != 0}
            if entries:
                rows[i] = entries
        reduced, pivots = DomainMatrix(rows, shape, QQ).rref()
        reduced_rows = {}
        for i, row in reduced.to_sparse().rep.items():
            reduced_rows[i] = {j: _from_qq(v) for j, v in row.items()}
        return reduced_rows, tuple(pivots)

    def rank(self, matrix: dict, shape: tuple[int, int]) -> int:
        return len(self._rref(matrix, shape)[1])

    def nullspace(self, matrix: dict, shape: tuple[int, int]) -> list[list]:
        reduced, pivots = self._rref(matrix, shape)
        pivot_set = set(pivots)
        basis = []
        for free in range(shape[1]):
            if free in pivot_set:
                continue
            vector = [Fraction(0)] * shape[1]
            vector[free] = Fraction(1)
            for i, pivot in enumerate(pivots):
                row = reduced.get(i, {})
                entry = row.get(free, 0)
                if entry != 0:
                    vector[pivot] = -entry / row[pivot]
            basis.append(vector)
        return basis

    def solve_particular(self, matrix: dict, shape: tuple[int, int], rhs: list) -> tuple[list, int]:
        rows, columns = shape
        augmented = {i: dict(row) for i, row in matrix.items()}
        for i, value in enumerate(rhs):
            if value != 0:
                augmented.setdefault(i, {})[columns] = value
        reduced, pivots = self._rref(augmented, (rows, columns + 1))
        if pivots and pivots[-1] == columns:
            raise InconsistentSystemError(f"System of shape {shape} has no solution")

        solution = [Fraction(0)] * columns
        for i, pivot in enumerate(pivots):
            row = reduced.get(i, {})
            solution[pivot] = row.get(columns, Fraction(0)) / row[pivot]
        return solution, len(pivots)
