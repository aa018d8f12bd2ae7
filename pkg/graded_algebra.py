"""
The |2|-graded Lie algebra g = sp(n+1,1) realized by (n+2)x(n+2) quaternionic matrices

    X = [[a,   z,   q ],
         [x̄,  A0, -z̄ᵗ],
         [p̄,  -xᵗ, -ā ]]

with a in H, A0 in sp(n), p, q in Im(H) and x, z in H^n. The grading is the eigenspace
decomposition of ad(ε0) with ε0 = diag(1, 0, ..., 0, -1): the entry (r, c) has degree
d_r - d_c where d = (1, 0, ..., 0, -1).
"""
from __future__ import annotations

import logging
from fractions import Fraction
from functools import cached_property

from backends import ArithmeticBackend, get_backend
from errors import DegreeError, DimensionMismatchError, InvalidInputError
from quaternion import Quaternion

logger = logging.getLogger(__name__)

DEGREES = (-2, -1, 0, 1, 2)


class GradedElement(object):
    """
    Element of sp(n+1,1) stored as a sparse quaternionic matrix {(row, column): Quaternion}.
    Zero entries are never stored.
    """
    __slots__ = ("_n", "_entries")

    def __init__(self, n: int, entries: dict | None = None):
        self._n = n
        self._entries = {}
        for key, value in (entries or {}).items():
            r, c = key
            if not (0 <= r < n + 2 and 0 <= c < n + 2):
                raise InvalidInputError(f"Entry {key} outside of a {n + 2}x{n + 2} matrix")
            if not value.is_zero():
                self._entries[key] = value

    @property
    def n(self) -> int:
        return self._n

    @property
    def entries(self) -> dict:
        return dict(self._entries)

    def entry(self, r: int, c: int) -> Quaternion:
        value = self._entries.get((r, c))
        if value is None:
            return Quaternion()
        return value

    def matrix(self) -> list[list[Quaternion]]:
        size = self._n + 2
        return [[self.entry(r, c) for c in range(size)] for r in range(size)]

    def degree_of_entry(self, r: int, c: int) -> int:
        return _row_weight(self._n, r) - _row_weight(self._n, c)

    def is_zero(self) -> bool:
        return not self._entries

    def degrees(self) -> set[int]:
        """
        Set of degrees in which this element has a nonzero component
        """
        return {self.degree_of_entry(r, c) for r, c in self._entries}

    def component(self, degree: int) -> GradedElement:
        return grading_project(self, degree)

    def is_member(self, is_zero=None) -> bool:
        """
        Check X*J + JX = 0 for the hermitian form J of signature (n+1, 1)
        :param is_zero: Optional zero test for scalars, exact comparison by default
        """
        last = self._n + 1

        def swap(i):
            return last if i == 0 else (0 if i == last else i)

        keys = set()
        for i, j in self._entries:
            keys.add((j, swap(i)))
            keys.add((swap(i), j))
        for r, c in keys:
            value = self.entry(swap(c), r).conjugate() + self.entry(swap(r), c)
            zero = value.is_zero() if is_zero is None else all(is_zero(v) for v in value.components)
            if not zero:
                return False
        return True

    def __add__(self, other: GradedElement) -> GradedElement:
        _check_same_n(self, other)
        result = dict(self._entries)
        for key, value in other._entries.items():
            result[key] = result[key] + value if key in result else value
        return GradedElement(self._n, result)

    def __neg__(self) -> GradedElement:
        return GradedElement(self._n, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: GradedElement) -> GradedElement:
        return self + (-other)

    def scale(self, factor) -> GradedElement:
        return GradedElement(self._n, {k: v * factor for k, v in self._entries.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self._n == other._n and self._entries == other._entries

    def __hash__(self):
        return hash((self._n, tuple(sorted(self._entries.items()))))

    def __repr__(self):
        return f"GradedElement(n={self._n}, {self._entries})"


def _row_weight(n: int, r: int) -> int:
    if r == 0:
        return 1
    if r == n + 1:
        return -1
    return 0


def _check_same_n(x: GradedElement, y: GradedElement):
    if x.n != y.n:
        raise DimensionMismatchError(f"Elements belong to different algebras (n={x.n} and n={y.n})")


def _multiply(x: GradedElement, y: GradedElement) -> dict:
    by_row = {}
    for (k, c), value in y.entries.items():
        by_row.setdefault(k, []).append((c, value))
    result = {}
    for (r, k), left in x.entries.items():
        for c, right in by_row.get(k, ()):
            product = left * right
            result[(r, c)] = result[(r, c)] + product if (r, c) in result else product
    return result


def bracket(x: GradedElement, y: GradedElement) -> GradedElement:
    """
    Matrix commutator XY - YX
    :raises DimensionMismatchError: if the elements belong to different n
    """
    _check_same_n(x, y)
    forward = _multiply(x, y)
    for key, value in _multiply(y, x).items():
        forward[key] = forward[key] - value if key in forward else -value
    return GradedElement(x.n, forward)


def trace_form(x: GradedElement, y: GradedElement):
    """
    B(X, Y) = 1/2 Re tr(XY)
    """
    _check_same_n(x, y)
    total = Fraction(0)
    for (r, k), left in x.entries.items():
        right = y.entries.get((k, r))
        if right is not None:
            total = total + (left * right).real
    return total / 2


def grading_project(x: GradedElement, degree: int) -> GradedElement:
    if degree not in DEGREES:
        raise DegreeError(f"Degree {degree} outside of -2..2")
    return GradedElement(x.n, {(r, c): v for (r, c), v in x.entries.items()
                               if x.degree_of_entry(r, c) == degree})


def grading_element(n: int, one=1) -> GradedElement:
    """
    The grading element ε0 = diag(1, 0, ..., 0, -1)
    """
    unit = Quaternion.unit(0, one)
    return GradedElement(n, {(0, 0): unit, (n + 1, n + 1): -unit})


def scale_representation_derivative(a: GradedElement):
    """
    Derivative of the scale representation, B(A, ε0); equals the ε0-coefficient of A
    :param a: Element of g0
    :raises DegreeError: if a has components outside of g0
    """
    if a.degrees() - {0}:
        raise DegreeError(f"Element has components in degrees {sorted(a.degrees())}, expected g0 only")
    return trace_form(a, grading_element(a.n))


class GradedAlgebra(object):
    """
    Ordered basis of sp(n+1,1) adapted to the grading, with coordinate read-off and
    a cached table of structure constants.

    Basis order: g-2 (ξ1, ξ2, ξ3), g-1 (e_1 ... e_4n), g0 (ε0, the sp(1) block, the sp(n)
    block), g1 (e^1 ... e^4n), g2 (η^1, η^2, η^3). The g1 and g2 elements are the
    B-duals of the g-1 and g-2 elements.
    """

    def __init__(self, n: int, backend: ArithmeticBackend | None = None):
        if n < 1:
            raise DegreeError(f"The algebra sp(n+1,1) needs n >= 1, got {n}")
        self.n = n
        self.backend = backend if backend is not None else get_backend("exact")
        self._one = self.backend.one
        self._labels = []
        self._basis = self._build_basis()
        self._structure_constants = None
        logger.debug(f"Built sp({n + 1},1) with dimension {self.dimension}")

    # Layout

    @property
    def dimension(self) -> int:
        return len(self._basis)

    @property
    def dim_g0(self) -> int:
        return 4 + self.n * (2 * self.n + 1)

    @property
    def dim_spn(self) -> int:
        return self.n * (2 * self.n + 1)

    def offset(self, degree: int) -> int:
        sizes = {-2: 3, -1: 4 * self.n, 0: self.dim_g0, 1: 4 * self.n, 2: 3}
        if degree not in sizes:
            raise DegreeError(f"Degree {degree} outside of -2..2")
        return sum(sizes[d] for d in DEGREES if d < degree)

    def indices(self, degree: int) -> range:
        start = self.offset(degree)
        if degree == 2:
            return range(start, self.dimension)
        return range(start, self.offset(degree + 1))

    def degree(self, index: int) -> int:
        for d in reversed(DEGREES):
            if index >= self.offset(d):
                return d
        raise DegreeError(f"Invalid basis index {index}")

    @cached_property
    def degrees_by_index(self) -> tuple[int, ...]:
        return tuple(self.degree(i) for i in range(self.dimension))

    @property
    def negative_indices(self) -> range:
        return range(0, self.offset(0))

    def v_index(self, s: int) -> int:
        """Index of ξ_s, s in 1..3"""
        return s - 1

    def d_index(self, a: int) -> int:
        """Index of e_a, a counted from 0"""
        return 3 + a

    def dstar_index(self, a: int) -> int:
        return self.offset(1) + a

    def vstar_index(self, s: int) -> int:
        return self.offset(2) + s - 1

    def g0_index(self, k: int) -> int:
        return self.offset(0) + k

    def dual_index(self, index: int) -> int:
        """
        Index of the B-dual in p+ of a g- basis element
        """
        if index < 3:
            return self.offset(2) + index
        if index < self.offset(0):
            return self.offset(1) + index - 3
        raise DegreeError(f"Basis element {index} is not in g-")

    def label(self, index: int) -> str:
        return self._labels[index]

    def element(self, index: int) -> GradedElement:
        return self._basis[index]

    @property
    def basis(self) -> list[GradedElement]:
        return list(self._basis)

    def _build_basis(self) -> list[GradedElement]:
        n, one = self.n, self._one
        last = n + 1
        unit = [Quaternion.unit(s, one) for s in range(4)]
        basis = []

        def add(label, entries):
            self._labels.append(label)
            basis.append(GradedElement(n, entries))

        for s in range(1, 4):
            add(f"xi{s}", {(last, 0): unit[s].conjugate()})
        for alpha in range(n):
            for s in range(4):
                add(f"e{4 * alpha + s + 1}", {(1 + alpha, 0): unit[s].conjugate(), (last, 1 + alpha): -unit[s]})
        add("eps0", {(0, 0): unit[0], (last, last): -unit[0]})
        for s in range(1, 4):
            add(f"I{s}", {(0, 0): unit[s], (last, last): unit[s]})
        for alpha in range(n):
            for s in range(1, 4):
                add(f"sp[{alpha},{alpha}]{s}", {(1 + alpha, 1 + alpha): unit[s]})
        for alpha in range(n):
            for beta in range(alpha + 1, n):
                for s in range(4):
                    add(f"sp[{alpha},{beta}]{s}", {(1 + alpha, 1 + beta): unit[s],
                                                   (1 + beta, 1 + alpha): -unit[s].conjugate()})
        for alpha in range(n):
            for s in range(4):
                add(f"f{4 * alpha + s + 1}", {(0, 1 + alpha): unit[s], (1 + alpha, last): -unit[s].conjugate()})
        for s in range(1, 4):
            add(f"eta{s}", {(0, last): unit[s] * 2})
        return basis

    # Coordinates

    def coordinates(self, x: GradedElement) -> list:
        """
        Read off the coefficients of x against the basis
        :raises DimensionMismatchError: if x belongs to another n
        :raises InvalidInputError: if x is not in sp(n+1,1)
        """
        if x.n != self.n:
            raise DimensionMismatchError(f"Element with n={x.n} in algebra with n={self.n}")
        if not x.is_member(self.backend.is_zero):
            raise InvalidInputError("Matrix is not an element of sp(n+1,1)")
        n, last = self.n, self.n + 1
        zero = self.backend.zero
        result = []
        result.extend(-x.entry(last, 0).component(s) + zero for s in range(1, 4))
        for alpha in range(n):
            value = x.entry(1 + alpha, 0).conjugate()
            result.extend(value.component(s) + zero for s in range(4))
        corner = x.entry(0, 0)
        result.extend(corner.component(s) + zero for s in range(4))
        for alpha in range(n):
            value = x.entry(1 + alpha, 1 + alpha)
            result.extend(value.component(s) + zero for s in range(1, 4))
        for alpha in range(n):
            for beta in range(alpha + 1, n):
                value = x.entry(1 + alpha, 1 + beta)
                result.extend(value.component(s) + zero for s in range(4))
        for alpha in range(n):
            value = x.entry(0, 1 + alpha)
            result.extend(value.component(s) + zero for s in range(4))
        top = x.entry(0, last)
        result.extend((top.component(s) + zero) / 2 for s in range(1, 4))
        return result

    def sparse_coordinates(self, x: GradedElement) -> dict:
        return {i: v for i, v in enumerate(self.coordinates(x)) if not self.backend.is_zero(v)}

    def from_coordinates(self, coefficients) -> GradedElement:
        """
        Build the element with the given coefficients, either a full list or a sparse {index: value}
        """
        items = coefficients.items() if isinstance(coefficients, dict) else enumerate(coefficients)
        result = GradedElement(self.n)
        for index, value in items:
            if value != 0:
                result = result + self._basis[index].scale(value)
        return result

    # Structure constants

    @property
    def structure_constants(self) -> dict:
        """
        Table {(i, j): {k: c}} with [b_i, b_j] = sum_k c b_k for i < j; zero brackets are omitted
        """
        if self._structure_constants is None:
            table = {}
            for i in range(self.dimension):
                for j in range(i + 1, self.dimension):
                    if abs(self.degrees_by_index[i] + self.degrees_by_index[j]) > 2:
                        continue
                    value = bracket(self._basis[i], self._basis[j])
                    if not value.is_zero():
                        table[(i, j)] = self.sparse_coordinates(value)
            self._structure_constants = table
            logger.debug(f"Computed {len(table)} nonzero structure constants for n={self.n}")
        return self._structure_constants

    def bracket_basis(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return self.structure_constants.get((i, j), {})
        return {k: -v for k, v in self.structure_constants.get((j, i), {}).items()}

    def bracket_coordinates(self, x: dict, y: dict) -> dict:
        """
        Bracket of two elements given by sparse coordinates
        """
        result = {}
        for i, xi in x.items():
            for j, yj in y.items():
                for k, c in self.bracket_basis(i, j).items():
                    result[k] = result.get(k, 0) + xi * yj * c
        return {k: v for k, v in result.items() if not self.backend.is_zero(v)}

    # Invariant forms

    def pairing_matrix(self) -> list[list]:
        """
        Gram matrix B(b_i, b_dual(j)) between g- and its designated dual basis in p+
        """
        negative = list(self.negative_indices)
        return [[trace_form(self._basis[i], self._basis[self.dual_index(j)]) for j in negative] for i in negative]

    def ad_matrix(self, index: int) -> list[list]:
        size = self.dimension
        matrix = [[self.backend.zero] * size for _ in range(size)]
        for j in range(size):
            for k, c in self.bracket_basis(index, j).items():
                matrix[k][j] = c
        return matrix

    def killing_form(self, x: GradedElement, y: GradedElement):
        """
        Killing form tr(ad X ad Y)
        """
        x_coordinates = self.sparse_coordinates(x)
        y_coordinates = self.sparse_coordinates(y)
        total = 0
        for j in range(self.dimension):
            image = self.bracket_coordinates(y_coordinates, {j: self._one})
            image = self.bracket_coordinates(x_coordinates, image)
            total = total + image.get(j, 0)
        return total

    def killing_multiple(self):
        """
        Constant c with Killing = c * B, read off on the grading element (B(ε0, ε0) = 1)
        """
        eps = grading_element(self.n, self._one)
        return self.killing_form(eps, eps) / trace_form(eps, eps)


def build_algebra(n: int, backend: ArithmeticBackend | None = None) -> GradedAlgebra:
    """
    Build the graded basis of sp(n+1,1)
    :param n: Quaternionic dimension of the contact distribution, n >= 1
    :param backend: Arithmetic backend, exact by default
    :return: The graded algebra with its basis
    """
    return GradedAlgebra(n, backend)
