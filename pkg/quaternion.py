from __future__ import annotations

from typing import Iterable, Sequence

COLUMN = "column"
ROW = "row"


class Quaternion(object):
    """
    Immutable quaternion w + x i + y j + z k.
    Components may be any scalar type supporting field arithmetic (Fraction or float);
    the type of the components is never converted here.
    """
    __slots__ = ("_components",)

    def __init__(self, w=0, x=0, y=0, z=0):
        object.__setattr__(self, "_components", (w, x, y, z))

    def __setattr__(self, key, value):
        raise AttributeError("Quaternion is immutable")

    @staticmethod
    def unit(s: int, one=1) -> Quaternion:
        """
        Return i_s with i_0 = 1, i_1 = i, i_2 = j, i_3 = k
        :param s: Index in 0..3
        :param one: Scalar one of the arithmetic in use
        :return: The unit quaternion i_s
        """
        if s not in (0, 1, 2, 3):
            raise ValueError(f"Invalid quaternion unit index: {s}")
        components = [one * 0] * 4
        components[s] = one
        return Quaternion(*components)

    @staticmethod
    def from_components(components: Sequence) -> Quaternion:
        if len(components) != 4:
            raise ValueError(f"A quaternion has 4 components, got {len(components)}")
        return Quaternion(*components)

    @property
    def w(self):
        return self._components[0]

    @property
    def x(self):
        return self._components[1]

    @property
    def y(self):
        return self._components[2]

    @property
    def z(self):
        return self._components[3]

    @property
    def components(self) -> tuple:
        return self._components

    def component(self, s: int):
        return self._components[s]

    @property
    def real(self):
        return self._components[0]

    @property
    def imag(self) -> Quaternion:
        return Quaternion(self.w * 0, self.x, self.y, self.z)

    def conjugate(self) -> Quaternion:
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_squared(self):
        return sum(c * c for c in self._components)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self._components)

    def map(self, function) -> Quaternion:
        return Quaternion(*(function(c) for c in self._components))

    def __add__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a + b for a, b in zip(self._components, other._components)))

    def __sub__(self, other: Quaternion) -> Quaternion:
        return Quaternion(*(a - b for a, b in zip(self._components, other._components)))

    def __neg__(self) -> Quaternion:
        return Quaternion(*(-a for a in self._components))

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return quat_mul(self, other)
        return Quaternion(*(a * other for a in self._components))

    def __rmul__(self, other):
        # scalars are central
        return Quaternion(*(other * a for a in self._components))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self._components == other._components

    def __hash__(self):
        return hash(self._components)

    def __repr__(self):
        return f"Quaternion({', '.join(str(c) for c in self._components)})"


def quat_mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """
    Hamilton product with i*j = k, j*k = i, k*i = j
    """
    aw, ax, ay, az = a.components
    bw, bx, by, bz = b.components
    return Quaternion(
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_conj_re_im(a: Quaternion) -> tuple[Quaternion, object, Quaternion]:
    """
    Split a quaternion into conjugate, real part and imaginary part
    :param a: Quaternion to split
    :return: (conjugate, real part as scalar, imaginary part as quaternion)
    """
    return a.conjugate(), a.real, a.imag


class QuaternionVector(object):
    """
    Element of H^n, either a column vector (acted on by matrices from the left and by
    scalars from the right) or a row covector.
    """
    __slots__ = ("_entries", "_orientation")

    def __init__(self, entries: Iterable[Quaternion], orientation: str = COLUMN):
        if orientation not in (COLUMN, ROW):
            raise ValueError(f"Invalid orientation: {orientation}")
        object.__setattr__(self, "_entries", tuple(entries))
        object.__setattr__(self, "_orientation", orientation)

    def __setattr__(self, key, value):
        raise AttributeError("QuaternionVector is immutable")

    @staticmethod
    def basis(n: int, alpha: int, orientation: str = COLUMN, one=1) -> QuaternionVector:
        """
        Standard basis vector d_alpha (column) or d^alpha (row), alpha counted from 0
        """
        zero = Quaternion.unit(0, one) * 0
        entries = [zero] * n
        entries[alpha] = Quaternion.unit(0, one)
        return QuaternionVector(entries, orientation)

    @property
    def entries(self) -> tuple[Quaternion, ...]:
        return self._entries

    @property
    def orientation(self) -> str:
        return self._orientation

    @property
    def n(self) -> int:
        return len(self._entries)

    def transpose(self) -> QuaternionVector:
        return QuaternionVector(self._entries, ROW if self._orientation == COLUMN else COLUMN)

    def conjugate(self) -> QuaternionVector:
        return QuaternionVector((e.conjugate() for e in self._entries), self._orientation)

    def pair(self, vector: QuaternionVector):
        """
        Evaluate this covector on a column vector: sum of entrywise products
        :param vector: Column vector of the same length
        :return: Quaternion value of the pairing
        """
        if self._orientation != ROW or vector.orientation != COLUMN:
            raise ValueError("Pairing needs a row covector and a column vector")
        if self.n != vector.n:
            raise ValueError(f"Length mismatch: {self.n} vs {vector.n}")
        total = Quaternion.unit(0) * 0
        for a, b in zip(self._entries, vector.entries):
            total = total + a * b
        return total

    def __add__(self, other: QuaternionVector) -> QuaternionVector:
        return QuaternionVector((a + b for a, b in zip(self._entries, other.entries)), self._orientation)

    def __neg__(self) -> QuaternionVector:
        return QuaternionVector((-a for a in self._entries), self._orientation)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QuaternionVector):
            return NotImplemented
        return self._entries == other.entries and self._orientation == other.orientation

    def __hash__(self):
        return hash((self._entries, self._orientation))

    def __repr__(self):
        return f"QuaternionVector({list(self._entries)}, {self._orientation})"


def right_scalar_action(x: QuaternionVector, q: Quaternion) -> QuaternionVector:
    """
    Multiply every entry of a vector by q from the right.
    On the identified vector u with x-bar = entries, I_s(u) corresponds to x-bar * conj(i_s).
    """
    return QuaternionVector((e * q for e in x.entries), x.orientation)


def left_matrix_action(matrix: Sequence[Sequence[Quaternion]], x: QuaternionVector) -> QuaternionVector:
    if x.orientation != COLUMN:
        raise ValueError("Matrices act on column vectors")
    result = []
    for row in matrix:
        total = x.entries[0] * 0
        for a, b in zip(row, x.entries):
            total = total + a * b
        result.append(total)
    return QuaternionVector(result, COLUMN)
