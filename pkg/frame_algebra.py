"""
Pointwise tensor algebra of a quaternionic contact structure in an adapted frame.

The graded components of sp(n+1,1) are identified with

    g-2 = V, g-1 = D, g0 = End0(D), g1 = D*, g2 = V*

where V carries the basis ξ1, ξ2, ξ3, D the orthonormal frame e_1 ... e_4n with
e_{4α+s} = I_s(e_{4α}), and End0(D) = R·Id + sp(1) + sp(n). The closed-form bracket
table below must agree with the matrix commutator transported through `identify`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from backends import ArithmeticBackend, get_backend
from errors import DegreeError, DimensionMismatchError, InvalidInputError, MalformedEndomorphismError
from graded_algebra import GradedAlgebra, GradedElement, bracket
from quaternion import Quaternion, quat_mul

logger = logging.getLogger(__name__)

V = "V"
D = "D"
END0 = "End0"
DSTAR = "Dstar"
VSTAR = "Vstar"
ZERO = "Zero"

DEGREE_OF_KIND = {V: -2, D: -1, END0: 0, DSTAR: 1, VSTAR: 2}
KIND_OF_DEGREE = {d: k for k, d in DEGREE_OF_KIND.items()}

# cyclic permutations (r, s, t) of (1, 2, 3)
CYCLIC = ((1, 2, 3), (2, 3, 1), (3, 1, 2))


class AdaptedFrame(object):
    """
    Orthonormal frame of D with the quaternionic triple I_1, I_2, I_3 as 4n x 4n matrices.
    I_s acts on the block of e_{4α}, ..., e_{4α+3} as left multiplication by i_s on H.
    """

    def __init__(self, n: int, backend: ArithmeticBackend | None = None):
        if n < 1:
            raise DegreeError(f"An adapted frame needs n >= 1, got {n}")
        self.n = n
        self.backend = backend if backend is not None else get_backend("exact")
        self.dim = 4 * n
        one = self.backend.one
        self._structures = [self.backend.identity(self.dim)]
        for s in range(1, 4):
            block = self.backend.zeros((4, 4))
            for j in range(4):
                image = quat_mul(Quaternion.unit(s, one), Quaternion.unit(j, one))
                for i in range(4):
                    block[i, j] = image.component(i)
            matrix = self.backend.zeros((self.dim, self.dim))
            for alpha in range(n):
                matrix[4 * alpha:4 * alpha + 4, 4 * alpha:4 * alpha + 4] = block
            self._structures.append(matrix)

    def I(self, s: int) -> np.ndarray:
        """
        Complex structure I_s for s in 1..3; I_0 is the identity
        """
        return self._structures[s]

    @property
    def identity(self) -> np.ndarray:
        return self._structures[0]

    @cached_property
    def algebra(self) -> GradedAlgebra:
        return GradedAlgebra(self.n, self.backend)

    @cached_property
    def g0_endomorphisms(self) -> list:
        """
        Endomorphisms of D of the g0 basis elements (ε0, I_1..I_3, the sp(n) basis)
        """
        return [endomorphism_from_g0(self.algebra.element(i), self) for i in self.algebra.indices(0)]

    def basis_vector(self, a: int) -> np.ndarray:
        vector = self.backend.zeros(self.dim)
        vector[a] = self.backend.one
        return vector

    def zeros(self, kind: str) -> np.ndarray:
        shapes = {V: (3,), D: (self.dim,), END0: (self.dim, self.dim), DSTAR: (self.dim,), VSTAR: (3,)}
        return self.backend.zeros(shapes[kind])


@dataclass(frozen=True, eq=False)
class GradedTensor:
    """
    A value in exactly one of V, D, End0(D), D*, V*. Vectors in V and V* are stored by their
    coefficients against ξ_s and η^s; covectors in D* by their values on e_a.
    """
    kind: str
    value: np.ndarray | None

    def __post_init__(self):
        if self.kind not in DEGREE_OF_KIND and self.kind != ZERO:
            raise InvalidInputError(f"Unknown tensor type: {self.kind}")

    @property
    def degree(self) -> int | None:
        return DEGREE_OF_KIND.get(self.kind)

    @staticmethod
    def zero() -> GradedTensor:
        """
        The zero value of a bracket landing outside of degrees -2..2
        """
        return GradedTensor(ZERO, None)

    def matches(self, other: GradedTensor, backend: ArithmeticBackend) -> bool:
        if self.kind == ZERO or other.kind == ZERO:
            return all(t.kind == ZERO or backend.all_zero(t.value) for t in (self, other))
        return self.kind == other.kind and backend.allclose(self.value, other.value)

    def __neg__(self) -> GradedTensor:
        if self.kind == ZERO:
            return self
        return GradedTensor(self.kind, -self.value)


def _check_frame(frame: AdaptedFrame, size: int):
    if size not in (3, frame.dim):
        raise DimensionMismatchError(f"Tensor of size {size} does not fit a frame with n={frame.n}")


# Traces, Casimir operator and projections

def trace_with(a: np.ndarray, s: int, frame: AdaptedFrame):
    """
    tr_{I_s}(A) = sum_a g(A e_a, I_s e_a)
    """
    return np.sum(a * frame.I(s))


def casimir(a: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    """
    C(A) = -sum_s I_s A I_s with eigenvalues 3 and -1
    """
    return -sum(frame.I(s) @ a @ frame.I(s) for s in range(1, 4))


def part_three(a: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    return (a + casimir(a, frame)) / 4


def part_minus_one(a: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    return (3 * a - casimir(a, frame)) / 4


def form_casimir(form: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    """
    Casimir operator on bilinear forms: F(u, v) -> sum_s F(I_s u, I_s v)
    """
    return sum(frame.I(s).T @ form @ frame.I(s) for s in range(1, 4))


def sharp(form: np.ndarray) -> np.ndarray:
    """
    Endomorphism F^♯ with F(u, v) = g(F^♯ u, v); forms are stored as F[a, b] = F(e_a, e_b)
    """
    return form.T.copy()


def flat(endomorphism: np.ndarray) -> np.ndarray:
    return endomorphism.T.copy()


@dataclass(frozen=True)
class TraceDecomposition:
    traces: tuple
    sp1: np.ndarray
    spn: np.ndarray
    minus_one: np.ndarray
    three: np.ndarray
    symmetric: np.ndarray
    antisymmetric: np.ndarray


def traces_and_projections(a: np.ndarray, frame: AdaptedFrame) -> TraceDecomposition:
    """
    Split an endomorphism of D into its traces and Casimir/symmetry parts
    :param a: Endomorphism as a 4n x 4n matrix
    :param frame: Adapted frame
    :return: Traces tr_{I_0..I_3}, sp(1) part, sp(n) part, [-1] and [3] parts, (anti)symmetric parts
    """
    traces = tuple(trace_with(a, s, frame) for s in range(4))
    sp1 = sum(frame.I(s) * (traces[s] / frame.dim) for s in range(1, 4))
    antisymmetric = (a - a.T) / 2
    symmetric = (a + a.T) / 2
    return TraceDecomposition(
        traces=traces,
        sp1=sp1,
        spn=part_three(antisymmetric, frame),
        minus_one=part_minus_one(a, frame),
        three=part_three(a, frame),
        symmetric=symmetric,
        antisymmetric=antisymmetric,
    )


def end0_decompose(phi: np.ndarray, frame: AdaptedFrame) -> tuple:
    """
    Unique decomposition Φ = q0 Id + sum_s q_s I_s + Φ0 with Φ0 in sp(n)
    :return: (q0, (q1, q2, q3), Φ0)
    :raises MalformedEndomorphismError: if Φ is not in End0(D)
    """
    backend = frame.backend
    if phi.shape != (frame.dim, frame.dim):
        raise MalformedEndomorphismError(f"Expected a {frame.dim}x{frame.dim} matrix, got {phi.shape}")
    q0 = trace_with(phi, 0, frame) / frame.dim
    q = tuple(trace_with(phi, s, frame) / frame.dim for s in range(1, 4))
    rest = phi - frame.identity * q0 - sum(frame.I(s) * q[s - 1] for s in range(1, 4))
    if not backend.allclose(rest, -rest.T):
        raise MalformedEndomorphismError("The sp(n) part of the endomorphism is not skew")
    for s in range(1, 4):
        if not backend.allclose(rest @ frame.I(s), frame.I(s) @ rest):
            raise MalformedEndomorphismError(f"The sp(n) part does not commute with I_{s}")
    return q0, q, rest


def end0_compose(q0, q, phi0: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    return frame.identity * q0 + sum(frame.I(s) * q[s - 1] for s in range(1, 4)) + phi0


# Identifications

def identify(t: GradedTensor, frame: AdaptedFrame) -> GradedElement:
    """
    Map a graded tensor to the corresponding element of sp(n+1,1)
    :raises MalformedEndomorphismError: if an End0 value does not decompose
    """
    algebra = frame.algebra
    if t.kind == ZERO:
        return GradedElement(frame.n)
    _check_frame(frame, t.value.shape[0])
    if t.kind == V:
        return algebra.from_coordinates({algebra.v_index(s): t.value[s - 1] for s in range(1, 4)})
    if t.kind == D:
        return algebra.from_coordinates({algebra.d_index(a): t.value[a] for a in range(frame.dim)})
    if t.kind == DSTAR:
        return algebra.from_coordinates({algebra.dstar_index(a): t.value[a] for a in range(frame.dim)})
    if t.kind == VSTAR:
        return algebra.from_coordinates({algebra.vstar_index(s): t.value[s - 1] for s in range(1, 4)})
    return _identify_endomorphism(t.value, frame)


def _identify_endomorphism(phi: np.ndarray, frame: AdaptedFrame) -> GradedElement:
    q0, q, phi0 = end0_decompose(phi, frame)
    n, last = frame.n, frame.n + 1
    scalar = Quaternion(q0, *q)
    entries = {(0, 0): -scalar.conjugate(), (last, last): scalar}
    for alpha in range(n):
        for beta in range(n):
            # A_{αβ} = sum_s i_s g(Φ0 e_{4α}, e_{4β+s}), placed conjugated at (β, α)
            value = Quaternion(*(phi0[4 * beta + s, 4 * alpha] for s in range(4)))
            entries[(1 + beta, 1 + alpha)] = value.conjugate()
    return GradedElement(n, entries)


def identify_inverse(x: GradedElement, frame: AdaptedFrame) -> GradedTensor:
    """
    Inverse of identify for an element of a single degree
    :raises DegreeError: if x has components in more than one degree
    """
    degrees = x.degrees()
    if not degrees:
        return GradedTensor.zero()
    if len(degrees) > 1:
        raise DegreeError(f"Element is not homogeneous, degrees {sorted(degrees)}")
    degree = degrees.pop()
    if degree == 0:
        return GradedTensor(END0, endomorphism_from_g0(x, frame))
    algebra = frame.algebra
    coordinates = algebra.coordinates(x)
    indices = algebra.indices(degree)
    return GradedTensor(KIND_OF_DEGREE[degree], frame.backend.array([coordinates[i] for i in indices]))


def endomorphism_from_g0(x: GradedElement, frame: AdaptedFrame) -> np.ndarray:
    """
    The endomorphism u -> [X, u] of D for X in g0
    """
    algebra = frame.algebra
    result = frame.backend.zeros((frame.dim, frame.dim))
    d_offset = algebra.offset(-1)
    for a in range(frame.dim):
        image = algebra.coordinates(bracket(x, algebra.element(algebra.d_index(a))))
        for c in range(frame.dim):
            result[c, a] = image[d_offset + c]
    return result


def g0_coordinates_to_endomorphism(coordinates: dict, frame: AdaptedFrame) -> np.ndarray:
    """
    Endomorphism of a g0 element given by sparse coordinates of the full algebra
    """
    algebra = frame.algebra
    result = frame.backend.zeros((frame.dim, frame.dim))
    for index, value in coordinates.items():
        result = result + frame.g0_endomorphisms[index - algebra.offset(0)] * value
    return result


def h_basis(frame: AdaptedFrame) -> list:
    """
    Basis of sp(1) + sp(n) as endomorphisms of D
    """
    return frame.g0_endomorphisms[1:]


def transported_bracket(a: GradedTensor, b: GradedTensor, frame: AdaptedFrame) -> GradedTensor:
    """
    identify^-1([identify(a), identify(b)]), the reference for the bracket table
    """
    return identify_inverse(bracket(identify(a, frame), identify(b, frame)), frame)


# Closed-form bracket table

def wedge_operator(u: np.ndarray, phi: np.ndarray, s: int, frame: AdaptedFrame) -> np.ndarray:
    """
    The endomorphism v -> φ(I_s v) I_s u - g(u, I_s v) I_s φ^♯; s = 0 gives u∧φ
    """
    structure = frame.I(s)
    return np.outer(structure @ u, structure.T @ phi) - np.outer(structure @ phi, structure.T @ u)


def _scalar_and_sp1(phi: np.ndarray, frame: AdaptedFrame) -> tuple:
    q0 = trace_with(phi, 0, frame) / frame.dim
    q = frame.backend.array([trace_with(phi, s, frame) / frame.dim for s in range(1, 4)])
    return q0, q


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.array([a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]],
                    dtype=a.dtype)


def _bracket_ordered(a: GradedTensor, b: GradedTensor, frame: AdaptedFrame) -> GradedTensor:
    # a.degree <= b.degree
    x, y = a.value, b.value
    pair = (a.kind, b.kind)
    if pair == (V, END0):
        q0, q = _scalar_and_sp1(y, frame)
        return GradedTensor(V, -(x * (2 * q0) + _cross(q, x) * 2))
    if pair == (V, DSTAR):
        return GradedTensor(D, sum(frame.I(s) @ y * x[s - 1] for s in range(1, 4)))
    if pair == (V, VSTAR):
        cross = _cross(x, y)
        value = frame.identity * (2 * np.dot(x, y)) - sum(frame.I(r) * (2 * cross[r - 1]) for r in range(1, 4))
        return GradedTensor(END0, value)
    if pair == (D, D):
        return GradedTensor(V, frame.backend.array([-2 * np.dot(frame.I(s) @ x, y) for s in range(1, 4)]))
    if pair == (D, END0):
        return GradedTensor(D, -(y @ x))
    if pair == (D, DSTAR):
        value = frame.identity * np.dot(y, x)
        value = value - sum(frame.I(s) * np.dot(y, frame.I(s) @ x) for s in range(1, 4))
        value = value + wedge_operator(x, y, 0, frame)
        value = value - sum(wedge_operator(x, y, s, frame) for s in range(1, 4))
        return GradedTensor(END0, value)
    if pair == (D, VSTAR):
        return GradedTensor(DSTAR, sum(frame.I(s) @ x * (2 * y[s - 1]) for s in range(1, 4)))
    if pair == (END0, END0):
        return GradedTensor(END0, x @ y - y @ x)
    if pair == (END0, DSTAR):
        return GradedTensor(DSTAR, -(x.T @ y))
    if pair == (END0, VSTAR):
        q0, q = _scalar_and_sp1(x, frame)
        return GradedTensor(VSTAR, y * (-2 * q0) + _cross(q, y) * 2)
    if pair == (DSTAR, DSTAR):
        return GradedTensor(VSTAR, frame.backend.array([-np.dot(x, frame.I(s) @ y) for s in range(1, 4)]))
    raise InvalidInputError(f"No bracket rule for {pair}")


def algebraic_bracket(a: GradedTensor, b: GradedTensor, frame: AdaptedFrame) -> GradedTensor:
    """
    Bracket of two graded tensors from the closed-form table
    :param a: First argument
    :param b: Second argument
    :param frame: Adapted frame shared by both arguments
    :return: The bracket; GradedTensor.zero() if the degrees add up outside of -2..2
    """
    if a.kind == ZERO or b.kind == ZERO:
        return GradedTensor.zero()
    for t in (a, b):
        _check_frame(frame, t.value.shape[0])
    if abs(a.degree + b.degree) > 2:
        return GradedTensor.zero()
    if a.degree <= b.degree:
        return _bracket_ordered(a, b, frame)
    return -_bracket_ordered(b, a, frame)


def codiff_trace_map(a: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    """
    Closed form of sum_a {A e_a, e^a}: sum_s tr_{I_s}(A) I_s + 8 A_sp(n)
    """
    decomposition = traces_and_projections(a, frame)
    result = sum(frame.I(s) * decomposition.traces[s] for s in range(4))
    return result + decomposition.spn * 8


def codiff_trace_map_by_brackets(a: np.ndarray, frame: AdaptedFrame) -> np.ndarray:
    result = frame.zeros(END0)
    for index in range(frame.dim):
        image = GradedTensor(D, a @ frame.basis_vector(index))
        result = result + algebraic_bracket(image, GradedTensor(DSTAR, frame.basis_vector(index)), frame).value
    return result
