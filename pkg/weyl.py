"""
Homogeneity-two part of the normal Weyl form of a qc structure: the Weyl connection
correction α_qc, the codifferential of the total curvature, the tensor L (minus the
Rho-tensor) and the obstruction tensor W^qc(2). Every result has a closed form and a second
route through the cochain complex or the bracket table.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from cohomology import Cochain, KostantComplex, cochain_to_form, codifferential, differential
from errors import SingularSystemError
from frame_algebra import (CYCLIC, D, DSTAR, END0, V, VSTAR, GradedTensor, algebraic_bracket,
                           codiff_trace_map, g0_coordinates_to_endomorphism, identify, sharp)
from graded_algebra import bracket
from qc_data import QCPointData, ricci_family

logger = logging.getLogger(__name__)


@dataclass
class AlphaSolution:
    """
    Solution α(ξ_r) = f I_r + c (I_r T0♯ + T0♯ I_r) of the homogeneity-two equation on V.
    When T0 = 0 the equation does not see c: c_determined is False and c carries the closed-form 1/4.
    """
    f: object
    c: object
    alpha: list
    residual: float
    c_determined: bool = True


@dataclass
class JointSolution:
    unknowns: int
    rank: int
    solution_dimension: int
    contains_alpha_qc: bool


@dataclass
class WqcResult:
    route_a: np.ndarray
    route_b: np.ndarray
    routes_agree: bool
    antisymmetric: bool
    max_abs: float


def _constant(data: QCPointData, numerator: int, denominator: int = 1):
    return data.backend.scalar(Fraction(numerator, denominator))


def _unit(data: QCPointData, kind: str, index: int) -> np.ndarray:
    vector = data.frame.zeros(kind)
    vector[index] = data.backend.one
    return vector


def _third(r: int, s: int) -> tuple[int, int]:
    """
    t and the sign of (r, s, t) for distinct r, s in 1..3
    """
    for cycle in CYCLIC:
        if cycle[:2] == (r, s):
            return cycle[2], 1
        if cycle[:2] == (s, r):
            return cycle[2], -1
    raise ValueError(f"No third index for ({r}, {s})")


# Weyl connection

def alpha_qc(data: QCPointData) -> list:
    """
    α_qc(ξ_r) = 1/4 (I_r T0♯ + T0♯ I_r) + scal/(32n(n+2)) I_r
    :return: [α_qc(ξ_1), α_qc(ξ_2), α_qc(ξ_3)] as endomorphisms of D
    """
    return alpha_ansatz(data, data.scal / (32 * data.n * (data.n + 2)), _constant(data, 1, 4))


def alpha_ansatz(data: QCPointData, f, c) -> list:
    frame = data.frame
    s = sharp(data.T0)
    return [frame.I(r) * f + (frame.I(r) @ s + s @ frame.I(r)) * c for r in range(1, 4)]


def corr_alpha(alpha: list, data: QCPointData) -> list:
    """
    The α-dependent part of (∂*K^α(2))(ξ_r):
        sum_a {{α(ξ_r), ξ_a} - {α(ξ_a), ξ_r}, η^a} + sum_s tr_{I_s}(α(ξ_r)) I_s + 8 α(ξ_r)_sp(n) + 4n α(ξ_r)
    """
    frame = data.frame
    result = []
    for r in range(1, 4):
        total = frame.zeros(END0)
        for a in range(1, 4):
            first = algebraic_bracket(GradedTensor(END0, alpha[r - 1]), GradedTensor(V, _unit(data, V, a - 1)), frame)
            second = algebraic_bracket(GradedTensor(END0, alpha[a - 1]), GradedTensor(V, _unit(data, V, r - 1)), frame)
            difference = GradedTensor(V, first.value - second.value)
            total = total + algebraic_bracket(difference, GradedTensor(VSTAR, _unit(data, VSTAR, a - 1)), frame).value
        total = total + codiff_trace_map(alpha[r - 1], frame) + alpha[r - 1] * (4 * data.n)
        result.append(total)
    return result


def codiff_K2_on_V_closed_form(alpha: list, data: QCPointData) -> list:
    """
    (∂*K^α(2))(ξ_r) = -scal/(2n(n+2)) I_r + 2n τ_r♯ + corr(α)(ξ_r)
    """
    n, frame = data.n, data.frame
    tau = ricci_family(data).tau
    correction = corr_alpha(alpha, data)
    return [frame.I(r) * (-data.scal / (2 * n * (n + 2))) + sharp(tau[r - 1]) * (2 * n) + correction[r - 1]
            for r in range(1, 4)]


def assemble_K(alpha: list, data: QCPointData) -> Cochain:
    """
    The homogeneity-two total curvature K^α(2) as a 2-cochain on g-:
        K(ξ_r, ξ_s) = -scal/(8n(n+2)) ξ_t + {α(ξ_r), ξ_s} - {α(ξ_s), ξ_r}  for cyclic (r, s, t)
        K(ξ_r, u) = T_ξr(u) + α(ξ_r)(u)
        K(u, v) = R(u, v) + 2 sum_r g(I_r u, v) α(ξ_r)
    Brackets are matrix commutators in sp(n+1,1).
    """
    n, frame = data.n, data.frame
    algebra = frame.algebra
    values = {}
    constant = data.scal / (8 * n * (n + 2))
    xi = [identify(GradedTensor(V, _unit(data, V, r)), frame) for r in range(3)]
    alpha_elements = [identify(GradedTensor(END0, a), frame) for a in alpha]
    for r, s in itertools.combinations(range(1, 4), 2):
        t, sign = _third(r, s)
        # the constant term changes sign when (r, s, t) is not cyclic
        value = xi[t - 1].scale(-constant * sign)
        value = value + bracket(alpha_elements[r - 1], xi[s - 1]) - bracket(alpha_elements[s - 1], xi[r - 1])
        values[(algebra.v_index(r), algebra.v_index(s))] = algebra.sparse_coordinates(value)

    s_sharp, u_sharp = sharp(data.T0), sharp(data.U)
    quarter = _constant(data, 1, 4)
    for r in range(1, 4):
        structure = frame.I(r)
        torsion = (structure @ s_sharp - s_sharp @ structure) * quarter + structure @ u_sharp
        for a in range(frame.dim):
            image = (torsion + alpha[r - 1]) @ frame.basis_vector(a)
            element = identify(GradedTensor(D, image), frame)
            values[(algebra.v_index(r), algebra.d_index(a))] = algebra.sparse_coordinates(element)

    for a, b in itertools.combinations(range(frame.dim), 2):
        value = data.R[a, b] + sum(alpha[r - 1] * (2 * frame.I(r)[b, a]) for r in range(1, 4))
        element = identify(GradedTensor(END0, value), frame)
        values[(algebra.d_index(a), algebra.d_index(b))] = algebra.sparse_coordinates(element)
    return Cochain(algebra, 2, values)


def _codiff_on_V_coordinates(alpha: list, data: QCPointData) -> list[dict]:
    algebra = data.frame.algebra
    psi = codifferential(assemble_K(alpha, data))
    return [psi.evaluate((algebra.v_index(r),)) for r in range(1, 4)]


def codiff_K2_on_V(alpha: list, data: QCPointData) -> list:
    """
    (∂*K^α(2))(ξ_r) computed with the codifferential on the assembled cochain
    :return: Three endomorphisms of D
    """
    return [g0_coordinates_to_endomorphism(value, data.frame) for value in _codiff_on_V_coordinates(alpha, data)]


def _flatten(matrices: list) -> list:
    return [v for m in matrices for v in np.asarray(m).flat]


def solve_alpha_numeric(data: QCPointData) -> AlphaSolution:
    """
    Solve (∂*K^α(2))(ξ) = 0 for α in the span of f I_r and c (I_r T0♯ + T0♯ I_r), with β = 0
    :raises SingularSystemError: if f is not determined
    :raises InconsistentSystemError: if no α in the ansatz solves the equation
    """
    backend = data.backend
    zero, one = backend.zero, backend.one
    base = _flatten(codiff_K2_on_V(alpha_ansatz(data, zero, zero), data))
    f_column = [v - b for v, b in zip(_flatten(codiff_K2_on_V(alpha_ansatz(data, one, zero), data)), base)]
    c_column = [v - b for v, b in zip(_flatten(codiff_K2_on_V(alpha_ansatz(data, zero, one), data)), base)]
    columns = [f_column] if backend.all_zero(c_column) else [f_column, c_column]
    matrix = {}
    for row in range(len(base)):
        for column, values in enumerate(columns):
            if not backend.is_zero(values[row]):
                matrix.setdefault(row, {})[column] = values[row]
    solution, rank = backend.solve_particular(matrix, (len(base), len(columns)), [-v for v in base])
    if rank < len(columns):
        raise SingularSystemError("The homogeneity-two equation does not determine α")
    f = solution[0]
    c_determined = len(columns) == 2
    c = solution[1] if c_determined else _constant(data, 1, 4)
    alpha = alpha_ansatz(data, f, c)
    residual = backend.max_abs(_flatten(codiff_K2_on_V(alpha, data)))
    logger.debug(f"Solved for α: f={f}, c={c} (determined: {c_determined}), residual {residual}")
    return AlphaSolution(f, c, alpha, residual, c_determined)


def joint_alpha_beta_diagnostic(data: QCPointData) -> JointSolution:
    """
    Solve (∂*K^α(2))(ξ) + (∂β)(ξ) = 0 over all α: V -> g0 and β in g2, and report the
    dimension of the solution space and whether (α_qc, 0) is a solution
    """
    frame, backend = data.frame, data.backend
    algebra = frame.algebra
    g0 = list(algebra.indices(0))
    zero_alpha = [frame.zeros(END0) for _ in range(3)]
    base = _codiff_on_V_coordinates(zero_alpha, data)

    def flatten(values: list[dict]) -> list:
        return [values[r].get(k, backend.zero) for r in range(3) for k in g0]

    base_vector = flatten(base)
    columns = []
    for r in range(3):
        for endomorphism in frame.g0_endomorphisms:
            alpha = list(zero_alpha)
            alpha[r] = endomorphism
            columns.append([v - b for v, b in zip(flatten(_codiff_on_V_coordinates(alpha, data)), base_vector)])
    for s in range(1, 4):
        beta = Cochain(algebra, 0, {(): {algebra.vstar_index(s): backend.one}})
        d_beta = differential(beta)
        columns.append(flatten([d_beta.evaluate((algebra.v_index(r),)) for r in range(1, 4)]))

    matrix = {}
    for column, values in enumerate(columns):
        for row, value in enumerate(values):
            if not backend.is_zero(value):
                matrix.setdefault(row, {})[column] = value
    shape = (len(base_vector), len(columns))
    rank = backend.rank(matrix, shape)
    contains = backend.all_zero(_flatten(codiff_K2_on_V(alpha_qc(data), data)))
    return JointSolution(len(columns), rank, len(columns) - rank, contains)


# Rho-tensor

def codiff_Kqc2_on_D(data: QCPointData) -> np.ndarray:
    """
    (∂*K^qc(2))(u)(v) computed with the codifferential, as a bilinear form on D
    """
    return cochain_to_form(codifferential(assemble_K(alpha_qc(data), data)))


def codiff_Kqc2_on_D_closed_form(data: QCPointData) -> tuple[np.ndarray, np.ndarray]:
    """
    The two closed forms Ric + 2T0 + 6U and 2(n+2) T0 + 4(n+4) U + (scal/4n) g
    """
    n, frame = data.n, data.frame
    ric = ricci_family(data).ric
    first = ric + data.T0 * 2 + data.U * 6
    second = data.T0 * (2 * (n + 2)) + data.U * (4 * (n + 4)) + frame.identity * (data.scal / (4 * n))
    return first, second


def l_tensor(data: QCPointData) -> np.ndarray:
    """
    L = 1/2 T0 + U + scal/(32n(n+2)) g
    """
    n = data.n
    return data.T0 * _constant(data, 1, 2) + data.U + data.frame.identity * (data.scal / (32 * n * (n + 2)))


def rho_tensor(data: QCPointData) -> np.ndarray:
    """
    Homogeneity-two Rho-tensor P(u)(v), equal to -L
    """
    return -l_tensor(data)


def rho_tensor_via_box(data: QCPointData, complex_: KostantComplex | None = None) -> np.ndarray:
    """
    P = -□⁻¹(∂*K^qc(2)) on C^1_2, read off as a bilinear form on D
    """
    complex_ = complex_ if complex_ is not None else KostantComplex(data.frame.algebra)
    phi = codifferential(assemble_K(alpha_qc(data), data))
    return -cochain_to_form(complex_.invert_box_on_C12(phi))


# Obstruction tensor

def kulkarni_nomizu(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    (A ⋆ B)(u,v,w,z) = A(u,w)B(v,z) + A(v,z)B(u,w) - A(v,w)B(u,z) - A(u,z)B(v,w)
    """
    product = np.multiply.outer(a, b).transpose(0, 2, 1, 3)
    return (product + product.transpose(1, 0, 3, 2)
            - product.transpose(1, 0, 2, 3) - product.transpose(0, 1, 3, 2))


def _omega(data: QCPointData, s: int) -> np.ndarray:
    """
    ω_s(u, v) = g(I_s u, v)
    """
    return data.frame.I(s).T.copy()


def _twisted(form: np.ndarray, s: int, data: QCPointData) -> np.ndarray:
    """
    A_s(u, v) = g(I_s A♯ u, v) = -A(u, I_s v)
    """
    return -(form @ data.frame.I(s))


def wqc2_route_a(data: QCPointData) -> np.ndarray:
    """
    W(u,v,w,z) = R(u,v,w,z) + (g ⋆ L) + sum_s (ω_s ⋆ L_s) + sum_s (L_s(u,v) - L_s(v,u)) ω_s(w,z)
                 - 1/2 sum_s ω_s(u,v) (T0(w, I_s z) - T0(I_s w, z)) + scal/(16n(n+2)) sum_s ω_s(u,v) ω_s(w,z)
    """
    n, frame = data.n, data.frame
    L = l_tensor(data)
    result = data.curvature_tensor() + kulkarni_nomizu(frame.identity, L)
    for s in range(1, 4):
        omega = _omega(data, s)
        twisted = _twisted(L, s, data)
        structure = frame.I(s)
        torsion = data.T0 @ structure - structure.T @ data.T0
        result = result + kulkarni_nomizu(omega, twisted)
        result = result + np.multiply.outer(twisted - twisted.T, omega)
        result = result - np.multiply.outer(omega, torsion) * _constant(data, 1, 2)
        result = result + np.multiply.outer(omega, omega) * (data.scal / (16 * n * (n + 2)))
    return result


def wqc2_route_b(data: QCPointData) -> np.ndarray:
    """
    W(u, v) = K^qc(2)(u, v) + {P(u), v} - {P(v), u} in End0(D), lowered to g(W(u, v) w, z)
    """
    frame = data.frame
    alpha = alpha_qc(data)
    rho = rho_tensor(data)
    dim = frame.dim
    result = data.backend.zeros((dim,) * 4)
    for a, b in itertools.combinations(range(dim), 2):
        value = data.R[a, b] + sum(alpha[r - 1] * (2 * frame.I(r)[b, a]) for r in range(1, 4))
        for first, second, sign in ((a, b, 1), (b, a, -1)):
            covector = GradedTensor(DSTAR, rho[first].copy())
            vector = GradedTensor(D, frame.basis_vector(second))
            value = value + algebraic_bracket(covector, vector, frame).value * sign
        result[a, b] = value.T
        result[b, a] = -value.T
    return result


def wqc2(data: QCPointData) -> WqcResult:
    """
    W^qc(2) by both routes, with the pair antisymmetries checked on the closed form
    """
    backend = data.backend
    route_a, route_b = wqc2_route_a(data), wqc2_route_b(data)
    antisymmetric = (backend.allclose(route_a, -route_a.transpose(1, 0, 2, 3))
                     and backend.allclose(route_a, -route_a.transpose(0, 1, 3, 2)))
    return WqcResult(route_a, route_b, backend.allclose(route_a, route_b), antisymmetric, backend.max_abs(route_a))


def l_identity_check(data: QCPointData) -> bool:
    """
    L(w, I_r z) - L(I_r w, z) + L(I_s w, I_t z) - L(I_t w, I_s z) = T0(w, I_r z) - T0(I_r w, z)
    for every cyclic (r, s, t)
    """
    frame, backend = data.frame, data.backend
    L = l_tensor(data)
    for r, s, t in CYCLIC:
        ir, is_, it = frame.I(r), frame.I(s), frame.I(t)
        left = L @ ir - ir.T @ L + is_.T @ L @ it - it.T @ L @ is_
        right = data.T0 @ ir - ir.T @ data.T0
        if not backend.allclose(left, right):
            return False
    return True
