"""
Left-invariant qc structures on Lie groups given by structure constants, with a linear solver
for the Biquard connection, its torsion and curvature, and the flat-model pipeline on the
quaternionic Heisenberg group.

Basis order of the Lie algebra: ξ_1, ξ_2, ξ_3, e_1, ..., e_4n. Connection coefficients are
∇_{X_i} X_j = sum_k Γ[i, j, k] X_k and brackets [X_i, X_j] = sum_k c[i, j, k] X_k.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from backends import ArithmeticBackend, get_backend
from errors import BiquardSolveError, InconsistentSystemError, SingularSystemError
from frame_algebra import AdaptedFrame, traces_and_projections
from qc_data import QCPointData, decompose_ricci, ricci_tensor, validate
from weyl import wqc2

logger = logging.getLogger(__name__)

REEB = 3
FLATNESS_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class LeftInvariantQCData:
    n: int
    frame: AdaptedFrame
    constants: np.ndarray

    @property
    def backend(self) -> ArithmeticBackend:
        return self.frame.backend

    @property
    def size(self) -> int:
        return REEB + self.frame.dim

    def d(self, a: int) -> int:
        """Basis index of e_a, a counted from 0"""
        return REEB + a


@dataclass(frozen=True, eq=False)
class ConnectionCoefficients:
    gamma: np.ndarray

    def restricted(self, direction: int) -> np.ndarray:
        """
        The endomorphism ∇_{X_direction} of D as a matrix acting on columns
        """
        return self.gamma[direction, REEB:, REEB:].T


@dataclass(frozen=True, eq=False)
class CurvatureAndTorsion:
    curvature: np.ndarray
    torsion: np.ndarray
    reeb_torsion: tuple
    T0: np.ndarray
    U: np.ndarray
    scal: object
    ric: np.ndarray
    data: QCPointData


@dataclass
class FlatnessReport:
    n: int
    conditions: dict = field(default_factory=dict)
    homogeneity_one: bool = False
    valid_data: bool = False
    max_wqc2: float = 0.0
    routes_agree: bool = False
    data: QCPointData | None = None

    @property
    def passed(self) -> bool:
        return (all(self.conditions.values()) and self.homogeneity_one and self.valid_data
                and self.routes_agree and self.max_wqc2 <= FLATNESS_TOLERANCE)


def _levi_civita(t: int, s: int, u: int) -> int:
    if len({t, s, u}) < 3:
        return 0
    return 1 if (t, s, u) in ((1, 2, 3), (2, 3, 1), (3, 1, 2)) else -1


def heisenberg_structure(n: int, backend: ArithmeticBackend | None = None) -> LeftInvariantQCData:
    """
    Quaternionic Heisenberg algebra: [e_a, e_b] = -2 sum_s g(I_s e_a, e_b) ξ_s, ξ_s central
    """
    backend = backend if backend is not None else get_backend("exact")
    frame = AdaptedFrame(n, backend)
    size = REEB + frame.dim
    constants = backend.zeros((size,) * 3)
    for a, b in itertools.product(range(frame.dim), repeat=2):
        for s in range(1, 4):
            constants[REEB + a, REEB + b, s - 1] = frame.I(s)[b, a] * -2
    return LeftInvariantQCData(n, frame, constants)


def _jacobiator(c: np.ndarray) -> np.ndarray:
    product = np.tensordot(c, c, axes=([2], [0]))
    return product + product.transpose(2, 0, 1, 3) + product.transpose(1, 2, 0, 3)


def validate_structure(data: LeftInvariantQCData) -> list[str]:
    """
    Names of the violated structure conditions: antisymmetry, Jacobi identity, regularity of
    the D-brackets (their V-part is -2 sum_s g(I_s u, v) ξ_s)
    """
    backend, frame, c = data.backend, data.frame, data.constants
    problems = []
    if not backend.allclose(c, -c.transpose(1, 0, 2)):
        problems.append("antisymmetry")
    if not backend.all_zero(_jacobiator(c)):
        problems.append("jacobi")
    for s in range(1, 4):
        expected = frame.I(s).T * -2
        if not backend.allclose(c[REEB:, REEB:, s - 1], expected):
            problems.append("regularity")
            break
    return problems


def _unknown_layout(data: LeftInvariantQCData) -> tuple[list, int]:
    """
    Per direction: 3 sp(1) coefficients, the sp(n) coefficients, 9 coefficients of ∇ξ
    """
    spn = data.frame.g0_endomorphisms[4:]
    return spn, 3 + len(spn) + 9


def solve_biquard(data: LeftInvariantQCData) -> ConnectionCoefficients:
    """
    Solve for the Biquard connection of left-invariant qc data: ∇ preserves V + D, g and Q on D,
    T(u, v) = -[u, v]_V on D, the connection on V is induced from its sp(1)-part, ∇_u ξ = [u, ξ]_V,
    and T_ξ on D is orthogonal to sp(1) + sp(n)
    :raises BiquardSolveError: if the data does not admit a unique Biquard connection
    """
    problems = validate_structure(data)
    if problems:
        raise BiquardSolveError(f"Structure constants violate: {', '.join(problems)}")
    backend, frame, c = data.backend, data.frame, data.constants
    spn, block = _unknown_layout(data)
    structures = [frame.I(t) for t in range(1, 4)]
    h = structures + list(spn)

    def rho(i, t):
        return i * block + t - 1

    def phi(i, k):
        return i * block + 3 + k

    def nabla_xi(i, s, u):
        return i * block + 3 + len(spn) + 3 * (s - 1) + (u - 1)

    def gamma_d(i, a, target) -> dict:
        """Γ[i, e_a, e_target] as {unknown: coefficient}"""
        row = {rho(i, t): structures[t - 1][target, a] for t in range(1, 4)}
        row.update({phi(i, k): m[target, a] for k, m in enumerate(spn)})
        return row

    rows, rhs = [], []

    def equation(coefficients: dict, value):
        rows.append({k: v for k, v in coefficients.items() if not backend.is_zero(v)})
        rhs.append(value)

    zero = backend.zero
    for i in range(data.size):
        for s, u in itertools.product(range(1, 4), repeat=2):
            coefficients = {nabla_xi(i, s, u): backend.one}
            for t in range(1, 4):
                if _levi_civita(t, s, u):
                    coefficients[rho(i, t)] = backend.scalar(-2 * _levi_civita(t, s, u))
            equation(coefficients, zero)
    for a in range(frame.dim):
        for s, u in itertools.product(range(1, 4), repeat=2):
            equation({nabla_xi(data.d(a), s, u): backend.one}, c[data.d(a), s - 1, u - 1])
    for a, b in itertools.combinations(range(frame.dim), 2):
        for target in range(frame.dim):
            coefficients = gamma_d(data.d(a), b, target)
            for k, v in gamma_d(data.d(b), a, target).items():
                coefficients[k] = coefficients.get(k, 0) - v
            equation(coefficients, c[data.d(a), data.d(b), data.d(target)])
    for s in range(1, 4):
        reeb_part = c[s - 1, REEB:, REEB:].T
        for m in h:
            coefficients = {}
            for a, target in itertools.product(range(frame.dim), repeat=2):
                if backend.is_zero(m[target, a]):
                    continue
                for k, v in gamma_d(s - 1, a, target).items():
                    coefficients[k] = coefficients.get(k, 0) + v * m[target, a]
            equation(coefficients, np.sum(m * reeb_part))

    shape = (len(rows), data.size * block)
    matrix = {row: entries for row, entries in enumerate(rows) if entries}
    try:
        solution = backend.solve(matrix, shape, rhs)
    except SingularSystemError as e:
        raise BiquardSolveError(f"The Biquard connection is not unique: {e}")
    except InconsistentSystemError as e:
        raise BiquardSolveError(f"No connection satisfies the Biquard conditions: {e}")
    logger.debug(f"Solved the Biquard system of shape {shape}")

    gamma = backend.zeros((data.size,) * 3)
    for i in range(data.size):
        endomorphism = sum(structures[t - 1] * solution[rho(i, t)] for t in range(1, 4))
        endomorphism = endomorphism + sum(m * solution[phi(i, k)] for k, m in enumerate(spn))
        gamma[i, REEB:, REEB:] = endomorphism.T
        for s, u in itertools.product(range(1, 4), repeat=2):
            gamma[i, s - 1, u - 1] = solution[nabla_xi(i, s, u)]
    return ConnectionCoefficients(gamma)


def torsion_table(connection: ConnectionCoefficients, data: LeftInvariantQCData) -> np.ndarray:
    """
    T(X_i, X_j) = ∇_i X_j - ∇_j X_i - [X_i, X_j]
    """
    gamma = connection.gamma
    return gamma - gamma.transpose(1, 0, 2) - data.constants


def curvature_table(connection: ConnectionCoefficients, data: LeftInvariantQCData) -> np.ndarray:
    """
    R(X_i, X_j) X_k = sum_l R[i, j, k, l] X_l for left-invariant fields
    """
    gamma = connection.gamma
    second = np.tensordot(gamma, gamma, axes=([2], [1])).transpose(2, 0, 1, 3)
    return second - second.transpose(1, 0, 2, 3) - np.tensordot(data.constants, gamma, axes=([2], [0]))


def curvature_and_torsion(connection: ConnectionCoefficients, data: LeftInvariantQCData) -> CurvatureAndTorsion:
    """
    Curvature and torsion of the connection, the torsion split T_ξs = T0_ξs + I_s U♯ and the
    pointwise data on D
    """
    frame = data.frame
    curvature = curvature_table(connection, data)
    torsion = torsion_table(connection, data)
    reeb_torsion = tuple(torsion[s - 1, REEB:, REEB:].T for s in range(1, 4))
    t0_sharp = frame.zeros("End0")
    u_sharp = frame.zeros("End0")
    for s in range(1, 4):
        symmetric = (reeb_torsion[s - 1] + reeb_torsion[s - 1].T) / 2
        antisymmetric = reeb_torsion[s - 1] - symmetric
        t0_sharp = t0_sharp + symmetric @ frame.I(s)
        u_sharp = u_sharp - frame.I(s) @ antisymmetric / 3
    dim = frame.dim
    R = data.backend.zeros((dim,) * 4)
    for a, b in itertools.product(range(dim), repeat=2):
        R[a, b] = curvature[data.d(a), data.d(b), REEB:, REEB:].T
    ric = ricci_tensor(R)
    _, _, scal = decompose_ricci(ric, frame)
    point = QCPointData(data.n, frame, t0_sharp.T.copy(), u_sharp.T.copy(), scal, R)
    return CurvatureAndTorsion(curvature, torsion, reeb_torsion, point.T0, point.U, scal, ric, point)


def verify_biquard_conditions(connection: ConnectionCoefficients, data: LeftInvariantQCData) -> dict:
    """
    Re-check every defining condition of the Biquard connection on given coefficients
    :return: {condition name: bool}
    """
    backend, frame, c = data.backend, data.frame, data.constants
    gamma = connection.gamma
    torsion = torsion_table(connection, data)
    dim = frame.dim
    results = {}

    splitting = backend.all_zero(gamma[:, :REEB, REEB:]) and backend.all_zero(gamma[:, REEB:, :REEB])
    metric = all(backend.allclose(connection.restricted(i), -connection.restricted(i).T) for i in range(data.size))
    quaternionic = True
    induced = True
    for i in range(data.size):
        endomorphism = connection.restricted(i)
        for s in range(1, 4):
            commutator = endomorphism @ frame.I(s) - frame.I(s) @ endomorphism
            coefficients = [np.sum(commutator * frame.I(u)) / dim for u in range(1, 4)]
            residual = commutator - sum(frame.I(u) * coefficients[u - 1] for u in range(1, 4))
            quaternionic = quaternionic and backend.all_zero(residual)
            induced = induced and all(backend.is_zero(gamma[i, s - 1, u - 1] - coefficients[u - 1])
                                      for u in range(1, 4))
    results["splitting"] = splitting
    results["metric-and-Q"] = metric and quaternionic
    results["torsion-on-D"] = (backend.all_zero(torsion[REEB:, REEB:, REEB:])
                               and backend.allclose(torsion[REEB:, REEB:, :REEB], -c[REEB:, REEB:, :REEB]))
    results["induced-V-connection"] = induced
    results["reeb-derivative"] = backend.allclose(gamma[REEB:, :REEB, :REEB], c[REEB:, :REEB, :REEB])
    orthogonal = True
    for s in range(1, 4):
        decomposition = traces_and_projections(torsion[s - 1, REEB:, REEB:].T, frame)
        orthogonal = orthogonal and backend.all_zero(decomposition.sp1) and backend.all_zero(decomposition.spn)
    results["reeb-torsion-orthogonal"] = orthogonal
    return results


def homogeneity_one_check(connection: ConnectionCoefficients, data: LeftInvariantQCData) -> bool:
    """
    K(ξ, u) = -∇_u ξ - [ξ, u]_V and K(u, v) = ∇_u v - ∇_v u - [u, v]_D vanish on all basis pairs
    """
    backend, c, gamma = data.backend, data.constants, connection.gamma
    reeb_part = -gamma[REEB:, :REEB, :REEB] - c[:REEB, REEB:, :REEB].transpose(1, 0, 2)
    d_part = gamma[REEB:, REEB:, REEB:] - gamma[REEB:, REEB:, REEB:].transpose(1, 0, 2) - c[REEB:, REEB:, REEB:]
    return backend.all_zero(reeb_part) and backend.all_zero(d_part)


def flatness_pipeline(n: int, backend: ArithmeticBackend | None = None) -> FlatnessReport:
    """
    Heisenberg structure, Biquard connection, curvature and W^qc(2) on the flat model
    """
    structure = heisenberg_structure(n, backend)
    connection = solve_biquard(structure)
    report = FlatnessReport(n)
    report.conditions = verify_biquard_conditions(connection, structure)
    report.homogeneity_one = homogeneity_one_check(connection, structure)
    exported = curvature_and_torsion(connection, structure)
    validate(exported.data)
    report.valid_data = True
    report.data = exported.data
    result = wqc2(exported.data)
    report.routes_agree = result.routes_agree
    report.max_wqc2 = result.max_abs
    logger.info(f"Flatness pipeline for n={n}: max |W| = {report.max_wqc2}")
    return report
